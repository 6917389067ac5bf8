use lft_core::{
    build_field, ft_trace, gauss_sum, hyp_sum, hyp_sum_table, hyp_trace_recursive, kloosterman, mult_char, CharEval,
    FieldElem, HypSpec, NumericError, TameChar, TraceTable,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eval(p: u64, k: usize) -> CharEval {
    CharEval::new(&build_field(p, k).unwrap()).unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn zeta(n: u64, k: u64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

#[test]
fn additive_character_table() {
    for (p, k) in [(3, 1), (7, 1), (3, 2), (5, 2), (2, 3)] {
        let e = eval(p, k);
        let f = e.field().clone();
        let total: Complex64 = f.elements().map(|x| e.psi(x, 1)).sum();
        assert!(total.norm() < 1e-9);
        for x in f.elements() {
            assert!((e.psi(x, 1).norm() - 1.0).abs() < 1e-12);
            for y in f.elements().step_by(3) {
                assert!(close(e.psi(f.add(x, y), 1), e.psi(x, 1) * e.psi(y, 1), 1e-12));
            }
        }
    }
}

#[test]
fn multiplicative_characters() {
    let e = eval(7, 1);
    let f = e.field().clone();
    assert!(close(
        mult_char(&e, TameChar::chi2(), f.from_int(3)).unwrap(),
        Complex64::new(-1.0, 0.0),
        1e-12
    ));
    assert!(close(
        mult_char(&e, TameChar::TRIVIAL, f.from_int(5)).unwrap(),
        Complex64::new(1.0, 0.0),
        1e-12
    ));
    assert_eq!(
        mult_char(&e, TameChar::chi2(), f.zero()).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert!(matches!(
        mult_char(&e, TameChar::new(4, 1), f.one()),
        Err(NumericError::OrderNotAvailable { .. })
    ));
    // quadratic residues mod 7 by squaring
    let squares: Vec<u64> = (1..7).map(|x| x * x % 7).collect();
    for x in 1..7i64 {
        let expect = if squares.contains(&(x as u64)) { 1.0 } else { -1.0 };
        assert!(close(
            mult_char(&e, TameChar::chi2(), f.from_int(x)).unwrap(),
            Complex64::new(expect, 0.0),
            1e-12
        ));
    }
    let e = eval(13, 1);
    let f = e.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let chi = TameChar::new(12, rng.gen_range(0..12));
        let (x, y) = (f.from_int(rng.gen_range(1..13)), f.from_int(rng.gen_range(1..13)));
        let lhs = mult_char(&e, chi, f.mul(x, y)).unwrap();
        assert!(close(
            lhs,
            mult_char(&e, chi, x).unwrap() * mult_char(&e, chi, y).unwrap(),
            1e-12
        ));
    }
    for a in 1..12 {
        let s: Complex64 = f
            .elements()
            .map(|x| mult_char(&e, TameChar::new(12, a), x).unwrap())
            .sum();
        assert!(s.norm() < 1e-9);
    }
}

#[test]
fn gauss_sums() {
    let e = eval(3, 1);
    let g = gauss_sum(&e, TameChar::chi2()).unwrap();
    assert!(close(g, zeta(3, 1) - zeta(3, 2), 1e-12));
    assert!(close(g, Complex64::new(0.0, 3f64.sqrt()), 1e-12));
    for (p, k) in [(7, 1), (11, 1), (13, 1), (3, 2), (5, 2), (7, 2)] {
        let e = eval(p, k);
        let q = e.q();
        for order in (2..=q - 1).filter(|d| (q - 1).is_multiple_of(*d)).take(4) {
            let g = gauss_sum(&e, TameChar::new(order, 1)).unwrap();
            assert!((g.norm() - (q as f64).sqrt()).abs() < 1e-9);
            assert!(((g * g.conj()).re / q as f64 - 1.0).abs() < 1e-9);
        }
    }
    assert_eq!(gauss_sum(&e, TameChar::TRIVIAL), Err(NumericError::TrivialCharacter));
}

#[test]
fn kloosterman_examples() {
    let e = eval(3, 1);
    let f = e.field().clone();
    let k2 = kloosterman(&e, f.one(), &[TameChar::TRIVIAL; 2]).unwrap();
    assert!(close(k2, zeta(3, 2) + zeta(3, 1), 1e-12));
    assert!(close(k2, Complex64::new(-1.0, 0.0), 1e-12));
    let e = eval(7, 1);
    let f = e.field().clone();
    let lam = TameChar::new(3, 1);
    for t in 1..7 {
        let t = f.from_int(t);
        let k1 = kloosterman(&e, t, &[lam]).unwrap();
        assert!(close(k1, e.psi(t, 1) * mult_char(&e, lam, t).unwrap(), 1e-12));
        let k2 = kloosterman(&e, t, &[TameChar::TRIVIAL; 2]).unwrap();
        assert!(k2.im.abs() < 1e-9);
        let k3 = kloosterman(&e, t, &[TameChar::TRIVIAL; 3]).unwrap();
        assert!(close(
            k3.conj(),
            kloosterman(&e, f.neg(t), &[TameChar::TRIVIAL; 3]).unwrap(),
            1e-9
        ));
        assert!(k3.norm() <= 3.0 * 7.0 + 1e-9);
    }
    assert_eq!(kloosterman(&e, f.zero(), &[lam]), Err(NumericError::ZeroArgument));
}

#[test]
fn hyp_sum_small_cases() {
    // n = m = 1 over GF(3): x = t·y with y ∈ {1, 2}
    let e = eval(3, 1);
    let f = e.field().clone();
    let spec = HypSpec::new(vec![TameChar::TRIVIAL], vec![TameChar::chi2()]);
    let t = f.one();
    let direct: Complex64 = (1..3)
        .map(|y| {
            let y = f.from_int(y);
            let x = f.mul(t, y);
            e.psi(f.sub(x, y), 1) * mult_char(&e, TameChar::chi2(), f.inv(y).unwrap()).unwrap()
        })
        .sum();
    assert!(close(hyp_sum(&e, t, &spec).unwrap(), direct, 1e-12));
    assert_eq!(hyp_sum(&e, t, &HypSpec::new(vec![], vec![])), Err(NumericError::Empty));
    let m0 = HypSpec::new(vec![TameChar::TRIVIAL; 2], vec![]);
    assert_eq!(
        hyp_sum(&e, t, &m0).unwrap(),
        kloosterman(&e, t, &[TameChar::TRIVIAL; 2]).unwrap()
    );
}

#[test]
fn convolution_table_matches_enumeration() {
    let e = eval(7, 1);
    let f = e.field().clone();
    let c3 = TameChar::new(3, 1);
    let specs = [
        HypSpec::new(vec![c3], vec![]),
        HypSpec::new(vec![], vec![c3, TameChar::chi2()]),
        HypSpec::new(vec![TameChar::TRIVIAL, c3], vec![TameChar::chi2()]),
        HypSpec::new(vec![c3.inv()], vec![TameChar::TRIVIAL, TameChar::new(6, 1)]),
        HypSpec::new(vec![TameChar::TRIVIAL; 2], vec![TameChar::chi2(); 2]),
    ];
    for spec in &specs {
        let table = hyp_sum_table(&e, spec).unwrap();
        assert_eq!(table.get(f.zero()), Complex64::new(0.0, 0.0));
        for t in f.elements().skip(1) {
            assert!(close(table.get(t), hyp_sum(&e, t, spec).unwrap(), 1e-9), "{spec:?}");
        }
    }
}

#[test]
fn extension_sums() {
    let e = eval(3, 1);
    let e2 = e.extension(2).unwrap();
    assert_eq!(e2.q(), 9);
    let t = e2.field().one();
    let k = kloosterman(&e2, t, &[TameChar::TRIVIAL; 2]).unwrap();
    assert!(k.im.abs() < 1e-9 && k.norm() <= 2.0 * 3.0 + 1e-9);
}

#[test]
fn fourier_transform_laws() {
    let e = eval(7, 1);
    let f = e.field().clone();
    let delta = TraceTable::from_fn(&e, |x| {
        if x.is_zero() {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let ft = ft_trace(&e, &delta).unwrap();
    assert!(ft.values.iter().all(|v| close(*v, Complex64::new(-1.0, 0.0), 1e-12)));
    let a = f.from_int(3);
    let wave = TraceTable::from_fn(&e, |x| e.psi(f.mul(a, x), 1));
    let ft = ft_trace(&e, &wave).unwrap();
    for s in f.elements() {
        let expect = if s == f.neg(a) { -(7.0) } else { 0.0 };
        assert!(close(ft.get(s), Complex64::new(expect, 0.0), 1e-9));
    }
    for (p, k) in [(7, 1), (3, 2), (5, 2)] {
        let e = eval(p, k);
        let f = e.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        let g = TraceTable::from_fn(&e, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let twice = ft_trace(&e, &ft_trace(&e, &g).unwrap()).unwrap();
        let expect = TraceTable::from_fn(&e, |x| g.get(f.neg(x)) * e.q() as f64);
        assert!(twice.max_rel_diff(&expect) < 1e-9);
    }
}

#[test]
fn recursive_trace_base_and_small_specs() {
    let e = eval(7, 1);
    let f = e.field().clone();
    let lam = TameChar::new(6, 1);
    let base = hyp_trace_recursive(&e, &HypSpec::new(vec![lam], vec![])).unwrap();
    for t in f.elements().skip(1) {
        assert!(close(base.get(t), -e.psi(t, 1) * mult_char(&e, lam, t).unwrap(), 1e-12));
    }
    for spec in [
        HypSpec::new(vec![TameChar::TRIVIAL; 2], vec![]),
        HypSpec::new(vec![TameChar::TRIVIAL], vec![TameChar::chi2()]),
        HypSpec::new(vec![], vec![TameChar::new(3, 2)]),
        HypSpec::new(
            vec![lam, TameChar::chi2()],
            vec![TameChar::new(3, 1), TameChar::TRIVIAL],
        ),
    ] {
        let rec = hyp_trace_recursive(&e, &spec).unwrap();
        let sign = if (spec.n() + spec.m()) % 2 == 0 { 1.0 } else { -1.0 };
        for t in f.elements().skip(1) {
            assert!(
                close(rec.get(t), hyp_sum(&e, t, &spec).unwrap() * sign, 1e-6),
                "{spec:?} at {t:?}"
            );
        }
        assert_eq!(rec.get(FieldElem::ZERO), Complex64::new(0.0, 0.0));
    }
}
