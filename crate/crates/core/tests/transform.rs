use lft_core::transform::{check_hypotheses, leading_closed_form, transform_summand};
use lft_core::{
    build_field, canonicalize, legendre, legendre_branch, legendre_inverse, lft, rank_law_check, stabilizer, Field,
    FieldElem, LaurentSeries, LocalSheaf, Point, Summand, TameChar, TransformError, TransformKind, WildPart,
};
use proptest::prelude::*;

fn wild(f: &Field, terms: &[(i64, i64)]) -> WildPart {
    WildPart::new(
        f,
        terms
            .iter()
            .map(|&(e, c)| (e, f.from_int(c)))
            .filter(|t| !t.1.is_zero())
            .collect(),
    )
    .unwrap()
}

fn polar(s: &LaurentSeries) -> Vec<(i64, FieldElem)> {
    s.terms().filter(|t| t.0 < 0).collect()
}

/// Re-checks both equations of the system in the source coordinate using only `lambda`.
fn check_system(
    f: &Field,
    alpha: &WildPart,
    r: u64,
    kind: TransformKind,
    lambda: &LaurentSeries,
    beta: &WildPart,
    e: u64,
) {
    let a = alpha.to_series(f);
    let u = LaurentSeries::var(f);
    let le = lambda.pow(e as i64).unwrap();
    let t_r = match kind {
        TransformKind::ZeroToInf => u.pow(r as i64).unwrap(),
        _ => u.pow(-(r as i64)).unwrap(),
    };
    let rr = f.from_int(r as i64);
    let deriv = match kind {
        TransformKind::ZeroToInf => &a.derive() + &(&u.pow(r as i64 - 1).unwrap() * &le).scale(rr),
        _ => {
            &(&a.derive() * &u.pow(2).unwrap()).scale(f.from_int(-1)) + &(&u.pow(1 - r as i64).unwrap() * &le).scale(rr)
        }
    };
    assert!(
        deriv.terms().next().is_none(),
        "derivative equation fails: {:?}",
        deriv.terms().collect::<Vec<_>>()
    );
    let target = match kind.target() {
        Point::Infinity => lambda.invert().unwrap(),
        Point::Zero => lambda.clone(),
    };
    let lhs = beta.to_series(f).compose(&target).unwrap();
    let rhs = &a + &(&t_r * &le);
    assert_eq!(polar(&lhs), polar(&rhs));
}

#[test]
fn zero_to_inf_simple_pole() {
    let f = build_field(7, 1).unwrap();
    let sol = legendre(&f, &wild(&f, &[(-1, 1)]), 1, TransformKind::ZeroToInf, None).unwrap();
    assert_eq!(sol.beta, wild(&f, &[(-1, 2)]));
    assert_eq!(sol.exponent_out, 2);
    for a in 1..7 {
        let alpha = wild(&f, &[(-1, a)]);
        let sol = legendre(&f, &alpha, 1, TransformKind::ZeroToInf, None);
        match f.nth_root(f.from_int(a), 2) {
            Ok(root) => assert_eq!(
                sol.unwrap().beta,
                WildPart::monomial(&f, f.mul(f.from_int(2), root), -1).unwrap()
            ),
            Err(_) => assert!(sol.unwrap_err().needs_extension()),
        }
    }
}

#[test]
fn inf_to_inf_quadratic() {
    let f = build_field(7, 1).unwrap();
    let alpha = wild(&f, &[(-2, 1)]);
    let sol = legendre(&f, &alpha, 1, TransformKind::InfToInf, None).unwrap();
    assert_eq!(sol.beta, wild(&f, &[(-2, 5)]));
    assert_eq!(sol.exponent_out, 1);
    check_system(&f, &alpha, 1, TransformKind::InfToInf, &sol.lambda, &sol.beta, 1);
}

#[test]
fn inf_to_zero_linear() {
    let f = build_field(7, 1).unwrap();
    let alpha = wild(&f, &[(-1, 1)]);
    let sol = legendre(&f, &alpha, 2, TransformKind::InfToZero, None).unwrap();
    assert_eq!(sol.beta, wild(&f, &[(-1, 5)]));
    check_system(&f, &alpha, 2, TransformKind::InfToZero, &sol.lambda, &sol.beta, 1);
}

#[test]
fn kloosterman_shaped_block() {
    for (p, n) in [(7u64, 3i64), (11, 4), (13, 5)] {
        let f = build_field(p, lft_core::suggest_degree(p, &[n as u64])).unwrap();
        let tau = TameChar::new(n as u64, 1);
        let x = Summand::new(&f, (n - 1) as u64, wild(&f, &[(-1, n - 1)]), tau, 1).unwrap();
        let out = lft(
            &f,
            &LocalSheaf::new(Point::Zero, vec![x]),
            TransformKind::ZeroToInf,
            None,
        )
        .unwrap();
        let expected = Summand::new(&f, n as u64, wild(&f, &[(-1, n)]), tau.inv().mul(TameChar::chi2()), 1).unwrap();
        assert_eq!(
            out,
            LocalSheaf::new(Point::Infinity, vec![expected]).canonical(&f).unwrap()
        );
    }
}

#[test]
fn zero_cases() {
    let f = build_field(7, 1).unwrap();
    let x = Summand::new(&f, 2, wild(&f, &[(-1, 3)]), TameChar::TRIVIAL, 1).unwrap();
    let obj = LocalSheaf::new(Point::Infinity, vec![x.clone()]);
    assert!(lft(&f, &obj, TransformKind::InfToInf, None).unwrap().is_empty());
    let y = Summand::new(&f, 1, wild(&f, &[(-2, 3)]), TameChar::TRIVIAL, 1).unwrap();
    let obj = LocalSheaf::new(Point::Infinity, vec![y]);
    assert!(lft(&f, &obj, TransformKind::InfToZero, None).unwrap().is_empty());
    let tame = Summand::tame(&f, TameChar::new(3, 1), 2).unwrap();
    let obj = LocalSheaf::new(Point::Infinity, vec![tame]);
    assert!(lft(&f, &obj, TransformKind::InfToInf, None).unwrap().is_empty());
}

#[test]
fn descent_example_reaches_rank_six() {
    let f = build_field(7, 3).unwrap();
    let x = Summand::new(&f, 4, wild(&f, &[(-2, 1)]), TameChar::TRIVIAL, 1).unwrap();
    assert_eq!(stabilizer(&x), 2);
    let obj = LocalSheaf::new(Point::Zero, vec![x]);
    let out = lft(&f, &obj, TransformKind::ZeroToInf, None).unwrap();
    assert_eq!(out.rank(), 6);
    assert_eq!(out.summands().len(), 1);
    let y = &out.summands()[0];
    assert_eq!((y.r(), y.depth(), stabilizer(y)), (6, 2, 2));
    assert!(rank_law_check(&obj, &out, TransformKind::ZeroToInf));
}

#[test]
fn tame_rules() {
    let f = build_field(7, 1).unwrap();
    let chi = TameChar::new(3, 1);
    let obj = LocalSheaf::new(Point::Zero, vec![Summand::tame(&f, chi, 2).unwrap()]);
    let out = lft(&f, &obj, TransformKind::ZeroToInf, None).unwrap();
    assert_eq!(
        out,
        LocalSheaf::new(Point::Infinity, vec![Summand::tame(&f, chi.inv(), 2).unwrap()])
    );
    assert!(rank_law_check(&obj, &out, TransformKind::ZeroToInf));
    let triv = LocalSheaf::new(Point::Zero, vec![Summand::tame(&f, TameChar::TRIVIAL, 1).unwrap()]);
    assert_eq!(
        lft(&f, &triv, TransformKind::ZeroToInf, None),
        Err(TransformError::UnsupportedTameTrivial)
    );
}

#[test]
fn wrong_point_and_hypotheses() {
    let f = build_field(7, 1).unwrap();
    let obj = LocalSheaf::new(Point::Infinity, vec![]);
    assert!(matches!(
        lft(&f, &obj, TransformKind::ZeroToInf, None),
        Err(TransformError::WrongPoint { .. })
    ));
    // r + s = 7
    let x = Summand::new(&f, 4, wild(&f, &[(-3, 1)]), TameChar::TRIVIAL, 1).unwrap();
    let err = lft(
        &f,
        &LocalSheaf::new(Point::Zero, vec![x]),
        TransformKind::ZeroToInf,
        None,
    )
    .unwrap_err();
    assert!(
        matches!(&err, TransformError::HypothesisViolation { condition } if condition.contains("r+s")),
        "{err}"
    );
    assert!(check_hypotheses(3, 1, 1, TransformKind::ZeroToInf).is_ok());
    assert!(check_hypotheses(3, 2, 1, TransformKind::ZeroToInf).is_err());
    assert!(legendre(&f, &wild(&f, &[(-1, 1)]), 2, TransformKind::InfToInf, None).is_err());
}

#[test]
fn explicit_precision_too_small() {
    let f = build_field(11, 1).unwrap();
    let alpha = wild(&f, &[(-4, 3), (-3, 1), (-1, 5)]);
    let res = legendre(&f, &alpha, 1, TransformKind::ZeroToInf, Some(1));
    assert!(matches!(res, Err(TransformError::PrecisionUnderflow { .. })), "{res:?}");
}

#[test]
fn kind_strings() {
    for k in TransformKind::ALL {
        assert_eq!(k.to_string().parse::<TransformKind>().unwrap(), k);
        assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{k}\""));
    }
    assert!("sideways".parse::<TransformKind>().is_err());
}

#[test]
fn rank_law_examples() {
    let f = build_field(7, 1).unwrap();
    let x = Summand::new(&f, 1, wild(&f, &[(-2, 1)]), TameChar::TRIVIAL, 3).unwrap();
    let obj = LocalSheaf::new(Point::Infinity, vec![x]);
    let out = lft(&f, &obj, TransformKind::InfToInf, None).unwrap();
    assert_eq!(out.rank(), 3);
    assert!(out.summands().iter().all(|y| y.r() == 1 && y.unip() == 3));
    assert!(rank_law_check(&obj, &out, TransformKind::InfToInf));
}

fn random_instance() -> impl Strategy<Value = (u64, u64, Vec<i64>)> {
    (
        prop::sample::select(vec![7u64, 11, 13]),
        1u64..=5,
        1u64..=5,
        prop::collection::vec(0i64..13, 5),
        1i64..13,
    )
        .prop_filter_map("hypotheses", |(p, r, s, mut coeffs, lead)| {
            check_hypotheses(p, r, s, TransformKind::ZeroToInf).ok()?;
            if lead % p as i64 == 0 {
                return None;
            }
            coeffs.truncate(s as usize);
            coeffs[0] = lead;
            Some((p, r, coeffs))
        })
}

fn instance_field(p: u64, r: u64, s: u64) -> Field {
    build_field(p, lft_core::suggest_degree(p, &[(r + s) * (p - 1)])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zero_to_inf_system_and_closed_form((p, r, coeffs) in random_instance()) {
        let s = coeffs.len() as u64;
        let f = instance_field(p, r, s);
        let terms: Vec<(i64, i64)> = coeffs.iter().enumerate().map(|(i, &c)| (-(s as i64) + i as i64, c)).collect();
        let alpha = wild(&f, &terms);
        let sol = legendre(&f, &alpha, r, TransformKind::ZeroToInf, None).unwrap();
        check_system(&f, &alpha, r, TransformKind::ZeroToInf, &sol.lambda, &sol.beta, r + s);
        let lead = leading_closed_form(&f, alpha.leading().unwrap(), r, s, sol.lambda0()).unwrap();
        prop_assert_eq!(sol.beta.coeff(-(s as i64)), lead);
        let back = legendre_inverse(&f, &sol.beta, r + s, r, sol.lambda0(), None).unwrap();
        prop_assert_eq!(back, alpha.clone());
        let x = Summand::new(&f, r, alpha.clone(), TameChar::TRIVIAL, 1).unwrap();
        let canon = canonicalize(&f, &Summand::new(&f, r + s, sol.beta.clone(), TameChar::TRIVIAL, 1).unwrap()).unwrap();
        for branch in 1..(r + s) {
            let other = legendre_branch(&f, &alpha, r, TransformKind::ZeroToInf, None, branch).unwrap();
            let y = canonicalize(&f, &Summand::new(&f, r + s, other.beta, TameChar::TRIVIAL, 1).unwrap()).unwrap();
            prop_assert_eq!(&y, &canon);
        }
        let direct = transform_summand(&f, &x, TransformKind::ZeroToInf, None).unwrap().unwrap();
        prop_assert_eq!(stabilizer(&direct), stabilizer(&x));
    }

    #[test]
    fn inf_kinds_satisfy_system(p in prop::sample::select(vec![7u64, 11, 13]), r in 1u64..=5, s in 1u64..=5,
                                coeffs in prop::collection::vec(1i64..13, 5)) {
        let kind = if s > r { TransformKind::InfToInf } else { TransformKind::InfToZero };
        prop_assume!(s != r && check_hypotheses(p, r, s, kind).is_ok() && coeffs[0] % p as i64 != 0);
        let e = kind.exponent(r, s).unwrap();
        let f = build_field(p, lft_core::suggest_degree(p, &[e * (p - 1)])).unwrap();
        let terms: Vec<(i64, i64)> = (0..s as usize).map(|i| (-(s as i64) + i as i64, coeffs[i])).collect();
        let alpha = wild(&f, &terms);
        let sol = legendre(&f, &alpha, r, kind, None).unwrap();
        prop_assert_eq!(sol.beta.depth(), s);
        check_system(&f, &alpha, r, kind, &sol.lambda, &sol.beta, e);
    }
}
