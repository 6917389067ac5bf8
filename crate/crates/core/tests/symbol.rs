use lft_core::{
    as_reduce, build_field, canonicalize, descend, equal, is_indecomposable, is_irreducible, stabilizer, Field,
    FieldElem, LaurentSeries, LocalSheaf, Point, Slope, Summand, SymbolDoc, SymbolError, TameChar, WildPart,
};
use proptest::prelude::*;

fn wild(f: &Field, terms: &[(i64, i64)]) -> WildPart {
    WildPart::new(f, terms.iter().map(|&(e, c)| (e, f.from_int(c))).collect()).unwrap()
}

fn summand(f: &Field, r: u64, terms: &[(i64, i64)], unip: u64) -> Summand {
    Summand::new(f, r, wild(f, terms), TameChar::TRIVIAL, unip).unwrap()
}

/// `(γ^p − γ) − (raw − α̂)` has no polar terms.
fn witness_sound(f: &Field, raw: &LaurentSeries, alpha: &WildPart, gamma: &LaurentSeries) -> bool {
    let gp = gamma.pow(f.p() as i64).unwrap();
    let lhs = &(&gp - gamma) - &(raw - &alpha.to_series(f));
    lhs.polar_terms().unwrap().is_empty()
}

/// Elements `μ` with `μ^r = 1`, by exhaustive search.
fn roots_of_unity(f: &Field, r: u64) -> Vec<FieldElem> {
    f.elements().skip(1).filter(|&x| f.pow(x, r) == f.one()).collect()
}

#[test]
fn reduction_examples() {
    let f3 = build_field(3, 1).unwrap();
    let raw = LaurentSeries::monomial(&f3, f3.one(), -3);
    let (alpha, gamma) = as_reduce(&f3, &raw, 4).unwrap();
    assert_eq!(alpha, wild(&f3, &[(-1, 1)]));
    assert_eq!(gamma, LaurentSeries::monomial(&f3, f3.one(), -1).truncate(4));
    assert!(witness_sound(&f3, &raw, &alpha, &gamma));

    let f7 = build_field(7, 1).unwrap();
    let raw = LaurentSeries::monomial(&f7, f7.one(), -1);
    let (alpha, gamma) = as_reduce(&f7, &raw, 3).unwrap();
    assert_eq!(alpha, wild(&f7, &[(-1, 1)]));
    assert!(gamma.is_zero());

    let raw = LaurentSeries::from_terms(&f3, &[(-6, f3.from_int(2)), (-1, f3.one())]);
    let (alpha, gamma) = as_reduce(&f3, &raw, 10).unwrap();
    assert_eq!(f3.pth_root(f3.from_int(2)), f3.from_int(2));
    assert_eq!(alpha, wild(&f3, &[(-2, 2), (-1, 1)]));
    assert!(witness_sound(&f3, &raw, &alpha, &gamma));

    let raw = LaurentSeries::monomial(&f3, f3.one(), -4);
    assert_eq!(
        as_reduce(&f3, &raw, 1).unwrap_err(),
        SymbolError::DepthTooLarge { depth: 4, p: 3 }
    );
}

#[test]
fn reduction_cascades_and_cancels() {
    let f = build_field(3, 2).unwrap();
    let a = FieldElem::from_packed(4);
    // u^{-9} reduces twice; the cascade lands on u^{-1}, where it cancels -pth_root²(a)
    let b = f.pth_root(f.pth_root(a));
    let raw = LaurentSeries::from_terms(&f, &[(-9, a), (-1, f.neg(b)), (2, f.one())]);
    let (alpha, gamma) = as_reduce(&f, &raw, 10).unwrap();
    assert!(alpha.is_empty());
    assert!(witness_sound(&f, &raw, &alpha, &gamma));
    let diff = &(&gamma.pow(3).unwrap() - &gamma) - &(&raw - &alpha.to_series(&f));
    assert!(diff.terms().all(|(e, _)| e == 0));
}

#[test]
fn stabilizer_examples() {
    let f49 = build_field(7, 2).unwrap();
    let x = summand(&f49, 4, &[(-2, 1)], 1);
    assert_eq!(stabilizer(&x), 2);
    let trivial_twists = roots_of_unity(&f49, 4)
        .into_iter()
        .filter(|&mu| {
            let moved = x.alpha().scale_variable(&f49, mu).unwrap().to_series(&f49);
            let diff = &moved - &x.alpha().to_series(&f49);
            as_reduce(&f49, &diff, 1).unwrap().0.is_empty()
        })
        .count();
    assert_eq!(trivial_twists, 2);

    let f7 = build_field(7, 1).unwrap();
    assert_eq!(stabilizer(&summand(&f7, 3, &[(-2, 1)], 1)), 1);
    assert_eq!(stabilizer(&summand(&f7, 6, &[(-4, 1), (-2, 1)], 1)), 2);
    assert_eq!(stabilizer(&Summand::tame(&f7, TameChar::chi2(), 2).unwrap()), 1);
}

#[test]
fn descent_examples() {
    let f = build_field(7, 1).unwrap();
    let x = summand(&f, 4, &[(-2, 1)], 1);
    let y = descend(&x, 2).unwrap();
    assert_eq!((y.r(), y.alpha().clone()), (2, wild(&f, &[(-1, 1)])));
    assert_eq!(descend(&x, 1).unwrap(), x);
    let z = descend(&summand(&f, 6, &[(-4, 1), (-2, 1)], 1), 2).unwrap();
    assert_eq!((z.r(), z.alpha().clone()), (3, wild(&f, &[(-2, 1), (-1, 1)])));
    assert_eq!(z.alpha().substitute_power(2), wild(&f, &[(-4, 1), (-2, 1)]));
    assert_eq!(descend(&x, 3).unwrap_err(), SymbolError::NotDivisible { d: 3 });
}

#[test]
fn canonical_representatives() {
    let f = build_field(7, 1).unwrap();
    let three = summand(&f, 2, &[(-1, 3)], 1);
    let four = summand(&f, 2, &[(-1, 4)], 1);
    assert_eq!(canonicalize(&f, &three).unwrap(), three);
    assert_eq!(canonicalize(&f, &four).unwrap(), three);
    let fixed = summand(&f, 2, &[(-2, 5)], 1);
    assert_eq!(canonicalize(&f, &fixed).unwrap(), fixed);
    let f5 = build_field(5, 1).unwrap();
    let no_roots = summand(&f5, 3, &[(-1, 1)], 1);
    assert!(matches!(canonicalize(&f5, &no_roots), Err(SymbolError::Field(_))));
}

#[test]
fn irreducibility_examples() {
    let f = build_field(7, 1).unwrap();
    let a = summand(&f, 3, &[(-2, 1)], 1);
    assert!(is_irreducible(&a) && is_indecomposable(&a));
    let b = summand(&f, 3, &[(-2, 1)], 4);
    assert!(is_indecomposable(&b) && !is_irreducible(&b));
    let c = summand(&f, 4, &[(-2, 1)], 1);
    assert!(!is_indecomposable(&c));
}

#[test]
fn numerical_invariants() {
    let f = build_field(7, 1).unwrap();
    let one = LocalSheaf::new(Point::Zero, vec![summand(&f, 2, &[(-1, 1)], 1)]);
    assert_eq!((one.rank(), one.swan()), (2, 1));
    assert_eq!(one.slopes(), vec![(Slope::new(1, 2), 2)]);
    let tame = LocalSheaf::new(Point::Zero, vec![Summand::tame(&f, TameChar::new(3, 1), 3).unwrap()]);
    assert_eq!((tame.rank(), tame.swan()), (3, 0));
    assert!(tame.slopes().is_empty());
    let kl = LocalSheaf::new(Point::Infinity, vec![summand(&f, 5, &[(-1, 5)], 1)]);
    assert_eq!((kl.rank(), kl.swan()), (5, 1));
    let mixed = one.merge(&LocalSheaf::new(Point::Zero, vec![summand(&f, 4, &[(-2, 1)], 3)]));
    assert_eq!(mixed.slopes(), vec![(Slope::new(1, 2), 14)]);
}

#[test]
fn equality_examples() {
    let f = build_field(7, 1).unwrap();
    let a = summand(&f, 2, &[(-1, 3)], 1);
    let b = Summand::tame(&f, TameChar::chi2(), 2).unwrap();
    let x = LocalSheaf::new(Point::Zero, vec![a.clone(), b.clone()]);
    let y = LocalSheaf::new(Point::Zero, vec![b.clone(), a.clone()]);
    assert!(equal(&f, &x, &y).unwrap());
    let twisted = LocalSheaf::new(Point::Zero, vec![summand(&f, 2, &[(-1, 4)], 1), b.clone()]);
    assert!(equal(&f, &x, &twisted).unwrap());
    let other_chi = LocalSheaf::new(Point::Zero, vec![a.with_chi(TameChar::chi2()), b]);
    assert!(!equal(&f, &x, &other_chi).unwrap());
    assert!(!equal(&f, &x, &LocalSheaf::new(Point::Infinity, x.summands().to_vec())).unwrap());
}

#[test]
fn characters() {
    let c = TameChar::new(6, 4);
    assert_eq!((c.order(), c.exp()), (3, 2));
    assert_eq!(TameChar::new(5, 0), TameChar::TRIVIAL);
    assert_eq!(TameChar::new(4, 1).mul(TameChar::new(6, 1)), TameChar::new(12, 5));
    assert_eq!(TameChar::chi2().mul(TameChar::chi2()), TameChar::TRIVIAL);
    assert_eq!(TameChar::new(5, 2).inv(), TameChar::new(5, 3));
    assert_eq!(TameChar::new(6, 1).pow(-3), TameChar::chi2());
    // evaluate as exp/order in Q/Z
    for (n1, a1, n2, a2) in [(4u64, 3i64, 6u64, 5i64), (3, 1, 3, 2), (5, 4, 2, 1)] {
        let prod = TameChar::new(n1, a1).mul(TameChar::new(n2, a2));
        let lhs = prod.exp() as f64 / prod.order() as f64;
        let rhs = (a1 as f64 / n1 as f64 + a2 as f64 / n2 as f64).fract();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn twist_and_inversion() {
    let f = build_field(7, 1).unwrap();
    let x = LocalSheaf::new(
        Point::Zero,
        vec![summand(&f, 2, &[(-1, 3)], 1).with_chi(TameChar::new(3, 1))],
    );
    let t = x.twist(TameChar::new(6, 1));
    assert_eq!(t.summands()[0].chi(), TameChar::new(3, 1).mul(TameChar::new(3, 1)));
    let i = x.inv();
    assert_eq!(i.point(), Point::Infinity);
    assert_eq!(i.summands()[0].chi(), TameChar::new(3, 2));
    assert_eq!(i.inv(), x);
}

#[test]
fn json_round_trip_is_byte_identical() {
    let f = build_field(7, 2).unwrap();
    let sheaf = LocalSheaf::new(
        Point::Infinity,
        vec![
            Summand::new(&f, 3, wild(&f, &[(-2, 2), (-1, 5)]), TameChar::new(4, 3), 2).unwrap(),
            Summand::tame(&f, TameChar::chi2(), 1).unwrap(),
        ],
    )
    .canonical(&f)
    .unwrap();
    let json = serde_json::to_string(&sheaf.to_doc(&f)).unwrap();
    let doc: SymbolDoc = serde_json::from_str(&json).unwrap();
    let back = LocalSheaf::from_doc(&f, &doc).unwrap();
    assert_eq!(back, sheaf);
    assert_eq!(serde_json::to_string(&back.to_doc(&f)).unwrap(), json);
    assert!(json.starts_with(r#"{"field":{"p":7,"k":2,"modulus":[1,0,1]},"point":"infinity","summands":[{"r":1,"alpha":[],"chi":{"order":2,"exp":1},"unip":1}"#));
}

#[test]
fn rejected_inputs() {
    let f = build_field(7, 1).unwrap();
    assert!(WildPart::new(&f, vec![(-7, f.one())]).is_err());
    assert!(WildPart::new(&f, vec![(1, f.one())]).is_err());
    assert!(WildPart::new(&f, vec![(-1, f.zero())]).is_err());
    assert!(Summand::new(&f, 7, WildPart::empty(), TameChar::TRIVIAL, 1).is_err());
    assert!(Summand::new(&f, 1, WildPart::empty(), TameChar::new(7, 1), 1).is_err());
    assert!(Summand::new(&f, 1, WildPart::empty(), TameChar::TRIVIAL, 0).is_err());
}

fn arb_raw(p: u64) -> impl Strategy<Value = Vec<(i64, u64)>> {
    prop::collection::vec((-(p as i64) * 3..4i64, 0..p * p), 0..8)
}

proptest! {
    #[test]
    fn reduction_soundness(pk in prop::sample::select(vec![(3u64, 2usize), (7, 1)]), terms in arb_raw(7)) {
        let f = build_field(pk.0, pk.1).unwrap();
        let terms: Vec<(i64, FieldElem)> = terms.into_iter().map(|(e, c)| (e, FieldElem::from_packed(c % f.q()))).collect();
        let raw = LaurentSeries::from_terms(&f, &terms);
        match as_reduce(&f, &raw, 40) {
            Ok((alpha, gamma)) => {
                prop_assert!(witness_sound(&f, &raw, &alpha, &gamma));
                let (again, g2) = as_reduce(&f, &alpha.to_series(&f), 6).unwrap();
                prop_assert_eq!(again, alpha.clone());
                prop_assert!(g2.is_zero());
                // a nonnegative tail never changes the reduction
                let tail = LaurentSeries::from_terms(&f, &[(0, f.one()), (3, f.generator())]);
                prop_assert_eq!(as_reduce(&f, &(&raw + &tail), 6).unwrap().0, alpha);
            }
            Err(SymbolError::DepthTooLarge { depth, p }) => prop_assert!(depth >= p),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn canonical_forms(r in prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12]),
                       coeffs in prop::collection::vec(0u64..49, 1..4),
                       k in 0u64..48) {
        let f = build_field(7, 2).unwrap();
        let terms: Vec<(i64, FieldElem)> = coeffs.iter().enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (-(i as i64) - 1, FieldElem::from_packed(c)))
            .collect();
        prop_assume!(!terms.is_empty());
        let x = Summand::new(&f, r, WildPart::new(&f, terms).unwrap(), TameChar::TRIVIAL, 1).unwrap();
        let c = canonicalize(&f, &x).unwrap();
        prop_assert_eq!(canonicalize(&f, &c).unwrap(), c.clone());
        let mu = f.pow(f.root_of_unity(r).unwrap(), k);
        let moved = x.with_alpha(x.alpha().scale_variable(&f, mu).unwrap());
        prop_assert_eq!(canonicalize(&f, &moved).unwrap(), c.clone());
        // exhaustive orbit minimum
        let key = |w: &WildPart| w.terms().iter().map(|&(_, a)| f.dlog(a).unwrap()).collect::<Vec<_>>();
        let best = roots_of_unity(&f, r).into_iter()
            .map(|m| x.alpha().scale_variable(&f, m).unwrap())
            .min_by_key(|w| key(w)).unwrap();
        prop_assert_eq!(c.alpha(), &best);
        // stabilizer and descent
        let d = stabilizer(&x);
        let down = descend(&x, d).unwrap();
        prop_assert_eq!(down.alpha().substitute_power(d), x.alpha().clone());
        prop_assert_eq!(stabilizer(&down), 1);
    }
}
