//! Sheaf symbols `[r]_*(L_ψ(α) ⊗ K_χ ⊗ U(n))` at the points 0 and ∞.
//!
//! Wild parts are written in negative powers of the local coordinate: `u = t` at 0 and
//! `u = 1/t` at ∞. Characters are written in the global coordinate `t`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldCtx, FieldDescriptor, FieldElem, FieldError};
use crate::series::{LaurentSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("wild part depth {depth} is not below the characteristic {p}")]
    DepthTooLarge { depth: u64, p: u64 },
    #[error("wild part is not in reduced Artin-Schreier form: {0}")]
    NotCanonical(String),
    #[error("{d} does not divide the pushforward index and every exponent")]
    NotDivisible { d: u64 },
    #[error("invalid summand: {0}")]
    BadSummand(String),
    #[error("invalid character: {0}")]
    BadChar(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    Zero,
    Infinity,
}

impl Point {
    pub fn flip(self) -> Point {
        match self {
            Point::Zero => Point::Infinity,
            Point::Infinity => Point::Zero,
        }
    }
}

/// A character of exact order `order`, sending the fixed generator to `ζ_order^exp`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "CharDoc")]
pub struct TameChar {
    order: u64,
    exp: u64,
}

#[derive(Deserialize)]
struct CharDoc {
    order: u64,
    exp: i64,
}

impl TryFrom<CharDoc> for TameChar {
    type Error = SymbolError;
    fn try_from(d: CharDoc) -> Result<Self, SymbolError> {
        if d.order == 0 {
            return Err(SymbolError::BadChar("order must be positive".into()));
        }
        Ok(TameChar::new(d.order, d.exp))
    }
}

impl TameChar {
    pub const TRIVIAL: TameChar = TameChar { order: 1, exp: 0 };

    /// Reduces `(N, a)` to the exact order.
    ///
    /// # Panics
    /// If `order` is zero.
    pub fn new(order: u64, exp: i64) -> Self {
        assert!(order > 0, "character order must be positive");
        let a = exp.rem_euclid(order as i64) as u64;
        let g = a.gcd(&order);
        TameChar {
            order: order / g,
            exp: a / g,
        }
    }

    /// The quadratic character.
    pub fn chi2() -> Self {
        TameChar::new(2, 1)
    }

    pub fn order(self) -> u64 {
        self.order
    }

    pub fn exp(self) -> u64 {
        self.exp
    }

    pub fn is_trivial(self) -> bool {
        self.order == 1
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: TameChar) -> TameChar {
        let n = self.order.lcm(&other.order);
        let a = self.exp * (n / self.order) + other.exp * (n / other.order);
        TameChar::new(n, (a % n) as i64)
    }

    pub fn inv(self) -> TameChar {
        TameChar::new(self.order, -(self.exp as i64))
    }

    pub fn pow(self, e: i64) -> TameChar {
        let a = (self.exp as i128 * e as i128).rem_euclid(self.order as i128);
        TameChar::new(self.order, a as i64)
    }
}

impl std::str::FromStr for TameChar {
    type Err = SymbolError;

    /// Parses `N:a`; a bare `N` is not accepted.
    fn from_str(text: &str) -> Result<Self, SymbolError> {
        let bad = || SymbolError::BadChar(format!("expected ORDER:EXP, got {text:?}"));
        let (n, a) = text.trim().split_once(':').ok_or_else(bad)?;
        let order: u64 = n.trim().parse().map_err(|_| bad())?;
        let exp: i64 = a.trim().parse().map_err(|_| bad())?;
        TameChar::try_from(CharDoc { order, exp })
    }
}

impl fmt::Display for TameChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.order, self.exp)
    }
}

/// Polar part in reduced Artin–Schreier form: negative exponents prime to p, depth below p.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct WildPart {
    terms: Vec<(i64, FieldElem)>,
}

impl WildPart {
    pub fn empty() -> Self {
        WildPart::default()
    }

    /// Validates and sorts terms (most negative exponent first).
    pub fn new(field: &FieldCtx, terms: Vec<(i64, FieldElem)>) -> Result<Self, SymbolError> {
        let p = field.p() as i64;
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e >= 0 {
                return Err(SymbolError::NotCanonical(format!("exponent {e} is not negative")));
            }
            if e % p == 0 {
                return Err(SymbolError::NotCanonical(format!("exponent {e} is divisible by {p}")));
            }
            if c.is_zero() {
                return Err(SymbolError::NotCanonical(format!("zero coefficient at exponent {e}")));
            }
            if map.insert(e, c).is_some() {
                return Err(SymbolError::NotCanonical(format!("repeated exponent {e}")));
            }
        }
        let w = WildPart {
            terms: map.into_iter().collect(),
        };
        if w.depth() >= field.p() {
            return Err(SymbolError::DepthTooLarge {
                depth: w.depth(),
                p: field.p(),
            });
        }
        Ok(w)
    }

    pub fn monomial(field: &FieldCtx, c: FieldElem, e: i64) -> Result<Self, SymbolError> {
        WildPart::new(field, vec![(e, c)])
    }

    pub fn terms(&self) -> &[(i64, FieldElem)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `s`: minus the least exponent, 0 when empty.
    pub fn depth(&self) -> u64 {
        self.terms.first().map_or(0, |t| t.0.unsigned_abs())
    }

    /// Coefficient of `u^{-s}`.
    pub fn leading(&self) -> Option<FieldElem> {
        self.terms.first().map(|t| t.1)
    }

    pub fn coeff(&self, e: i64) -> FieldElem {
        self.terms.iter().find(|t| t.0 == e).map_or(FieldElem::ZERO, |t| t.1)
    }

    pub fn to_series(&self, field: &Field) -> LaurentSeries {
        LaurentSeries::from_terms(field, &self.terms)
    }

    /// Polar part of a series, which must already be reduced.
    pub fn from_series(field: &Field, s: &LaurentSeries) -> Result<Self, SymbolError> {
        WildPart::new(field, s.polar_terms()?)
    }

    pub fn neg(&self, field: &FieldCtx) -> Self {
        WildPart {
            terms: self.terms.iter().map(|&(e, c)| (e, field.neg(c))).collect(),
        }
    }

    /// `α(μu)`.
    pub fn scale_variable(&self, field: &FieldCtx, mu: FieldElem) -> Result<Self, SymbolError> {
        let terms = self
            .terms
            .iter()
            .map(|&(e, c)| Ok((e, field.mul(c, field.pow_signed(mu, e)?))))
            .collect::<Result<Vec<_>, FieldError>>()?;
        Ok(WildPart { terms })
    }

    /// Exponents multiplied by `d`. The result stays reduced when `d` is prime to p.
    pub fn substitute_power(&self, d: u64) -> Self {
        WildPart {
            terms: self.terms.iter().map(|&(e, c)| (e * d as i64, c)).collect(),
        }
    }

    pub fn display(&self, field: &FieldCtx) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|&(e, c)| format!("{}*u^{}", field.display(c), e))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Reduces the polar part of `raw` to Artin–Schreier normal form.
///
/// Returns the reduced wild part and a witness `γ` such that
/// `(γ^p − γ) − (raw − α̂)` has no polar part. The witness carries the polar
/// correction exactly and the power-series correction up to `witness_prec`.
pub fn as_reduce(
    field: &Field,
    raw: &LaurentSeries,
    witness_prec: i64,
) -> Result<(WildPart, LaurentSeries), SymbolError> {
    let p = field.p() as i64;
    let witness_prec = witness_prec.max(0);
    let mut polar: BTreeMap<i64, FieldElem> = raw.polar_terms()?.into_iter().collect();
    let mut gamma: BTreeMap<i64, FieldElem> = BTreeMap::new();
    let bump = |m: &mut BTreeMap<i64, FieldElem>, e: i64, c: FieldElem| {
        let v = field.add(m.get(&e).copied().unwrap_or(FieldElem::ZERO), c);
        if v.is_zero() {
            m.remove(&e);
        } else {
            m.insert(e, v);
        }
    };
    while let Some((&e, &a)) = polar.iter().find(|(e, _)| *e % p == 0) {
        polar.remove(&e);
        let b = field.pth_root(a);
        bump(&mut polar, e / p, b);
        bump(&mut gamma, e / p, b);
    }
    let alpha = WildPart::new(field, polar.into_iter().collect())?;

    let mut witness = LaurentSeries::from_terms(field, &gamma.into_iter().collect::<Vec<_>>());
    let positive: Vec<(i64, FieldElem)> = raw.terms().filter(|t| t.0 > 0 && t.0 < witness_prec).collect();
    let mut tail = LaurentSeries::zero(field, Some(witness_prec));
    let mut h = positive;
    while !h.is_empty() {
        tail = &tail - &LaurentSeries::from_terms(field, &h);
        h = h
            .iter()
            .map(|&(e, c)| (e * p, field.frobenius(c)))
            .filter(|t| t.0 < witness_prec)
            .collect();
    }
    witness = (&witness + &tail).truncate(witness_prec);
    Ok((alpha, witness))
}

/// Reduced rational `num/den`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Slope {
    pub num: u64,
    pub den: u64,
}

impl Slope {
    pub fn new(num: u64, den: u64) -> Self {
        let g = num.gcd(&den).max(1);
        Slope {
            num: num / g,
            den: den / g,
        }
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// One indecomposable-type block `[r]_*(L_ψ(α) ⊗ K_χ ⊗ U(n))`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Summand {
    r: u64,
    alpha: WildPart,
    chi: TameChar,
    unip: u64,
}

impl Summand {
    pub fn new(field: &FieldCtx, r: u64, alpha: WildPart, chi: TameChar, unip: u64) -> Result<Self, SymbolError> {
        let p = field.p();
        if r == 0 || r.is_multiple_of(p) {
            return Err(SymbolError::BadSummand(format!(
                "pushforward index {r} must be positive and prime to {p}"
            )));
        }
        if unip == 0 {
            return Err(SymbolError::BadSummand("unipotent block size must be positive".into()));
        }
        if chi.order().is_multiple_of(p) {
            return Err(SymbolError::BadSummand(format!(
                "character order {} is divisible by {p}",
                chi.order()
            )));
        }
        if alpha.depth() >= p {
            return Err(SymbolError::DepthTooLarge {
                depth: alpha.depth(),
                p,
            });
        }
        Ok(Summand { r, alpha, chi, unip })
    }

    /// `K_χ ⊗ U(n)`.
    pub fn tame(field: &FieldCtx, chi: TameChar, unip: u64) -> Result<Self, SymbolError> {
        Summand::new(field, 1, WildPart::empty(), chi, unip)
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn alpha(&self) -> &WildPart {
        &self.alpha
    }

    pub fn chi(&self) -> TameChar {
        self.chi
    }

    pub fn unip(&self) -> u64 {
        self.unip
    }

    pub fn depth(&self) -> u64 {
        self.alpha.depth()
    }

    pub fn is_tame(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn rank(&self) -> u64 {
        self.r * self.unip
    }

    pub fn swan(&self) -> u64 {
        self.unip * self.depth()
    }

    /// `s/r`, or `None` for tame summands.
    pub fn slope(&self) -> Option<Slope> {
        (!self.is_tame()).then(|| Slope::new(self.depth(), self.r))
    }

    pub fn with_chi(&self, chi: TameChar) -> Self {
        Summand { chi, ..self.clone() }
    }

    pub fn with_alpha(&self, alpha: WildPart) -> Self {
        Summand { alpha, ..self.clone() }
    }

    pub fn with_unip(&self, unip: u64) -> Self {
        Summand { unip, ..self.clone() }
    }

    /// Tensor with `L_ψ(f)` for `f` given in the downstairs local coordinate.
    pub fn tensor_artin_schreier(&self, field: &Field, f: &[(i64, FieldElem)]) -> Result<Self, SymbolError> {
        let mut raw = self.alpha.terms().to_vec();
        raw.extend(f.iter().map(|&(e, c)| (e * self.r as i64, c)));
        let (alpha, _) = as_reduce(field, &LaurentSeries::from_terms(field, &raw), 1)?;
        Ok(self.with_alpha(alpha))
    }
}

/// Largest `d` with `d | r` and `d` dividing every exponent of `α`; `r` for tame summands.
pub fn stabilizer(x: &Summand) -> u64 {
    x.alpha.terms().iter().fold(x.r, |d, t| d.gcd(&t.0.unsigned_abs()))
}

/// Descends along `u ↦ u^d`.
pub fn descend(x: &Summand, d: u64) -> Result<Summand, SymbolError> {
    if d == 0 || !x.r.is_multiple_of(d) || x.alpha.terms().iter().any(|t| t.0 % d as i64 != 0) {
        return Err(SymbolError::NotDivisible { d });
    }
    let alpha = WildPart {
        terms: x.alpha.terms().iter().map(|&(e, c)| (e / d as i64, c)).collect(),
    };
    Ok(Summand {
        r: x.r / d,
        alpha,
        ..x.clone()
    })
}

/// Least element of the orbit `{α(μu) : μ^r = 1}` under coefficient-dlog order,
/// comparing from the most negative exponent upward.
pub fn canonicalize(field: &FieldCtx, x: &Summand) -> Result<Summand, SymbolError> {
    if x.is_tame() {
        return Ok(x.clone());
    }
    let d = stabilizer(x);
    let m = x.r / d;
    if m == 1 {
        return Ok(x.clone());
    }
    let zeta = field.root_of_unity(m)?;
    let n = (field.q() - 1) as i128;
    let step = n / m as i128;
    let logs = x
        .alpha
        .terms()
        .iter()
        .map(|&(e, c)| Ok((e / d as i64, field.dlog(c)? as i128)))
        .collect::<Result<Vec<_>, FieldError>>()?;
    let key = |k: i128| -> Vec<i128> {
        logs.iter()
            .map(|&(i, l)| (l + k * i as i128 * step).rem_euclid(n))
            .collect()
    };
    let best = (0..m as i128).min_by_key(|&k| key(k)).unwrap();
    let mu = field.pow(zeta, best as u64);
    let terms = x
        .alpha
        .terms()
        .iter()
        .map(|&(e, c)| Ok((e, field.mul(c, field.pow_signed(mu, e / d as i64)?))))
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(x.with_alpha(WildPart { terms }))
}

pub fn is_indecomposable(x: &Summand) -> bool {
    stabilizer(x) == 1
}

pub fn is_irreducible(x: &Summand) -> bool {
    stabilizer(x) == 1 && x.unip == 1
}

/// A finite direct sum of summands at one point, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LocalSheaf {
    point: Point,
    summands: Vec<Summand>,
}

impl LocalSheaf {
    pub fn new(point: Point, mut summands: Vec<Summand>) -> Self {
        summands.sort();
        LocalSheaf { point, summands }
    }

    pub fn empty(point: Point) -> Self {
        LocalSheaf::new(point, Vec::new())
    }

    pub fn point(&self) -> Point {
        self.point
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn rank(&self) -> u64 {
        self.summands.iter().map(Summand::rank).sum()
    }

    pub fn swan(&self) -> u64 {
        self.summands.iter().map(Summand::swan).sum()
    }

    /// Distinct wild slopes with multiplicities, ascending.
    pub fn slopes(&self) -> Vec<(Slope, u64)> {
        let mut out: Vec<(Slope, u64)> = Vec::new();
        let mut all: Vec<(Slope, u64)> = self
            .summands
            .iter()
            .filter_map(|x| x.slope().map(|s| (s, x.rank())))
            .collect();
        all.sort_by_key(|a| a.0);
        for (s, m) in all {
            match out.last_mut() {
                Some((t, n)) if *t == s => *n += m,
                _ => out.push((s, m)),
            }
        }
        out
    }

    pub fn canonical(&self, field: &FieldCtx) -> Result<LocalSheaf, SymbolError> {
        let summands = self
            .summands
            .iter()
            .map(|x| canonicalize(field, x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LocalSheaf::new(self.point, summands))
    }

    /// Direct sum; both sides must live at the same point.
    pub fn merge(&self, other: &LocalSheaf) -> LocalSheaf {
        assert_eq!(self.point, other.point, "direct sum across different points");
        let mut all = self.summands.clone();
        all.extend(other.summands.iter().cloned());
        LocalSheaf::new(self.point, all)
    }

    /// Pullback along `t ↦ 1/t`: swaps the point and inverts characters.
    pub fn inv(&self) -> LocalSheaf {
        LocalSheaf::new(
            self.point.flip(),
            self.summands.iter().map(|x| x.with_chi(x.chi.inv())).collect(),
        )
    }

    /// Rewrites `L_{ψ^{-1}}` data in terms of `L_ψ`.
    pub fn negate_wild(&self, field: &FieldCtx) -> LocalSheaf {
        LocalSheaf::new(
            self.point,
            self.summands.iter().map(|x| x.with_alpha(x.alpha.neg(field))).collect(),
        )
    }

    /// Tensor with `K_λ`.
    pub fn twist(&self, lambda: TameChar) -> LocalSheaf {
        LocalSheaf::new(
            self.point,
            self.summands
                .iter()
                .map(|x| x.with_chi(x.chi.mul(lambda.pow(x.r as i64))))
                .collect(),
        )
    }

    pub fn to_doc(&self, field: &FieldCtx) -> SymbolDoc {
        SymbolDoc {
            field: field.descriptor(),
            point: self.point,
            summands: self
                .summands
                .iter()
                .map(|x| SummandDoc {
                    r: x.r,
                    alpha: x.alpha.terms().iter().map(|&(e, c)| (e, field.coords(c))).collect(),
                    chi: x.chi,
                    unip: x.unip,
                })
                .collect(),
        }
    }

    /// Parses summands against an existing field; alpha must already be reduced.
    pub fn from_doc(field: &FieldCtx, doc: &SymbolDoc) -> Result<LocalSheaf, SymbolError> {
        let summands = doc
            .summands
            .iter()
            .map(|s| {
                let terms = s
                    .alpha
                    .iter()
                    .map(|(e, c)| Ok((*e, field.elem(c)?)))
                    .collect::<Result<Vec<_>, FieldError>>()?;
                Summand::new(field, s.r, WildPart::new(field, terms)?, s.chi, s.unip)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LocalSheaf::new(doc.point, summands))
    }

    pub fn display(&self, field: &FieldCtx) -> String {
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|x| {
                format!(
                    "[{}]_*(L({}) x K({}) x U({}))",
                    x.r,
                    x.alpha.display(field),
                    x.chi,
                    x.unip
                )
            })
            .collect();
        let point = match self.point {
            Point::Zero => "0",
            Point::Infinity => "inf",
        };
        if parts.is_empty() {
            format!("0 at {point}")
        } else {
            format!("{} at {point}", parts.join(" + "))
        }
    }
}

/// Multiset equality of canonical forms.
pub fn equal(field: &FieldCtx, a: &LocalSheaf, b: &LocalSheaf) -> Result<bool, SymbolError> {
    Ok(a.point == b.point && a.canonical(field)? == b.canonical(field)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandDoc {
    pub r: u64,
    pub alpha: Vec<(i64, Vec<u64>)>,
    pub chi: TameChar,
    pub unip: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub field: FieldDescriptor,
    pub point: Point,
    pub summands: Vec<SummandDoc>,
}
