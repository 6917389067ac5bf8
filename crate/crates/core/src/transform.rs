//! The three local Fourier transformations on symbols, driven by a Legendre-transform
//! series solver.
//!
//! All three systems reduce to one recipe in the source coordinate `u`. With
//! `C(u) = σ·u^{s+1}·α'(u)/r` (σ = −1 from 0, +1 from ∞) and `R = C^{1/e}`, the target
//! coordinate is `v = u/R` for transforms landing at ∞′ and `v = u·R` for the one landing
//! at 0′. Reverting `v(u)` gives `μ(v)` and `β(v) = α(μ) + μ^{±r}·v^{∓e}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldElem, FieldError};
use crate::series::{LaurentSeries, SeriesError};
use crate::symbol::{descend, stabilizer, LocalSheaf, Point, Summand, SymbolError, TameChar, WildPart};

const RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("hypothesis violated: {condition}")]
    HypothesisViolation { condition: String },
    #[error("tame summand with trivial character has no local transform rule")]
    UnsupportedTameTrivial,
    #[error("input lives at {found:?} but the transform starts at {expected:?}")]
    WrongPoint { expected: Point, found: Point },
    #[error("polar part not certified with {slots} coefficient slots")]
    PrecisionUnderflow { slots: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

impl TransformError {
    /// Whether a larger field would let the computation proceed.
    pub fn needs_extension(&self) -> bool {
        !self.missing_orders().is_empty()
    }

    /// Orders of roots of unity the field lacked, or empty for other errors.
    pub fn missing_orders(&self) -> Vec<u64> {
        let field_err = match self {
            TransformError::Field(e) => Some(e),
            TransformError::Series(SeriesError::Field(e)) => Some(e),
            TransformError::Symbol(SymbolError::Field(e)) => Some(e),
            TransformError::Symbol(SymbolError::Series(SeriesError::Field(e))) => Some(e),
            _ => None,
        };
        match field_err {
            Some(FieldError::NoRootInField {
                required_extra_orders, ..
            }) => required_extra_orders.clone(),
            Some(FieldError::OrderNotAvailable(n)) => vec![*n],
            _ => Vec::new(),
        }
    }
}

fn violated(condition: impl Into<String>) -> TransformError {
    TransformError::HypothesisViolation {
        condition: condition.into(),
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum TransformKind {
    #[serde(rename = "0toinf")]
    ZeroToInf,
    #[serde(rename = "inftoinf")]
    InfToInf,
    #[serde(rename = "inftozero")]
    InfToZero,
}

impl TransformKind {
    pub const ALL: [TransformKind; 3] = [
        TransformKind::ZeroToInf,
        TransformKind::InfToInf,
        TransformKind::InfToZero,
    ];

    pub fn source(self) -> Point {
        match self {
            TransformKind::ZeroToInf => Point::Zero,
            _ => Point::Infinity,
        }
    }

    pub fn target(self) -> Point {
        match self {
            TransformKind::InfToZero => Point::Zero,
            _ => Point::Infinity,
        }
    }

    /// Output pushforward index for a core of index `r` and depth `s`, if the transform is nonzero.
    pub fn exponent(self, r: u64, s: u64) -> Option<u64> {
        match self {
            TransformKind::ZeroToInf => Some(r + s),
            TransformKind::InfToInf => (s > r).then(|| s - r),
            TransformKind::InfToZero => (r > s).then(|| r - s),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::ZeroToInf => "0toinf",
            TransformKind::InfToInf => "inftoinf",
            TransformKind::InfToZero => "inftozero",
        })
    }
}

impl FromStr for TransformKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "0toinf" => Ok(TransformKind::ZeroToInf),
            "inftoinf" => Ok(TransformKind::InfToInf),
            "inftozero" => Ok(TransformKind::InfToZero),
            other => Err(format!(
                "unknown transform kind {other:?}; expected 0toinf, inftoinf or inftozero"
            )),
        }
    }
}

/// A solved Legendre system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreSolution {
    /// `t′` as a series in the source coordinate.
    pub lambda: LaurentSeries,
    /// The source coordinate as a series in the target coordinate.
    pub mu: LaurentSeries,
    /// Full `β` in the target coordinate, to its certified precision.
    pub beta_series: LaurentSeries,
    pub beta: WildPart,
    pub branch: u64,
    pub exponent_out: u64,
    pub slots: usize,
}

impl LegendreSolution {
    /// `λ₀`, the leading coefficient of the root `R = C^{1/e}`.
    pub fn lambda0(&self) -> FieldElem {
        self.lambda.leading().expect("nonzero root series")
    }
}

/// Checks every coprimality hypothesis for a wild block of index `r`, depth `s`.
pub fn check_hypotheses(p: u64, r: u64, s: u64, kind: TransformKind) -> Result<(), TransformError> {
    if p == 2 {
        return Err(violated("p must be odd (p does not divide 2)"));
    }
    if r.is_multiple_of(p) {
        return Err(violated(format!("p = {p} must not divide r = {r}")));
    }
    if s.is_multiple_of(p) {
        return Err(violated(format!("p = {p} must not divide s = {s}")));
    }
    if s >= p {
        return Err(violated(format!("s = {s} must be below p = {p}")));
    }
    let e = match kind.exponent(r, s) {
        Some(e) => e,
        None => return Ok(()),
    };
    if e % p == 0 {
        let name = match kind {
            TransformKind::ZeroToInf => "r+s",
            TransformKind::InfToInf => "s-r",
            TransformKind::InfToZero => "r-s",
        };
        return Err(violated(format!("p = {p} must not divide {name} = {e}")));
    }
    Ok(())
}

/// Solves the Legendre system of `kind` for the canonical root branch.
pub fn legendre(
    field: &Field,
    alpha: &WildPart,
    r: u64,
    kind: TransformKind,
    prec: Option<usize>,
) -> Result<LegendreSolution, TransformError> {
    legendre_branch(field, alpha, r, kind, prec, 0)
}

/// Solves the Legendre system with the root `λ₀·ζ_e^branch`.
pub fn legendre_branch(
    field: &Field,
    alpha: &WildPart,
    r: u64,
    kind: TransformKind,
    prec: Option<usize>,
    branch: u64,
) -> Result<LegendreSolution, TransformError> {
    let s = alpha.depth();
    if s == 0 {
        return Err(violated("the wild part must be nonzero"));
    }
    check_hypotheses(field.p(), r, s, kind)?;
    let e = kind.exponent(r, s).ok_or_else(|| match kind {
        TransformKind::InfToInf => violated(format!("s = {s} must exceed r = {r}")),
        _ => violated(format!("r = {r} must exceed s = {s}")),
    })?;
    let mut slots = prec.unwrap_or(2 * (r + s) as usize);
    let attempts = if prec.is_some() { 1 } else { RETRIES + 1 };
    for _ in 0..attempts {
        if let Some(sol) = solve_once(field, alpha, r, kind, e, slots, branch)? {
            return Ok(sol);
        }
        slots *= 2;
    }
    Err(TransformError::PrecisionUnderflow { slots: slots / 2 })
}

fn solve_once(
    field: &Field,
    alpha: &WildPart,
    r: u64,
    kind: TransformKind,
    e: u64,
    slots: usize,
    branch: u64,
) -> Result<Option<LegendreSolution>, TransformError> {
    let s = alpha.depth() as i64;
    let a = alpha.to_series(field);
    let sigma = if kind == TransformKind::ZeroToInf { -1 } else { 1 };
    let scale = field.div(field.from_int(sigma), field.from_int(r as i64))?;
    let c = a.derive().shift(s + 1).scale(scale).truncate(slots as i64);
    let c0 = c.coeff(0);
    let mut seed = field.nth_root(c0, e)?;
    if branch != 0 {
        seed = field.mul(seed, field.pow(field.root_of_unity(e)?, branch));
    }
    let root = c.nth_root_seeded(e, Some(seed))?;
    let u = LaurentSeries::var(field);
    let (v_of_u, lambda) = match kind.target() {
        Point::Infinity => (&u * &root.invert()?, root.shift(-1)),
        Point::Zero => (&u * &root, root.shift(1)),
    };
    let mu = v_of_u.reversion()?;
    let v = LaurentSeries::var(field);
    let coupling = match kind {
        TransformKind::ZeroToInf => &mu.pow(r as i64)? * &v.pow(-(e as i64))?,
        TransformKind::InfToInf => &mu.pow(-(r as i64))? * &v.pow(-(e as i64))?,
        TransformKind::InfToZero => &mu.pow(-(r as i64))? * &v.pow(e as i64)?,
    };
    let beta_series = &a.compose(&mu)? + &coupling;
    if beta_series.prec().is_none_or(|p| p < 0) {
        return Ok(None);
    }
    // derivative equation: C(μ) = R(μ)^e with R(μ) = μ/v or v/μ
    let ratio = match kind.target() {
        Point::Infinity => &mu * &v.pow(-1)?,
        Point::Zero => &v * &mu.invert()?,
    };
    let residual = &c.compose(&mu)? - &ratio.pow(e as i64)?;
    if residual.terms().next().is_some() {
        return Ok(None);
    }
    let beta = WildPart::new(field, beta_series.polar_terms()?)?;
    if beta.depth() != s as u64 {
        return Err(TransformError::VerificationFailed(format!(
            "output depth {} differs from input depth {s}",
            beta.depth()
        )));
    }
    Ok(Some(LegendreSolution {
        lambda,
        mu,
        beta_series,
        beta,
        branch,
        exponent_out: e,
        slots,
    }))
}

/// Leading coefficient `a(1 + s/r)/λ₀^s` of the `0 → ∞′` output.
pub fn leading_closed_form(
    field: &Field,
    a: FieldElem,
    r: u64,
    s: u64,
    lambda0: FieldElem,
) -> Result<FieldElem, FieldError> {
    let ratio = field.div(field.from_int((r + s) as i64), field.from_int(r as i64))?;
    field.div(field.mul(a, ratio), field.pow(lambda0, s))
}

/// Solves the reversed `0 → ∞′` system: recovers the polar part of `α` from `β` of index
/// `r + s`, with `seed` the `λ₀` of the forward solution.
pub fn legendre_inverse(
    field: &Field,
    beta: &WildPart,
    r_out: u64,
    r: u64,
    seed: FieldElem,
    prec: Option<usize>,
) -> Result<WildPart, TransformError> {
    let s = beta.depth() as i64;
    if r_out != r + s as u64 {
        return Err(violated(format!(
            "output index {r_out} must equal r + s = {}",
            r + s as u64
        )));
    }
    check_hypotheses(field.p(), r, s as u64, TransformKind::ZeroToInf)?;
    let slots = prec.unwrap_or(2 * r_out as usize) as i64;
    let b = beta.to_series(field);
    let scale = field.div(field.from_int(-1), field.from_int(r_out as i64))?;
    let big_s = b.derive().shift(s + 1).scale(scale).truncate(slots);
    let root = big_s.nth_root_seeded(r, Some(seed))?;
    let v = LaurentSeries::var(field);
    let t_of_v = &v * &root;
    let nu = t_of_v.reversion()?;
    let t = LaurentSeries::var(field);
    let alpha = &b.compose(&nu)? - &(&t.pow(r as i64)? * &nu.pow(-(r_out as i64))?);
    if alpha.prec().is_none_or(|p| p < 0) {
        return Err(TransformError::PrecisionUnderflow { slots: slots as usize });
    }
    Ok(WildPart::new(field, alpha.polar_terms()?)?)
}

/// Transforms one summand; `None` when its contribution vanishes.
pub fn transform_summand(
    field: &Field,
    x: &Summand,
    kind: TransformKind,
    prec: Option<usize>,
) -> Result<Option<Summand>, TransformError> {
    let chi_out = |chi: TameChar| match kind {
        TransformKind::InfToInf => chi,
        _ => chi.inv(),
    };
    if x.is_tame() {
        return match kind {
            TransformKind::InfToInf => Ok(None),
            _ if x.chi().is_trivial() => Err(TransformError::UnsupportedTameTrivial),
            _ => Ok(Some(x.with_chi(x.chi().inv()))),
        };
    }
    let (r, s) = (x.r(), x.depth());
    check_hypotheses(field.p(), r, s, kind)?;
    if kind.exponent(r, s).is_none() {
        return Ok(None);
    }
    let d = stabilizer(x);
    let core = descend(x, d)?;
    let sol = legendre(field, core.alpha(), core.r(), kind, prec)?;
    let chi = chi_out(x.chi()).mul(TameChar::chi2().pow(s as i64));
    Ok(Some(Summand::new(
        field,
        sol.exponent_out * d,
        sol.beta.substitute_power(d),
        chi,
        x.unip(),
    )?))
}

/// Applies a local Fourier transformation summand by summand; the output is canonical.
pub fn lft(
    field: &Field,
    obj: &LocalSheaf,
    kind: TransformKind,
    prec: Option<usize>,
) -> Result<LocalSheaf, TransformError> {
    if obj.point() != kind.source() {
        return Err(TransformError::WrongPoint {
            expected: kind.source(),
            found: obj.point(),
        });
    }
    let mut out = Vec::new();
    for x in obj.summands() {
        if let Some(y) = transform_summand(field, x, kind, prec)? {
            out.push(y);
        }
    }
    Ok(LocalSheaf::new(kind.target(), out).canonical(field)?)
}

/// Rank bookkeeping: `0 → ∞′` adds the Swan conductor; the other kinds keep `(s − r)·n`
/// resp. `(r − s)·n` per contributing wild block and the tame part.
pub fn rank_law_check(obj: &LocalSheaf, out: &LocalSheaf, kind: TransformKind) -> bool {
    let expected: u64 = match kind {
        TransformKind::ZeroToInf => obj.rank() + obj.swan(),
        _ => obj
            .summands()
            .iter()
            .map(|x| {
                if x.is_tame() {
                    if kind == TransformKind::InfToZero {
                        x.rank()
                    } else {
                        0
                    }
                } else {
                    kind.exponent(x.r(), x.depth()).unwrap_or(0) * x.unip()
                }
            })
            .sum(),
    };
    let slopes_ok = match kind {
        TransformKind::ZeroToInf => out.summands().iter().all(|y| y.is_tame() || y.depth() < y.r()),
        _ => true,
    };
    out.rank() == expected && slopes_ok && out.point() == kind.target()
}

/// Largest pushforward index and exponents a transform of `obj` touches; useful for field sizing.
pub fn required_orders(obj: &LocalSheaf, kind: TransformKind) -> Vec<u64> {
    let mut orders = Vec::new();
    for x in obj.summands() {
        orders.push(x.chi().order());
        if x.is_tame() {
            continue;
        }
        let d = stabilizer(x);
        let (r0, s0) = (x.r() / d, x.depth() / d);
        orders.push(x.r());
        if let Some(e) = kind.exponent(r0, s0) {
            orders.push(e);
            orders.push(e * d);
        }
    }
    orders.sort_unstable();
    orders.dedup();
    orders.retain(|&n| n > 1);
    orders
}
