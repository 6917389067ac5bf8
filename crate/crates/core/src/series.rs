//! Truncated Laurent series over GF(p^k).
//!
//! A series stores dense coefficients from its valuation up to (excluding) its precision.
//! A precision of `None` marks an exact finite Laurent polynomial; then the coefficient
//! vector ends at the last nonzero term.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldElem, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("division by the zero series")]
    ZeroDivision,
    #[error("bad valuation: {0}")]
    BadValuation(String),
    #[error("root index {n} is not prime to the characteristic {p}")]
    NotCoprime { n: u64, p: u64 },
    #[error("seed {0} is not a root of the leading coefficient")]
    BadSeed(String),
    #[error("output precision cannot be certified: {0}")]
    PrecisionUnderflow(String),
    #[error("an exact polynomial input yields an infinite series; truncate it first")]
    NeedsPrecision,
    #[error("series has an unknown tail; only finite Laurent polynomials can be inverted in the variable")]
    InfiniteTail,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone)]
pub struct LaurentSeries {
    field: Field,
    val: i64,
    coeffs: Vec<FieldElem>,
    prec: Option<i64>,
}

impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.val == other.val && self.coeffs == other.coeffs && self.prec == other.prec
    }
}

impl Eq for LaurentSeries {}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

/// First `n` coefficients of the product of two power series.
pub(crate) fn mul_trunc(f: &Field, a: &[FieldElem], b: &[FieldElem], n: usize) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// Newton iteration for the inverse of a unit power series, `n` terms.
fn inv_unit(f: &Field, w: &[FieldElem], n: usize) -> Result<Vec<FieldElem>, SeriesError> {
    let mut y = vec![f.inv(w[0])?];
    let mut m = 1;
    while m < n {
        m = (2 * m).min(n);
        let wy = mul_trunc(f, w, &y, m);
        let mut e: Vec<FieldElem> = wy.iter().map(|&c| f.neg(c)).collect();
        e[0] = f.add(e[0], f.from_int(2));
        y = mul_trunc(f, &y, &e, m);
    }
    y.resize(n, FieldElem::ZERO);
    Ok(y)
}

fn pow_trunc(f: &Field, a: &[FieldElem], mut e: u64, n: usize) -> Vec<FieldElem> {
    let mut acc = vec![FieldElem::ZERO; n];
    if n > 0 {
        acc[0] = FieldElem::ONE;
    }
    let mut base = a[..a.len().min(n)].to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_trunc(f, &acc, &base, n);
        }
        e >>= 1;
        if e > 0 {
            base = mul_trunc(f, &base, &base, n);
        }
    }
    acc
}

/// Newton iteration for `y^N = w` with `w[0] = 1`, `y[0] = 1`, `n` terms.
fn root_unit(f: &Field, w: &[FieldElem], big_n: u64, n: usize) -> Result<Vec<FieldElem>, SeriesError> {
    let n_inv = f.inv(f.from_int((big_n % f.p()) as i64))?;
    let mut y = vec![FieldElem::ONE];
    let mut m = 1;
    while m < n {
        m = (2 * m).min(n);
        y.resize(m, FieldElem::ZERO);
        let y_pow = pow_trunc(f, &y, big_n - 1, m);
        let y_n = mul_trunc(f, &y_pow, &y, m);
        let resid: Vec<FieldElem> = (0..m)
            .map(|i| f.sub(y_n[i], w.get(i).copied().unwrap_or(FieldElem::ZERO)))
            .collect();
        let den_inv = inv_unit(f, &y_pow, m)?;
        let step = mul_trunc(f, &resid, &den_inv, m);
        for i in 0..m {
            y[i] = f.sub(y[i], f.mul(step[i], n_inv));
        }
    }
    y.resize(n, FieldElem::ZERO);
    Ok(y)
}

impl LaurentSeries {
    /// Normalizing constructor: strips leading zeros and fits the coefficient vector to `prec`.
    pub fn new(field: &Field, val: i64, coeffs: Vec<FieldElem>, prec: Option<i64>) -> Self {
        let mut coeffs = coeffs;
        let mut val = val;
        match coeffs.iter().position(|c| !c.is_zero()) {
            None => return Self::zero(field, prec),
            Some(i) => {
                coeffs.drain(..i);
                val += i as i64;
            }
        }
        match prec {
            Some(pr) => {
                if val >= pr {
                    return Self::zero(field, prec);
                }
                coeffs.resize((pr - val) as usize, FieldElem::ZERO);
            }
            None => {
                while coeffs.last().is_some_and(|c| c.is_zero()) {
                    coeffs.pop();
                }
            }
        }
        LaurentSeries {
            field: field.clone(),
            val,
            coeffs,
            prec,
        }
    }

    /// `O(u^prec)`, or the exact zero polynomial when `prec` is `None`.
    pub fn zero(field: &Field, prec: Option<i64>) -> Self {
        LaurentSeries {
            field: field.clone(),
            val: prec.unwrap_or(0),
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn exact(field: &Field, val: i64, coeffs: Vec<FieldElem>) -> Self {
        Self::new(field, val, coeffs, None)
    }

    pub fn monomial(field: &Field, c: FieldElem, e: i64) -> Self {
        Self::exact(field, e, vec![c])
    }

    pub fn one(field: &Field) -> Self {
        Self::monomial(field, FieldElem::ONE, 0)
    }

    /// The variable `u`.
    pub fn var(field: &Field) -> Self {
        Self::monomial(field, FieldElem::ONE, 1)
    }

    /// Exact polynomial from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(field: &Field, terms: &[(i64, FieldElem)]) -> Self {
        if terms.is_empty() {
            return Self::zero(field, None);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![FieldElem::ZERO; (hi - lo + 1) as usize];
        for &(e, c) in terms {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = field.add(*slot, c);
        }
        Self::exact(field, lo, coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Lowest exponent with a nonzero coefficient; `None` for the zero series.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<FieldElem> {
        self.coeffs.first().copied()
    }

    /// Coefficient at exponent `e`; zero outside the stored range.
    pub fn coeff(&self, e: i64) -> FieldElem {
        if self.is_zero() || e < self.val {
            return FieldElem::ZERO;
        }
        self.coeffs
            .get((e - self.val) as usize)
            .copied()
            .unwrap_or(FieldElem::ZERO)
    }

    /// One past the last stored exponent.
    fn end(&self) -> i64 {
        match self.prec {
            Some(p) => p,
            None => self.val + self.coeffs.len() as i64,
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FieldElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.val + i as i64, c))
    }

    /// Terms with negative exponent; fails unless all of them are known.
    pub fn polar_terms(&self) -> Result<Vec<(i64, FieldElem)>, SeriesError> {
        if self.prec.is_some_and(|p| p < 0) {
            return Err(SeriesError::PrecisionUnderflow(format!(
                "polar part requested but series is only known below u^{}",
                self.prec.unwrap()
            )));
        }
        Ok(self.terms().filter(|t| t.0 < 0).collect())
    }

    /// Lowers the precision to at most `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        let p = min_opt(self.prec, Some(prec));
        Self::new(&self.field, self.val, self.coeffs.clone(), p)
    }

    pub fn scale(&self, c: FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field, if self.is_exact() { None } else { self.prec });
        }
        let coeffs = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        Self::new(&self.field, self.val, coeffs, self.prec)
    }

    /// Multiplication by `u^n`.
    pub fn shift(&self, n: i64) -> Self {
        LaurentSeries {
            field: self.field.clone(),
            val: self.val + n,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + n),
        }
    }

    fn val_or_prec(&self) -> Option<i64> {
        if self.is_zero() {
            self.prec
        } else {
            Some(self.val)
        }
    }

    fn add_impl(&self, other: &Self) -> Self {
        assert_eq!(*self.field, *other.field, "series over different fields");
        let prec = min_opt(self.prec, other.prec);
        let lo = match (self.valuation(), other.valuation()) {
            (None, None) => return Self::zero(&self.field, prec),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        let hi = prec.unwrap_or_else(|| self.end().max(other.end()));
        if hi <= lo {
            return Self::zero(&self.field, prec);
        }
        let coeffs = (lo..hi)
            .map(|e| self.field.add(self.coeff(e), other.coeff(e)))
            .collect();
        Self::new(&self.field, lo, coeffs, prec)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        assert_eq!(*self.field, *other.field, "series over different fields");
        let prec = min_opt(
            add_opt(self.val_or_prec(), other.prec),
            add_opt(other.val_or_prec(), self.prec),
        );
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field, prec);
        }
        let val = self.val + other.val;
        let len = match prec {
            Some(p) => p - val,
            None => (self.coeffs.len() + other.coeffs.len() - 1) as i64,
        };
        if len <= 0 {
            return Self::zero(&self.field, prec);
        }
        let coeffs = mul_trunc(&self.field, &self.coeffs, &other.coeffs, len as usize);
        Self::new(&self.field, val, coeffs, prec)
    }

    /// Multiplicative inverse; `val(1/f) = −val(f)` and the relative precision is kept.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroDivision);
        }
        let f = &self.field;
        match self.prec {
            None if self.coeffs.len() == 1 => Ok(Self::monomial(f, f.inv(self.coeffs[0])?, -self.val)),
            None => Err(SeriesError::NeedsPrecision),
            Some(p) => {
                let rel = (p - self.val) as usize;
                let y = inv_unit(f, &self.coeffs, rel)?;
                Ok(Self::new(f, -self.val, y, Some(-self.val + rel as i64)))
            }
        }
    }

    pub fn derive(&self) -> Self {
        let f = &self.field;
        if self.is_zero() {
            return Self::zero(f, self.prec.map(|p| p - 1));
        }
        let p = f.p() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul(c, f.from_int((self.val + i as i64).rem_euclid(p))))
            .collect();
        Self::new(f, self.val - 1, coeffs, self.prec.map(|p| p - 1))
    }

    pub fn pow(&self, n: i64) -> Result<Self, SeriesError> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// `self ∘ g`. Needs `val(g) ≥ 1` unless `self` is an exact polynomial.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        if self.is_exact() {
            return self.compose_exact(g);
        }
        let vg = match g.valuation() {
            Some(v) if v >= 1 => v,
            _ => {
                return Err(SeriesError::PrecisionUnderflow(
                    "composing a truncated series needs an inner series of positive valuation".into(),
                ))
            }
        };
        let known = Self::new(&self.field, self.val, self.coeffs.clone(), None);
        let out = known.compose_exact(g)?;
        Ok(out.truncate(self.prec.unwrap() * vg))
    }

    fn compose_exact(&self, g: &Self) -> Result<Self, SeriesError> {
        let f = &self.field;
        if self.is_zero() {
            return Ok(Self::zero(f, None));
        }
        let mut acc = Self::monomial(f, *self.coeffs.last().unwrap(), 0);
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * g) + &Self::monomial(f, c, 0);
        }
        Ok(&acc * &g.pow(self.val)?)
    }

    /// Functional inverse of a valuation-1 series.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if self.valuation() != Some(1) {
            return Err(SeriesError::BadValuation("reversion needs valuation exactly 1".into()));
        }
        let f = &self.field;
        let lead_inv = f.inv(self.coeffs[0])?;
        let p = match self.prec {
            None if self.coeffs.len() == 1 => return Ok(Self::monomial(f, lead_inv, 1)),
            None => return Err(SeriesError::NeedsPrecision),
            Some(p) => p,
        };
        let mut g = Self::new(f, 1, vec![lead_inv], Some(p));
        let u = Self::var(f);
        let fp = self.derive();
        let steps = 64 - (p.max(2) as u64 - 1).leading_zeros() + 1;
        for _ in 0..steps {
            let resid = &self.compose(&g)? - &u;
            let slope = fp.compose(&g)?;
            g = (&g - &(&resid * &slope.invert()?)).truncate(p);
        }
        if g.prec != Some(p) {
            return Err(SeriesError::PrecisionUnderflow("reversion lost precision".into()));
        }
        Ok(g)
    }

    /// `N`-th root with the canonical root of the leading coefficient.
    pub fn nth_root(&self, n: u64) -> Result<Self, SeriesError> {
        self.nth_root_seeded(n, None)
    }

    /// `N`-th root whose leading coefficient is `seed` (canonical root when `None`).
    pub fn nth_root_seeded(&self, n: u64, seed: Option<FieldElem>) -> Result<Self, SeriesError> {
        let f = &self.field;
        if n.gcd(&f.p()) != 1 || n == 0 {
            return Err(SeriesError::NotCoprime { n, p: f.p() });
        }
        let lead = self
            .leading()
            .ok_or_else(|| SeriesError::BadValuation("root of the zero series".into()))?;
        if self.val.rem_euclid(n as i64) != 0 {
            return Err(SeriesError::BadValuation(format!(
                "{n} does not divide the valuation {}",
                self.val
            )));
        }
        let c0 = match seed {
            Some(s) if f.pow(s, n) == lead => s,
            Some(s) => return Err(SeriesError::BadSeed(f.display(s))),
            None => f.nth_root(lead, n)?,
        };
        let v = self.val / n as i64;
        let p = match self.prec {
            None if self.coeffs.len() == 1 => return Ok(Self::monomial(f, c0, v)),
            None => return Err(SeriesError::NeedsPrecision),
            Some(p) => p,
        };
        let rel = (p - self.val) as usize;
        let lead_inv = f.inv(lead)?;
        let w: Vec<FieldElem> = self.coeffs.iter().map(|&c| f.mul(c, lead_inv)).collect();
        let y = root_unit(f, &w, n, rel)?;
        let coeffs = y.into_iter().map(|c| f.mul(c, c0)).collect();
        Ok(Self::new(f, v, coeffs, Some(v + rel as i64)))
    }

    /// Substitutes `u ↦ u^d`.
    pub fn substitute_power(&self, d: u64) -> Result<Self, SeriesError> {
        if d == 0 {
            return Err(SeriesError::BadValuation("substitution power must be positive".into()));
        }
        let d = d as i64;
        let prec = self.prec.map(|p| p * d);
        if self.is_zero() {
            return Ok(Self::zero(&self.field, prec));
        }
        let mut coeffs = vec![FieldElem::ZERO; (self.coeffs.len() - 1) * d as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * d as usize] = c;
        }
        Ok(Self::new(&self.field, self.val * d, coeffs, prec))
    }

    /// Substitutes `u ↦ 1/u` in an exact Laurent polynomial.
    pub fn invert_variable(&self) -> Result<Self, SeriesError> {
        if !self.is_exact() {
            return Err(SeriesError::InfiniteTail);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let deg = self.val + self.coeffs.len() as i64 - 1;
        let coeffs = self.coeffs.iter().rev().copied().collect();
        Ok(Self::exact(&self.field, -deg, coeffs))
    }

    pub fn to_doc(&self) -> SeriesDoc {
        SeriesDoc {
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| self.field.coords(c)).collect(),
        }
    }

    pub fn from_doc(field: &Field, doc: &SeriesDoc) -> Result<Self, SeriesError> {
        let coeffs = doc
            .coeffs
            .iter()
            .map(|c| field.elem(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(field, doc.val, coeffs, doc.prec))
    }
}

/// Serialized series; `prec: null` marks an exact polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub val: i64,
    pub prec: Option<i64>,
    pub coeffs: Vec<Vec<u64>>,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms()
            .map(|(e, c)| format!("{}*u^{}", self.field.display(c), e))
            .collect();
        let body = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        match self.prec {
            Some(p) => write!(f, "{body} + O(u^{p})"),
            None => write!(f, "{body}"),
        }
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_impl(rhs)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_impl(&-rhs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        LaurentSeries { coeffs, ..self.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}
