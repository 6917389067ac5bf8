//! Brute-force exponential sums over F_q and the trace-level Fourier transform.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{build_field, Field, FieldElem, FieldError};
use crate::hyper::HypSpec;
use crate::symbol::TameChar;

/// Largest field for which tables are built.
pub const MAX_TABLE_Q: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("Gauss sum of the trivial character is not defined here")]
    TrivialCharacter,
    #[error("character of order {order} does not exist on F_{q}^*")]
    OrderNotAvailable { order: u64, q: u64 },
    #[error("field of size {0} is too large for brute-force tables")]
    TooLarge(u64),
    #[error("t must be nonzero")]
    ZeroArgument,
    #[error("at least one character is required")]
    Empty,
    #[error("table has {found} entries, expected {expected}")]
    BadTable { expected: usize, found: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Additive character and discrete-log tables for one field.
#[derive(Clone, Debug)]
pub struct CharEval {
    field: Field,
    psi: Vec<Complex64>,
    dlog: Vec<u64>,
    power: Vec<FieldElem>,
    inverse: Vec<FieldElem>,
}

impl CharEval {
    pub fn new(field: &Field) -> Result<Self, NumericError> {
        let q = field.q();
        if q > MAX_TABLE_Q {
            return Err(NumericError::TooLarge(q));
        }
        let p = field.p() as f64;
        let psi = field
            .elements()
            .map(|x| Complex64::from_polar(1.0, TAU * field.trace(x) as f64 / p))
            .collect();
        let mut dlog = vec![0; q as usize];
        let mut power = Vec::with_capacity(q as usize - 1);
        let mut x = field.one();
        for i in 0..q - 1 {
            dlog[x.packed() as usize] = i;
            power.push(x);
            x = field.mul(x, field.generator());
        }
        let mut inverse = vec![FieldElem::ZERO; q as usize];
        for i in 0..(q - 1) as usize {
            inverse[power[i].packed() as usize] = power[(q as usize - 1 - i) % (q as usize - 1)];
        }
        Ok(CharEval {
            field: field.clone(),
            psi,
            dlog,
            power,
            inverse,
        })
    }

    /// Tables for the degree-`ext` extension `GF(p^{k·ext})`.
    pub fn extension(&self, ext: usize) -> Result<Self, NumericError> {
        CharEval::new(&build_field(self.field.p(), self.field.k() * ext)?)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    /// `ψ(σ·x)` with `σ = ±1`.
    pub fn psi(&self, x: FieldElem, sign: i64) -> Complex64 {
        let v = self.psi[x.packed() as usize];
        if sign < 0 {
            v.conj()
        } else {
            v
        }
    }

    pub fn dlog(&self, x: FieldElem) -> Option<u64> {
        (!x.is_zero()).then(|| self.dlog[x.packed() as usize])
    }

    pub fn inv(&self, x: FieldElem) -> FieldElem {
        self.inverse[x.packed() as usize]
    }

    /// `g^i` for `0 ≤ i < q − 1`.
    pub fn power(&self, i: u64) -> FieldElem {
        self.power[(i % (self.q() - 1)) as usize]
    }

    fn check_order(&self, chi: TameChar) -> Result<(), NumericError> {
        if !(self.q() - 1).is_multiple_of(chi.order()) {
            return Err(NumericError::OrderNotAvailable {
                order: chi.order(),
                q: self.q(),
            });
        }
        Ok(())
    }

    /// Values of `χ` at `g^i`, indexed by `i`.
    fn char_by_log(&self, chi: TameChar) -> Result<Vec<Complex64>, NumericError> {
        self.check_order(chi)?;
        let (n, a) = (chi.order() as f64, chi.exp() as f64);
        Ok((0..self.q() - 1)
            .map(|i| Complex64::from_polar(1.0, TAU * a * ((i % chi.order()) as f64) / n))
            .collect())
    }
}

/// `χ(x)`, extended by zero at `x = 0`.
pub fn mult_char(eval: &CharEval, chi: TameChar, x: FieldElem) -> Result<Complex64, NumericError> {
    eval.check_order(chi)?;
    Ok(match eval.dlog(x) {
        None => Complex64::new(0.0, 0.0),
        Some(l) => {
            let k = (l % chi.order()) * chi.exp() % chi.order();
            Complex64::from_polar(1.0, TAU * k as f64 / chi.order() as f64)
        }
    })
}

/// `Σ_{x≠0} χ(x)ψ(x)`.
pub fn gauss_sum(eval: &CharEval, chi: TameChar) -> Result<Complex64, NumericError> {
    if chi.is_trivial() {
        return Err(NumericError::TrivialCharacter);
    }
    let table = eval.char_by_log(chi)?;
    Ok((0..eval.q() - 1)
        .map(|i| table[i as usize] * eval.psi(eval.power(i), 1))
        .sum())
}

/// `Σ_{x₁⋯xₙ = t} ψ(Σ xᵢ) Π λᵢ(xᵢ)` by direct enumeration.
pub fn kloosterman(eval: &CharEval, t: FieldElem, lambdas: &[TameChar]) -> Result<Complex64, NumericError> {
    hyp_sum(eval, t, &HypSpec::new(lambdas.to_vec(), vec![]))
}

/// The hypergeometric sum at `t` by direct enumeration of all `(q−1)^{n+m−1}` tuples.
pub fn hyp_sum(eval: &CharEval, t: FieldElem, spec: &HypSpec) -> Result<Complex64, NumericError> {
    let lt = eval.dlog(t).ok_or(NumericError::ZeroArgument)?;
    let n_vars = spec.n() + spec.m();
    if n_vars == 0 {
        return Err(NumericError::Empty);
    }
    let lam = spec
        .lambdas
        .iter()
        .map(|&c| eval.char_by_log(c))
        .collect::<Result<Vec<_>, _>>()?;
    let rho = spec
        .rhos
        .iter()
        .map(|&c| eval.char_by_log(c.inv()))
        .collect::<Result<Vec<_>, _>>()?;
    let f = eval.field();
    let order = eval.q() - 1;
    let mut logs = vec![0u64; n_vars - 1];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        // x₁ = t·Πy / Π_{i≥2} xᵢ, logs = (x₂..xₙ, y₁..y_m)
        let (xs, ys) = if spec.n() > 0 {
            logs.split_at(spec.n() - 1)
        } else {
            (&logs[..0], &logs[..])
        };
        let free = |v: &[u64]| v.iter().fold(0u64, |a, &b| (a + b) % order);
        let (head, y_logs): (u64, Vec<u64>) = if spec.n() > 0 {
            ((lt + free(ys) + order * 2 - free(xs) % order) % order, ys.to_vec())
        } else {
            // Πy = 1/t, y₁ determined
            let rest = free(&logs);
            let mut ys = vec![(order * 2 - lt - rest % order) % order];
            ys.extend_from_slice(&logs);
            (0, ys)
        };
        let mut value = Complex64::new(1.0, 0.0);
        let mut arg = f.zero();
        if spec.n() > 0 {
            let x_logs: Vec<u64> = std::iter::once(head).chain(xs.iter().copied()).collect();
            for (i, &l) in x_logs.iter().enumerate() {
                value *= lam[i][l as usize];
                arg = f.add(arg, eval.power(l));
            }
        }
        for (j, &l) in y_logs.iter().enumerate() {
            value *= rho[j][l as usize];
            arg = f.sub(arg, eval.power(l));
        }
        total += value * eval.psi(arg, 1);
        let mut i = 0;
        loop {
            if i == logs.len() {
                return Ok(total);
            }
            logs[i] += 1;
            if logs[i] < order {
                break;
            }
            logs[i] = 0;
            i += 1;
        }
    }
}

/// A complex value for every element of `F_q`, indexed by packed element.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub values: Vec<Complex64>,
}

impl TraceTable {
    pub fn zeros(q: u64) -> Self {
        TraceTable {
            values: vec![Complex64::new(0.0, 0.0); q as usize],
        }
    }

    pub fn from_fn(eval: &CharEval, f: impl FnMut(FieldElem) -> Complex64) -> Self {
        TraceTable {
            values: eval.field().elements().map(f).collect(),
        }
    }

    pub fn get(&self, x: FieldElem) -> Complex64 {
        self.values[x.packed() as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `|a − b| / max(1, |b|)` over all entries.
    pub fn max_rel_diff(&self, other: &TraceTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
            .fold(0.0, f64::max)
    }
}

fn ft_signed(eval: &CharEval, f: &TraceTable, sign: i64) -> Result<TraceTable, NumericError> {
    if f.len() as u64 != eval.q() {
        return Err(NumericError::BadTable {
            expected: eval.q() as usize,
            found: f.len(),
        });
    }
    let field = eval.field();
    let support: Vec<(FieldElem, Complex64)> = field
        .elements()
        .map(|x| (x, f.get(x)))
        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
        .collect();
    Ok(TraceTable::from_fn(eval, |s| {
        -support
            .iter()
            .map(|&(x, v)| v * eval.psi(field.mul(x, s), sign))
            .sum::<Complex64>()
    }))
}

/// `FT(f)(t′) = −Σ_t f(t)·ψ(t·t′)`.
pub fn ft_trace(eval: &CharEval, f: &TraceTable) -> Result<TraceTable, NumericError> {
    ft_signed(eval, f, 1)
}

/// Trace function of the hypergeometric complex on `F_q^*` (0 at `t = 0`), built by peeling
/// characters and applying the trace-level Fourier transform.
pub fn hyp_trace_recursive(eval: &CharEval, spec: &HypSpec) -> Result<TraceTable, NumericError> {
    if spec.n() + spec.m() == 0 {
        return Err(NumericError::Empty);
    }
    for &c in spec.lambdas.iter().chain(&spec.rhos) {
        eval.check_order(c)?;
    }
    trace_rec(eval, spec, 1)
}

fn trace_rec(eval: &CharEval, spec: &HypSpec, sign: i64) -> Result<TraceTable, NumericError> {
    let zero = Complex64::new(0.0, 0.0);
    if spec.n() == 0 {
        let mirrored = HypSpec::new(spec.rhos.iter().map(|c| c.inv()).collect(), vec![]);
        let prev = trace_rec(eval, &mirrored, -sign)?;
        return Ok(TraceTable::from_fn(eval, |t| {
            if t.is_zero() {
                zero
            } else {
                prev.get(eval.inv(t))
            }
        }));
    }
    let lambda = *spec.lambdas.last().unwrap();
    if spec.n() == 1 && spec.m() == 0 {
        return TraceTable::from_fn_result(eval, |t| Ok(-eval.psi(t, sign) * mult_char(eval, lambda, t)?));
    }
    let shift = lambda.inv();
    let inner = HypSpec::new(
        spec.lambdas[..spec.n() - 1].iter().map(|c| c.mul(shift)).collect(),
        spec.rhos.iter().map(|c| c.mul(shift)).collect(),
    );
    let prev = trace_rec(eval, &inner, sign)?;
    let pulled = TraceTable::from_fn(eval, |t| if t.is_zero() { zero } else { prev.get(eval.inv(t)) });
    let transformed = ft_signed(eval, &pulled, sign)?;
    TraceTable::from_fn_result(eval, |t| {
        Ok(if t.is_zero() {
            zero
        } else {
            transformed.get(t) * mult_char(eval, lambda, t)?
        })
    })
}

impl TraceTable {
    fn from_fn_result(
        eval: &CharEval,
        f: impl Fn(FieldElem) -> Result<Complex64, NumericError>,
    ) -> Result<Self, NumericError> {
        Ok(TraceTable {
            values: eval.field().elements().map(f).collect::<Result<_, _>>()?,
        })
    }
}

/// The hypergeometric sum at every `t ≠ 0` at once, as an iterated multiplicative convolution
/// over discrete logs.
pub fn hyp_sum_table(eval: &CharEval, spec: &HypSpec) -> Result<TraceTable, NumericError> {
    if spec.n() + spec.m() == 0 {
        return Err(NumericError::Empty);
    }
    let order = (eval.q() - 1) as usize;
    let mut factors = Vec::new();
    for &c in &spec.lambdas {
        let chi = eval.char_by_log(c)?;
        factors.push(
            (0..order)
                .map(|i| chi[i] * eval.psi(eval.power(i as u64), 1))
                .collect::<Vec<_>>(),
        );
    }
    for &c in &spec.rhos {
        // z = 1/y contributes ρ(z)·ψ(−1/z)
        let chi = eval.char_by_log(c)?;
        factors.push(
            (0..order)
                .map(|i| chi[i] * eval.psi(eval.power((order - i) as u64), -1))
                .collect::<Vec<_>>(),
        );
    }
    let mut acc = factors[0].clone();
    for g in &factors[1..] {
        let mut next = vec![Complex64::new(0.0, 0.0); order];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                next[(i + j) % order] += a * b;
            }
        }
        acc = next;
    }
    let mut table = TraceTable::zeros(eval.q());
    for (i, v) in acc.into_iter().enumerate() {
        table.values[eval.power(i as u64).packed() as usize] = v;
    }
    Ok(table)
}
