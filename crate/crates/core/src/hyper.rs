//! Local monodromy of hypergeometric sheaves at 0, 1 and ∞: a closed form, and an independent
//! construction by recursion through the local Fourier transforms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldElem};
use crate::symbol::{LocalSheaf, Point, Summand, SymbolDoc, SymbolError, TameChar, WildPart};
use crate::transform::{lft, TransformError, TransformKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypError {
    #[error("character {0} occurs among both the lambdas and the rhos")]
    DisjointnessViolated(TameChar),
    #[error("p = {p} must be prime to every integer in 2..={bound}")]
    SmallCharacteristic { p: u64, bound: usize },
    #[error("at least one character is required")]
    Empty,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

impl HypError {
    pub fn needs_extension(&self) -> bool {
        !self.missing_orders().is_empty()
    }

    pub fn missing_orders(&self) -> Vec<u64> {
        match self {
            HypError::Transform(e) => e.missing_orders(),
            HypError::Symbol(e) => TransformError::Symbol(e.clone()).missing_orders(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypSpec {
    pub lambdas: Vec<TameChar>,
    pub rhos: Vec<TameChar>,
}

impl HypSpec {
    pub fn new(lambdas: Vec<TameChar>, rhos: Vec<TameChar>) -> Self {
        HypSpec { lambdas, rhos }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn m(&self) -> usize {
        self.rhos.len()
    }

    pub fn rank(&self) -> usize {
        self.n().max(self.m())
    }

    /// Checks disjointness, non-emptiness and that `p` is prime to `2..=max(n, m)`.
    pub fn validate(&self, p: u64) -> Result<(), HypError> {
        if self.n() == 0 && self.m() == 0 {
            return Err(HypError::Empty);
        }
        if let Some(c) = self.lambdas.iter().find(|c| self.rhos.contains(c)) {
            return Err(HypError::DisjointnessViolated(*c));
        }
        let bound = self.rank();
        if (2..=bound as u64).any(|k| k % p == 0) {
            return Err(HypError::SmallCharacteristic { p, bound });
        }
        Ok(())
    }

    /// Roots of unity a field needs so every stage of either construction stays rational.
    pub fn required_orders(&self) -> Vec<u64> {
        (2..=self.rank() as u64).collect()
    }

    fn inverted(&self) -> HypSpec {
        HypSpec {
            lambdas: self.rhos.iter().map(|c| c.inv()).collect(),
            rhos: self.lambdas.iter().map(|c| c.inv()).collect(),
        }
    }
}

pub fn mult0(spec: &HypSpec, chi: TameChar) -> usize {
    spec.lambdas.iter().filter(|&&c| c == chi).count()
}

pub fn mult_inf(spec: &HypSpec, chi: TameChar) -> usize {
    spec.rhos.iter().filter(|&&c| c == chi).count()
}

/// Behaviour at 1 when `n = m`: rank of the invariants and the character of the rank-1 quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct At1 {
    pub stalk_rank: usize,
    pub quotient_char: TameChar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypLocalData {
    pub rank: usize,
    pub at0: LocalSheaf,
    pub at_inf: LocalSheaf,
    pub at1: Option<At1>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypLocalDoc {
    pub rank: usize,
    pub at0: SymbolDoc,
    #[serde(rename = "atInf")]
    pub at_inf: SymbolDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub at1: Option<At1>,
}

impl HypLocalData {
    pub fn to_doc(&self, field: &Field) -> HypLocalDoc {
        HypLocalDoc {
            rank: self.rank,
            at0: self.at0.to_doc(field),
            at_inf: self.at_inf.to_doc(field),
            at1: self.at1,
        }
    }

    pub fn from_doc(field: &Field, doc: &HypLocalDoc) -> Result<Self, SymbolError> {
        Ok(HypLocalData {
            rank: doc.rank,
            at0: LocalSheaf::from_doc(field, &doc.at0)?,
            at_inf: LocalSheaf::from_doc(field, &doc.at_inf)?,
            at1: doc.at1,
        })
    }
}

fn product(chars: &[TameChar]) -> TameChar {
    chars.iter().fold(TameChar::TRIVIAL, |a, &b| a.mul(b))
}

/// `⊕_χ K_χ ⊗ U(mult(χ))`.
fn tame_blocks(field: &Field, chars: &[TameChar]) -> Result<Vec<Summand>, SymbolError> {
    let mut distinct: Vec<TameChar> = chars.to_vec();
    distinct.sort();
    distinct.dedup();
    distinct
        .into_iter()
        .map(|c| Summand::tame(field, c, chars.iter().filter(|&&x| x == c).count() as u64))
        .collect()
}

fn linear_pole(field: &Field, c: i64) -> Result<WildPart, SymbolError> {
    WildPart::monomial(field, field.from_int(c), -1)
}

/// Closed-form local data.
pub fn hyp_local(field: &Field, spec: &HypSpec) -> Result<HypLocalData, HypError> {
    spec.validate(field.p())?;
    let (n, m) = (spec.n() as i64, spec.m() as i64);
    let mut at0 = tame_blocks(field, &spec.lambdas)?;
    let mut at_inf = tame_blocks(field, &spec.rhos)?;
    let chi2 = TameChar::chi2().pow(n + m - 1);
    let prod = product(&spec.lambdas).mul(product(&spec.rhos).inv());
    if n > m {
        at_inf.push(Summand::new(
            field,
            (n - m) as u64,
            linear_pole(field, n - m)?,
            prod.mul(chi2),
            1,
        )?);
    } else if n < m {
        at0.push(Summand::new(
            field,
            (m - n) as u64,
            linear_pole(field, n - m)?,
            prod.inv().mul(chi2),
            1,
        )?);
    }
    let at1 = (n == m).then(|| At1 {
        stalk_rank: spec.n() - 1,
        quotient_char: prod.inv(),
    });
    Ok(HypLocalData {
        rank: spec.rank(),
        at0: LocalSheaf::new(Point::Zero, at0).canonical(field)?,
        at_inf: LocalSheaf::new(Point::Infinity, at_inf).canonical(field)?,
        at1,
    })
}

/// Local data rebuilt by peeling one character at a time and applying local Fourier transforms.
pub fn hyp_local_recursive(field: &Field, spec: &HypSpec) -> Result<HypLocalData, HypError> {
    spec.validate(field.p())?;
    rec(field, spec)
}

fn rec(field: &Field, spec: &HypSpec) -> Result<HypLocalData, HypError> {
    let (n, m) = (spec.n(), spec.m());
    if n == 0 && m == 0 {
        return Err(HypError::Empty);
    }
    if n == 1 && m == 0 {
        let lambda = spec.lambdas[0];
        return Ok(HypLocalData {
            rank: 1,
            at0: LocalSheaf::new(Point::Zero, vec![Summand::tame(field, lambda, 1)?]),
            at_inf: LocalSheaf::new(
                Point::Infinity,
                vec![Summand::new(field, 1, linear_pole(field, 1)?, lambda, 1)?],
            ),
            at1: None,
        });
    }
    if n == m {
        return rec_balanced(field, spec);
    }
    if n == 0 || (m >= 1 && n > m) {
        let g = rec(field, &spec.inverted())?;
        return Ok(HypLocalData {
            rank: g.rank,
            at0: g.at_inf.inv().negate_wild(field).canonical(field)?,
            at_inf: g.at0.inv().negate_wild(field).canonical(field)?,
            at1: None,
        });
    }
    let (lambda, g) = peel(field, spec)?;
    let d0 = g.at_inf.inv();
    let d_inf = g.at0.inv();
    let at_inf = fourier_at_inf(field, &d0, &d_inf)?;
    let (trivial, rest): (Vec<Summand>, Vec<Summand>) = d_inf
        .summands()
        .iter()
        .cloned()
        .partition(|x| x.is_tame() && x.chi().is_trivial());
    let mut at0 = lft(
        field,
        &LocalSheaf::new(Point::Infinity, rest),
        TransformKind::InfToZero,
        None,
    )?
    .summands()
    .to_vec();
    let unip = trivial.iter().map(|x| x.unip()).sum::<u64>() + 1;
    at0.push(Summand::tame(field, TameChar::TRIVIAL, unip)?);
    Ok(HypLocalData {
        rank: spec.rank(),
        at0: LocalSheaf::new(Point::Zero, at0).twist(lambda).canonical(field)?,
        at_inf: at_inf.twist(lambda).canonical(field)?,
        at1: None,
    })
}

/// Normalizes `λ_n` to the trivial character and recurses on the shorter spec.
fn peel(field: &Field, spec: &HypSpec) -> Result<(TameChar, HypLocalData), HypError> {
    let lambda = *spec.lambdas.last().expect("at least one lambda");
    let shift = lambda.inv();
    let inner = HypSpec {
        lambdas: spec.lambdas[..spec.n() - 1].iter().map(|c| c.mul(shift)).collect(),
        rhos: spec.rhos.iter().map(|c| c.mul(shift)).collect(),
    };
    Ok((lambda, rec(field, &inner)?))
}

/// Stationary phase at ∞′ from the two pieces of `j_! inv^*` of the previous stage.
fn fourier_at_inf(field: &Field, d0: &LocalSheaf, d_inf: &LocalSheaf) -> Result<LocalSheaf, HypError> {
    let a = lft(field, d0, TransformKind::ZeroToInf, None)?;
    let b = lft(field, d_inf, TransformKind::InfToInf, None)?;
    Ok(a.merge(&b))
}

fn balanced_at_inf(field: &Field, spec: &HypSpec) -> Result<(LocalSheaf, Option<At1>), HypError> {
    let (lambda, g) = peel(field, spec)?;
    let d0 = g.at_inf.inv();
    let d_inf = g.at0.inv();
    let at_inf = fourier_at_inf(field, &d0, &d_inf)?.twist(lambda).canonical(field)?;
    let shifted = d_inf
        .summands()
        .iter()
        .map(|x| x.tensor_artin_schreier(field, &[(-1, FieldElem::ONE)]))
        .collect::<Result<Vec<_>, _>>()?;
    let (tame, wild): (Vec<Summand>, Vec<Summand>) = shifted.into_iter().partition(|x| x.is_tame());
    let mut quotient = lft(
        field,
        &LocalSheaf::new(Point::Infinity, wild),
        TransformKind::InfToZero,
        None,
    )?
    .summands()
    .to_vec();
    quotient.extend(tame.iter().map(|x| x.with_chi(x.chi().inv())));
    let at1 = match quotient.as_slice() {
        [x] if x.is_tame() && x.unip() == 1 => Some(At1 {
            stalk_rank: spec.n() - 1,
            quotient_char: x.chi(),
        }),
        _ => None,
    };
    Ok((at_inf, at1))
}

fn rec_balanced(field: &Field, spec: &HypSpec) -> Result<HypLocalData, HypError> {
    let (at_inf, at1) = balanced_at_inf(field, spec)?;
    let (mirror, _) = balanced_at_inf(field, &spec.inverted())?;
    Ok(HypLocalData {
        rank: spec.rank(),
        at0: mirror.inv().negate_wild(field).canonical(field)?,
        at_inf,
        at1,
    })
}
