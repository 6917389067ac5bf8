//! Exact arithmetic in GF(p^k).
//!
//! Elements are packed into a single `u64` as base-p digits `c0 + c1·p + … + c_{k-1}·p^{k-1}`,
//! where `c_i` are coordinates in the power basis of the field modulus. Small fields
//! (q ≤ 2^20) carry exp/log tables; larger fields use polynomial multiplication and a
//! Pohlig–Hellman discrete log.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("GF({p}^{k}) is too large for packed arithmetic")]
    TooLarge { p: u64, k: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete log of zero")]
    DlogOfZero,
    #[error("no {n}-th root in the current field; elements of order {required_extra_orders:?} are needed")]
    NoRootInField { n: u64, required_extra_orders: Vec<u64> },
    #[error("the field has no element of order {0}")]
    OrderNotAvailable(u64),
    #[error("invalid field descriptor: {0}")]
    BadDescriptor(String),
    #[error("invalid element coordinates: {0}")]
    BadElement(String),
}

/// A field element, packed as base-p digits. Only meaningful together with its [`FieldCtx`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FieldElem(u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn packed(self) -> u64 {
        self.0
    }

    /// Wraps a packed value without validation; the caller guarantees `v < q`.
    pub fn from_packed(v: u64) -> Self {
        FieldElem(v)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Shared handle to a field context.
pub type Field = Arc<FieldCtx>;

/// Serializable description of a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub k: usize,
    pub modulus: Vec<u64>,
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct BabySteps {
    /// per prime factor ℓ of q−1: (γ^{-m}, m, {γ^j ↦ j})
    tables: Vec<(FieldElem, u64, HashMap<u64, u64>)>,
}

pub struct FieldCtx {
    p: u64,
    k: usize,
    q: u64,
    modulus: Vec<u64>,
    generator: FieldElem,
    group_factors: Vec<(u64, u32)>,
    tables: Option<LogTables>,
    baby: OnceLock<BabySteps>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.k, self.modulus)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Builds GF(p^k) with the least monic irreducible modulus and the least primitive element.
pub fn build_field(p: u64, k: usize) -> Result<Field, FieldError> {
    check_size(p, k)?;
    let modulus = least_irreducible(p, k);
    Ok(Arc::new(FieldCtx::with_modulus(p, k, modulus)))
}

/// Least `k` such that every `N` in `orders` divides `p^k − 1`.
///
/// # Panics
/// If some order shares a factor with `p`.
pub fn suggest_degree(p: u64, orders: &[u64]) -> usize {
    orders.iter().fold(1usize, |acc, &n| {
        assert!(n.gcd(&p) == 1, "order {n} is not prime to {p}");
        acc.lcm(&(arith::multiplicative_order(p % n.max(1), n) as usize))
    })
}

fn check_size(p: u64, k: usize) -> Result<u64, FieldError> {
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if !arith::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(FieldError::TooLarge { p, k });
    }
    match p.checked_pow(k as u32) {
        Some(q) if q < 1 << 62 => Ok(q),
        _ => Err(FieldError::TooLarge { p, k }),
    }
}

impl FieldCtx {
    fn with_modulus(p: u64, k: usize, modulus: Vec<u64>) -> Self {
        let q = p.pow(k as u32);
        let group_factors = arith::factor(q - 1);
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            generator: FieldElem::ONE,
            group_factors,
            tables: None,
            baby: OnceLock::new(),
        };
        ctx.generator = (1..q)
            .map(FieldElem)
            .find(|&g| ctx.is_primitive(g))
            .expect("multiplicative group is cyclic");
        if q <= TABLE_LIMIT {
            let n = (q - 1) as usize;
            let mut exp = Vec::with_capacity(n);
            let mut log = vec![0u32; q as usize];
            let mut x = FieldElem::ONE;
            for i in 0..n {
                exp.push(x.0 as u32);
                log[x.0 as usize] = i as u32;
                x = ctx.mul_poly(x, ctx.generator);
            }
            ctx.tables = Some(LogTables { exp, log });
        }
        ctx
    }

    /// Rebuilds a field from its descriptor; the modulus must be monic and irreducible.
    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Field, FieldError> {
        check_size(d.p, d.k)?;
        if d.modulus.len() != d.k + 1 || d.modulus[d.k] != 1 {
            return Err(FieldError::BadDescriptor("modulus must be monic of degree k".into()));
        }
        if d.modulus.iter().any(|&c| c >= d.p) {
            return Err(FieldError::BadDescriptor("modulus coefficient out of range".into()));
        }
        if !is_irreducible(&d.modulus, d.p) {
            return Err(FieldError::BadDescriptor("modulus is reducible".into()));
        }
        Ok(Arc::new(FieldCtx::with_modulus(d.p, d.k, d.modulus.clone())))
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            k: self.k,
            modulus: self.modulus.clone(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of elements.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u64)
    }

    pub fn elem(&self, coords: &[u64]) -> Result<FieldElem, FieldError> {
        if coords.len() != self.k {
            return Err(FieldError::BadElement(format!(
                "expected {} coordinates, got {}",
                self.k,
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::BadElement(format!("coordinate {c} not below {}", self.p)));
        }
        Ok(FieldElem(coords.iter().rev().fold(0, |acc, &c| acc * self.p + c)))
    }

    pub fn coords(&self, x: FieldElem) -> Vec<u64> {
        let mut v = x.0;
        (0..self.k)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    /// Checked conversion from a packed value.
    pub fn from_packed(&self, v: u64) -> Result<FieldElem, FieldError> {
        if v >= self.q {
            return Err(FieldError::BadElement(format!("packed value {v} not below {}", self.q)));
        }
        Ok(FieldElem(v))
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.k == 1 {
            return FieldElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        for _ in 0..self.k {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.k == 1 {
            return FieldElem((self.p - a.0) % self.p);
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        for _ in 0..self.k {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let n = self.q - 1;
                let i = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % n;
                FieldElem(t.exp[i as usize] as u64)
            }
            None => self.mul_poly(a, b),
        }
    }

    /// Multiplication by polynomial arithmetic modulo the field modulus.
    pub(crate) fn mul_poly(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let (p, k) = (self.p, self.k);
        if k == 1 {
            return FieldElem(arith::mul_mod(a.0, b.0, p));
        }
        let (da, db) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                prod[i - k + j] = (prod[i - k + j] + (p - c) * self.modulus[j]) % p;
            }
        }
        prod.truncate(k);
        FieldElem(prod.iter().rev().fold(0, |acc, &c| acc * p + c))
    }

    pub fn pow(&self, x: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if x.is_zero() {
            return FieldElem::ZERO;
        }
        if let Some(t) = &self.tables {
            let n = self.q - 1;
            let i = arith::mul_mod(t.log[x.0 as usize] as u64, e % n, n);
            return FieldElem(t.exp[i as usize] as u64);
        }
        let (mut acc, mut base, mut e) = (FieldElem::ONE, x, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents invert.
    pub fn pow_signed(&self, x: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if e >= 0 {
            Ok(self.pow(x, e as u64))
        } else {
            Ok(self.pow(self.inv(x)?, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(x, self.q - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn frobenius(&self, x: FieldElem) -> FieldElem {
        self.pow(x, self.p)
    }

    /// The unique `y` with `y^p = x`.
    pub fn pth_root(&self, x: FieldElem) -> FieldElem {
        self.pow(x, self.q / self.p)
    }

    /// Absolute trace to GF(p), as an integer in `[0, p)`.
    pub fn trace(&self, x: FieldElem) -> u64 {
        let mut acc = FieldElem::ZERO;
        let mut y = x;
        for _ in 0..self.k {
            acc = self.add(acc, y);
            y = self.frobenius(y);
        }
        acc.0
    }

    fn is_primitive(&self, g: FieldElem) -> bool {
        !g.is_zero()
            && self
                .group_factors
                .iter()
                .all(|&(l, _)| self.pow(g, (self.q - 1) / l) != FieldElem::ONE)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: FieldElem) -> Result<u64, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut ord = self.q - 1;
        for &(l, _) in &self.group_factors {
            while ord.is_multiple_of(l) && self.pow(x, ord / l) == FieldElem::ONE {
                ord /= l;
            }
        }
        Ok(ord)
    }

    /// Least `e ≥ 0` with `generator^e = x`.
    pub fn dlog(&self, x: FieldElem) -> Result<u64, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DlogOfZero);
        }
        if let Some(t) = &self.tables {
            return Ok(t.log[x.0 as usize] as u64);
        }
        Ok(self.pohlig_hellman(x))
    }

    fn baby_steps(&self) -> &BabySteps {
        self.baby.get_or_init(|| {
            let n = self.q - 1;
            let tables = self
                .group_factors
                .iter()
                .map(|&(l, _)| {
                    let gamma = self.pow(self.generator, n / l);
                    let m = (l as f64).sqrt().ceil() as u64 + 1;
                    let mut map = HashMap::with_capacity(m as usize);
                    let mut x = FieldElem::ONE;
                    for j in 0..m {
                        map.entry(x.0).or_insert(j);
                        x = self.mul(x, gamma);
                    }
                    let step = self.pow(self.inv(gamma).expect("nonzero"), m);
                    (step, m, map)
                })
                .collect();
            BabySteps { tables }
        })
    }

    fn pohlig_hellman(&self, x: FieldElem) -> u64 {
        let n = self.q - 1;
        let baby = self.baby_steps();
        let mut residue = 0u64;
        let mut modulus = 1u64;
        for (idx, &(l, e)) in self.group_factors.iter().enumerate() {
            let le = l.pow(e);
            let g_l = self.pow(self.generator, n / le);
            let h = self.pow(x, n / le);
            let (step, m, map) = &baby.tables[idx];
            let g_l_inv = self.inv(g_l).expect("nonzero");
            let mut digits = 0u64;
            let mut lpow = 1u64;
            for i in 0..e {
                let shifted = self.mul(h, self.pow(g_l_inv, digits));
                let hi = self.pow(shifted, l.pow(e - 1 - i));
                let mut y = hi;
                let mut d = None;
                for giant in 0..=*m {
                    if let Some(&j) = map.get(&y.0) {
                        d = Some(giant * m + j);
                        break;
                    }
                    y = self.mul(y, *step);
                }
                digits += d.expect("element lies in the cyclic group") % l * lpow;
                lpow *= l;
            }
            // CRT merge of residue mod `modulus` with digits mod le
            let inv = arith::inv_mod(modulus % le, le).unwrap_or(0);
            let diff = (digits + le - residue % le) % le;
            let t = arith::mul_mod(diff, inv, le);
            residue += modulus * t;
            modulus *= le;
        }
        residue % n
    }

    /// Canonical `n`-th root: `g^j'` for the least `j' ≥ 0` with `n·j' ≡ dlog(x) mod q−1`.
    pub fn nth_root(&self, x: FieldElem, n: u64) -> Result<FieldElem, FieldError> {
        if x.is_zero() {
            return Ok(FieldElem::ZERO);
        }
        let m = self.q - 1;
        let j = self.dlog(x)?;
        let g = n.gcd(&m);
        if j % g != 0 {
            let ord = self.order(x)?;
            return Err(FieldError::NoRootInField {
                n,
                required_extra_orders: vec![n * ord],
            });
        }
        let m2 = m / g;
        let jp = if m2 == 1 {
            0
        } else {
            let inv = arith::inv_mod((n / g) % m2, m2).expect("coprime after division");
            arith::mul_mod((j / g) % m2, inv, m2)
        };
        Ok(self.pow(self.generator, jp))
    }

    /// The fixed primitive `n`-th root of unity `g^((q−1)/n)`.
    pub fn root_of_unity(&self, n: u64) -> Result<FieldElem, FieldError> {
        if n == 0 || !(self.q - 1).is_multiple_of(n) {
            return Err(FieldError::OrderNotAvailable(n));
        }
        Ok(self.pow(self.generator, (self.q - 1) / n))
    }

    /// Human-readable form: the integer for prime fields, coordinates otherwise.
    pub fn display(&self, x: FieldElem) -> String {
        if self.k == 1 {
            x.0.to_string()
        } else {
            format!("{:?}", self.coords(x))
        }
    }
}

// Polynomials over GF(p), coefficient vectors low to high with no trailing zeros.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = arith::inv_mod(f[df], p).expect("nonzero leading coefficient");
    while r.len() > df {
        let c = arith::mul_mod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - 1 - df;
        for (j, &fj) in f.iter().enumerate() {
            r[shift + j] = (r[shift + j] + (p - arith::mul_mod(c, fj, p))) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + arith::mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = poly_rem(a, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, f, p);
        }
        base = poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility over GF(p): `gcd(f, x^(p^i) − x) = 1` for `1 ≤ i ≤ deg f / 2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 1..=k / 2 {
        xp = poly_powmod(&xp, p, f, p);
        let mut h = xp.clone();
        h.resize(h.len().max(2), 0);
        h[1] = (h[1] + p - 1) % p;
        let g = poly_gcd(f, &trim(h), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn least_irreducible(p: u64, k: usize) -> Vec<u64> {
    let count = p.pow(k as u32);
    (0..count)
        .map(|n| {
            let mut v = n;
            let mut f: Vec<u64> = (0..k)
                .map(|_| {
                    let d = v % p;
                    v /= p;
                    d
                })
                .collect();
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials of every degree exist")
}
