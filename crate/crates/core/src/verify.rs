//! Self-check suites behind the `verify` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{build_field, suggest_degree, Field, FieldElem};
use crate::hyper::{hyp_local, hyp_local_recursive, HypSpec};
use crate::numeric::{ft_trace, gauss_sum, hyp_sum_table, hyp_trace_recursive, CharEval, TraceTable};
use crate::series::LaurentSeries;
use crate::symbol::{
    as_reduce, canonicalize, descend, equal, stabilizer, LocalSheaf, Point, Summand, TameChar, WildPart,
};
use crate::transform::{
    check_hypotheses, leading_closed_form, legendre, legendre_branch, legendre_inverse, lft, rank_law_check,
    transform_summand, TransformKind,
};

pub const SUITES: [&str; 10] = [
    "legendre",
    "zero",
    "involution",
    "descent",
    "rank",
    "branch",
    "artin-schreier",
    "hyper",
    "numeric",
    "all",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub p: u64,
    pub checks: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn outcome<T, E: std::fmt::Display>(&mut self, r: Result<T, E>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{}: {e}", what()));
                None
            }
        }
    }
}

/// Runs one named suite (or every suite for `"all"`) with `count` random instances.
pub fn run_suite(name: &str, p: u64, seed: u64, count: usize) -> Result<Vec<SuiteReport>, VerifyError> {
    if p < 3 || !crate::arith::is_prime(p) {
        return Err(VerifyError::BadPrime(p));
    }
    if name == "all" {
        return SUITES[..SUITES.len() - 1]
            .iter()
            .map(|s| run_suite(s, p, seed, count).map(|mut v| v.remove(0)))
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let mut t = Tally::new();
    match name {
        "legendre" => suite_legendre(&mut t, &mut rng, p, count),
        "zero" => suite_zero(&mut t, &mut rng, p, count),
        "involution" => suite_involution(&mut t, &mut rng, p, count),
        "descent" => suite_descent(&mut t, &mut rng, p, count),
        "rank" => suite_rank(&mut t, &mut rng, p, count),
        "branch" => suite_branch(&mut t, &mut rng, p, count),
        "artin-schreier" => suite_artin_schreier(&mut t, &mut rng, p, count),
        "hyper" => suite_hyper(&mut t, p),
        "numeric" => suite_numeric(&mut t, p),
        other => return Err(VerifyError::UnknownSuite(other.into())),
    }
    Ok(vec![SuiteReport {
        suite: name.into(),
        p,
        checks: t.checks,
        passed: t.failures.is_empty(),
        failures: t.failures,
    }])
}

fn pick_rs(rng: &mut ChaCha8Rng, p: u64, kind: TransformKind) -> (u64, u64) {
    loop {
        let (r, s) = (rng.gen_range(1..=6), rng.gen_range(1..=6u64.min(p - 1)));
        if kind.exponent(r, s).is_some() && check_hypotheses(p, r, s, kind).is_ok() {
            return (r, s);
        }
    }
}

fn random_alpha(rng: &mut ChaCha8Rng, f: &Field, s: u64) -> WildPart {
    let p = f.p() as i64;
    let terms = (1..=s as i64)
        .map(|i| {
            let c = if i == s as i64 {
                rng.gen_range(1..p)
            } else {
                rng.gen_range(0..p)
            };
            (-i, f.from_int(c))
        })
        .filter(|t| !t.1.is_zero())
        .collect();
    WildPart::new(f, terms).expect("depth below p")
}

/// Random polar part whose leading coefficient makes the Legendre root seed equal to 1.
fn unit_seed_alpha(rng: &mut ChaCha8Rng, f: &Field, r: u64, s: u64, kind: TransformKind) -> WildPart {
    let mut alpha = random_alpha(rng, f, s);
    if s > 0 {
        let sigma = if kind == TransformKind::ZeroToInf { 1 } else { -1 };
        let lead = f
            .div(f.from_int(sigma * r as i64), f.from_int(s as i64))
            .expect("s prime to p");
        let mut terms = alpha.terms().to_vec();
        terms[0].1 = lead;
        alpha = WildPart::new(f, terms).expect("depth below p");
    }
    alpha
}

fn instance_field(p: u64, orders: &[u64]) -> Option<Field> {
    build_field(p, suggest_degree(p, orders)).ok()
}

/// Draws `(r, s)` until the field carrying the needed roots of unity is small enough to build.
fn pick_instance(rng: &mut ChaCha8Rng, p: u64, kind: TransformKind) -> (u64, u64, Field) {
    loop {
        let (r, s) = pick_rs(rng, p, kind);
        if let Some(f) = instance_field(p, &[(r + s) * (p - 1)]) {
            return (r, s, f);
        }
    }
}

fn suite_legendre(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    for _ in 0..count {
        let (r, s, f) = pick_instance(rng, p, TransformKind::ZeroToInf);
        let alpha = random_alpha(rng, &f, s);
        let tag = || format!("r={r} s={s} alpha={}", alpha.display(&f));
        let Some(sol) = t.outcome(legendre(&f, &alpha, r, TransformKind::ZeroToInf, None), tag) else {
            continue;
        };
        let lead = leading_closed_form(&f, alpha.leading().unwrap(), r, s, sol.lambda0());
        t.check(lead.ok() == Some(sol.beta.coeff(-(s as i64))), tag);
    }
}

fn suite_zero(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    let f = build_field(p, 1).expect("prime field");
    for i in 0..count {
        let kind = if i % 2 == 0 {
            TransformKind::InfToInf
        } else {
            TransformKind::InfToZero
        };
        let (r, s) = loop {
            let (r, s) = (rng.gen_range(1..=6), rng.gen_range(1..=6u64.min(p - 1)));
            if kind.exponent(r, s).is_none() && r % p != 0 {
                break (r, s);
            }
        };
        let alpha = random_alpha(rng, &f, s);
        let x = Summand::new(&f, r, alpha, TameChar::TRIVIAL, 1).expect("valid summand");
        let out = lft(&f, &LocalSheaf::new(Point::Infinity, vec![x]), kind, None);
        t.check(out.as_ref().is_ok_and(|o| o.is_empty()), || {
            format!("{kind} r={r} s={s}: {out:?}")
        });
    }
}

fn suite_involution(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    for _ in 0..count {
        let (r, s, f) = pick_instance(rng, p, TransformKind::ZeroToInf);
        let alpha = random_alpha(rng, &f, s);
        let tag = || format!("r={r} s={s}");
        let Some(sol) = t.outcome(legendre(&f, &alpha, r, TransformKind::ZeroToInf, None), tag) else {
            continue;
        };
        let back = legendre_inverse(&f, &sol.beta, r + s, r, sol.lambda0(), None);
        t.check(back.as_ref() == Ok(&alpha), || format!("r={r} s={s}: {back:?}"));
    }
}

fn suite_descent(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    let mut done = 0;
    while done < count {
        let (r0, s0) = pick_rs(rng, p, TransformKind::ZeroToInf);
        let d = rng.gen_range(2..=3u64);
        let (r, s) = (r0 * d, s0 * d);
        if s >= p || check_hypotheses(p, r, s, TransformKind::ZeroToInf).is_err() {
            continue;
        }
        let Some(f) = instance_field(p, &[(r + s) * (p - 1)]) else {
            continue;
        };
        done += 1;
        let core = random_alpha(rng, &f, s0);
        let x = Summand::new(&f, r, core.substitute_power(d), TameChar::TRIVIAL, 1).expect("valid summand");
        let tag = || format!("r={r} s={s} d={d}");
        t.check(stabilizer(&x).is_multiple_of(d), tag);
        let Some(via) = t.outcome(transform_summand(&f, &x, TransformKind::ZeroToInf, None), tag) else {
            continue;
        };
        let Some(via) = via else { continue };
        t.check(stabilizer(&via) == stabilizer(&x), tag);
        let e = r + s;
        let Some(base) = t.outcome(
            descend(&x, stabilizer(&x)).map_err(|e| e.to_string()).and_then(|c| {
                legendre(&f, c.alpha(), c.r(), TransformKind::ZeroToInf, None).map_err(|e| e.to_string())
            }),
            tag,
        ) else {
            continue;
        };
        let lifted = base.beta.substitute_power(stabilizer(&x));
        let matched = (0..e).any(|b| {
            legendre_branch(&f, x.alpha(), r, TransformKind::ZeroToInf, None, b).is_ok_and(|sol| sol.beta == lifted)
        });
        t.check(matched, tag);
        let direct = legendre(&f, x.alpha(), r, TransformKind::ZeroToInf, None)
            .ok()
            .and_then(|sol| Summand::new(&f, e, sol.beta, via.chi(), 1).ok())
            .and_then(|y| canonicalize(&f, &y).ok());
        let via = canonicalize(&f, &via).ok();
        t.check(direct.is_some() && direct == via, tag);
    }
}

fn suite_rank(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    let orders: Vec<u64> = [2u64, 3, 4, 6].into_iter().filter(|o| o % p != 0).collect();
    for _ in 0..count {
        for kind in TransformKind::ALL {
            let mut blocks = Vec::new();
            let mut needs = vec![p - 1];
            for _ in 0..rng.gen_range(1..=3) {
                let order = orders[rng.gen_range(0..orders.len())];
                let chi = TameChar::new(order, rng.gen_range(1..order as i64));
                let unip = rng.gen_range(1..=2);
                let (r, s) = if rng.gen_bool(0.3) {
                    (1, 0)
                } else {
                    loop {
                        let (r, s) = (rng.gen_range(1..=5), rng.gen_range(1..=5u64.min(p - 1)));
                        if check_hypotheses(p, r, s, kind).is_ok() {
                            break (r, s);
                        }
                    }
                };
                if let Some(e) = kind.exponent(r, s).filter(|_| s > 0) {
                    needs.push(e);
                }
                blocks.push((r, s, chi, unip));
            }
            let Some(f) = instance_field(p, &needs) else { continue };
            let built: Vec<Summand> = blocks
                .into_iter()
                .map(|(r, s, chi, unip)| {
                    Summand::new(&f, r, unit_seed_alpha(rng, &f, r, s, kind), chi, unip).expect("valid summand")
                })
                .collect();
            let obj = LocalSheaf::new(kind.source(), built);
            let tag = || format!("{kind} {}", obj.display(&f));
            if let Some(out) = t.outcome(lft(&f, &obj, kind, None), tag) {
                t.check(rank_law_check(&obj, &out, kind), tag);
            }
        }
    }
}

fn suite_branch(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    for _ in 0..count {
        let (r, s, f) = pick_instance(rng, p, TransformKind::ZeroToInf);
        let e = r + s;
        let alpha = random_alpha(rng, &f, s);
        let outputs: Vec<_> = (0..e)
            .map(|b| {
                legendre_branch(&f, &alpha, r, TransformKind::ZeroToInf, None, b)
                    .ok()
                    .and_then(|sol| Summand::new(&f, e, sol.beta, TameChar::TRIVIAL, 1).ok())
                    .and_then(|y| canonicalize(&f, &y).ok())
            })
            .collect();
        t.check(outputs.iter().all(|o| o.is_some() && *o == outputs[0]), || {
            format!("r={r} s={s}")
        });
    }
}

fn suite_artin_schreier(t: &mut Tally, rng: &mut ChaCha8Rng, p: u64, count: usize) {
    for k in [1usize, 2] {
        let f = build_field(p, k).expect("prime field");
        for _ in 0..count {
            let lo = -(rng.gen_range(1..=3 * p as i64));
            let terms: Vec<(i64, FieldElem)> = (lo..=3)
                .filter(|&e| e > -(p as i64) || e % p as i64 == 0)
                .map(|e| (e, FieldElem::from_packed(rng.gen_range(0..f.q()))))
                .collect();
            let raw = LaurentSeries::from_terms(&f, &terms);
            let wp = (-lo) * p as i64 + 4;
            let tag = || format!("GF({p}^{k}) raw from exponent {lo}");
            let Some((alpha, gamma)) = t.outcome(as_reduce(&f, &raw, wp), tag) else {
                continue;
            };
            let sound = gamma
                .pow(p as i64)
                .map(|gp| &(&gp - &gamma) - &(&raw - &alpha.to_series(&f)))
                .ok()
                .and_then(|d| d.polar_terms().ok())
                .is_some_and(|v| v.is_empty());
            t.check(sound, tag);
            let again = as_reduce(&f, &alpha.to_series(&f), 1).map(|(a, _)| a);
            t.check(again.as_ref() == Ok(&alpha), tag);
        }
    }
}

fn all_specs(total: usize, chars: &[TameChar]) -> Vec<HypSpec> {
    fn multisets(chars: &[TameChar], k: usize) -> Vec<Vec<TameChar>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &c) in chars.iter().enumerate() {
            for mut rest in multisets(&chars[i..], k - 1) {
                rest.insert(0, c);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for n in 0..=total {
        for ls in multisets(chars, n) {
            for rs in multisets(chars, total - n) {
                out.push(HypSpec::new(ls.clone(), rs));
            }
        }
    }
    out
}

fn suite_hyper(t: &mut Tally, p: u64) {
    let chars: Vec<TameChar> = [(1, 0), (2, 1), (3, 1), (3, 2)]
        .into_iter()
        .filter(|&(o, _)| o % p != 0)
        .map(|(o, a)| TameChar::new(o, a))
        .collect();
    for total in 1..=4 {
        for spec in all_specs(total, &chars) {
            if spec.validate(p).is_err() {
                continue;
            }
            let Some(f) = instance_field(p, &spec.required_orders()) else {
                continue;
            };
            let tag = || format!("{spec:?}");
            let (Some(a), Some(b)) = (
                t.outcome(hyp_local(&f, &spec), tag),
                t.outcome(hyp_local_recursive(&f, &spec), tag),
            ) else {
                continue;
            };
            let same = a.rank == b.rank
                && a.at1 == b.at1
                && equal(&f, &a.at0, &b.at0).unwrap_or(false)
                && equal(&f, &a.at_inf, &b.at_inf).unwrap_or(false);
            t.check(same, tag);
        }
    }
}

fn suite_numeric(t: &mut Tally, p: u64) {
    let Ok(eval) = CharEval::new(&build_field(p, 1).expect("prime field")) else {
        return;
    };
    let f = eval.field().clone();
    let q = eval.q();
    let total: num_complex::Complex64 = f.elements().map(|x| eval.psi(x, 1)).sum();
    t.check(total.norm() < 1e-9, || "additive orthogonality".into());
    let divisors: Vec<u64> = (2..q).filter(|d| (q - 1) % d == 0 && *d <= 6).collect();
    for &d in &divisors {
        let g = gauss_sum(&eval, TameChar::new(d, 1));
        t.check(g.is_ok_and(|g| (g.norm() - (q as f64).sqrt()).abs() < 1e-9), || {
            format!("|G(chi_{d})|")
        });
    }
    let g = TraceTable::from_fn(&eval, |x| eval.psi(f.mul(x, x), 1));
    if let Ok(twice) = ft_trace(&eval, &g).and_then(|h| ft_trace(&eval, &h)) {
        let expect = TraceTable::from_fn(&eval, |x| g.get(f.neg(x)) * q as f64);
        t.check(twice.max_rel_diff(&expect) < 1e-9, || "double transform".into());
    }
    let mut chars = vec![TameChar::TRIVIAL];
    chars.extend(divisors.iter().map(|&d| TameChar::new(d, 1)));
    for total in 1..=3 {
        for spec in all_specs(total, &chars) {
            let sign = if total % 2 == 0 { 1.0 } else { -1.0 };
            let ok = hyp_trace_recursive(&eval, &spec).and_then(|rec| {
                let sums = hyp_sum_table(&eval, &spec)?;
                let scaled = TraceTable {
                    values: sums.values.iter().map(|v| v * sign).collect(),
                };
                Ok(rec.max_rel_diff(&scaled) < 1e-6)
            });
            t.check(ok == Ok(true), || format!("trace recursion {spec:?}"));
        }
    }
}
