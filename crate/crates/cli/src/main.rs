mod error;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lft_core::verify::{run_suite, SUITES};
use lft_core::{
    build_field, gauss_sum, hyp_local, hyp_local_recursive, hyp_sum, hyp_sum_table, kloosterman, legendre_branch, lft,
    suggest_degree, CharEval, Field, FieldCtx, HypSpec, TameChar, TransformKind,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "lft",
    version,
    about = "Local Fourier transforms of sheaf symbols over finite fields"
)]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree; chosen automatically when omitted.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a local Fourier transformation to a sheaf symbol.
    Lft {
        #[arg(long)]
        kind: TransformKind,
        #[command(flatten)]
        field: FieldArgs,
        /// Fixed number of coefficient slots (single attempt).
        #[arg(long)]
        prec: Option<usize>,
        /// Path to a symbol JSON document, `-` for stdin, or the JSON itself.
        #[arg(long = "in")]
        input: String,
    },
    /// Solve the Legendre system for one polar part.
    Legendre {
        #[arg(long, default_value = "0toinf")]
        kind: TransformKind,
        #[command(flatten)]
        field: FieldArgs,
        /// Pushforward index of the source.
        #[arg(long)]
        r: u64,
        /// Polar part as `EXP:COEFF,...` or a JSON list of `[exp, [coords]]`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        branch: u64,
        #[arg(long)]
        prec: Option<usize>,
    },
    /// Local monodromy of a hypergeometric sheaf.
    Hyp {
        #[command(flatten)]
        field: FieldArgs,
        /// Characters at 0 as `ORDER:EXP,...`.
        #[arg(long, default_value = "")]
        lambdas: String,
        /// Characters at infinity as `ORDER:EXP,...`.
        #[arg(long, default_value = "")]
        rhos: String,
        #[arg(long, value_enum, default_value_t = HypMethod::Closed)]
        method: HypMethod,
    },
    /// Brute-force exponential sums.
    Sum {
        #[arg(long, value_enum)]
        kind: SumKind,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "")]
        lambdas: String,
        #[arg(long, default_value = "")]
        rhos: String,
        /// Character of a Gauss sum.
        #[arg(long)]
        chi: Option<TameChar>,
        /// Point of evaluation as comma-separated coordinates; every nonzero point when omitted.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum HypMethod {
    Closed,
    Recursive,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SumKind {
    Kloosterman,
    Hyp,
    Gauss,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            println!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let (value, code) = match run(&cli.command) {
        Ok(outcome) => outcome,
        Err(e) => (e.to_json(), e.exit_code()),
    };
    let text = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    let written = match &cli.out {
        Some(path) => std::fs::write(path, format!("{text}\n")),
        None => writeln!(std::io::stdout(), "{text}"),
    };
    if let Err(e) = written {
        eprintln!("lft: cannot write output: {e}");
        return ExitCode::from(error::EXIT_INTERNAL as u8);
    }
    ExitCode::from(code as u8)
}

fn run(cmd: &Command) -> Result<(Value, i32), CliError> {
    match cmd {
        Command::Lft {
            kind,
            field,
            prec,
            input,
        } => run_lft(*kind, *field, *prec, input).map(ok),
        Command::Legendre {
            kind,
            field,
            r,
            alpha,
            branch,
            prec,
        } => run_legendre(*kind, *field, *r, alpha, *branch, *prec).map(ok),
        Command::Hyp {
            field,
            lambdas,
            rhos,
            method,
        } => run_hyp(*field, lambdas, rhos, *method),
        Command::Sum {
            kind,
            field,
            lambdas,
            rhos,
            chi,
            t,
        } => run_sum(*kind, *field, lambdas, rhos, *chi, t.as_deref()).map(ok),
        Command::Verify { suite, p, seed, count } => {
            let reports = run_suite(suite, *p, *seed, *count)?;
            let passed = reports.iter().all(|r| r.passed);
            let code = if passed { 0 } else { error::EXIT_VERIFICATION };
            Ok((json!({ "passed": passed, "reports": reports }), code))
        }
    }
}

fn ok(v: Value) -> (Value, i32) {
    (v, 0)
}

/// Builds the working field, growing it while the computation reports missing roots of unity.
fn with_field<T>(
    args: FieldArgs,
    mut orders: Vec<u64>,
    mut compute: impl FnMut(&Field) -> Result<T, CliError>,
) -> Result<(Field, T), CliError> {
    loop {
        orders.retain(|&n| n > 1 && n % args.p != 0);
        orders.sort_unstable();
        orders.dedup();
        let k = match args.k {
            Some(k) => k,
            None => suggest_degree(args.p, &orders),
        };
        let field = build_field(args.p, k)?;
        match compute(&field) {
            Err(CliError::NeedsExtension { orders: extra, .. })
                if args.k.is_none() && extra.iter().any(|n| !orders.contains(n) && n % args.p != 0) =>
            {
                orders.extend(extra);
            }
            other => return other.map(|v| (field, v)),
        }
    }
}

fn envelope(field: &FieldCtx, auto: bool, result: Value) -> Value {
    json!({
        "field": field.descriptor(),
        "k": field.k(),
        "auto_k": auto,
        "result": result,
    })
}

fn run_lft(kind: TransformKind, args: FieldArgs, prec: Option<usize>, input: &str) -> Result<Value, CliError> {
    let doc = input::symbol(&input::read_source(input)?)?;
    doc.check(args.p, kind)?;
    if let Some(fixed) = doc.fixed_field(args)? {
        let obj = doc.build(&fixed)?;
        let out = lft(&fixed, &obj, kind, prec)?;
        return Ok(envelope(
            &fixed,
            false,
            serde_json::to_value(out.to_doc(&fixed)).expect("serializable"),
        ));
    }
    let probe = build_field(args.p, 1)?;
    let orders = lft_core::transform::required_orders(&doc.build(&probe)?, kind);
    let (field, out) = with_field(args, orders, |f| {
        let obj = doc.build(f)?;
        Ok(lft(f, &obj, kind, prec)?)
    })?;
    Ok(envelope(
        &field,
        args.k.is_none(),
        serde_json::to_value(out.to_doc(&field)).expect("serializable"),
    ))
}

fn run_legendre(
    kind: TransformKind,
    args: FieldArgs,
    r: u64,
    alpha: &str,
    branch: u64,
    prec: Option<usize>,
) -> Result<Value, CliError> {
    let terms = input::polar_terms(alpha)?;
    let s = terms.iter().map(|t| t.0.unsigned_abs()).max().unwrap_or(0);
    if args.k.is_none() && terms.iter().any(|t| t.1.len() > 1) {
        return Err(CliError::Usage("extension coordinates need an explicit --k".into()));
    }
    let orders = kind.exponent(r, s).into_iter().chain([r]).collect();
    let (field, sol) = with_field(args, orders, |f| {
        let wild = input::wild_part(f, &terms)?;
        Ok(legendre_branch(f, &wild, r, kind, prec, branch)?)
    })?;
    let beta: Vec<(i64, Vec<u64>)> = sol.beta.terms().iter().map(|&(e, c)| (e, field.coords(c))).collect();
    let result = json!({
        "kind": kind,
        "r": r,
        "s": s,
        "exponent_out": sol.exponent_out,
        "branch": sol.branch,
        "slots": sol.slots,
        "lambda0": field.coords(sol.lambda0()),
        "beta": beta,
        "lambda": sol.lambda.to_doc(),
        "mu": sol.mu.to_doc(),
    });
    Ok(envelope(&field, args.k.is_none(), result))
}

fn spec_from(lambdas: &str, rhos: &str) -> Result<HypSpec, CliError> {
    Ok(HypSpec::new(input::chars(lambdas)?, input::chars(rhos)?))
}

fn char_orders(spec: &HypSpec) -> Vec<u64> {
    spec.lambdas.iter().chain(&spec.rhos).map(|c| c.order()).collect()
}

fn run_hyp(args: FieldArgs, lambdas: &str, rhos: &str, method: HypMethod) -> Result<(Value, i32), CliError> {
    let spec = spec_from(lambdas, rhos)?;
    spec.validate(args.p)?;
    let orders = spec.required_orders().into_iter().chain(char_orders(&spec)).collect();
    let (field, (closed, recursive)) = with_field(args, orders, |f| {
        let closed = match method {
            HypMethod::Recursive => None,
            _ => Some(hyp_local(f, &spec)?),
        };
        let recursive = match method {
            HypMethod::Closed => None,
            _ => Some(hyp_local_recursive(f, &spec)?),
        };
        Ok((closed, recursive))
    })?;
    let mut result = json!({});
    let mut code = 0;
    if let Some(c) = &closed {
        result["closed"] = serde_json::to_value(c.to_doc(&field)).expect("serializable");
    }
    if let Some(r) = &recursive {
        result["recursive"] = serde_json::to_value(r.to_doc(&field)).expect("serializable");
    }
    if let (Some(c), Some(r)) = (&closed, &recursive) {
        let agree = c.rank == r.rank
            && c.at1 == r.at1
            && lft_core::equal(&field, &c.at0, &r.at0)?
            && lft_core::equal(&field, &c.at_inf, &r.at_inf)?;
        result["agree"] = json!(agree);
        if !agree {
            code = error::EXIT_VERIFICATION;
        }
    }
    Ok((envelope(&field, args.k.is_none(), result), code))
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn run_sum(
    kind: SumKind,
    args: FieldArgs,
    lambdas: &str,
    rhos: &str,
    chi: Option<TameChar>,
    t: Option<&str>,
) -> Result<Value, CliError> {
    let spec = spec_from(lambdas, rhos)?;
    let orders: Vec<u64> = match kind {
        SumKind::Gauss => {
            let chi = chi.ok_or_else(|| CliError::Usage("--chi is required for a Gauss sum".into()))?;
            vec![chi.order()]
        }
        SumKind::Kloosterman if !spec.rhos.is_empty() => {
            return Err(CliError::Usage("a Kloosterman sum takes no --rhos".into()));
        }
        _ => char_orders(&spec),
    };
    if kind != SumKind::Gauss && spec.n() + spec.m() == 0 {
        return Err(CliError::Usage("at least one character is required".into()));
    }
    let (field, eval) = with_field(args, orders, |f| Ok(CharEval::new(f)?))?;
    let result = match kind {
        SumKind::Gauss => json!({ "value": complex(gauss_sum(&eval, chi.expect("checked above"))?) }),
        _ => match t {
            Some(t) => {
                let point = input::element(&field, t)?;
                let value = match kind {
                    SumKind::Kloosterman => kloosterman(&eval, point, &spec.lambdas)?,
                    _ => hyp_sum(&eval, point, &spec)?,
                };
                json!({ "t": field.coords(point), "value": complex(value) })
            }
            None => {
                let table = hyp_sum_table(&eval, &spec)?;
                let rows: Vec<Value> = field
                    .elements()
                    .filter(|x| !x.is_zero())
                    .map(|x| json!({ "t": field.coords(x), "value": complex(table.get(x)) }))
                    .collect();
                json!({ "table": rows })
            }
        },
    };
    Ok(envelope(&field, args.k.is_none(), result))
}
