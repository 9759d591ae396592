//! The `qfib` command line.
//!
//! Exit codes: 0 when everything requested passed or was skipped, 1 on any
//! identity failure or disagreement between evaluation paths, 2 on usage or
//! configuration errors. In JSON mode each invocation writes one document to
//! standard output; polynomials appear as ascending arrays of exact rational
//! strings. Diagnostics always go to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{builtin_families, load_families, FamilySpec, Kind};
use crate::exactnum::Rational;
use crate::identities::{
    consistency_violations, run_suite_for, summarize, Bounds, IdentityId, IdentityReport, Status,
};
use crate::poly::Poly;
use crate::qmatrix::Mat2;
use crate::sequences::{self, eval_term_fast_counted, eval_term_iter_counted, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qfib", version, about = "Exact Fibonacci- and Lucas-type polynomial sequences")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: OutputMode,
    /// JSON file of extra families.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the known families.
    List {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Print the terms from..=to of a family.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum)]
        method: Option<GenMethod>,
    },
    /// Evaluate term n of a family at a rational point.
    Eval {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        at: Rational,
        #[arg(long, value_enum, default_value = "both")]
        method: EvalMethod,
    },
    /// Print Q(x)^n of a family.
    Qpow {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: u64,
    },
    /// Check identities over index ranges.
    Check(CheckArgs),
    /// Time numeric evaluation by iteration against matrix powers.
    Bench {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        at: Rational,
    },
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// One identity id, e.g. fib_cassini.
    #[arg(long, conflicts_with = "all")]
    identity: Option<String>,
    /// Every identity (the default when no id is given).
    #[arg(long)]
    all: bool,
    /// Restrict to these families; repeatable.
    #[arg(long)]
    family: Vec<String>,
    #[arg(long, default_value_t = 30)]
    max_n: u64,
    #[arg(long, default_value_t = 30)]
    max_m: u64,
    #[arg(long, default_value_t = 5)]
    max_p: u64,
    /// Also sweep p = 0 in FIB_BINOMIAL.
    #[arg(long)]
    experimental_p_zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Fibonacci,
    Lucas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenMethod {
    Iter,
    Matpow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMethod {
    Symbolic,
    Matpow,
    Both,
}

/// A failure that ends the command with exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Ctx<'a> {
    mode: OutputMode,
    families: Vec<FamilySpec>,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn family(&self, name: &str) -> Result<&FamilySpec, Usage> {
        self.families.iter().find(|f| f.name() == name).ok_or_else(|| {
            let known: Vec<&str> = self.families.iter().map(FamilySpec::name).collect();
            Usage(format!("unknown family `{name}`; known: {}", known.join(", ")))
        })
    }

    fn json(&mut self, v: &Value) -> Result<(), Usage> {
        let text = serde_json::to_string_pretty(v)?;
        writeln!(self.out, "{text}")?;
        Ok(())
    }
}

/// Run the CLI on `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let to_stdout = !e.use_stderr();
            let rendered = e.render().to_string();
            let _ = if to_stdout {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return if to_stdout { 0 } else { 2 };
        }
    };
    let mut ctx = Ctx {
        mode: cli.format,
        families: Vec::new(),
        out,
        err,
    };
    let result = family_pool(cli.config.as_deref()).and_then(|families| {
        ctx.families = families;
        dispatch(&mut ctx, cli.command)
    });
    match result {
        Ok(code) => code,
        Err(Usage(message)) => {
            let _ = writeln!(ctx.err, "error: {message}");
            2
        }
    }
}

/// Builtins followed by the families of the config file, if any.
fn family_pool(config: Option<&std::path::Path>) -> Result<Vec<FamilySpec>, Usage> {
    let mut pool = builtin_families();
    if let Some(path) = config {
        let doc = std::fs::read_to_string(path)
            .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
        let extra = load_families(&doc).map_err(|e| Usage(format!("config error: {e}")))?;
        for spec in extra {
            if pool.iter().any(|b| b.name() == spec.name()) {
                return Err(Usage(format!(
                    "config error: family `{}` clashes with a builtin name",
                    spec.name()
                )));
            }
            pool.push(spec);
        }
    }
    Ok(pool)
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Result<i32, Usage> {
    match command {
        Command::List { kind } => cmd_list(ctx, kind),
        Command::Gen {
            family,
            from,
            to,
            method,
        } => cmd_gen(ctx, &family, from, to, method),
        Command::Eval {
            family,
            n,
            at,
            method,
        } => cmd_eval(ctx, &family, n, &at, method),
        Command::Qpow { family, n } => cmd_qpow(ctx, &family, n),
        Command::Check(args) => cmd_check(ctx, args),
        Command::Bench { family, n, at } => cmd_bench(ctx, &family, n, &at),
    }
}

fn poly_json(p: &Poly) -> Value {
    serde_json::to_value(p).expect("polynomials serialize")
}

fn mat_json(m: &Mat2) -> Value {
    json!([[poly_json(&m.e11), poly_json(&m.e12)], [poly_json(&m.e21), poly_json(&m.e22)]])
}

fn cmd_list(ctx: &mut Ctx<'_>, kind: Option<KindArg>) -> Result<i32, Usage> {
    let wanted = kind.map(|k| match k {
        KindArg::Fibonacci => Kind::Fibonacci,
        KindArg::Lucas => Kind::Lucas,
    });
    let rows: Vec<FamilySpec> = ctx
        .families
        .iter()
        .filter(|f| wanted.is_none_or(|k| f.kind() == k))
        .cloned()
        .collect();
    match ctx.mode {
        OutputMode::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|f| {
                    json!({
                        "name": f.name(),
                        "kind": f.kind(),
                        "a": f.a(),
                        "b": f.b().map(poly_json),
                        "c": poly_json(f.c()),
                        "d": poly_json(f.d()),
                    })
                })
                .collect();
            ctx.json(&Value::Array(items))?;
        }
        OutputMode::Text => {
            let cells: Vec<[String; 6]> = rows
                .iter()
                .map(|f| {
                    [
                        f.name().to_string(),
                        f.kind().to_string(),
                        f.a().to_string(),
                        f.b().map_or_else(|| "-".to_string(), ToString::to_string),
                        f.c().to_string(),
                        f.d().to_string(),
                    ]
                })
                .collect();
            let header = ["name", "kind", "a", "b", "c", "d"].map(String::from);
            write_table(ctx.out, &header, &cells)?;
        }
    }
    Ok(0)
}

fn write_table<const N: usize>(out: &mut dyn Write, header: &[String; N], rows: &[[String; N]]) -> std::io::Result<()> {
    let mut widths = header.each_ref().map(|h| h.chars().count());
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for row in std::iter::once(header).chain(rows) {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end())?;
    }
    Ok(())
}

fn cmd_gen(ctx: &mut Ctx<'_>, family: &str, from: u64, to: u64, method: Option<GenMethod>) -> Result<i32, Usage> {
    let spec = ctx.family(family)?.clone();
    if from > to {
        return Err(Usage(format!("bad range: --from {from} exceeds --to {to}")));
    }
    let method = match method {
        Some(GenMethod::Iter) => Method::Iter,
        Some(GenMethod::Matpow) => Method::MatPow,
        None => Method::default_for(from, to),
    };
    let terms = sequences::terms(&spec, from, to, method)?;
    match ctx.mode {
        OutputMode::Json => {
            let items: Vec<Value> = (from..)
                .zip(&terms)
                .map(|(n, t)| json!({ "n": n, "term": poly_json(t) }))
                .collect();
            let method = match method {
                Method::Iter => "iter",
                Method::MatPow => "matpow",
            };
            ctx.json(&json!({ "family": spec.name(), "method": method, "terms": items }))?;
        }
        OutputMode::Text => {
            for (n, t) in (from..).zip(&terms) {
                writeln!(ctx.out, "{n}: {t}")?;
            }
        }
    }
    Ok(0)
}

fn cmd_eval(ctx: &mut Ctx<'_>, family: &str, n: u64, at: &Rational, method: EvalMethod) -> Result<i32, Usage> {
    let spec = ctx.family(family)?.clone();
    let symbolic = (method != EvalMethod::Matpow).then(|| sequences::term_iter(&spec, n).eval(at));
    let matpow = (method != EvalMethod::Symbolic).then(|| sequences::eval_term_fast(&spec, n, at));
    let value = match (&symbolic, &matpow) {
        (Some(s), Some(m)) if s != m => {
            writeln!(ctx.err, "error: evaluation paths disagree: symbolic {s}, matpow {m}")?;
            return Ok(1);
        }
        (Some(v), _) | (None, Some(v)) => v.clone(),
        (None, None) => unreachable!("at least one method runs"),
    };
    match ctx.mode {
        OutputMode::Json => {
            let method = match method {
                EvalMethod::Symbolic => "symbolic",
                EvalMethod::Matpow => "matpow",
                EvalMethod::Both => "both",
            };
            ctx.json(&json!({
                "family": spec.name(), "n": n, "at": at, "method": method, "value": value,
            }))?;
        }
        OutputMode::Text => writeln!(ctx.out, "{value}")?,
    }
    Ok(0)
}

fn cmd_qpow(ctx: &mut Ctx<'_>, family: &str, n: u64) -> Result<i32, Usage> {
    let spec = ctx.family(family)?.clone();
    let m = sequences::q_power(&spec, n);
    match ctx.mode {
        OutputMode::Json => ctx.json(&json!({ "family": spec.name(), "n": n, "matrix": mat_json(&m) }))?,
        OutputMode::Text => writeln!(ctx.out, "{m}")?,
    }
    Ok(0)
}

fn cmd_check(ctx: &mut Ctx<'_>, args: CheckArgs) -> Result<i32, Usage> {
    let ids: Vec<IdentityId> = match &args.identity {
        Some(raw) => vec![raw.parse().map_err(|_| {
            let valid: Vec<String> = IdentityId::ALL.iter().map(|id| id.as_str().to_lowercase()).collect();
            Usage(format!("unknown identity `{raw}`; valid ids: {}", valid.join(", ")))
        })?],
        None => IdentityId::ALL.to_vec(),
    };
    let specs: Vec<FamilySpec> = if args.family.is_empty() {
        ctx.families.clone()
    } else {
        args.family
            .iter()
            .map(|name| ctx.family(name).cloned())
            .collect::<Result<_, _>>()?
    };
    let bounds = Bounds {
        max_n: args.max_n,
        max_m: args.max_m,
        max_p: args.max_p,
        include_p_zero: args.experimental_p_zero,
    };
    let reports = run_suite_for(&specs, &ids, &bounds);
    let summary = summarize(&reports);
    let violations = consistency_violations(&reports);
    match ctx.mode {
        OutputMode::Json => ctx.json(&json!({
            "bounds": bounds,
            "reports": reports,
            "summary": summary,
        }))?,
        OutputMode::Text => {
            write_reports(ctx.out, &reports)?;
            writeln!(
                ctx.out,
                "{} PASS, {} FAIL, {} SKIPPED",
                summary.pass, summary.fail, summary.skipped
            )?;
        }
    }
    for (family, base, expanded) in &violations {
        writeln!(ctx.err, "inconsistent: {base} passed but {expanded} did not on `{family}`")?;
    }
    Ok(if summary.fail > 0 || !violations.is_empty() { 1 } else { 0 })
}

fn write_reports(out: &mut dyn Write, reports: &[IdentityReport]) -> std::io::Result<()> {
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            let detail = match (r.status, &r.counterexample, &r.reason) {
                (Status::Fail, Some(cx), _) => cx.to_string(),
                (Status::Skipped, _, Some(reason)) => reason.clone(),
                _ => r.formula.clone(),
            };
            [
                r.family.clone(),
                r.identity.to_string(),
                r.status.to_string(),
                r.range.to_string(),
                detail,
            ]
        })
        .collect();
    let header = ["family", "identity", "status", "range", "detail"].map(String::from);
    write_table(out, &header, &rows)
}

fn cmd_bench(ctx: &mut Ctx<'_>, family: &str, n: u64, at: &Rational) -> Result<i32, Usage> {
    let spec = ctx.family(family)?.clone();
    if n == 0 {
        return Err(Usage("--n must be at least 1".into()));
    }
    let start = Instant::now();
    let (by_iter, iter_stats) = eval_term_iter_counted(&spec, n, at);
    let iter_time = start.elapsed();
    let start = Instant::now();
    let (by_matpow, mp_stats) = eval_term_fast_counted(&spec, n, at);
    let matpow_time = start.elapsed();
    if by_iter != by_matpow {
        writeln!(
            ctx.err,
            "error: iteration and matrix power disagree for `{}` n={n} at {at}; no timings reported",
            spec.name()
        )?;
        return Ok(1);
    }
    let bound = 2 * u64::from(64 - (n - 1).leading_zeros()) + 2;
    match ctx.mode {
        OutputMode::Json => ctx.json(&json!({
            "family": spec.name(),
            "n": n,
            "at": at,
            "agree": true,
            "value_bits": by_iter.numer().bits() + by_iter.denom().bits(),
            "iter": {
                "seconds": iter_time.as_secs_f64(),
                "steps": iter_stats.steps,
                "bigint_muls": iter_stats.scalar_muls,
            },
            "matpow": {
                "seconds": matpow_time.as_secs_f64(),
                "squarings": mp_stats.squarings,
                "multiplies": mp_stats.multiplies,
                "matrix_products": mp_stats.matrix_products(),
                "matrix_product_bound": bound,
                "bigint_muls": mp_stats.scalar_muls,
            },
            "nondeterministic": ["iter.seconds", "matpow.seconds"],
        }))?,
        OutputMode::Text => {
            writeln!(ctx.out, "family {} n={n} at={at}", spec.name())?;
            let header = ["method", "seconds", "matrix_products", "bigint_muls"].map(String::from);
            let rows = [
                [
                    "iter".to_string(),
                    format!("{:.6}", iter_time.as_secs_f64()),
                    "-".to_string(),
                    iter_stats.scalar_muls.to_string(),
                ],
                [
                    "matpow".to_string(),
                    format!("{:.6}", matpow_time.as_secs_f64()),
                    format!(
                        "{} ({} squarings, {} multiplies)",
                        mp_stats.matrix_products(),
                        mp_stats.squarings,
                        mp_stats.multiplies
                    ),
                    mp_stats.scalar_muls.to_string(),
                ],
            ];
            write_table(ctx.out, &header, &rows)?;
            writeln!(ctx.out, "matrix product bound 2*ceil(log2 n)+2 = {bound}")?;
            writeln!(ctx.out, "agree=true")?;
        }
    }
    Ok(0)
}
