use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use oldsum::catalog::{catalog_entries, lookup};
use oldsum::dsl::{format_identity, parse_file};
use oldsum::expr::{Identity, ParamKind};
use oldsum::integrals::{quad_check, quad_tolerance, IntegralKind};
use oldsum::numeric::{format_float, parse_decimal_rational};
use oldsum::num_rational::BigRational;
use oldsum::report::{golden_vectors, render, write_text, Format};
use oldsum::transform::{apply, input_form, input_names, parse_shift, Op};
use oldsum::verify::{default_ranges, sweep, Mode, Ranges, Summary, VerificationResult};

#[derive(Parser)]
#[command(name = "oldsum", version, about = "Verify and derive central-binomial sum identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect or verify the built-in catalog.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Verify identities written in the DSL.
    #[command(subcommand)]
    Dsl(DslCmd),
    /// Apply an integral transform to a registered polynomial identity.
    Transform(TransformArgs),
    /// Compare quadrature against the closed forms of the Beta-type integrals.
    Quadcheck(QuadArgs),
    /// Write exact values of every catalog entry over its default ranges.
    EmitVectors {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List entry ids, parameters and anchors.
    List {
        #[arg(long)]
        json: bool,
    },
    Verify {
        /// Comma-separated entry ids; all entries when absent.
        #[arg(long, value_delimiter = ',')]
        ids: Vec<String>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Subcommand)]
enum DslCmd {
    Verify {
        file: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Inclusive range A..B for a natural parameter named n.
    #[arg(long)]
    n: Option<String>,
    /// Inclusive range A..B for a natural parameter named m.
    #[arg(long)]
    m: Option<String>,
    /// Comma-separated values for grid parameters.
    #[arg(long)]
    v_grid: Option<String>,
    /// Comma-separated values for rational parameters.
    #[arg(long)]
    x_samples: Option<String>,
    #[arg(long, default_value = "exact")]
    mode: String,
    #[arg(long, env = "OLDSUM_DIGITS", default_value_t = 30)]
    digits: u32,
    #[arg(long, default_value_t = 4)]
    jobs: usize,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    /// Leave the timestamp out of the JSON report.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    input: String,
    #[arg(long)]
    op: String,
    /// Value or expression for u; free on the grid when absent.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Value or expression for v; free on the grid when absent.
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Also write the emitted identities to this file.
    #[arg(long)]
    emit_dsl: Option<PathBuf>,
    /// Sweep the emitted identities.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct QuadArgs {
    /// Comma-separated kinds among K, I, J, J-general, beta01.
    #[arg(long, value_delimiter = ',', default_value = "K,I,J,J-general,beta01")]
    kinds: Vec<String>,
    /// Grid such as "u=0..4,v=0..4"; append ":1/2" to a range for half steps.
    #[arg(long, default_value = "u=0..4,v=0..4")]
    grid: String,
    #[arg(long, env = "OLDSUM_DIGITS", default_value_t = 30)]
    digits: u32,
    #[arg(long, default_value_t = 4)]
    jobs: usize,
}

#[derive(Debug)]
struct ConfigError(String);

fn config(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn parse_rat(s: &str) -> Result<BigRational, ConfigError> {
    parse_decimal_rational(s).ok_or_else(|| config(format!("not a number: {s}")))
}

fn parse_list(s: &str) -> Result<Vec<BigRational>, ConfigError> {
    s.split(',').map(|x| parse_rat(x.trim())).collect()
}

/// `A..B` inclusive, optionally `A..B:S`.
fn parse_range(s: &str) -> Result<Vec<BigRational>, ConfigError> {
    let (span, step) = match s.split_once(':') {
        Some((a, b)) => (a, parse_rat(b)?),
        None => (s, BigRational::from_integer(1.into())),
    };
    let (lo, hi) = span.split_once("..").ok_or_else(|| config(format!("expected A..B, got {s}")))?;
    let (lo, hi) = (parse_rat(lo.trim())?, parse_rat(hi.trim())?);
    if step <= BigRational::from_integer(0.into()) || lo > hi {
        return Err(config(format!("empty or invalid range {s}")));
    }
    let mut out = Vec::new();
    let mut x = lo;
    while x <= hi {
        out.push(x.clone());
        x += &step;
    }
    Ok(out)
}

impl SweepArgs {
    fn mode(&self) -> Result<Mode, ConfigError> {
        if !(10..=100).contains(&self.digits) {
            return Err(config(format!("digits {} outside [10, 100]", self.digits)));
        }
        match self.mode.as_str() {
            "exact" => Ok(Mode::Exact),
            "numeric" => Ok(Mode::Numeric { digits: self.digits }),
            other => Err(config(format!("unknown mode {other}"))),
        }
    }

    fn format(&self) -> Result<Format, ConfigError> {
        Format::parse(&self.format).ok_or_else(|| config(format!("unknown format {}", self.format)))
    }

    fn ranges(&self, identity: &Identity, base: Ranges) -> Result<Ranges, ConfigError> {
        let n = self.n.as_deref().map(parse_range).transpose()?;
        let m = self.m.as_deref().map(parse_range).transpose()?;
        let v = self.v_grid.as_deref().map(parse_list).transpose()?;
        let x = self.x_samples.as_deref().map(parse_list).transpose()?;
        Ok(base
            .into_iter()
            .map(|(name, vals)| {
                let kind = identity.param(&name).map(|p| p.kind);
                let over = match (kind, name.as_str()) {
                    (Some(ParamKind::Natural), "n") => n.clone(),
                    (Some(ParamKind::Natural), "m") => m.clone(),
                    (Some(ParamKind::Grid), _) => v.clone(),
                    (Some(ParamKind::Rational), _) => x.clone(),
                    _ => None,
                };
                (name, over.unwrap_or(vals))
            })
            .collect())
    }

    fn config_json(&self, command: &str, ids: &[String]) -> serde_json::Value {
        json!({
            "command": command,
            "ids": ids,
            "n": self.n,
            "m": self.m,
            "v_grid": self.v_grid,
            "x_samples": self.x_samples,
            "mode": self.mode,
            "digits": self.digits,
        })
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, ConfigError> {
    if jobs == 0 {
        return Err(config("jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| config(e.to_string()))
}

/// Sweep every `(identity, ranges)` pair, report, and return the exit code.
fn run_sweeps(work: Vec<(Identity, Ranges)>, args: &SweepArgs, cfg: serde_json::Value) -> Result<ExitCode, ConfigError> {
    let mode = args.mode()?;
    let format = args.format()?;
    let results: Vec<VerificationResult> =
        pool(args.jobs)?.install(|| work.iter().flat_map(|(id, r)| sweep(id, r, mode)).collect());
    let text = render(&results, format, cfg, args.deterministic);
    match &args.report {
        Some(path) => write_text(path, &text).map_err(|e| config(e.to_string()))?,
        None => print!("{text}"),
    }
    Ok(finish(&Summary::of(&results)))
}

fn finish(s: &Summary) -> ExitCode {
    eprintln!(
        "total {} exact {} numeric {} mismatch {} skipped {} failed {}",
        s.total, s.exact, s.numeric, s.mismatch, s.skipped, s.failed
    );
    if s.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn catalog_list(as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(&oldsum::catalog::manifest_json()).expect("json"));
        return;
    }
    for e in catalog_entries() {
        let params: Vec<String> = e.identity.params.iter().map(|p| format!("{}: {}", p.name, p.kind.keyword())).collect();
        println!("{:<14} ({})  {}", e.id(), params.join(", "), e.anchor);
    }
}

fn catalog_verify(ids: &[String], args: &SweepArgs) -> Result<ExitCode, ConfigError> {
    let entries: Vec<_> = if ids.is_empty() {
        catalog_entries().iter().collect()
    } else {
        ids.iter().map(|id| lookup(id).map_err(|e| config(e.to_string()))).collect::<Result<_, _>>()?
    };
    let work = entries
        .into_iter()
        .map(|e| Ok((e.identity.clone(), args.ranges(&e.identity, e.ranges.clone())?)))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    run_sweeps(work, args, args.config_json("catalog verify", ids))
}

fn dsl_verify(file: &PathBuf, args: &SweepArgs) -> Result<ExitCode, ConfigError> {
    let text = std::fs::read_to_string(file).map_err(|e| config(format!("{}: {e}", file.display())))?;
    let ids = parse_file(&text).map_err(|e| config(format!("{}: {e}", file.display())))?;
    let names: Vec<String> = ids.iter().map(|i| i.id.clone()).collect();
    let work = ids
        .into_iter()
        .map(|id| {
            let r = args.ranges(&id, default_ranges(&id))?;
            Ok((id, r))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    run_sweeps(work, args, args.config_json("dsl verify", &names))
}

fn transform(t: &TransformArgs) -> Result<ExitCode, ConfigError> {
    let sf = input_form(&t.input)
        .map_err(|e| config(format!("{e}; registered inputs: {}", input_names().join(", "))))?;
    let op = Op::parse(&t.op).map_err(|_| config(format!("unknown op {}", t.op)))?;
    let shift = |s: &Option<String>| s.as_deref().map(|x| parse_shift(&sf, x)).transpose().map_err(|e| config(e.to_string()));
    let (u, v) = (shift(&t.u)?, shift(&t.v)?);
    let emitted = match apply(&sf, op, u, v) {
        Ok(ids) => ids,
        Err(e) => {
            eprintln!("transform failed: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let text: String = emitted.iter().map(|i| format!("{}\n", format_identity(i))).collect();
    if let Some(path) = &t.emit_dsl {
        write_text(path, &text).map_err(|e| config(e.to_string()))?;
    }
    if !t.verify {
        print!("{text}");
        return Ok(ExitCode::SUCCESS);
    }
    eprint!("{text}");
    let work = emitted
        .into_iter()
        .map(|id| {
            let r = t.sweep.ranges(&id, default_ranges(&id))?;
            Ok((id, r))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let names: Vec<String> = work.iter().map(|(i, _)| i.id.clone()).collect();
    let mut cfg = t.sweep.config_json("transform", &names);
    cfg["input"] = json!(t.input);
    cfg["op"] = json!(t.op);
    cfg["u"] = json!(t.u);
    cfg["v"] = json!(t.v);
    run_sweeps(work, &t.sweep, cfg)
}

fn quadcheck(q: &QuadArgs) -> Result<ExitCode, ConfigError> {
    if !(10..=100).contains(&q.digits) {
        return Err(config(format!("digits {} outside [10, 100]", q.digits)));
    }
    let kinds = q
        .kinds
        .iter()
        .map(|k| IntegralKind::from_name(k.trim()).ok_or_else(|| config(format!("unknown kind {k}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut us, mut vs) = (None, None);
    for part in q.grid.split(',') {
        let (name, range) = part.split_once('=').ok_or_else(|| config(format!("bad grid part {part}")))?;
        match name.trim() {
            "u" => us = Some(parse_range(range)?),
            "v" => vs = Some(parse_range(range)?),
            other => return Err(config(format!("unknown grid variable {other}"))),
        }
    }
    let (us, vs) = (us.ok_or_else(|| config("grid needs u"))?, vs.ok_or_else(|| config("grid needs v"))?);
    let minus_one = BigRational::from_integer((-1).into());
    let mut cases = Vec::new();
    for &kind in &kinds {
        for u in &us {
            if *u <= minus_one || (kind == IntegralKind::CosPower && (!u.is_integer() || u < &BigRational::from_integer(0.into()))) {
                continue;
            }
            let vlist: Vec<BigRational> =
                if kind == IntegralKind::CosPower { vec![BigRational::from_integer(0.into())] } else { vs.clone() };
            for v in vlist.into_iter().filter(|v| *v > minus_one) {
                cases.push((kind, u.clone(), v));
            }
        }
    }
    use rayon::prelude::*;
    let out: Vec<_> = pool(q.jobs)?.install(|| cases.par_iter().map(|(k, u, v)| quad_check(*k, u, v, q.digits)).collect());
    let tol = quad_tolerance(q.digits);
    let mut bad = 0;
    let mut worst: Vec<(IntegralKind, f64)> = kinds.iter().map(|k| (*k, 0.0)).collect();
    for ((kind, u, v), r) in cases.iter().zip(out) {
        match r {
            Ok(c) => {
                let e = c.relerr.to_f64();
                if let Some(w) = worst.iter_mut().find(|(k, _)| k == kind) {
                    w.1 = w.1.max(e);
                }
                if c.relerr > tol {
                    bad += 1;
                    println!("{} u={u} v={v}: relerr {e:.3e} quad {} closed {}", kind.name(), format_float(&c.quad.re, 20), format_float(&c.closed.re, 20));
                }
            }
            Err(e) => {
                bad += 1;
                println!("{} u={u} v={v}: {e}", kind.name());
            }
        }
    }
    for (k, w) in worst {
        println!("{:<10} max relerr {w:.3e}", k.name());
    }
    eprintln!("checked {} failed {bad} tolerance {:.1e}", cases.len(), tol.to_f64());
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn emit_vectors(out: &PathBuf) -> Result<ExitCode, ConfigError> {
    let v = golden_vectors(catalog_entries());
    let mut text = serde_json::to_string_pretty(&v).expect("json");
    text.push('\n');
    write_text(out, &text).map_err(|e| config(e.to_string()))?;
    eprintln!("wrote {} entries to {}", catalog_entries().len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Catalog(CatalogCmd::List { json }) => {
            catalog_list(*json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog(CatalogCmd::Verify { ids, sweep }) => catalog_verify(ids, sweep),
        Command::Dsl(DslCmd::Verify { file, sweep }) => dsl_verify(file, sweep),
        Command::Transform(t) => transform(t),
        Command::Quadcheck(q) => quadcheck(q),
        Command::EmitVectors { out } => emit_vectors(out),
    };
    res.unwrap_or_else(|ConfigError(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}
