//! `gwquasi`: command-line access to the engine, the fits and the checks.
//!
//! Every command prints JSON, one record per line. Exit status is 0 when all
//! checks pass, 1 when a non-exploratory check fails and 2 on usage errors.

mod config;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gwquasi::arith::{parse_rat, Rat};
use gwquasi::engine::{degree_of, Engine, Insertion, InvariantKey};
use gwquasi::eo::{self, EoSolver, SpectralCurve};
use gwquasi::fit::{self, FitSpec};
use gwquasi::psi;
use gwquasi::report::{Status, VerificationReport};
use serde_json::{json, Value};

use config::Config;

#[derive(Parser)]
#[command(name = "gwquasi", version, about = "Exact stationary Gromov-Witten invariants of P^N")]
struct Cli {
    /// TOML file with atom values, cache path, depths and exploratory flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Invariant cache, loaded at start and written back at exit.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Substitute configured atom values into printed results.
    #[arg(long, global = true)]
    resolve_atoms: bool,
    /// Allow exploratory computations (genus two comparisons, low grids).
    #[arg(long, global = true)]
    exploratory: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one invariant.
    Invariant {
        #[arg(long = "N")]
        n_target: u32,
        #[arg(long)]
        g: u32,
        /// Insertions `m:k` or `m:pt`, comma separated.
        #[arg(long)]
        ins: String,
    },
    /// Fit the stationary quasi-polynomial.
    Fit {
        #[arg(long = "N")]
        n_target: u32,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        min_m: Option<u32>,
    },
    /// Run a structural check.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// A psi-class intersection number.
    Psi {
        #[arg(long)]
        g: u32,
        /// Comma-separated exponents.
        #[arg(long)]
        beta: String,
    },
    /// Target-a-point invariants: the polynomial, or one value with `--m`.
    N0 {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        d: Option<u32>,
    },
    /// An Eynard-Orantin differential, optionally expanded at infinity.
    Eo {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        expand: Option<u32>,
        #[arg(long)]
        y_truncation: Option<u32>,
    },
    /// Cache maintenance.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Merge a cache file into the working cache.
    Load { path: PathBuf },
    /// Write the working cache.
    Save { path: PathBuf },
    /// Count records.
    Stats,
}

#[derive(Args, Clone)]
struct Level {
    #[arg(long = "N", default_value_t = 1)]
    n_target: u32,
    #[arg(long)]
    g: u32,
}

#[derive(Subcommand)]
enum Check {
    /// Top-degree coefficients against psi-numbers.
    Top {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        n: usize,
    },
    /// Primary insertions as negative stationary arguments.
    Negative {
        #[command(flatten)]
        level: Level,
        /// Primary classes, comma separated.
        #[arg(long, default_value = "")]
        k: String,
        /// Stationary levels, comma separated.
        #[arg(long, default_value = "")]
        m: String,
        /// Run the whole grid instead of one point.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 2)]
        max_s: usize,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// String and divisor equations in stationary form.
    StringDivisor {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// Dilaton insertion as a derivative (`N = 1` only).
    Dilaton {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// Leading asymptotics along a ray.
    Asymptotics {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        ray: String,
        #[arg(long)]
        m_max: u32,
        #[arg(long, default_value = "1/100")]
        bound: String,
    },
    /// Tabulated closed forms.
    Table {
        #[command(flatten)]
        level: Level,
        #[arg(long)]
        n: usize,
    },
    /// Eynard-Orantin expansion against the generating function of `P^1`.
    EoCompare {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Eynard-Orantin string (m = 0, 1) and dilaton identities.
    EoString {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: u32,
    },
    /// Pole orders and leading pole coefficients.
    Pole {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// The non-stationary counterexample.
    ExampleF {
        #[arg(long, default_value_t = 12)]
        max_m: u32,
    },
}

/// Usage problems exit with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

/// Engine errors caused by the input count as usage errors as well.
fn input(e: gwquasi::Error) -> anyhow::Error {
    use gwquasi::Error as E;
    match e {
        E::InvalidExponent { .. } | E::Unstable { .. } | E::OutOfRange(_) | E::Parse(_) | E::Arity { .. } => {
            usage(e.to_string())
        }
        other => anyhow!(other),
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<u32>().map_err(|_| usage(format!("not a non-negative integer: `{x}`"))))
        .collect()
}

fn parse_insertions(s: &str, n_target: u32) -> Result<Vec<Insertion>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|item| {
            let (m, k) = item
                .split_once(':')
                .ok_or_else(|| usage(format!("insertion `{item}` is not `m:k` or `m:pt`")))?;
            let m: u32 = m.trim().parse().map_err(|_| usage(format!("bad level in `{item}`")))?;
            let k = match k.trim() {
                "pt" => n_target,
                k => k.parse().map_err(|_| usage(format!("bad class in `{item}`")))?,
            };
            Ok(Insertion::new(m, k))
        })
        .collect()
}

struct Session {
    config: Config,
    resolve: bool,
    exploratory: bool,
}

impl Session {
    fn assignment(&self) -> &HashMap<String, Rat> {
        &self.config.atoms
    }
}

struct Output {
    failed: bool,
    out: BufWriter<std::io::Stdout>,
}

impl Output {
    fn record(&mut self, v: &Value) -> Result<()> {
        writeln!(self.out, "{}", serde_json::to_string(v)?)?;
        Ok(())
    }

    fn report(&mut self, r: &VerificationReport) -> Result<()> {
        if r.status == Status::Fail {
            self.failed = true;
        }
        self.record(&serde_json::to_value(r)?)
    }
}

fn run(cli: Cli, out: &mut Output) -> Result<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(|e| usage(format!("{e:#}")))?,
        None => Config::default(),
    };
    let cache_path = cli.cache.clone().or_else(|| config.cache_path.clone());
    let engine = Engine::global();
    if let Some(p) = &cache_path {
        if p.exists() {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            engine.import_cache(BufReader::new(f)).map_err(|e| usage(e.to_string()))?;
        }
    }
    let ctx = Session {
        exploratory: cli.exploratory || !config.exploratory.is_empty(),
        config,
        resolve: cli.resolve_atoms,
    };
    dispatch(cli.command, &ctx, engine, out)?;
    if let Some(p) = &cache_path {
        let f = File::create(p).with_context(|| format!("writing {}", p.display()))?;
        let mut w = BufWriter::new(f);
        engine.export_cache(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn dispatch(command: Command, ctx: &Session, engine: &Engine, out: &mut Output) -> Result<()> {
    match command {
        Command::Invariant { n_target, g, ins } => {
            let key = InvariantKey::new(n_target, g, parse_insertions(&ins, n_target)?);
            key.validate().map_err(input)?;
            let value = engine.invariant(&key).map_err(input)?;
            let mut rec = json!({
                "key": key.to_string(),
                "value": value,
                "degree": degree_of(&key),
                "atoms": !value.is_rational(),
            });
            if ctx.resolve && !value.is_rational() {
                let v = value.resolve_partial(ctx.assignment());
                rec["atomsResolved"] = json!(v.is_rational());
                rec["value"] = json!(v);
            }
            out.record(&rec)
        }
        Command::Fit { n_target, g, n, min_m } => {
            let mut spec = FitSpec::stationary(n_target, g, n);
            spec.min_m = min_m;
            spec.exploratory = ctx.exploratory;
            let q = fit::fit_stationary(engine, &spec).map_err(input)?;
            out.record(&json!({"spec": spec, "quasi": q}))
        }
        Command::Verify { check } => verify(check, ctx, engine, out),
        Command::Psi { g, beta } => {
            let beta = parse_list(&beta)?;
            let v = psi::psi_intersection(g, &beta).map_err(input)?;
            out.record(&json!({"g": g, "beta": beta, "value": v.to_string()}))
        }
        Command::N0 { g, n, m, d } => match (n, m) {
            (Some(n), None) => {
                let q = psi::n0_polynomial(g, n).map_err(input)?;
                out.record(&json!({"g": g, "n": n, "quasi": q}))
            }
            (None, Some(m)) => {
                let m = parse_list(&m)?;
                let d = d.ok_or_else(|| usage("--m needs --d"))?;
                let v = psi::point_invariant(g, &m, d).map_err(input)?;
                out.record(&json!({"g": g, "m": m, "d": d, "value": v.to_string()}))
            }
            _ => Err(usage("give exactly one of --n or --m")),
        },
        Command::Eo { g, n, expand, y_truncation } => {
            if g >= 2 && !ctx.exploratory {
                return Err(usage("genus >= 2 differentials need --exploratory"));
            }
            let t = y_truncation.unwrap_or_else(|| SpectralCurve::minimal_truncation(g, n).max(ctx.config.depth("y_truncation", 0)));
            let solver = EoSolver::new(SpectralCurve::new(t));
            let w = solver.omega(g, n).map_err(input)?;
            let mut rec = json!({"y_truncation": t, "differential": &*w});
            if let Some(depth) = expand {
                rec["expansion"] = json!(eo::expand_at_infinity(&w, depth).map_err(input)?);
            }
            out.record(&rec)
        }
        Command::Cache { action } => match action {
            CacheAction::Load { path } => {
                let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                let n = engine.import_cache(BufReader::new(f)).map_err(|e| usage(e.to_string()))?;
                out.record(&json!({"loaded": n, "size": engine.cache_len()}))
            }
            CacheAction::Save { path } => {
                let f = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
                let mut w = BufWriter::new(f);
                let n = engine.export_cache(&mut w)?;
                w.flush()?;
                out.record(&json!({"saved": n}))
            }
            CacheAction::Stats => out.record(&json!({"size": engine.cache_len()})),
        },
    }
}

fn solver_for(ctx: &Session, g: u32, n: usize) -> EoSolver {
    let t = ctx
        .config
        .depth("y_truncation", 0)
        .max(SpectralCurve::minimal_truncation(g, n + 1));
    EoSolver::new(SpectralCurve::new(t))
}

fn verify(check: Check, ctx: &Session, engine: &Engine, out: &mut Output) -> Result<()> {
    let grid = ctx.config.depth("grid", 12);
    let r = match check {
        Check::Top { level, n } => {
            let spec = FitSpec::stationary(level.n_target, level.g, n);
            let q = fit::fit_cached(&spec).map_err(input)?;
            let mut r = if ctx.resolve {
                fit::verify_top_coefficients_with(&q, level.g, n, level.n_target, ctx.assignment())
            } else {
                fit::verify_top_coefficients(&q, level.g, n, level.n_target)
            };
            if level.g >= 2 && ctx.resolve {
                let status = if r.passed() { Status::Exploratory } else { Status::Fail };
                r = r.with_status(status);
            }
            r
        }
        Check::Negative { level, k, m, grid: whole, max_s, max_n, m_max } => {
            if whole {
                fit::verify_negative_grid(engine, level.n_target, level.g, max_s, max_n, m_max.unwrap_or(grid))
                    .map_err(input)?
            } else {
                let ks = parse_list(&k)?;
                let ms = parse_list(&m)?;
                fit::verify_negative_evaluation(engine, level.n_target, level.g, &ks, &ms).map_err(input)?
            }
        }
        Check::StringDivisor { level, n, m_max } => {
            fit::verify_p_string_divisor(engine, level.n_target, level.g, n, m_max.unwrap_or(grid)).map_err(input)?
        }
        Check::Dilaton { level, n, m_max } => {
            if level.n_target != 1 {
                bail!(usage("the dilaton derivative check is stated for N = 1"));
            }
            fit::verify_dilaton_derivative(engine, level.g, n, m_max.unwrap_or(grid)).map_err(input)?
        }
        Check::Asymptotics { level, ray, m_max, bound } => {
            let ray = parse_list(&ray)?;
            let bound = parse_rat(&bound).map_err(input)?;
            fit::asymptotics_report(engine, level.n_target, level.g, &ray, m_max, ctx.assignment(), &bound)
                .map_err(input)?
        }
        Check::Table { level, n } => fit::verify_table_row(engine, level.n_target, level.g, n).map_err(input)?,
        Check::EoCompare { g, n, depth } => {
            if g >= 2 && !ctx.exploratory {
                bail!(usage("genus >= 2 comparisons need --exploratory"));
            }
            let depth = depth.unwrap_or_else(|| ctx.config.depth("eo", 8));
            let solver = solver_for(ctx, g, n);
            let r = eo::compare_eo_gw(&solver, engine, g, n, depth, ctx.assignment()).map_err(input)?;
            if g >= 2 {
                r.with_status(Status::Exploratory)
            } else {
                r
            }
        }
        Check::EoString { g, n, m } => {
            let solver = solver_for(ctx, g, n);
            eo::eo_string_dilaton_check(&solver, g, n, m).map_err(input)?
        }
        Check::Pole { g, n } => {
            let solver = solver_for(ctx, g, n);
            eo::pole_asymptotics_check(&solver, g, n).map_err(input)?
        }
        Check::ExampleF { max_m } => fit::verify_example_f(engine, max_m).map_err(input)?,
    };
    out.report(&r)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = Output {
        failed: false,
        out: BufWriter::new(std::io::stdout()),
    };
    let result = run(cli, &mut out);
    let _ = out.out.flush();
    match result {
        Ok(()) if out.failed => ExitCode::from(1),
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
