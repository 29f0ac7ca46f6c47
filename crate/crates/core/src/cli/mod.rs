//! Command line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric or hypothesis error,
//! 3 validation failure.

mod config;
mod output;
mod validate;

pub use config::{parse_key_values, parse_range, KeyValues};
pub use output::{fmt_num, round_sig, to_json, SIGNIFICANT_DIGITS};
pub use validate::{Grid, ValidationReport};

use crate::analysis::{
    analyze, critical_curve_with, poisson_reach_closed_form, CurveForm, CurveOptions, Scheme,
    SolveFor, Tolerances, DEFAULT_LAMBDA_MAX,
};
use crate::error::Error;
use crate::sim::{estimate_with, outcomes, Horizon, ProcessConfig, RootKind, Termination, Variant};
use crate::survivor::{Catastrophe, Growth, SurvivorLaw};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cctree", version, about = "Colonization and collapse processes on homogeneous trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Phase class, survival sandwich and limit, reach and colony bounds.
    Analyze(AnalyzeArgs),
    /// Bounds on the critical curve over a grid of p (CSV by default).
    Curve(CurveArgs),
    /// Reach bounds, limit law and the Poisson closed forms.
    Reach(AnalyzeArgs),
    /// Bounds on the expected number of colonies.
    Colonies(LawOnlyArgs),
    /// Monte Carlo estimates.
    Simulate(SimulateArgs),
    /// Checks simulation against the analytic bounds over a grid.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Flat key = value file mirroring the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct LawArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_enum)]
    pub growth: Option<GrowthArg>,
    #[arg(long = "cat", value_enum)]
    pub cat: Option<CatArg>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub law: LawArgs,
    /// Largest m for reach distribution functions.
    #[arg(long)]
    pub m_max: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct LawOnlyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub law: LawArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_enum)]
    pub growth: Option<GrowthArg>,
    #[arg(long = "cat", value_enum)]
    pub cat: Option<CatArg>,
    /// p grid as start:stop:step.
    #[arg(long)]
    pub grid_p: Option<String>,
    #[arg(long, value_enum)]
    pub curve_form: Option<CurveFormArg>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    pub tree: Option<TreeArg>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_events: Option<u64>,
    #[arg(long)]
    pub max_alive: Option<u64>,
    #[arg(long)]
    pub max_depth: Option<u64>,
    #[arg(long)]
    pub m_max: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write one CSV row per replication to this path.
    #[arg(long)]
    pub dump_outcomes: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid file of `key = v1, v2, ...` lines; a built-in grid otherwise.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthArg {
    Poisson,
    Yule,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatArg {
    Geometric,
    Binomial,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    Original,
    U,
    L,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeArg {
    Full,
    Rooted,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormArg {
    Closed,
    Pgf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) | Error::Domain(m) => CliError::Usage(m),
            other => CliError::Numeric(other),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flag values backed by an optional config file.
struct Resolver {
    kv: KeyValues,
    used: BTreeSet<String>,
}

impl Resolver {
    fn new(path: Option<&Path>) -> CliResult<Self> {
        let kv = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_key_values(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?
            }
            None => KeyValues::new(),
        };
        Ok(Self { kv, used: BTreeSet::new() })
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.kv.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn get<T: FromStr>(&mut self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let from_file = self.raw(key);
        if flag.is_some() {
            return Ok(flag);
        }
        from_file
            .map(|s| s.parse::<T>().map_err(|e| usage(format!("config key {key}: {s:?}: {e}"))))
            .transpose()
    }

    fn get_enum<T: ValueEnum>(&mut self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        let from_file = self.raw(key);
        if flag.is_some() {
            return Ok(flag);
        }
        from_file
            .map(|s| T::from_str(&s, true).map_err(|e| usage(format!("config key {key}: {e}"))))
            .transpose()
    }

    fn require<T>(v: Option<T>, key: &str) -> CliResult<T> {
        v.ok_or_else(|| usage(format!("--{} is required", key.replace('_', "-"))))
    }

    fn finish(self) -> CliResult<()> {
        let unknown: Vec<_> = self.kv.keys().filter(|k| !self.used.contains(*k)).cloned().collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(usage(format!("unknown config keys: {}", unknown.join(", "))))
        }
    }
}

fn scheme_of(growth: Option<GrowthArg>, cat: Option<CatArg>) -> CliResult<(Growth, Catastrophe)> {
    let g = match growth.unwrap_or(GrowthArg::Poisson) {
        GrowthArg::Poisson => Growth::Poisson,
        GrowthArg::Yule => Growth::Yule,
    };
    let c = match cat {
        Some(CatArg::Geometric) => Catastrophe::Geometric,
        Some(CatArg::Binomial) => Catastrophe::Binomial,
        None if g == Growth::Poisson => Catastrophe::Geometric,
        None => Catastrophe::Binomial,
    };
    Ok((g, c))
}

#[derive(Debug, Clone, Serialize)]
struct LawParams {
    d: u32,
    growth: Growth,
    catastrophe: Catastrophe,
    lambda: f64,
    p: f64,
}

fn resolve_law(r: &mut Resolver, a: &LawArgs) -> CliResult<(LawParams, SurvivorLaw)> {
    let d = Resolver::require(r.get(a.d, "d")?, "d")?;
    let growth = r.get_enum(a.growth, "growth")?;
    let cat = r.get_enum(a.cat, "cat")?;
    let lambda = Resolver::require(r.get(a.lambda, "lambda")?, "lambda")?;
    let p = Resolver::require(r.get(a.p, "p")?, "p")?;
    if d < 2 {
        return Err(usage(format!("--d must be at least 2, got {d}")));
    }
    let (growth, catastrophe) = scheme_of(growth, cat)?;
    let law = SurvivorLaw::new(growth, catastrophe, lambda, p)?;
    Ok((LawParams { d, growth, catastrophe, lambda, p }, law))
}

#[derive(Serialize)]
struct Envelope<'a, P: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    parameters: P,
    tolerances: Tolerances,
    result: R,
}

fn envelope<P: Serialize, R: Serialize>(command: &str, parameters: P, result: R) -> String {
    to_json(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        parameters,
        tolerances: Tolerances::default(),
        result,
    })
}

/// What a command produced.
struct Output {
    body: String,
    format_out: Option<PathBuf>,
    notes: Vec<String>,
    exit: i32,
}

fn json_only(format: Option<Format>, command: &str) -> CliResult<()> {
    match format {
        Some(Format::Csv) => Err(usage(format!("{command} has no CSV output; use --format json"))),
        _ => Ok(()),
    }
}

fn cmd_analyze(a: &AnalyzeArgs) -> CliResult<Output> {
    let mut r = Resolver::new(a.common.config.as_deref())?;
    let (params, law) = resolve_law(&mut r, &a.law)?;
    let m_max = r.get(a.m_max, "m_max")?.unwrap_or(10);
    let format = r.get_enum(a.common.format, "format")?;
    let out = r.get(a.common.out.clone(), "out")?;
    r.finish()?;
    json_only(format, "analyze")?;
    let report = analyze(params.d, &law, m_max)?;
    Ok(Output {
        body: envelope("analyze", json!({"law": params, "m_max": m_max}), report),
        format_out: out,
        notes: Vec::new(),
        exit: EXIT_OK,
    })
}

fn cmd_reach(a: &AnalyzeArgs) -> CliResult<Output> {
    let mut r = Resolver::new(a.common.config.as_deref())?;
    let (params, law) = resolve_law(&mut r, &a.law)?;
    let m_max = r.get(a.m_max, "m_max")?.unwrap_or(10);
    let format = r.get_enum(a.common.format, "format")?.unwrap_or(Format::Json);
    let out = r.get(a.common.out.clone(), "out")?;
    r.finish()?;
    let report = analyze(params.d, &law, m_max)?;
    let closed = match law {
        SurvivorLaw::PoissonGeometric { lambda, p } => {
            let cf = poisson_reach_closed_form(lambda, p)?;
            let cdf: Vec<f64> = (0..=m_max).map(|m| cf.cdf(m)).collect();
            Some(json!({"form": cf, "cdf": cdf, "mean": cf.mean()?}))
        }
        _ => None,
    };
    let body = match format {
        Format::Json => envelope(
            "reach",
            json!({"law": params, "m_max": m_max}),
            json!({
                "bounds": report.reach,
                "limit": report.reach_limit,
                "poisson_closed_form": closed,
            }),
        ),
        Format::Csv => {
            let mut s = String::from("m,cdf_lower,cdf_upper,limit_cdf\n");
            for m in 0..=m_max as usize {
                let (lo, hi) = match report.reach.available() {
                    Some(rr) => (fmt_num(rr.cdf[m].lower), fmt_num(rr.cdf[m].upper)),
                    None => (String::new(), String::new()),
                };
                s.push_str(&format!("{m},{lo},{hi},{}\n", fmt_num(report.reach_limit.cdf[m])));
            }
            s
        }
    };
    Ok(Output { body, format_out: out, notes: Vec::new(), exit: EXIT_OK })
}

fn cmd_colonies(a: &LawOnlyArgs) -> CliResult<Output> {
    let mut r = Resolver::new(a.common.config.as_deref())?;
    let (params, law) = resolve_law(&mut r, &a.law)?;
    let format = r.get_enum(a.common.format, "format")?;
    let out = r.get(a.common.out.clone(), "out")?;
    r.finish()?;
    json_only(format, "colonies")?;
    let report = analyze(params.d, &law, 0)?;
    Ok(Output {
        body: envelope(
            "colonies",
            json!({"law": params}),
            json!({
                "bounds": report.colonies,
                "limit": report.colony_limit,
                "mean_survivors": report.mean_survivors,
            }),
        ),
        format_out: out,
        notes: Vec::new(),
        exit: EXIT_OK,
    })
}

fn cmd_curve(a: &CurveArgs) -> CliResult<Output> {
    let mut r = Resolver::new(a.common.config.as_deref())?;
    let d = Resolver::require(r.get(a.d, "d")?, "d")?;
    let growth = r.get_enum(a.growth, "growth")?;
    let cat = r.get_enum(a.cat, "cat")?;
    let grid = r.get(a.grid_p.clone(), "grid_p")?.unwrap_or_else(|| "0.01:1:0.01".into());
    let form = r.get_enum(a.curve_form, "curve_form")?.unwrap_or(CurveFormArg::Closed);
    let lambda_max = r.get(a.lambda_max, "lambda_max")?.unwrap_or(DEFAULT_LAMBDA_MAX);
    let format = r.get_enum(a.common.format, "format")?.unwrap_or(Format::Csv);
    let out = r.get(a.common.out.clone(), "out")?;
    r.finish()?;
    let scheme = match scheme_of(growth, cat)? {
        (Growth::Poisson, Catastrophe::Geometric) => Scheme::PoissonGeometric,
        (Growth::Yule, Catastrophe::Binomial) => Scheme::YuleBinomial,
        (g, c) => return Err(usage(format!("no critical curve for {g:?} growth with {c:?} catastrophe"))),
    };
    let ps = parse_range(&grid).map_err(usage)?;
    if ps.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(usage(format!("--grid-p must lie in (0, 1], got {grid}")));
    }
    let opts = CurveOptions {
        form: match form {
            CurveFormArg::Closed => CurveForm::Closed,
            CurveFormArg::Pgf => CurveForm::Pgf,
        },
        lambda_max,
    };
    let mut rows = Vec::with_capacity(ps.len());
    let mut failed = 0usize;
    for &p in &ps {
        let b = critical_curve_with(d, scheme, SolveFor::LambdaGivenP, p, &opts)?;
        let lo = b.lower.as_ref().ok().copied();
        let hi = b.upper.as_ref().ok().copied();
        if lo.is_none() || hi.is_none() {
            failed += 1;
        }
        rows.push((p, lo, hi));
    }
    let body = match format {
        Format::Csv => {
            let mut s = String::from("p,lambda_lower,lambda_upper\n");
            let cell = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
            for (p, lo, hi) in &rows {
                s.push_str(&format!("{},{},{}\n", fmt_num(*p), cell(*lo), cell(*hi)));
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(p, lo, hi)| json!({"p": p, "lambda_lower": lo, "lambda_upper": hi}))
                .collect();
            envelope(
                "curve",
                json!({"d": d, "scheme": scheme, "grid_p": grid, "form": opts.form, "lambda_max": lambda_max}),
                rows,
            )
        }
    };
    let notes = if failed > 0 {
        vec![format!("warning: {failed} of {} rows have no root on at least one side", ps.len())]
    } else {
        Vec::new()
    };
    Ok(Output { body, format_out: out, notes, exit: EXIT_OK })
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<Output> {
    let mut r = Resolver::new(a.common.config.as_deref())?;
    let (params, law) = resolve_law(&mut r, &a.law)?;
    let variant = r.get_enum(a.variant, "variant")?.unwrap_or(VariantArg::Original);
    let tree = r.get_enum(a.tree, "tree")?.unwrap_or(TreeArg::Full);
    let reps = Resolver::require(r.get(a.reps, "reps")?, "reps")?;
    let seed = r.get(a.seed, "seed")?.unwrap_or(0);
    let defaults = Horizon::default();
    let horizon = Horizon {
        max_events: r.get(a.max_events, "max_events")?.unwrap_or(defaults.max_events),
        max_colonies_alive: r.get(a.max_alive, "max_alive")?.unwrap_or(defaults.max_colonies_alive),
        max_depth: r.get(a.max_depth, "max_depth")?.unwrap_or(defaults.max_depth),
    };
    let m_max = r.get(a.m_max, "m_max")?.unwrap_or(10);
    let workers = r.get(a.workers, "workers")?;
    let dump = r.get(a.dump_outcomes.clone(), "dump_outcomes")?;
    let format = r.get_enum(a.common.format, "format")?;
    let out = r.get(a.common.out.clone(), "out")?;
    r.finish()?;
    json_only(format, "simulate")?;
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    if workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    let cfg = ProcessConfig {
        d: params.d,
        root_kind: match tree {
            TreeArg::Full => RootKind::FullTree,
            TreeArg::Rooted => RootKind::RootedTree,
        },
        variant: match variant {
            VariantArg::Original => Variant::Original,
            VariantArg::U => Variant::SelfAvoiding,
            VariantArg::L => Variant::ForwardOrDie,
        },
        law,
        horizon,
        base_seed: seed,
    };
    let est = estimate_with(&cfg, reps, workers)?;
    let cdf: Vec<_> = (0..=m_max as usize)
        .map(|m| {
            let c = est.reach_cdf(m);
            json!({"m": m, "estimate": c.estimate, "lower": c.lower, "upper": c.upper})
        })
        .collect();
    if let Some(path) = dump {
        let outs = outcomes(&cfg, reps)?;
        let mut s = String::from(
            "replication,terminated,colonies_created,max_depth_reached,events_processed,final_alive\n",
        );
        for (i, o) in outs.iter().enumerate() {
            let t = match o.terminated {
                Termination::ExtinctExact => "extinct_exact",
                Termination::CensoredAtHorizon => "censored_at_horizon",
            };
            s.push_str(&format!(
                "{i},{t},{},{},{},{}\n",
                o.colonies_created, o.max_depth_reached, o.events_processed, o.final_alive
            ));
        }
        std::fs::write(&path, s).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Output {
        body: envelope(
            "simulate",
            json!({"law": params, "config": cfg, "replications": reps, "m_max": m_max}),
            json!({"estimates": est, "reach_cdf": cdf}),
        ),
        format_out: out,
        notes: Vec::new(),
        exit: EXIT_OK,
    })
}

fn cmd_validate(a: &ValidateArgs) -> CliResult<Output> {
    json_only(a.format, "validate")?;
    if a.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    let grid = match &a.grid {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read grid {}: {e}", path.display())))?;
            Grid::parse(&text).map_err(|e| usage(format!("grid {}: {e}", path.display())))?
        }
        None => Grid::default(),
    };
    let report = validate::run(&grid, a.workers)?;
    let mut notes: Vec<String> = report
        .failures()
        .map(|(point, c)| format!("FAIL {point}: {} observed {} not in [{}, {}]", c.name, fmt_num(c.observed), fmt_num(c.lower), fmt_num(c.upper)))
        .collect();
    let failures = notes.len();
    notes.push(format!(
        "validate: {} points, {} checks, {} failures; closed-form max deviation {}",
        report.points.len(),
        report.check_count(),
        failures,
        fmt_num(report.closed_form.max_abs_deviation)
    ));
    Ok(Output {
        body: envelope("validate", json!({"grid": grid}), &report),
        format_out: a.out.clone(),
        notes,
        exit: if failures == 0 { EXIT_OK } else { EXIT_VALIDATION },
    })
}

/// Runs the CLI on `args` (program name first), writing the report to `out`
/// or the `--out` file and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Reach(a) => cmd_reach(a),
        Command::Colonies(a) => cmd_colonies(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(o) => {
            for n in &o.notes {
                let _ = writeln!(err, "{n}");
            }
            let written = match &o.format_out {
                Some(path) => std::fs::write(path, &o.body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(o.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => o.exit,
                Err(e) => {
                    let _ = writeln!(err, "usage error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
