//! `pcenter` command line.
//!
//! Exit codes: 0 success, 1 instance parse error, 2 bad flags or empty
//! instance set, 3 I/O error, 4 solver error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pcenter_core::algorithm::{direct_solve, two_step_solve, AlgorithmError};
use pcenter_core::bounds::{clamp_distances, BoundProvenance, Bounds};
use pcenter_core::formulations::{build, Formulation};
use pcenter_core::instance::{Distance, Instance};
use pcenter_core::solve::{SolveMode, SolveStatus, Solver};
use serde::Serialize;

use crate::fixtures::fixture_bounds;
use crate::formats::{load_instance, InstanceFormat, LoadError};
use crate::lp::write_lp_file;
use crate::solver::{ExternalSolver, SolverConfig, SolverError, DEFAULT_COMMAND, SOLVER_CMD_ENV};
use crate::trace::write_trace;

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pcenter", version, about = "p-center formulations, bounds and exact solves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the LP file of a formulation and print its size.
    Build(BuildArgs),
    /// Solve an instance exactly, or its LP relaxation.
    Solve(SolveArgs),
    /// Run formulations over a set of instances and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Orlib,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Direct,
    TwoStep,
}

/// `none`, `lb0ub0`, `fixture` or `LB,UB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsSpec {
    None,
    Lb0Ub0,
    Fixture,
    Explicit(Distance, Distance),
}

impl FromStr for BoundsSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(BoundsSpec::None),
            "lb0ub0" => Ok(BoundsSpec::Lb0Ub0),
            "fixture" => Ok(BoundsSpec::Fixture),
            _ => {
                let parsed =
                    s.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
                match parsed {
                    Some((lb, ub)) if lb <= ub => Ok(BoundsSpec::Explicit(lb, ub)),
                    Some(_) => Err(format!("lower bound exceeds upper bound in `{s}`")),
                    None => Err(format!("expected none, lb0ub0, fixture or LB,UB; got `{s}`")),
                }
            }
        }
    }
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to orlib for `pmed*` and `*.txt` files, matrix otherwise.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_parser = Formulation::from_str)]
    formulation: Formulation,
    #[arg(long, default_value = "lb0ub0")]
    bounds: BoundsSpec,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Solver command template.
    #[arg(long, env = SOLVER_CMD_ENV, default_value = DEFAULT_COMMAND)]
    solver_cmd: String,
    /// Seconds per solver call.
    #[arg(long, default_value_t = crate::solver::DEFAULT_TIME_LIMIT)]
    time_limit: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, String> {
        if self.time_limit.is_nan() || self.time_limit <= 0.0 {
            return Err(format!("--time-limit must be positive, got {}", self.time_limit));
        }
        if self.threads == 0 {
            return Err("--threads must be at least 1".into());
        }
        let mut cfg = SolverConfig::new(self.solver_cmd.clone());
        cfg.time_limit = self.time_limit;
        cfg.threads = self.threads;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "direct")]
    algorithm: AlgorithmArg,
    /// Solve the LP relaxation only.
    #[arg(long)]
    relax: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// Where the two-step trace goes; defaults to `<input>.<formulation>.trace.csv`.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Glob pattern of instance files.
    #[arg(long)]
    instances: String,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Comma separated formulation ids, or `all`.
    #[arg(long, default_value = "all")]
    formulations: String,
    #[arg(long, default_value = "fixture")]
    bounds: BoundsSpec,
    #[arg(long, value_enum, default_value = "direct")]
    algorithm: AlgorithmArg,
    /// Only compute LP bounds.
    #[arg(long)]
    relax: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

impl From<LoadError> for Failure {
    fn from(err: LoadError) -> Failure {
        let code = if matches!(err, LoadError::Io { .. }) { EXIT_IO } else { EXIT_PARSE };
        Failure::new(code, err.to_string())
    }
}

impl From<AlgorithmError<SolverError>> for Failure {
    fn from(err: AlgorithmError<SolverError>) -> Failure {
        match err {
            AlgorithmError::Bounds(e) => Failure::new(EXIT_USAGE, e.to_string()),
            other => Failure::new(EXIT_SOLVER, other.to_string()),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(err: SolverError) -> Failure {
        match err {
            SolverError::Config(msg) => Failure::new(EXIT_USAGE, msg),
            other => Failure::new(EXIT_SOLVER, other.to_string()),
        }
    }
}

fn io_failure(path: &Path, err: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {err}", path.display()))
}

fn resolve_format(format: Option<FormatArg>, path: &Path) -> InstanceFormat {
    match format {
        Some(FormatArg::Orlib) => InstanceFormat::Orlib,
        Some(FormatArg::Matrix) => InstanceFormat::Matrix,
        None => InstanceFormat::guess(path),
    }
}

/// Turns a bounds flag into ladder-snapped bounds for `inst`.
pub fn resolve_bounds(spec: BoundsSpec, inst: &Instance, path: &Path) -> Result<Bounds, String> {
    let (lb, ub, provenance) = match spec {
        BoundsSpec::None => return Ok(Bounds::trivial(inst)),
        BoundsSpec::Lb0Ub0 => return Ok(Bounds::lb0_ub0(inst)),
        BoundsSpec::Fixture => match fixture_bounds(path) {
            Some((lb, ub)) => (lb, ub, BoundProvenance::Fixture),
            None => {
                log::warn!("no fixture bounds for {}, using lb0ub0", path.display());
                return Ok(Bounds::lb0_ub0(inst));
            }
        },
        BoundsSpec::Explicit(lb, ub) => (lb, ub, BoundProvenance::User),
    };
    Bounds::snapped(inst, lb, ub, provenance).map_err(|e| e.to_string())
}

fn prepare(args: &InstanceArgs) -> Result<(Instance, Bounds), Failure> {
    let inst = load_instance(&args.input, resolve_format(args.format, &args.input))?;
    let bounds = resolve_bounds(args.bounds, &inst, &args.input).map_err(|m| Failure::new(EXIT_USAGE, m))?;
    Ok((inst, bounds))
}

fn cmd_build(args: BuildArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (inst, bounds) = prepare(&args.instance)?;
    let model = build(args.instance.formulation, &clamp_distances(&inst, &bounds));
    std::fs::write(&args.out, write_lp_file(&model)).map_err(|e| io_failure(&args.out, e))?;
    let stats = model.stats();
    writeln!(out, "variables={} constraints={}", stats.n_variables, stats.n_constraints)
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}

fn lp_value(
    formulation: Formulation,
    inst: &Instance,
    bounds: &Bounds,
    solver: &mut ExternalSolver,
) -> Result<f64, Failure> {
    let model = build(formulation, &clamp_distances(inst, bounds));
    let outcome = solver.solve(&model, SolveMode::LpRelaxation)?;
    match (outcome.status, outcome.objective) {
        (SolveStatus::Optimal, Some(v)) => Ok(v),
        (status, _) => Err(Failure::new(EXIT_SOLVER, format!("LP relaxation ended with status {status}"))),
    }
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = args.solver.config().map_err(|m| Failure::new(EXIT_USAGE, m))?;
    let (inst, bounds) = prepare(&args.instance)?;
    let formulation = args.instance.formulation;
    let mut solver = ExternalSolver::new(cfg);
    let write_err = |e: std::io::Error| Failure::new(EXIT_IO, e.to_string());
    if args.relax {
        let v = lp_value(formulation, &inst, &bounds, &mut solver)?;
        return writeln!(out, "lp={v}").map_err(write_err);
    }
    match args.algorithm {
        AlgorithmArg::Direct => {
            let radius = direct_solve(formulation, &inst, &bounds, &mut solver)?;
            writeln!(out, "radius={radius}").map_err(write_err)
        }
        AlgorithmArg::TwoStep => {
            let start = Instant::now();
            let clock = move || start.elapsed().as_secs_f64();
            let (radius, trace) = two_step_solve(formulation, &inst, &bounds, &mut solver, &clock)?;
            let path = args.trace.unwrap_or_else(|| {
                let name =
                    args.instance.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                PathBuf::from(format!("{name}.{}.trace.csv", formulation.id()))
            });
            let file = std::fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
            write_trace(&trace, file).map_err(|e| io_failure(&path, e))?;
            writeln!(out, "radius={radius}").map_err(write_err)?;
            writeln!(out, "trace={}", path.display()).map_err(write_err)
        }
    }
}

/// One line of a benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: usize,
    pub formulation: String,
    pub n_variables: Option<usize>,
    pub n_constraints: Option<usize>,
    pub lp_bound: Option<f64>,
    pub radius: Option<Distance>,
    pub status: String,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub total_seconds: f64,
    pub message: String,
}

struct BenchJob<'a> {
    path: &'a Path,
    format: InstanceFormat,
    formulation: Formulation,
}

fn bench_one(job: &BenchJob<'_>, args: &BenchArgs, cfg: &SolverConfig) -> BenchRow {
    let start = Instant::now();
    let instance = job.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = BenchRow {
        instance,
        n: 0,
        p: 0,
        formulation: job.formulation.id().to_owned(),
        n_variables: None,
        n_constraints: None,
        lp_bound: None,
        radius: None,
        status: SolveStatus::Error.as_str().to_owned(),
        t1: None,
        t2: None,
        total_seconds: 0.0,
        message: String::new(),
    };
    let result = (|| -> Result<(), Failure> {
        let inst = load_instance(job.path, job.format)?;
        row.n = inst.n_clients();
        row.p = inst.p();
        let bounds = resolve_bounds(args.bounds, &inst, job.path).map_err(|m| Failure::new(EXIT_USAGE, m))?;
        let stats = build(job.formulation, &clamp_distances(&inst, &bounds)).stats();
        row.n_variables = Some(stats.n_variables);
        row.n_constraints = Some(stats.n_constraints);
        let mut solver = ExternalSolver::new(cfg.clone());
        row.lp_bound = Some(lp_value(job.formulation, &inst, &bounds, &mut solver)?);
        if args.relax {
            row.status = SolveStatus::Optimal.as_str().to_owned();
            return Ok(());
        }
        let solve_start = Instant::now();
        match args.algorithm {
            AlgorithmArg::Direct => {
                row.radius = Some(direct_solve(job.formulation, &inst, &bounds, &mut solver)?);
                row.t1 = Some(0.0);
                row.t2 = Some(solve_start.elapsed().as_secs_f64());
            }
            AlgorithmArg::TwoStep => {
                let clock = move || solve_start.elapsed().as_secs_f64();
                let (radius, trace) = two_step_solve(job.formulation, &inst, &bounds, &mut solver, &clock)?;
                row.radius = Some(radius);
                row.t1 = Some(trace.t1);
                row.t2 = Some(trace.t2);
            }
        }
        row.status = SolveStatus::Optimal.as_str().to_owned();
        Ok(())
    })();
    if let Err(failure) = result {
        log::warn!("{} {}: {}", row.instance, row.formulation, failure.message);
        row.message = failure.message;
        row.radius = None;
    }
    row.total_seconds = start.elapsed().as_secs_f64();
    row
}

fn parse_formulations(list: &str) -> Result<Vec<Formulation>, String> {
    if list.trim() == "all" {
        return Ok(Formulation::ALL.to_vec());
    }
    let mut out = Vec::new();
    for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let f = Formulation::from_str(id).map_err(|e| e.to_string())?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err("no formulations given".into());
    }
    Ok(out)
}

/// Orders rows by instance (OR-Library number first, then name) and
/// formulation id.
fn sort_rows(rows: &mut [BenchRow]) {
    rows.sort_by(|a, b| {
        let key = |r: &BenchRow| (crate::fixtures::orlib_number(Path::new(&r.instance)), r.instance.clone());
        key(a).cmp(&key(b)).then_with(|| a.formulation.cmp(&b.formulation))
    });
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = args.solver.config().map_err(|m| Failure::new(EXIT_USAGE, m))?;
    let formulations = parse_formulations(&args.formulations).map_err(|m| Failure::new(EXIT_USAGE, m))?;
    if args.jobs == 0 {
        return Err(Failure::new(EXIT_USAGE, "--jobs must be at least 1"));
    }
    let mut paths: Vec<PathBuf> = glob::glob(&args.instances)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("bad glob `{}`: {e}", args.instances)))?
        .filter_map(Result::ok)
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::new(EXIT_USAGE, format!("no instance matches `{}`", args.instances)));
    }
    let jobs: Vec<BenchJob<'_>> = paths
        .iter()
        .flat_map(|p| {
            let format = resolve_format(args.format, p);
            formulations.iter().map(move |&formulation| BenchJob { path: p, format, formulation })
        })
        .collect();

    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.min(jobs.len()) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(idx) else { break };
                let row = bench_one(job, &args, &cfg);
                rows.lock().expect("no panics while holding the lock").push(row);
            });
        }
    });
    let mut rows = rows.into_inner().expect("workers finished");
    sort_rows(&mut rows);

    let file = std::fs::File::create(&args.out).map_err(|e| io_failure(&args.out, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in &rows {
        w.serialize(row).map_err(|e| io_failure(&args.out, e))?;
    }
    w.flush().map_err(|e| io_failure(&args.out, e))?;
    let failed = rows.iter().filter(|r| r.status == SolveStatus::Error.as_str()).count();
    writeln!(out, "rows={} failed={} report={}", rows.len(), failed, args.out.display())
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}
