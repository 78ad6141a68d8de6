//! External MILP solver adapter.
//!
//! Each solve writes the model to an LP file in a fresh temporary
//! directory, runs the configured command and parses the solution file it
//! leaves behind. LP relaxations are produced by rewriting every variable to
//! continuous before writing, so the same command serves both modes.
//!
//! # Command templates
//!
//! The command is split on whitespace. If it contains `{model}`, the
//! placeholders `{model}`, `{solution}`, `{options}`, `{time_limit}`,
//! `{threads}` and `{gap}` are substituted and nothing else is added.
//! Otherwise the dialect's default arguments are appended:
//!
//! - HiGHS: `--model_file {model} --solution_file {solution} --options_file
//!   {options} --time_limit {time_limit} --threads {threads}`, with the gap
//!   and tolerances in the options file.
//! - CBC: `{model} sec {time_limit} threads {threads} ratio {gap}
//!   [primalT {tol}] solve solu {solution}`.
//!
//! # Solution dialects
//!
//! HiGHS (`--solution_file`, raw format): the line after `Model status`
//! gives the status (`Optimal`, `Infeasible`, `Time limit reached`, ...);
//! `Objective <v>` gives the objective; the `# Columns <n>` line is
//! followed by `n` lines `<name> <value>`. The MIP dual bound is read from
//! the `Dual bound <v>` line of standard output when present.
//!
//! CBC (`solu`): the first line is `<status> - objective value <v>` with
//! status `Optimal`, `Infeasible`, `Integer infeasible`, `Stopped on time`,
//! ...; every further line is `<index> <name> <value> <reduced cost>`,
//! possibly prefixed by `**` for infeasible rows. The dual bound is read from
//! the `Lower bound:` line of standard output.
//!
//! Variables missing from a solution file are zero.

use std::collections::BTreeMap;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use pcenter_core::model::Model;
use pcenter_core::solve::{SolveMode, SolveOutcome, SolveStatus, Solver};

use crate::lp::write_lp_file;

/// Environment variable holding the default solver command.
pub const SOLVER_CMD_ENV: &str = "PCENTER_SOLVER_CMD";
pub const DEFAULT_COMMAND: &str = "highs";
/// One hour.
pub const DEFAULT_TIME_LIMIT: f64 = 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Highs,
    Cbc,
}

impl Dialect {
    /// Guesses the dialect from the program name.
    pub fn infer(program: &str) -> Dialect {
        let base = Path::new(program).file_name().and_then(|s| s.to_str()).unwrap_or(program);
        if base.to_ascii_lowercase().contains("cbc") {
            Dialect::Cbc
        } else {
            Dialect::Highs
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub command: String,
    pub dialect: Dialect,
    pub time_limit: f64,
    pub threads: usize,
    /// Relative MIP gap; 0 proves optimality.
    pub mip_gap: f64,
    /// Primal/dual feasibility tolerance; `None` keeps the solver default.
    pub lp_tolerance: Option<f64>,
    /// Copies of model and solution files are kept here when set.
    pub keep_files: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("solver executable `{0}` not found")]
    NotFound(String),
    #[error("solver `{program}` failed ({status}): {excerpt}")]
    Failed { program: String, status: String, excerpt: String },
    #[error("could not parse solver output: {0}")]
    Unparsable(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("solver I/O: {0}")]
    Io(#[from] std::io::Error),
}

impl SolverConfig {
    pub fn new(command: impl Into<String>) -> SolverConfig {
        let command = command.into();
        let program = command.split_whitespace().next().unwrap_or("").to_owned();
        SolverConfig {
            dialect: Dialect::infer(&program),
            command,
            time_limit: DEFAULT_TIME_LIMIT,
            threads: 1,
            mip_gap: 0.0,
            lp_tolerance: None,
            keep_files: None,
        }
    }

    /// The command from the environment, or HiGHS.
    pub fn from_env() -> SolverConfig {
        SolverConfig::new(std::env::var(SOLVER_CMD_ENV).unwrap_or_else(|_| DEFAULT_COMMAND.to_owned()))
    }

    pub fn program(&self) -> &str {
        self.command.split_whitespace().next().unwrap_or("")
    }

    fn validate(&self) -> Result<(), SolverError> {
        if self.program().is_empty() {
            return Err(SolverError::Config("empty solver command".into()));
        }
        if self.time_limit.is_nan() || self.time_limit <= 0.0 {
            return Err(SolverError::Config(format!("time limit must be positive, got {}", self.time_limit)));
        }
        if self.threads == 0 {
            return Err(SolverError::Config("thread count must be at least 1".into()));
        }
        Ok(())
    }

    fn arguments(&self, model: &Path, solution: &Path, options: &Path) -> Vec<String> {
        let mut words: Vec<String> = self.command.split_whitespace().skip(1).map(str::to_owned).collect();
        if !self.command.contains("{model}") {
            let defaults = match self.dialect {
                Dialect::Highs => "--model_file {model} --solution_file {solution} --options_file {options} \
                                   --time_limit {time_limit} --threads {threads}"
                    .to_owned(),
                Dialect::Cbc => {
                    let tol = self.lp_tolerance.map(|t| format!(" primalT {t} dualT {t}")).unwrap_or_default();
                    format!(
                        "{{model}} sec {{time_limit}} threads {{threads}} ratio {{gap}}{tol} solve solu {{solution}}"
                    )
                }
            };
            words.extend(defaults.split_whitespace().map(str::to_owned));
        }
        words
            .into_iter()
            .map(|w| {
                w.replace("{model}", &model.display().to_string())
                    .replace("{solution}", &solution.display().to_string())
                    .replace("{options}", &options.display().to_string())
                    .replace("{time_limit}", &self.time_limit.to_string())
                    .replace("{threads}", &self.threads.to_string())
                    .replace("{gap}", &self.mip_gap.to_string())
            })
            .collect()
    }

    fn highs_options(&self) -> String {
        let mut text = format!("mip_rel_gap = {}\nmip_abs_gap = 0\n", self.mip_gap);
        if let Some(t) = self.lp_tolerance {
            text.push_str(&format!("primal_feasibility_tolerance = {t}\ndual_feasibility_tolerance = {t}\n"));
        }
        text
    }
}

/// Subprocess-backed [`Solver`].
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub config: SolverConfig,
}

impl ExternalSolver {
    pub fn new(config: SolverConfig) -> ExternalSolver {
        ExternalSolver { config }
    }
}

fn excerpt(text: &str) -> String {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    lines[lines.len().saturating_sub(8)..].join("\n")
}

impl Solver for ExternalSolver {
    type Error = SolverError;

    fn solve(&mut self, model: &Model, mode: SolveMode) -> Result<SolveOutcome, SolverError> {
        let cfg = &self.config;
        cfg.validate()?;
        let dir = tempfile::tempdir()?;
        let model_path = dir.path().join("model.lp");
        let solution_path = dir.path().join("model.sol");
        let options_path = dir.path().join("highs.opt");
        let written = match mode {
            SolveMode::LpRelaxation => write_lp_file(&model.relaxed()),
            SolveMode::Mip => write_lp_file(model),
        };
        std::fs::write(&model_path, written)?;
        std::fs::write(&options_path, cfg.highs_options())?;

        let start = Instant::now();
        let program = cfg.program().to_owned();
        let output = Command::new(&program)
            .args(cfg.arguments(&model_path, &solution_path, &options_path))
            .current_dir(dir.path())
            .output()
            .map_err(|err| match err.kind() {
                ErrorKind::NotFound | ErrorKind::PermissionDenied => SolverError::NotFound(program.clone()),
                _ => SolverError::Io(err),
            })?;
        let elapsed = start.elapsed().as_secs_f64();
        let stdout = String::from_utf8_lossy(&output.stdout);
        let stderr = String::from_utf8_lossy(&output.stderr);
        if let Some(keep) = &cfg.keep_files {
            std::fs::create_dir_all(keep)?;
            std::fs::copy(&model_path, keep.join("model.lp"))?;
            if solution_path.exists() {
                std::fs::copy(&solution_path, keep.join("model.sol"))?;
            }
            std::fs::write(keep.join("solver.log"), stdout.as_bytes())?;
        }
        let failed = |status: String| SolverError::Failed {
            program: program.clone(),
            status,
            excerpt: excerpt(if stderr.trim().is_empty() { &stdout } else { &stderr }),
        };
        if !output.status.success() {
            return Err(failed(output.status.to_string()));
        }
        let text = std::fs::read_to_string(&solution_path).map_err(|_| failed("no solution file written".into()))?;
        let mut outcome = match cfg.dialect {
            Dialect::Highs => parse_highs_solution(&text)?,
            Dialect::Cbc => parse_cbc_solution(&text)?,
        };
        outcome.elapsed = elapsed;
        outcome.best_bound = match mode {
            SolveMode::LpRelaxation => outcome.objective,
            SolveMode::Mip => match cfg.dialect {
                Dialect::Highs => scan_value(&stdout, "Dual bound"),
                Dialect::Cbc => scan_value(&stdout, "Lower bound:"),
            }
            .or(if outcome.status == SolveStatus::Optimal { outcome.objective } else { None }),
        };
        finish(model, outcome)
    }
}

/// Fills missing variables with zero and restores the objective offset.
fn finish(model: &Model, mut outcome: SolveOutcome) -> Result<SolveOutcome, SolverError> {
    if outcome.status.has_solution() {
        for v in &model.variables {
            outcome.assignment.entry(v.name.clone()).or_insert(0.0);
        }
    }
    let offset = model.objective.offset;
    outcome.objective = outcome.objective.map(|v| v + offset);
    outcome.best_bound = outcome.best_bound.map(|v| v + offset);
    Ok(outcome)
}

fn scan_value(text: &str, key: &str) -> Option<f64> {
    text.lines()
        .rev()
        .filter_map(|l| l.trim().strip_prefix(key))
        .find_map(|rest| rest.split_whitespace().next()?.parse::<f64>().ok())
}

fn parse_f64(token: &str, context: &str) -> Result<f64, SolverError> {
    match token {
        "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
        "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
        _ => token.parse().map_err(|_| SolverError::Unparsable(format!("bad number `{token}` in {context}"))),
    }
}

fn empty_outcome(status: SolveStatus) -> SolveOutcome {
    SolveOutcome { status, objective: None, best_bound: None, assignment: BTreeMap::new(), elapsed: 0.0 }
}

/// Parses a HiGHS raw solution file.
pub fn parse_highs_solution(text: &str) -> Result<SolveOutcome, SolverError> {
    let mut lines = text.lines().map(str::trim);
    lines
        .by_ref()
        .find(|l| *l == "Model status")
        .ok_or_else(|| SolverError::Unparsable("missing `Model status` line".into()))?;
    let status_text = lines.next().ok_or_else(|| SolverError::Unparsable("missing model status".into()))?;
    let mut status = match status_text {
        "Optimal" => SolveStatus::Optimal,
        "Infeasible" => SolveStatus::Infeasible,
        "Time limit reached" => SolveStatus::TimeLimit,
        _ => SolveStatus::Error,
    };
    let mut outcome = empty_outcome(status);
    let mut feasible = false;
    while let Some(line) = lines.next() {
        if line == "# Primal solution values" {
            feasible = lines.next() == Some("Feasible");
        } else if let Some(v) = line.strip_prefix("Objective ") {
            if feasible {
                outcome.objective = Some(parse_f64(v.trim(), "objective line")?);
            }
        } else if let Some(n) = line.strip_prefix("# Columns ") {
            let n: usize = n.trim().parse().map_err(|_| SolverError::Unparsable(format!("bad column count `{n}`")))?;
            for _ in 0..n {
                let entry = lines.next().ok_or_else(|| SolverError::Unparsable("truncated column list".into()))?;
                let mut parts = entry.split_whitespace();
                let (Some(name), Some(value)) = (parts.next(), parts.next()) else {
                    return Err(SolverError::Unparsable(format!("bad column line `{entry}`")));
                };
                outcome.assignment.insert(name.to_owned(), parse_f64(value, "column line")?);
            }
            break;
        }
    }
    if status == SolveStatus::TimeLimit && feasible {
        status = SolveStatus::Feasible;
    }
    if status == SolveStatus::Optimal && outcome.objective.is_none() {
        return Err(SolverError::Unparsable("optimal status without objective".into()));
    }
    if !feasible {
        outcome.assignment.clear();
        outcome.objective = None;
    }
    outcome.status = status;
    Ok(outcome)
}

/// Parses a CBC `solu` solution file.
pub fn parse_cbc_solution(text: &str) -> Result<SolveOutcome, SolverError> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| SolverError::Unparsable("empty CBC solution file".into()))?;
    let (status_text, objective_text) = head
        .split_once(" - objective value ")
        .ok_or_else(|| SolverError::Unparsable(format!("unexpected CBC header `{head}`")))?;
    let status_text = status_text.trim();
    let has_values = lines.clone().any(|l| !l.trim().is_empty());
    let status = if status_text.starts_with("Optimal") {
        SolveStatus::Optimal
    } else if status_text.contains("nfeasible") {
        SolveStatus::Infeasible
    } else if status_text.starts_with("Stopped on time") {
        if has_values {
            SolveStatus::Feasible
        } else {
            SolveStatus::TimeLimit
        }
    } else {
        SolveStatus::Error
    };
    let mut outcome = empty_outcome(status);
    if !status.has_solution() {
        return Ok(outcome);
    }
    outcome.objective = Some(parse_f64(objective_text.trim(), "CBC header")?);
    for line in lines {
        let tokens: Vec<&str> = line.split_whitespace().filter(|t| *t != "**").collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 3 {
            return Err(SolverError::Unparsable(format!("bad CBC value line `{line}`")));
        }
        outcome.assignment.insert(tokens[1].to_owned(), parse_f64(tokens[2], "CBC value line")?);
    }
    Ok(outcome)
}
