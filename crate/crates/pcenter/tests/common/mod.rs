#![allow(dead_code)]

use std::path::PathBuf;

use pcenter::formats::{load_instance, InstanceFormat};
use pcenter::solver::{ExternalSolver, SolverConfig};
use pcenter_core::bounds::clamp_distances;
use pcenter_core::formulations::{build, Formulation};
use pcenter_core::instance::{random_instance, Instance};
use pcenter_core::solve::{SolveMode, SolveStatus, Solver};
use pcenter_core::Bounds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn solver() -> ExternalSolver {
    let mut cfg = SolverConfig::from_env();
    cfg.time_limit = 600.0;
    ExternalSolver::new(cfg)
}

/// Whether the configured solver can be started at all.
pub fn solver_available() -> bool {
    let cfg = SolverConfig::from_env();
    std::process::Command::new(cfg.program())
        .arg("--version")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .is_ok()
}

/// Directory holding `pmed1.txt` ... `pmed40.txt`.
pub fn orlib_dir() -> PathBuf {
    std::env::var_os("PCENTER_ORLIB_DIR").map(PathBuf::from).unwrap_or_else(|| {
        let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
        manifest.ancestors().nth(2).unwrap_or(manifest).join("data/orlib")
    })
}

pub fn pmed_path(k: u32) -> PathBuf {
    orlib_dir().join(format!("pmed{k}.txt"))
}

/// Loads the listed pmed instances, or names the missing files.
pub fn load_pmeds(range: std::ops::RangeInclusive<u32>) -> Result<Vec<(u32, Instance)>, String> {
    let missing: Vec<String> =
        range.clone().filter(|&k| !pmed_path(k).is_file()).map(|k| format!("pmed{k}.txt")).collect();
    if !missing.is_empty() {
        return Err(format!("missing {} in {}", missing.join(", "), orlib_dir().display()));
    }
    range
        .map(|k| load_instance(&pmed_path(k), InstanceFormat::Orlib).map(|i| (k, i)).map_err(|e| e.to_string()))
        .collect()
}

/// Random instance with `1 <= N, M <= max_dim` drawn from `seed`; p = 1.
pub fn random_case(seed: u64, min_dim: usize, max_dim: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(min_dim..=max_dim);
    let m = rng.gen_range(min_dim..=max_dim);
    random_instance(n, m, 1, seed).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// LP relaxation value of `formulation` on `inst` as given.
pub fn lp_value<S: Solver>(formulation: Formulation, inst: &Instance, solver: &mut S) -> Result<f64, String> {
    let out = solver.solve(&build(formulation, inst), SolveMode::LpRelaxation).map_err(|e| format!("{e:?}"))?;
    match (out.status, out.objective) {
        (SolveStatus::Optimal, Some(v)) => Ok(v),
        (status, _) => Err(format!("{} LP ended with status {status}", formulation.id())),
    }
}

pub fn clamped_lp<S: Solver>(f: Formulation, inst: &Instance, bounds: &Bounds, solver: &mut S) -> Result<f64, String> {
    lp_value(f, &clamp_distances(inst, bounds), solver)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
