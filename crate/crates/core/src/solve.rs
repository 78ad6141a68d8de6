//! Solver abstraction and the exhaustive oracle.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{Distance, Instance};
use crate::model::Model;

/// Largest number of candidate center sets [`brute_force_radius`] will
/// enumerate.
pub const BRUTE_FORCE_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
    Error,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::Error => "error",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Integrality dropped on every variable.
    LpRelaxation,
    Mip,
}

/// Result of one solver call.
///
/// `objective` and `best_bound` include the model's constant objective
/// offset. A time-limited run may still carry an incumbent.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub assignment: BTreeMap<String, f64>,
    /// Wall-clock seconds spent in the solver.
    pub elapsed: f64,
}

impl SolveOutcome {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.assignment.get(name).copied()
    }
}

/// Anything able to solve a [`Model`], exactly or as an LP relaxation.
pub trait Solver {
    type Error: fmt::Debug + fmt::Display;

    fn solve(&mut self, model: &Model, mode: SolveMode) -> Result<SolveOutcome, Self::Error>;
}

impl<S: Solver + ?Sized> Solver for &mut S {
    type Error = S::Error;

    fn solve(&mut self, model: &Model, mode: SolveMode) -> Result<SolveOutcome, Self::Error> {
        (**self).solve(model, mode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BruteForceError {
    #[error("enumeration needs {needed} subsets, cap is {cap}")]
    CapExceeded { needed: u64, cap: u64 },
    #[error("p must be at least 1")]
    ZeroP,
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Exact optimum by enumerating every facility set of size `1..=p`.
///
/// Returns the optimal radius and the lexicographically smallest optimal set
/// (0-based facility indices).
pub fn brute_force_radius(inst: &Instance, p: usize) -> Result<(Distance, Vec<usize>), BruteForceError> {
    brute_force_radius_capped(inst, p, BRUTE_FORCE_CAP)
}

pub fn brute_force_radius_capped(
    inst: &Instance,
    p: usize,
    cap: u64,
) -> Result<(Distance, Vec<usize>), BruteForceError> {
    if p == 0 {
        return Err(BruteForceError::ZeroP);
    }
    let m = inst.n_facilities();
    let max_size = p.min(m);
    let needed = (1..=max_size as u64).fold(0u64, |acc, s| acc.saturating_add(binomial(m as u64, s)));
    if needed > cap {
        return Err(BruteForceError::CapExceeded { needed, cap });
    }

    let mut best: Option<(Distance, Vec<usize>)> = None;
    // closest open distance per client, one slot per subset size
    let mut nearest: Vec<Vec<Distance>> = alloc::vec![alloc::vec![0; inst.n_clients()]; max_size + 1];
    let mut subset: Vec<usize> = Vec::with_capacity(max_size);
    enumerate(inst, max_size, 0, &mut subset, &mut nearest, &mut best);
    Ok(best.expect("at least one facility"))
}

fn enumerate(
    inst: &Instance,
    max_size: usize,
    start: usize,
    subset: &mut Vec<usize>,
    nearest: &mut [Vec<Distance>],
    best: &mut Option<(Distance, Vec<usize>)>,
) {
    for j in start..inst.n_facilities() {
        let depth = subset.len();
        let (prev, next) = nearest.split_at_mut(depth + 1);
        let cur = &mut next[0];
        for (i, slot) in cur.iter_mut().enumerate() {
            let d = inst.distance(i, j);
            *slot = if depth == 0 { d } else { prev[depth][i].min(d) };
        }
        subset.push(j);
        let radius = cur.iter().copied().max().unwrap_or(0);
        let better = match best {
            None => true,
            Some((r, s)) => radius < *r || (radius == *r && subset.as_slice() < s.as_slice()),
        };
        if better {
            *best = Some((radius, subset.clone()));
        }
        if subset.len() < max_size {
            enumerate(inst, max_size, j + 1, subset, nearest, best);
        }
        subset.pop();
    }
}
