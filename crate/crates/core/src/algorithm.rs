//! Two-step resolution algorithm.
//!
//! Step 1 alternates reductions with bound recomputation until nothing
//! changes, solves the LP relaxation of the chosen formulation on the
//! clamped and reduced instance, and raises `lb` to the smallest ladder
//! distance not below the LP value. It stops once the LP value is itself
//! `lb`. Step 2 solves the formulation exactly on the final instance, unless
//! `lb == ub` already settles the radius.

use alloc::vec::Vec;

use crate::bounds::{clamp_range, lb0, ub0, BoundProvenance, Bounds, BoundsError};
use crate::formulations::{build, extract_radius, lp_value_to_lower_bound, ExtractError, Formulation};
use crate::instance::{Distance, Instance};
use crate::ladder::{DistanceLadder, LadderError};
use crate::reduction::{reduce, ReductionReport};
use crate::solve::{SolveMode, SolveOutcome, SolveStatus, Solver};

/// Each outer iteration must strictly raise `lb`; more iterations than this
/// means something is wrong.
pub const ITERATION_CAP: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum AlgorithmError<E> {
    #[error("solver failed: {0}")]
    Solver(E),
    #[error("solver returned status {status} without a usable value")]
    NoSolution { status: SolveStatus },
    #[error("upper bound {ub} is infeasible: no solution of radius <= {ub}; widen ub")]
    UpperBoundInfeasible { ub: Distance },
    #[error("iteration cap of {0} outer iterations exceeded")]
    IterationCap(usize),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

/// Monotone source of seconds, used for the `t1`/`t2` timings.
pub trait Clock {
    fn seconds(&self) -> f64;
}

impl<F: Fn() -> f64> Clock for F {
    fn seconds(&self) -> f64 {
        self()
    }
}

/// One outer iteration of step 1, as seen when the LP was solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lb: Distance,
    pub ub: Distance,
    pub n_clients: usize,
    pub n_facilities: usize,
    /// Raw LP objective (a ladder index for `CP2`).
    pub lp_value: f64,
    /// Ladder distance the LP value rounds up to.
    pub lp_bound: Distance,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgorithmTrace {
    pub iterations: Vec<IterationRecord>,
    pub reductions: ReductionReport,
    /// Seconds spent in step 1.
    pub t1: f64,
    /// Seconds spent in both steps.
    pub t2: f64,
    pub radius: Option<Distance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step1Result {
    /// Clamped and reduced instance, ready for the exact solve.
    pub instance: Instance,
    pub bounds: Bounds,
    pub trace: AlgorithmTrace,
}

pub(crate) fn lp_objective<E>(outcome: &SolveOutcome) -> Result<f64, AlgorithmError<E>> {
    match (outcome.status, outcome.objective) {
        (SolveStatus::Optimal, Some(v)) => Ok(v),
        (SolveStatus::Infeasible, _) => Err(AlgorithmError::NoSolution { status: SolveStatus::Infeasible }),
        (status, _) => Err(AlgorithmError::NoSolution { status }),
    }
}

/// Reductions and `LB0`/`UB0` recomputation until a fixed point.
fn reduce_and_bound(
    mut cur: Instance,
    mut lb: Distance,
    mut ub: Distance,
    report: &mut ReductionReport,
) -> (Instance, Distance, Distance) {
    loop {
        let clamped = clamp_range(&cur, lb, ub);
        let (reduced, rep) = reduce(&clamped);
        let new_lb = lb.max(lb0(&reduced));
        let new_ub = ub.min(ub0(&reduced));
        let changed = !rep.is_empty() || new_lb != lb || new_ub != ub;
        report.merge(rep);
        cur = reduced;
        lb = new_lb;
        ub = new_ub;
        if !changed || lb > ub {
            return (cur, lb, ub);
        }
    }
}

/// Step 1: bound tightening by reductions and iterated LP rounding.
pub fn step1<S: Solver, C: Clock>(
    formulation: Formulation,
    inst: &Instance,
    initial: &Bounds,
    solver: &mut S,
    clock: &C,
) -> Result<Step1Result, AlgorithmError<S::Error>> {
    let start = clock.seconds();
    let snapped = Bounds::snapped(inst, initial.lb, initial.ub, initial.provenance)?;
    let (mut lb, mut ub) = (snapped.lb, snapped.ub);
    let mut cur = inst.clone();
    let mut trace = AlgorithmTrace::default();

    for iteration in 0..ITERATION_CAP {
        let (reduced, new_lb, new_ub) = reduce_and_bound(cur, lb, ub, &mut trace.reductions);
        if new_lb > new_ub {
            return Err(AlgorithmError::UpperBoundInfeasible { ub });
        }
        cur = reduced;
        lb = new_lb;
        ub = new_ub;

        let ladder = DistanceLadder::build(&cur);
        let model = build(formulation, &cur);
        let outcome = solver.solve(&model, SolveMode::LpRelaxation).map_err(AlgorithmError::Solver)?;
        let lp_value = lp_objective(&outcome)?;
        let lp_bound = lp_value_to_lower_bound(formulation, lp_value, &ladder)
            .map_err(|_| AlgorithmError::UpperBoundInfeasible { ub })?
            .max(lb);
        trace.iterations.push(IterationRecord {
            iteration,
            lb,
            ub,
            n_clients: cur.n_clients(),
            n_facilities: cur.n_facilities(),
            lp_value,
            lp_bound,
        });
        if lp_bound == lb {
            trace.t1 = clock.seconds() - start;
            trace.t2 = trace.t1;
            let bounds = Bounds { lb, ub, provenance: BoundProvenance::LpRounding };
            return Ok(Step1Result { instance: cur, bounds, trace });
        }
        if lp_bound > ub {
            return Err(AlgorithmError::UpperBoundInfeasible { ub });
        }
        lb = lp_bound;
    }
    Err(AlgorithmError::IterationCap(ITERATION_CAP))
}

/// Step 1 followed by an exact solve of `formulation` with the tightened
/// bounds. Returns the optimal radius of `inst`, assuming the initial
/// bounds were valid.
pub fn two_step_solve<S: Solver, C: Clock>(
    formulation: Formulation,
    inst: &Instance,
    initial: &Bounds,
    solver: &mut S,
    clock: &C,
) -> Result<(Distance, AlgorithmTrace), AlgorithmError<S::Error>> {
    let start = clock.seconds();
    let Step1Result { instance, bounds, mut trace } = step1(formulation, inst, initial, solver, clock)?;
    let radius = if bounds.lb == bounds.ub { bounds.lb } else { solve_exact(formulation, &instance, solver)? };
    if radius > bounds.ub {
        return Err(AlgorithmError::UpperBoundInfeasible { ub: bounds.ub });
    }
    trace.t2 = clock.seconds() - start;
    trace.radius = Some(radius);
    Ok((radius, trace))
}

/// Solves `formulation` on `inst` to optimality and reads the radius.
pub fn solve_exact<S: Solver>(
    formulation: Formulation,
    inst: &Instance,
    solver: &mut S,
) -> Result<Distance, AlgorithmError<S::Error>> {
    let ladder = DistanceLadder::build(inst);
    let model = build(formulation, inst);
    let outcome = solver.solve(&model, SolveMode::Mip).map_err(AlgorithmError::Solver)?;
    if outcome.status != SolveStatus::Optimal {
        return Err(AlgorithmError::NoSolution { status: outcome.status });
    }
    Ok(extract_radius(&model, &outcome.assignment, &ladder)?)
}

/// Clamps `inst` to `bounds` and solves `formulation` exactly. A result
/// above `ub` means the upper bound was infeasible.
pub fn direct_solve<S: Solver>(
    formulation: Formulation,
    inst: &Instance,
    bounds: &Bounds,
    solver: &mut S,
) -> Result<Distance, AlgorithmError<S::Error>> {
    let b = Bounds::snapped(inst, bounds.lb, bounds.ub, bounds.provenance)?;
    let radius = solve_exact(formulation, &clamp_range(inst, b.lb, b.ub), solver)?;
    if radius > b.ub {
        return Err(AlgorithmError::UpperBoundInfeasible { ub: b.ub });
    }
    Ok(radius)
}
