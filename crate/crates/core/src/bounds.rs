//! Radius bounds and distance clamping.
//!
//! With `lb <= opt <= ub`, every distance below `lb` may be raised to `lb`
//! and every distance above `ub` replaced by the sentinel `ub + 1` without
//! changing the optimum. The clamped instance has far fewer distinct
//! distances, which shrinks every ladder-based formulation.

use core::fmt;

use crate::algorithm::AlgorithmError;
use crate::formulations::{build, lp_value_to_lower_bound, Formulation};
use crate::instance::{Distance, Instance};
use crate::ladder::DistanceLadder;
use crate::solve::{SolveMode, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundProvenance {
    None,
    Lb0Ub0,
    Fixture,
    User,
    LpRounding,
}

impl fmt::Display for BoundProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundProvenance::None => "none",
            BoundProvenance::Lb0Ub0 => "lb0ub0",
            BoundProvenance::Fixture => "fixture",
            BoundProvenance::User => "user",
            BoundProvenance::LpRounding => "lp_rounding",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub lb: Distance,
    pub ub: Distance,
    pub provenance: BoundProvenance,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("lower bound {lb} exceeds upper bound {ub}")]
    Inverted { lb: Distance, ub: Distance },
    #[error("lower bound {lb} exceeds the largest distance {max}")]
    AboveLadder { lb: Distance, max: Distance },
}

impl Bounds {
    /// `[D^0, D^K]`: no information.
    pub fn trivial(inst: &Instance) -> Bounds {
        let ladder = DistanceLadder::build(inst);
        Bounds { lb: ladder.min(), ub: ladder.max(), provenance: BoundProvenance::None }
    }

    /// `[LB0, UB0]`.
    pub fn lb0_ub0(inst: &Instance) -> Bounds {
        Bounds { lb: lb0(inst), ub: ub0(inst), provenance: BoundProvenance::Lb0Ub0 }
    }

    /// Bounds snapped onto the ladder of `inst`: `lb` up to the next
    /// distance, `ub` up to the next distance (capped at `D^K`).
    pub fn snapped(
        inst: &Instance,
        lb: Distance,
        ub: Distance,
        provenance: BoundProvenance,
    ) -> Result<Bounds, BoundsError> {
        if lb > ub {
            return Err(BoundsError::Inverted { lb, ub });
        }
        let ladder = DistanceLadder::build(inst);
        let snapped_lb = ladder.snap_up(lb).ok_or(BoundsError::AboveLadder { lb, max: ladder.max() })?;
        let snapped_ub = ladder.snap_up(ub).unwrap_or(ladder.max());
        Ok(Bounds { lb: snapped_lb, ub: snapped_ub, provenance })
    }
}

/// `LB0 = max_i min_j d_ij`.
pub fn lb0(inst: &Instance) -> Distance {
    inst.rows().map(|row| row.iter().copied().min().unwrap_or(0)).max().unwrap_or(0)
}

/// `UB0 = min_j max_i d_ij`: the best single center.
pub fn ub0(inst: &Instance) -> Distance {
    (0..inst.n_facilities()).map(|j| inst.column(j).max().unwrap_or(0)).min().unwrap_or(0)
}

/// Raises distances below `lb` to `lb` and replaces distances above `ub`
/// by `ub + 1`.
pub fn clamp_distances(inst: &Instance, bounds: &Bounds) -> Instance {
    clamp_range(inst, bounds.lb, bounds.ub)
}

pub fn clamp_range(inst: &Instance, lb: Distance, ub: Distance) -> Instance {
    debug_assert!(lb <= ub);
    inst.map_distances(|d| {
        if d < lb {
            lb
        } else if d > ub {
            ub + 1
        } else {
            d
        }
    })
}

/// Iterated LP rounding without reductions: solve the relaxation of
/// `formulation` on the clamped instance, raise `lb` to the next ladder
/// distance above the LP value, re-clamp, repeat until the LP value is
/// itself the current `lb`.
pub fn lb_star<S: Solver>(
    formulation: Formulation,
    inst: &Instance,
    bounds: &Bounds,
    solver: &mut S,
) -> Result<Distance, AlgorithmError<S::Error>> {
    let b = Bounds::snapped(inst, bounds.lb, bounds.ub, bounds.provenance)?;
    let (mut lb, ub) = (b.lb, b.ub);
    for _ in 0..crate::algorithm::ITERATION_CAP {
        let clamped = clamp_range(inst, lb, ub);
        let ladder = DistanceLadder::build(&clamped);
        let model = build(formulation, &clamped);
        let outcome = solver.solve(&model, SolveMode::LpRelaxation).map_err(AlgorithmError::Solver)?;
        let value = crate::algorithm::lp_objective(&outcome)?;
        let next = lp_value_to_lower_bound(formulation, value, &ladder)
            .map_err(|_| AlgorithmError::UpperBoundInfeasible { ub })?;
        if next > ub {
            return Err(AlgorithmError::UpperBoundInfeasible { ub });
        }
        if next <= lb {
            return Ok(lb);
        }
        lb = next;
    }
    Err(AlgorithmError::IterationCap(crate::algorithm::ITERATION_CAP))
}
