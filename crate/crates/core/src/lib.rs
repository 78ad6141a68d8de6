//! Exact p-center machinery that needs nothing beyond `alloc`.
//!
//! The crate covers the whole modelling side of the p-center problem:
//!
//! * [`instance`]: client × facility distance matrices, graph instances and
//!   all-pairs shortest paths, seeded random instances.
//! * [`ladder`]: the sorted distinct-distance ladder, coverage sets, the
//!   critical indices that drive the compact covering formulations, and the
//!   rank transform.
//! * [`bounds`]: combinatorial radius bounds, distance clamping and the
//!   iterated LP-rounding lower bound.
//! * [`reduction`]: dominated client / facility removal.
//! * [`model`] and [`formulations`]: a solver-agnostic MILP representation
//!   and builders for the seven formulations (`P1`, `P2`, `P2'`, `P3`, `P4`,
//!   `CP1`, `CP2`).
//! * [`solve`]: the [`Solver`](solve::Solver) abstraction plus an exhaustive
//!   brute-force oracle.
//! * [`algorithm`]: the two-step resolution algorithm (bound tightening with
//!   reductions and LP rounding, then an exact solve).
//!
//! Anything touching files, processes or clocks lives in the `pcenter`
//! companion crate.

#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod algorithm;
pub mod bounds;
pub mod formulations;
pub mod instance;
pub mod ladder;
pub mod model;
pub mod reduction;
pub mod solve;

pub use algorithm::{step1, two_step_solve, AlgorithmError, AlgorithmTrace, IterationRecord};
pub use bounds::{clamp_distances, lb0, lb_star, ub0, BoundProvenance, Bounds};
pub use formulations::{build, extract_radius, Formulation};
pub use instance::{graph_to_instance, random_instance, Distance, Edge, GraphInstance, Instance, InstanceError};
pub use ladder::{critical_indices, rank_transform, CriticalIndexSet, DistanceLadder};
pub use model::{Model, ModelStats};
pub use reduction::{reduce, ReductionReport};
pub use solve::{brute_force_radius, SolveMode, SolveOutcome, SolveStatus, Solver};
