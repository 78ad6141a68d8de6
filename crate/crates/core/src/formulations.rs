//! Builders for the seven p-center formulations.
//!
//! | id        | variables                 | covering rows                                   |
//! |-----------|---------------------------|-------------------------------------------------|
//! | `P1`      | `y`, `x_ij`, `R`          | assignment + linking + radius rows              |
//! | `P2`      | `y`, `z^1..z^K`           | `z^k + Σ_{d_ij < D^k} y_j >= 1`, all `(i, k)`   |
//! | `P2'`     | as `P2`                   | `P2` rows plus `z^k >= z^{k+1}`                 |
//! | `P3`      | `y`, `u_0..u_K`           | `u_k <= Σ_{d_ij <= D^k} y_j`                    |
//! | `P4`      | `y`, `u_0..u_K`           | `Σ_{d_ij <= D^k} y_j >= Σ_{q <= k} u_q`         |
//! | `CP1`     | `y`, `z^1..z^K`           | `P2'` rows kept only for `k ∈ S_i ∪ {K}`        |
//! | `CP2`     | `y`, integer `r ∈ [0, K]` | `r + k Σ_{d_ij < D^k} y_j >= k`, `k ∈ S_i ∪ {K}` |
//!
//! All formulations except `P1` carry the cardinality range
//! `1 <= Σ y_j <= p`, emitted as two rows. `P1` only has `Σ y_j <= p`.
//!
//! The rank variables of `P3`/`P4` start at `u_0` so that a radius equal to
//! the smallest ladder distance is representable; with clamped instances
//! that case is routine (the lower bound often is the optimum).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::instance::{Distance, Instance};
use crate::ladder::{critical_indices, CriticalIndexSet, DistanceLadder, LadderError};
use crate::model::{Model, ModelMeta, RowSense, VarId, VarKind};

/// Tolerance used when reading integral values out of solver assignments.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    P1,
    P2,
    P2Prime,
    P3,
    P4,
    Cp1,
    Cp2,
}

impl Formulation {
    pub const ALL: [Formulation; 7] = [
        Formulation::P1,
        Formulation::P2,
        Formulation::P2Prime,
        Formulation::P3,
        Formulation::P4,
        Formulation::Cp1,
        Formulation::Cp2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Formulation::P1 => "p1",
            Formulation::P2 => "p2",
            Formulation::P2Prime => "p2prime",
            Formulation::P3 => "p3",
            Formulation::P4 => "p4",
            Formulation::Cp1 => "cp1",
            Formulation::Cp2 => "cp2",
        }
    }

    /// Whether the objective value is a ladder index rather than a distance.
    pub fn objective_is_rank(self) -> bool {
        self == Formulation::Cp2
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown formulation `{0}` (expected one of p1, p2, p2prime, p3, p4, cp1, cp2)")]
pub struct UnknownFormulation(pub String);

impl FromStr for Formulation {
    type Err = UnknownFormulation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownFormulation(s.into()))
    }
}

/// Builds `formulation` on `inst`, computing the ladder and critical sets.
pub fn build(formulation: Formulation, inst: &Instance) -> Model {
    let ladder = DistanceLadder::build(inst);
    match formulation {
        Formulation::P1 => build_p1(inst),
        Formulation::P2 => build_p2(inst, &ladder),
        Formulation::P2Prime => build_p2_prime(inst, &ladder),
        Formulation::P3 => build_p3(inst, &ladder),
        Formulation::P4 => build_p4(inst, &ladder),
        Formulation::Cp1 => build_cp1(inst, &ladder, &critical_indices(inst, &ladder)),
        Formulation::Cp2 => build_cp2(inst, &ladder, &critical_indices(inst, &ladder)),
    }
}

fn meta(inst: &Instance, ladder: &DistanceLadder) -> ModelMeta {
    ModelMeta {
        n_clients: inst.n_clients(),
        n_facilities: inst.n_facilities(),
        p: inst.p(),
        ladder_min: ladder.min(),
        ladder_max: ladder.max(),
        k: ladder.k(),
    }
}

fn facility_vars(m: &mut Model, n_facilities: usize) -> Vec<VarId> {
    (0..n_facilities).map(|j| m.add_binary(format!("y{}", j + 1))).collect()
}

fn cardinality_range(m: &mut Model, y: &[VarId], p: usize) {
    let all: Vec<_> = y.iter().map(|&v| (v, 1.0)).collect();
    m.add_row("card_min".into(), all.clone(), RowSense::Ge, 1.0);
    m.add_row("card_max".into(), all, RowSense::Le, p as f64);
}

/// Classical assignment formulation with `N·M` assignment variables.
pub fn build_p1(inst: &Instance) -> Model {
    let ladder = DistanceLadder::build(inst);
    let (n, m_fac) = (inst.n_clients(), inst.n_facilities());
    let mut m = Model::new(Formulation::P1, meta(inst, &ladder));
    let y = facility_vars(&mut m, m_fac);
    let x: Vec<Vec<VarId>> =
        (0..n).map(|i| (0..m_fac).map(|j| m.add_binary(format!("x{}_{}", i + 1, j + 1))).collect()).collect();
    let radius = m.add_var("R".into(), VarKind::Continuous, 0.0, f64::INFINITY);

    m.add_row("open".into(), y.iter().map(|&v| (v, 1.0)).collect(), RowSense::Le, inst.p() as f64);
    for (i, xi) in x.iter().enumerate() {
        m.add_row(format!("assign{}", i + 1), xi.iter().map(|&v| (v, 1.0)).collect(), RowSense::Eq, 1.0);
    }
    for (i, xi) in x.iter().enumerate() {
        for (j, &xij) in xi.iter().enumerate() {
            m.add_row(format!("link{}_{}", i + 1, j + 1), alloc::vec![(xij, 1.0), (y[j], -1.0)], RowSense::Le, 0.0);
        }
    }
    for (i, xi) in x.iter().enumerate() {
        let mut terms: Vec<_> =
            xi.iter().zip(inst.row(i)).filter(|(_, &d)| d != 0).map(|(&v, &d)| (v, d as f64)).collect();
        terms.push((radius, -1.0));
        m.add_row(format!("radius{}", i + 1), terms, RowSense::Le, 0.0);
    }
    m.objective.terms.push((radius, 1.0));
    m
}

fn radius_indicator_model(
    formulation: Formulation,
    inst: &Instance,
    ladder: &DistanceLadder,
) -> (Model, Vec<VarId>, Vec<VarId>) {
    let mut m = Model::new(formulation, meta(inst, ladder));
    let y = facility_vars(&mut m, inst.n_facilities());
    // z[k - 1] is z^k
    let z: Vec<VarId> = (1..=ladder.k()).map(|k| m.add_binary(format!("z{k}"))).collect();
    cardinality_range(&mut m, &y, inst.p());
    m.objective.offset = ladder.min() as f64;
    m.objective.terms = (1..=ladder.k()).map(|k| (z[k - 1], (ladder.value(k) - ladder.value(k - 1)) as f64)).collect();
    (m, y, z)
}

fn strict_cover_terms(inst: &Instance, y: &[VarId], client: usize, bound: Distance, coef: f64) -> Vec<(VarId, f64)> {
    inst.row(client).iter().zip(y).filter(|(&d, _)| d < bound).map(|(_, &v)| (v, coef)).collect()
}

fn cover_row(m: &mut Model, inst: &Instance, ladder: &DistanceLadder, y: &[VarId], z: &[VarId], i: usize, k: usize) {
    let mut terms = alloc::vec![(z[k - 1], 1.0)];
    terms.extend(strict_cover_terms(inst, y, i, ladder.value(k), 1.0));
    m.add_row(format!("cover{}_{}", i + 1, k), terms, RowSense::Ge, 1.0);
}

fn ordering_rows(m: &mut Model, z: &[VarId]) {
    for (k, w) in z.windows(2).enumerate() {
        m.add_row(format!("order{}", k + 1), alloc::vec![(w[0], 1.0), (w[1], -1.0)], RowSense::Ge, 0.0);
    }
}

/// Radius-indicator formulation: one covering row per client and ladder level.
pub fn build_p2(inst: &Instance, ladder: &DistanceLadder) -> Model {
    let (mut m, y, z) = radius_indicator_model(Formulation::P2, inst, ladder);
    for i in 0..inst.n_clients() {
        for k in 1..=ladder.k() {
            cover_row(&mut m, inst, ladder, &y, &z, i, k);
        }
    }
    m
}

/// `P2` plus the ordering rows `z^k >= z^{k+1}`.
pub fn build_p2_prime(inst: &Instance, ladder: &DistanceLadder) -> Model {
    let mut m = build_p2(inst, ladder);
    m.formulation = Formulation::P2Prime;
    let z: Vec<VarId> = (0..ladder.k()).map(|k| VarId(inst.n_facilities() + k)).collect();
    ordering_rows(&mut m, &z);
    m
}

fn rank_indicator_model(
    formulation: Formulation,
    inst: &Instance,
    ladder: &DistanceLadder,
) -> (Model, Vec<VarId>, Vec<VarId>) {
    let mut m = Model::new(formulation, meta(inst, ladder));
    let y = facility_vars(&mut m, inst.n_facilities());
    let u: Vec<VarId> = (0..=ladder.k()).map(|k| m.add_binary(format!("u{k}"))).collect();
    cardinality_range(&mut m, &y, inst.p());
    m.objective.terms = u.iter().enumerate().map(|(k, &v)| (v, ladder.value(k) as f64)).collect();
    (m, y, u)
}

fn weak_cover_terms(inst: &Instance, y: &[VarId], client: usize, bound: Distance) -> Vec<(VarId, f64)> {
    inst.row(client).iter().zip(y).filter(|(&d, _)| d <= bound).map(|(_, &v)| (v, 1.0)).collect()
}

fn one_rank(m: &mut Model, u: &[VarId]) {
    m.add_row("one_rank".into(), u.iter().map(|&v| (v, 1.0)).collect(), RowSense::Eq, 1.0);
}

/// Weak rank formulation: `u_k <= Σ_{d_ij <= D^k} y_j`.
pub fn build_p3(inst: &Instance, ladder: &DistanceLadder) -> Model {
    let (mut m, y, u) = rank_indicator_model(Formulation::P3, inst, ladder);
    for i in 0..inst.n_clients() {
        for (k, &uk) in u.iter().enumerate() {
            let mut terms = alloc::vec![(uk, 1.0)];
            terms.extend(weak_cover_terms(inst, &y, i, ladder.value(k)).into_iter().map(|(v, _)| (v, -1.0)));
            m.add_row(format!("rank{}_{}", i + 1, k), terms, RowSense::Le, 0.0);
        }
    }
    one_rank(&mut m, &u);
    m
}

/// Rank formulation: `Σ_{d_ij <= D^k} y_j >= Σ_{q <= k} u_q`.
pub fn build_p4(inst: &Instance, ladder: &DistanceLadder) -> Model {
    let (mut m, y, u) = rank_indicator_model(Formulation::P4, inst, ladder);
    for i in 0..inst.n_clients() {
        for k in 0..u.len() {
            let mut terms = weak_cover_terms(inst, &y, i, ladder.value(k));
            terms.extend(u[..=k].iter().map(|&v| (v, -1.0)));
            m.add_row(format!("rank{}_{}", i + 1, k), terms, RowSense::Ge, 0.0);
        }
    }
    one_rank(&mut m, &u);
    m
}

/// Compact covering formulation: `P2'` restricted to critical rows.
pub fn build_cp1(inst: &Instance, ladder: &DistanceLadder, critical: &CriticalIndexSet) -> Model {
    let (mut m, y, z) = radius_indicator_model(Formulation::Cp1, inst, ladder);
    for i in 0..inst.n_clients() {
        for k in critical.constraint_indices(i) {
            cover_row(&mut m, inst, ladder, &y, &z, i, k);
        }
    }
    ordering_rows(&mut m, &z);
    m
}

/// Compact formulation with a single integer radius index `r`.
pub fn build_cp2(inst: &Instance, ladder: &DistanceLadder, critical: &CriticalIndexSet) -> Model {
    let mut m = Model::new(Formulation::Cp2, meta(inst, ladder));
    let y = facility_vars(&mut m, inst.n_facilities());
    let r = m.add_var("r".into(), VarKind::Integer, 0.0, ladder.k() as f64);
    cardinality_range(&mut m, &y, inst.p());
    for i in 0..inst.n_clients() {
        for k in critical.constraint_indices(i) {
            let mut terms = alloc::vec![(r, 1.0)];
            terms.extend(strict_cover_terms(inst, &y, i, ladder.value(k), k as f64));
            m.add_row(format!("cover{}_{}", i + 1, k), terms, RowSense::Ge, k as f64);
        }
    }
    m.objective.terms.push((r, 1.0));
    m
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error("assignment has no value for variable `{0}`")]
    MissingVariable(String),
    #[error("radius index r = {0} is not integral")]
    FractionalRank(f64),
    #[error("radius index {index} outside ladder 0..={k}")]
    RankOutOfRange { index: i64, k: usize },
    #[error(transparent)]
    Ladder(#[from] LadderError),
}

fn value_of(assignment: &BTreeMap<String, f64>, name: &str) -> Result<f64, ExtractError> {
    assignment.get(name).copied().ok_or_else(|| ExtractError::MissingVariable(name.into()))
}

fn rank_from(value: f64, ladder: &DistanceLadder) -> Result<usize, ExtractError> {
    let rounded = round_half_away(value);
    if (value - rounded).abs() > INTEGRALITY_TOL {
        return Err(ExtractError::FractionalRank(value));
    }
    let index = rounded as i64;
    if index < 0 || index as usize > ladder.k() {
        return Err(ExtractError::RankOutOfRange { index, k: ladder.k() });
    }
    Ok(index as usize)
}

fn round_half_away(v: f64) -> f64 {
    let t = v as i64 as f64;
    if (v - t).abs() >= 0.5 {
        t + v.signum()
    } else {
        t
    }
}

/// Reads the radius encoded by an integer solution of `model`.
///
/// `ladder` must be the ladder of the instance the model was built from.
pub fn extract_radius(
    model: &Model,
    assignment: &BTreeMap<String, f64>,
    ladder: &DistanceLadder,
) -> Result<Distance, ExtractError> {
    let k = ladder.k();
    match model.formulation {
        Formulation::P1 => {
            let r = value_of(assignment, "R")?;
            Ok(ladder.next_distance_at_least(r - INTEGRALITY_TOL * r.abs().max(1.0))?)
        }
        Formulation::P2 | Formulation::P2Prime | Formulation::Cp1 => {
            let mut radius = ladder.min();
            for level in 1..=k {
                if value_of(assignment, &format!("z{level}"))? > 0.5 {
                    radius += ladder.value(level) - ladder.value(level - 1);
                }
            }
            Ok(radius)
        }
        Formulation::P3 | Formulation::P4 => {
            let mut radius = 0;
            for level in 0..=k {
                if value_of(assignment, &format!("u{level}"))? > 0.5 {
                    radius += ladder.value(level);
                }
            }
            Ok(radius)
        }
        Formulation::Cp2 => Ok(ladder.value(rank_from(value_of(assignment, "r")?, ladder)?)),
    }
}

/// Turns an LP relaxation value of `formulation` into a ladder lower bound:
/// the smallest `D^k` not below the LP value (for `CP2`, whose objective is
/// a ladder index, `D^{⌈r̄⌉}`).
pub fn lp_value_to_lower_bound(
    formulation: Formulation,
    lp_value: f64,
    ladder: &DistanceLadder,
) -> Result<Distance, LadderError> {
    let tol = INTEGRALITY_TOL * lp_value.abs().max(1.0);
    if formulation.objective_is_rank() {
        let idx = ladder.k() as f64;
        if lp_value - tol > idx {
            return Err(LadderError::AboveLadder { value: lp_value, max: ladder.max() });
        }
        let mut rank = (lp_value - tol).max(0.0) as usize;
        if (rank as f64) < lp_value - tol {
            rank += 1;
        }
        Ok(ladder.value(rank.min(ladder.k())))
    } else {
        ladder.next_distance_at_least(lp_value - tol)
    }
}
