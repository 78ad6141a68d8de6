//! Distance ladder `D^0 < D^1 < … < D^K`, coverage sets and critical indices.
//!
//! `N_i^k` is the set of facilities strictly closer than `D^k` to client `i`.
//! The sets are nested in `k`, and `N_i^k` differs from `N_i^{k+1}` exactly
//! when some facility sits at distance `D^k` from `i`. Those ladder indices
//! (restricted to `1..K-1`) form the critical set `S_i`; only they, plus
//! `K` itself, need a covering row in the compact formulations.

use alloc::vec::Vec;

use crate::instance::{Distance, Instance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LadderError {
    #[error("value {value} exceeds the largest distance {max}: no feasible radius")]
    AboveLadder { value: f64, max: Distance },
    #[error("client index {index} out of range ({count} clients)")]
    ClientOutOfRange { index: usize, count: usize },
    #[error("ladder index {index} out of range 1..={k}")]
    LevelOutOfRange { index: usize, k: usize },
}

/// Sorted distinct distances of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceLadder {
    values: Vec<Distance>,
}

impl DistanceLadder {
    pub fn build(inst: &Instance) -> DistanceLadder {
        let mut values = inst.distances().to_vec();
        values.sort_unstable();
        values.dedup();
        DistanceLadder { values }
    }

    /// `K`, the index of the largest distance.
    #[inline]
    pub fn k(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn values(&self) -> &[Distance] {
        &self.values
    }

    /// `D^k`.
    #[inline]
    pub fn value(&self, k: usize) -> Distance {
        self.values[k]
    }

    #[inline]
    pub fn min(&self) -> Distance {
        self.values[0]
    }

    #[inline]
    pub fn max(&self) -> Distance {
        self.values[self.values.len() - 1]
    }

    /// Index `k` with `D^k == d`, if `d` is on the ladder.
    pub fn rank_of(&self, d: Distance) -> Option<usize> {
        self.values.binary_search(&d).ok()
    }

    /// Smallest ladder value that is `>= v`.
    pub fn next_distance_at_least(&self, v: f64) -> Result<Distance, LadderError> {
        let idx = self.values.partition_point(|&d| (d as f64) < v);
        self.values.get(idx).copied().ok_or(LadderError::AboveLadder { value: v, max: self.max() })
    }

    /// Smallest ladder value that is `>= d`, or `None` when `d > D^K`.
    pub fn snap_up(&self, d: Distance) -> Option<Distance> {
        let idx = self.values.partition_point(|&x| x < d);
        self.values.get(idx).copied()
    }
}

/// Convenience wrapper for [`DistanceLadder::build`].
pub fn build_ladder(inst: &Instance) -> DistanceLadder {
    DistanceLadder::build(inst)
}

/// `N_i^k = { j : d_ij < D^k }` for `1 <= k <= K`. Facility indices are 0-based.
pub fn coverage_set(
    inst: &Instance,
    ladder: &DistanceLadder,
    client: usize,
    k: usize,
) -> Result<Vec<usize>, LadderError> {
    if client >= inst.n_clients() {
        return Err(LadderError::ClientOutOfRange { index: client, count: inst.n_clients() });
    }
    if k == 0 || k > ladder.k() {
        return Err(LadderError::LevelOutOfRange { index: k, k: ladder.k() });
    }
    let bound = ladder.value(k);
    Ok(inst.row(client).iter().enumerate().filter(|&(_, &d)| d < bound).map(|(j, _)| j).collect())
}

/// Per-client critical ladder indices `S_i ⊆ {1, …, K-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalIndexSet {
    k: usize,
    per_client: Vec<Vec<usize>>,
}

impl CriticalIndexSet {
    /// `S_i`, sorted increasingly, without the sentinel `K`.
    pub fn of(&self, client: usize) -> &[usize] {
        &self.per_client[client]
    }

    /// `S_i ∪ {K}`: the ladder indices that receive a covering row for
    /// client `i`. Empty when `K = 0`.
    pub fn constraint_indices(&self, client: usize) -> impl Iterator<Item = usize> + '_ {
        let sentinel = (self.k >= 1).then_some(self.k);
        self.per_client[client].iter().copied().chain(sentinel)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_clients(&self) -> usize {
        self.per_client.len()
    }

    /// `Σ_i |S_i ∪ {K}|`.
    pub fn total_rows(&self) -> usize {
        let sentinel = usize::from(self.k >= 1);
        self.per_client.iter().map(|s| s.len() + sentinel).sum()
    }
}

/// Computes `S_i` for every client: `k ∈ S_i` iff some facility is at
/// distance exactly `D^k` from client `i`, for `1 <= k <= K-1`.
pub fn critical_indices(inst: &Instance, ladder: &DistanceLadder) -> CriticalIndexSet {
    let k_max = ladder.k();
    let per_client = inst
        .rows()
        .map(|row| {
            let mut s: Vec<usize> = row
                .iter()
                .map(|&d| ladder.rank_of(d).expect("ladder built from another instance"))
                .filter(|&k| k >= 1 && k < k_max)
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    CriticalIndexSet { k: k_max, per_client }
}

/// Replaces every distance by its ladder rank, so that `D^0 = 0` and
/// consecutive ladder values differ by one.
pub fn rank_transform(inst: &Instance) -> Instance {
    let ladder = DistanceLadder::build(inst);
    inst.map_distances(|d| ladder.rank_of(d).expect("distance on its own ladder") as Distance)
}
