//! p-center instances.
//!
//! An [`Instance`] is a dense `N × M` matrix of nonnegative integer
//! distances between clients (rows) and candidate facility sites (columns)
//! together with the center budget `p`. Distances are kept as integers end
//! to end so that ladder construction and tie detection stay exact.
//!
//! Graph instances (OR-Library `pmed` style) are turned into square
//! instances through all-pairs shortest paths, every vertex being both a
//! client and a candidate site.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A distance value. All distances are exact nonnegative integers.
pub type Distance = u64;

/// Inclusive upper end of the distances drawn by [`random_instance`].
pub const RANDOM_DISTANCE_MAX: Distance = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance needs at least one client and one facility (got {n_clients}x{n_facilities})")]
    EmptyDimension { n_clients: usize, n_facilities: usize },
    #[error("distance matrix has {found} entries, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("p must satisfy 1 <= p <= {limit}, got {p}")]
    InvalidP { p: usize, limit: usize },
    #[error("{which} labels: expected {expected}, found {found}")]
    LabelLength { which: &'static str, expected: usize, found: usize },
    #[error("{which} label {label} appears more than once")]
    DuplicateLabel { which: &'static str, label: usize },
    #[error("vertex index out of range: edge ({u}, {v}) with {vertex_count} vertices")]
    VertexOutOfRange { u: usize, v: usize, vertex_count: usize },
    #[error("self loop on vertex {0}")]
    SelfLoop(usize),
    #[error("graph is disconnected: vertex {to} is unreachable from vertex {from}")]
    Disconnected { from: usize, to: usize },
    #[error("distance overflow while computing shortest paths")]
    Overflow,
}

/// A client × facility p-center instance.
///
/// Labels record the original (0-based) index of every surviving client and
/// facility, so that reduced instances can be mapped back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n_clients: usize,
    n_facilities: usize,
    p: usize,
    distances: Vec<Distance>,
    client_labels: Vec<usize>,
    facility_labels: Vec<usize>,
}

impl Instance {
    /// Builds an instance from a row-major `n_clients × n_facilities` matrix.
    pub fn new(
        n_clients: usize,
        n_facilities: usize,
        p: usize,
        distances: Vec<Distance>,
    ) -> Result<Self, InstanceError> {
        Self::with_labels(n_clients, n_facilities, p, distances, (0..n_clients).collect(), (0..n_facilities).collect())
    }

    pub fn with_labels(
        n_clients: usize,
        n_facilities: usize,
        p: usize,
        distances: Vec<Distance>,
        client_labels: Vec<usize>,
        facility_labels: Vec<usize>,
    ) -> Result<Self, InstanceError> {
        if n_clients == 0 || n_facilities == 0 {
            return Err(InstanceError::EmptyDimension { n_clients, n_facilities });
        }
        let expected = n_clients * n_facilities;
        if distances.len() != expected {
            return Err(InstanceError::DimensionMismatch { expected, found: distances.len() });
        }
        if p == 0 || p > n_facilities {
            return Err(InstanceError::InvalidP { p, limit: n_facilities });
        }
        check_labels("client", &client_labels, n_clients)?;
        check_labels("facility", &facility_labels, n_facilities)?;
        Ok(Instance { n_clients, n_facilities, p, distances, client_labels, facility_labels })
    }

    /// Builds an instance from nested rows. Convenient in tests.
    pub fn from_rows<R: AsRef<[Distance]>>(rows: &[R], p: usize) -> Result<Self, InstanceError> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut distances = Vec::with_capacity(n * m);
        for row in rows {
            let row = row.as_ref();
            if row.len() != m {
                return Err(InstanceError::DimensionMismatch { expected: n * m, found: n * row.len() });
            }
            distances.extend_from_slice(row);
        }
        Self::new(n, m, p, distances)
    }

    #[inline]
    pub fn n_clients(&self) -> usize {
        self.n_clients
    }

    #[inline]
    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn distance(&self, client: usize, facility: usize) -> Distance {
        self.distances[client * self.n_facilities + facility]
    }

    #[inline]
    pub fn row(&self, client: usize) -> &[Distance] {
        let start = client * self.n_facilities;
        &self.distances[start..start + self.n_facilities]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Distance]> + '_ {
        self.distances.chunks_exact(self.n_facilities)
    }

    /// Iterates over the distances from every client to `facility`.
    pub fn column(&self, facility: usize) -> impl Iterator<Item = Distance> + '_ {
        self.distances.iter().skip(facility).step_by(self.n_facilities).copied()
    }

    /// Row-major view of the whole matrix.
    pub fn distances(&self) -> &[Distance] {
        &self.distances
    }

    pub fn client_labels(&self) -> &[usize] {
        &self.client_labels
    }

    pub fn facility_labels(&self) -> &[usize] {
        &self.facility_labels
    }

    /// Returns a copy with every distance replaced by `f(d)`. Dimensions,
    /// `p` and labels are kept.
    pub fn map_distances(&self, f: impl Fn(Distance) -> Distance) -> Instance {
        Instance { distances: self.distances.iter().map(|&d| f(d)).collect(), ..self.clone() }
    }

    /// Returns a copy with a different center budget.
    pub fn with_p(&self, p: usize) -> Result<Instance, InstanceError> {
        if p == 0 || p > self.n_facilities {
            return Err(InstanceError::InvalidP { p, limit: self.n_facilities });
        }
        Ok(Instance { p, ..self.clone() })
    }

    /// Restricts the instance to the given clients and facilities (indices
    /// into this instance, increasing). `p` is capped at the number of kept
    /// facilities.
    pub fn restrict(&self, clients: &[usize], facilities: &[usize]) -> Result<Instance, InstanceError> {
        let mut distances = Vec::with_capacity(clients.len() * facilities.len());
        for &i in clients {
            let row = self.row(i);
            distances.extend(facilities.iter().map(|&j| row[j]));
        }
        Instance::with_labels(
            clients.len(),
            facilities.len(),
            self.p.min(facilities.len()),
            distances,
            clients.iter().map(|&i| self.client_labels[i]).collect(),
            facilities.iter().map(|&j| self.facility_labels[j]).collect(),
        )
    }
}

fn check_labels(which: &'static str, labels: &[usize], expected: usize) -> Result<(), InstanceError> {
    if labels.len() != expected {
        return Err(InstanceError::LabelLength { which, expected, found: labels.len() });
    }
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(InstanceError::DuplicateLabel { which, label: w[0] });
    }
    Ok(())
}

/// An undirected weighted edge between two 1-based vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Distance,
}

/// An undirected graph with a center budget, as found in OR-Library `pmed`
/// files. Vertices are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    vertex_count: usize,
    edges: Vec<Edge>,
    p: usize,
}

impl GraphInstance {
    /// Validates the edge list. Parallel edges collapse onto the lightest one;
    /// edges are stored with `u < v`, sorted.
    pub fn new(vertex_count: usize, edges: Vec<Edge>, p: usize) -> Result<Self, InstanceError> {
        if vertex_count == 0 {
            return Err(InstanceError::EmptyDimension { n_clients: 0, n_facilities: 0 });
        }
        if p == 0 || p > vertex_count {
            return Err(InstanceError::InvalidP { p, limit: vertex_count });
        }
        let mut lightest: BTreeMap<(usize, usize), Distance> = BTreeMap::new();
        for e in edges {
            if e.u == 0 || e.v == 0 || e.u > vertex_count || e.v > vertex_count {
                return Err(InstanceError::VertexOutOfRange { u: e.u, v: e.v, vertex_count });
            }
            if e.u == e.v {
                return Err(InstanceError::SelfLoop(e.u));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            lightest.entry(key).and_modify(|w| *w = (*w).min(e.weight)).or_insert(e.weight);
        }
        let edges = lightest.into_iter().map(|((u, v), weight)| Edge { u, v, weight }).collect();
        Ok(GraphInstance { vertex_count, edges, p })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn p(&self) -> usize {
        self.p
    }
}

/// All-pairs shortest paths (Floyd–Warshall) over the graph, producing a
/// square instance where every vertex is both client and facility.
pub fn graph_to_instance(graph: &GraphInstance) -> Result<Instance, InstanceError> {
    let n = graph.vertex_count;
    let mut dist: Vec<Option<Distance>> = alloc::vec![None; n * n];
    for i in 0..n {
        dist[i * n + i] = Some(0);
    }
    for e in &graph.edges {
        let (a, b) = (e.u - 1, e.v - 1);
        for (x, y) in [(a, b), (b, a)] {
            let slot = &mut dist[x * n + y];
            *slot = Some(slot.map_or(e.weight, |w| w.min(e.weight)));
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = dist[i * n + k] else { continue };
            for j in 0..n {
                let Some(dkj) = dist[k * n + j] else { continue };
                let through = dik.checked_add(dkj).ok_or(InstanceError::Overflow)?;
                let slot = &mut dist[i * n + j];
                if slot.is_none_or(|cur| through < cur) {
                    *slot = Some(through);
                }
            }
        }
    }
    let mut distances = Vec::with_capacity(n * n);
    for (idx, d) in dist.into_iter().enumerate() {
        match d {
            Some(d) => distances.push(d),
            None => return Err(InstanceError::Disconnected { from: idx / n + 1, to: idx % n + 1 }),
        }
    }
    Instance::new(n, n, graph.p, distances)
}

/// A deterministic random instance with integer distances uniform in
/// `0..=RANDOM_DISTANCE_MAX`. The same seed always yields the same matrix.
pub fn random_instance(n: usize, m: usize, p: usize, seed: u64) -> Result<Instance, InstanceError> {
    if n == 0 || m == 0 {
        return Err(InstanceError::EmptyDimension { n_clients: n, n_facilities: m });
    }
    if p == 0 || p > m {
        return Err(InstanceError::InvalidP { p, limit: m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let distances = (0..n * m).map(|_| rng.gen_range(0..=RANDOM_DISTANCE_MAX)).collect();
    Instance::new(n, m, p, distances)
}
