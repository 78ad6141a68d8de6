//! Dominated client and facility removal.
//!
//! Facility `a` is dominated by `b` when `d_ia >= d_ib` for every client;
//! client `a` is dominated by `b` when `d_aj <= d_bj` for every facility.
//! Identical columns (rows) dominate each other, so among duplicates only the
//! lowest index is kept. Domination is always checked against entities that
//! are still alive, one at a time.

use alloc::vec::Vec;

use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductionReport {
    /// Original labels of removed clients, in removal order.
    pub removed_clients: Vec<usize>,
    /// Original labels of removed facilities, in removal order.
    pub removed_facilities: Vec<usize>,
    pub rounds: usize,
}

impl ReductionReport {
    pub fn is_empty(&self) -> bool {
        self.removed_clients.is_empty() && self.removed_facilities.is_empty()
    }

    pub fn merge(&mut self, other: ReductionReport) {
        self.removed_clients.extend(other.removed_clients);
        self.removed_facilities.extend(other.removed_facilities);
        self.rounds += other.rounds;
    }
}

/// `b` is at least as good as `a` for every client, with ties resolved in
/// favour of the lower index.
fn dominates(b: usize, a: usize, better_or_equal: impl Fn(usize, usize) -> Option<bool>) -> bool {
    match better_or_equal(b, a) {
        Some(true) => true,
        Some(false) => b < a,
        None => false,
    }
}

/// Compares two slices entrywise: `Some(strict)` when `x <= y` everywhere,
/// with `strict` telling whether some entry differs.
fn entrywise_le(x: impl Iterator<Item = u64>, y: impl Iterator<Item = u64>) -> Option<bool> {
    let mut strict = false;
    for (a, b) in x.zip(y) {
        if a > b {
            return None;
        }
        strict |= a < b;
    }
    Some(strict)
}

/// Indices (in `inst`) of facilities dominated by another surviving facility.
pub fn dominated_facilities(inst: &Instance) -> Vec<usize> {
    let m = inst.n_facilities();
    let columns: Vec<Vec<u64>> = (0..m).map(|j| inst.column(j).collect()).collect();
    let mut alive = alloc::vec![true; m];
    let mut removed = Vec::new();
    for a in 0..m {
        let hit = (0..m).any(|b| {
            b != a
                && alive[b]
                && dominates(b, a, |b, a| entrywise_le(columns[b].iter().copied(), columns[a].iter().copied()))
        });
        if hit {
            alive[a] = false;
            removed.push(a);
        }
    }
    removed
}

/// Indices (in `inst`) of clients dominated by another surviving client.
pub fn dominated_clients(inst: &Instance) -> Vec<usize> {
    let n = inst.n_clients();
    let mut alive = alloc::vec![true; n];
    let mut removed = Vec::new();
    for a in 0..n {
        let row_a = inst.row(a);
        let hit = (0..n).any(|b| {
            b != a
                && alive[b]
                && dominates(b, a, |b, _| entrywise_le(row_a.iter().copied(), inst.row(b).iter().copied()))
        });
        if hit {
            alive[a] = false;
            removed.push(a);
        }
    }
    removed
}

fn complement(len: usize, removed: &[usize]) -> Vec<usize> {
    let mut keep = alloc::vec![true; len];
    for &r in removed {
        keep[r] = false;
    }
    (0..len).filter(|&i| keep[i]).collect()
}

/// Alternately removes dominated facilities and clients until neither kind
/// is found. `p` is capped at the number of surviving facilities.
pub fn reduce(inst: &Instance) -> (Instance, ReductionReport) {
    let mut cur = inst.clone();
    let mut report = ReductionReport::default();
    loop {
        report.rounds += 1;
        let facilities = dominated_facilities(&cur);
        report.removed_facilities.extend(facilities.iter().map(|&j| cur.facility_labels()[j]));
        if !facilities.is_empty() {
            let keep = complement(cur.n_facilities(), &facilities);
            let all: Vec<usize> = (0..cur.n_clients()).collect();
            cur = cur.restrict(&all, &keep).expect("a dominating facility survives");
        }
        let clients = dominated_clients(&cur);
        report.removed_clients.extend(clients.iter().map(|&i| cur.client_labels()[i]));
        if !clients.is_empty() {
            let keep = complement(cur.n_clients(), &clients);
            let all: Vec<usize> = (0..cur.n_facilities()).collect();
            cur = cur.restrict(&keep, &all).expect("a dominating client survives");
        }
        if facilities.is_empty() && clients.is_empty() {
            return (cur, report);
        }
    }
}
