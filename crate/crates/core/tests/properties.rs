//! Structural properties checked against small exhaustive oracles.

use std::collections::BTreeSet;

use pcenter_core::bounds::{clamp_range, lb0, ub0};
use pcenter_core::formulations::{build, Formulation};
use pcenter_core::instance::{graph_to_instance, Distance, Edge, GraphInstance, Instance};
use pcenter_core::ladder::{coverage_set, critical_indices, rank_transform, DistanceLadder};
use pcenter_core::reduction::reduce;
use pcenter_core::solve::brute_force_radius;
use proptest::prelude::*;

/// Radius of every facility subset of size `1..=p`, by bitmask.
fn subset_radii(inst: &Instance, p: usize) -> Vec<(u32, Distance)> {
    let m = inst.n_facilities();
    (1u32..(1 << m))
        .filter(|mask| mask.count_ones() as usize <= p)
        .map(|mask| {
            let r = (0..inst.n_clients())
                .map(|i| (0..m).filter(|j| mask & (1 << j) != 0).map(|j| inst.distance(i, j)).min().unwrap())
                .max()
                .unwrap();
            (mask, r)
        })
        .collect()
}

fn oracle_optimum(inst: &Instance, p: usize) -> Distance {
    subset_radii(inst, p).into_iter().map(|(_, r)| r).min().unwrap()
}

fn optimal_subsets(inst: &Instance, p: usize) -> BTreeSet<u32> {
    let radii = subset_radii(inst, p);
    let best = radii.iter().map(|&(_, r)| r).min().unwrap();
    radii.into_iter().filter(|&(_, r)| r == best).map(|(mask, _)| mask).collect()
}

fn small_instance(max_dim: usize, max_dist: Distance) -> impl Strategy<Value = Instance> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(n, m)| {
        (proptest::collection::vec(0..=max_dist, n * m), 1..=m)
            .prop_map(move |(d, p)| Instance::new(n, m, p, d).unwrap())
    })
}

fn connected_graph() -> impl Strategy<Value = GraphInstance> {
    (2usize..9).prop_flat_map(|n| {
        let tree = proptest::collection::vec((any::<prop::sample::Index>(), 0u64..20), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 0u64..20), 0..n * 2);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges: Vec<Edge> = tree
                .into_iter()
                .enumerate()
                .map(|(k, (parent, w))| Edge { u: k + 2, v: parent.index(k + 1) + 1, weight: w })
                .collect();
            edges.extend(extra.into_iter().filter(|(u, v, _)| u != v).map(|(u, v, w)| Edge {
                u: u + 1,
                v: v + 1,
                weight: w,
            }));
            GraphInstance::new(n, edges, 1).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shortest_paths_are_a_metric(g in connected_graph()) {
        let inst = graph_to_instance(&g).unwrap();
        let n = inst.n_clients();
        for i in 0..n {
            prop_assert_eq!(inst.distance(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(inst.distance(i, j), inst.distance(j, i));
                for k in 0..n {
                    prop_assert!(inst.distance(i, j) <= inst.distance(i, k) + inst.distance(k, j));
                }
            }
        }
        for e in g.edges() {
            prop_assert!(inst.distance(e.u - 1, e.v - 1) <= e.weight);
        }
    }

    #[test]
    fn ladder_is_sorted_distinct_and_complete(inst in small_instance(8, 20)) {
        let ladder = DistanceLadder::build(&inst);
        prop_assert!(ladder.values().windows(2).all(|w| w[0] < w[1]));
        let distinct: BTreeSet<_> = inst.distances().iter().copied().collect();
        let expected: Vec<_> = distinct.into_iter().collect();
        prop_assert_eq!(ladder.values(), expected.as_slice());
        prop_assert!(ladder.k() < inst.n_clients() * inst.n_facilities());
    }

    #[test]
    fn coverage_sets_are_nested(inst in small_instance(8, 20)) {
        let ladder = DistanceLadder::build(&inst);
        for i in 0..inst.n_clients() {
            for k in 1..ladder.k() {
                let a: BTreeSet<_> = coverage_set(&inst, &ladder, i, k).unwrap().into_iter().collect();
                let b: BTreeSet<_> = coverage_set(&inst, &ladder, i, k + 1).unwrap().into_iter().collect();
                prop_assert!(a.is_subset(&b));
                let has_tie = (0..inst.n_facilities()).any(|j| inst.distance(i, j) == ladder.value(k));
                prop_assert_eq!(a != b, has_tie);
            }
        }
    }

    #[test]
    fn critical_indices_match_exact_ties(inst in small_instance(8, 20)) {
        let ladder = DistanceLadder::build(&inst);
        let s = critical_indices(&inst, &ladder);
        let (m, k) = (inst.n_facilities(), ladder.k());
        for i in 0..inst.n_clients() {
            for level in 1..k {
                let tie = (0..m).any(|j| inst.distance(i, j) == ladder.value(level));
                prop_assert_eq!(s.of(i).contains(&level), tie);
            }
            prop_assert!(s.of(i).iter().all(|&l| l >= 1 && l < k));
            prop_assert!(s.of(i).len() <= m.min(k));
        }
        // |S_i ∪ {K}| can reach M + 1 when no facility sits at D^0 or D^K
        prop_assert!(s.total_rows() <= inst.n_clients() * (m + 1).min(k));
    }

    #[test]
    fn rank_transform_keeps_optimal_sets(inst in small_instance(6, 30)) {
        let ranked = rank_transform(&inst);
        let ladder = DistanceLadder::build(&inst);
        let ranked_ladder = DistanceLadder::build(&ranked);
        prop_assert_eq!(ranked_ladder.min(), 0);
        prop_assert!(ranked_ladder.values().windows(2).all(|w| w[1] - w[0] == 1));
        let p = inst.p();
        prop_assert_eq!(optimal_subsets(&inst, p), optimal_subsets(&ranked, p));
        let r_star = oracle_optimum(&ranked, p) as usize;
        prop_assert_eq!(ladder.value(r_star), oracle_optimum(&inst, p));
    }

    #[test]
    fn brute_force_matches_bitmask_oracle(inst in small_instance(7, 30)) {
        let p = inst.p();
        let (radius, centers) = brute_force_radius(&inst, p).unwrap();
        prop_assert_eq!(radius, oracle_optimum(&inst, p));
        prop_assert!(centers.len() <= p);
        let mask = centers.iter().fold(0u32, |acc, &j| acc | (1 << j));
        prop_assert!(optimal_subsets(&inst, p).contains(&mask));
    }

    #[test]
    fn lb0_and_ub0_bracket_the_optimum(inst in small_instance(7, 50)) {
        let opt = oracle_optimum(&inst, inst.p());
        prop_assert!(lb0(&inst) <= opt);
        prop_assert!(opt <= ub0(&inst));
    }

    #[test]
    fn clamping_is_idempotent_and_preserves_bracketed_optimum(
        inst in small_instance(7, 50),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
    ) {
        let p = inst.p();
        let opt = oracle_optimum(&inst, p);
        let ladder = DistanceLadder::build(&inst);
        let below: Vec<_> = ladder.values().iter().copied().filter(|&d| d <= opt).collect();
        let above: Vec<_> = ladder.values().iter().copied().filter(|&d| d >= opt).collect();
        let (lb, ub) = (below[a.index(below.len())], above[b.index(above.len())]);
        let once = clamp_range(&inst, lb, ub);
        prop_assert_eq!(clamp_range(&once, lb, ub), once.clone());
        prop_assert_eq!(oracle_optimum(&once, p), opt);
    }

    #[test]
    fn reduction_preserves_optimum_for_every_p(inst in small_instance(7, 30)) {
        let (reduced, report) = reduce(&inst);
        for p in 1..=inst.n_facilities() {
            let original = inst.with_p(p).unwrap();
            let (red_p, _) = reduce(&original);
            prop_assert_eq!(oracle_optimum(&red_p, red_p.p()), oracle_optimum(&original, p));
        }
        // idempotence and label bookkeeping
        let (again, second) = reduce(&reduced);
        prop_assert_eq!(&again, &reduced);
        prop_assert!(second.removed_clients.is_empty() && second.removed_facilities.is_empty());
        let kept: BTreeSet<_> = reduced.client_labels().iter().copied().collect();
        prop_assert!(report.removed_clients.iter().all(|c| !kept.contains(c)));
        let kept: BTreeSet<_> = reduced.facility_labels().iter().copied().collect();
        prop_assert!(report.removed_facilities.iter().all(|f| !kept.contains(f)));
        prop_assert_eq!(report.removed_clients.len() + reduced.n_clients(), inst.n_clients());
    }

    #[test]
    fn surviving_clients_keep_a_facility_within_ub(inst in small_instance(7, 30)) {
        let ub = ub0(&inst);
        let clamped = clamp_range(&inst, 0, ub);
        let (reduced, _) = reduce(&clamped);
        for i in 0..reduced.n_clients() {
            let before = clamped.row(reduced.client_labels()[i]).iter().any(|&d| d <= ub);
            let after = reduced.row(i).iter().any(|&d| d <= ub);
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn model_invariants_and_sizes(inst in small_instance(8, 20)) {
        let ladder = DistanceLadder::build(&inst);
        let (n, m, k) = (inst.n_clients(), inst.n_facilities(), ladder.k());
        for f in Formulation::ALL {
            let model = build(f, &inst);
            prop_assert!(model.validate().is_ok());
        }
        let p2 = build(Formulation::P2, &inst).stats();
        prop_assert_eq!(p2.n_variables, m + k);
        prop_assert_eq!(p2.n_constraints, n * k + 2);
        let p2p = build(Formulation::P2Prime, &inst).stats();
        prop_assert_eq!(p2p.n_constraints, n * k + 2 + k.saturating_sub(1));
        let cp1 = build(Formulation::Cp1, &inst).stats();
        let s = critical_indices(&inst, &ladder);
        prop_assert_eq!(cp1.n_variables, m + k);
        prop_assert_eq!(cp1.n_constraints, s.total_rows() + k.saturating_sub(1) + 2);
        prop_assert!(cp1.n_constraints <= n * (m + 1).min(k) + k.max(1) + 1);
        let cp2 = build(Formulation::Cp2, &inst).stats();
        prop_assert_eq!(cp2.n_variables, m + 1);
        prop_assert_eq!(cp2.n_constraints, s.total_rows() + 2);
        let p1 = build(Formulation::P1, &inst).stats();
        prop_assert_eq!(p1.n_variables, n * m + m + 1);
        prop_assert_eq!(p1.n_constraints, 1 + n + n * m + n);
    }
}

#[test]
fn s_union_k_can_exceed_n_min_m_k() {
    let inst = Instance::from_rows(&[[1], [2], [3]], 1).unwrap();
    let ladder = DistanceLadder::build(&inst);
    let s = critical_indices(&inst, &ladder);
    assert_eq!(s.total_rows(), 4);
    assert!(s.total_rows() > inst.n_clients() * inst.n_facilities().min(ladder.k()));
}

#[test]
fn t3_cp1_rows_by_hand() {
    let inst = Instance::from_rows(&[[0, 2, 5], [2, 0, 4], [5, 4, 0]], 1).unwrap();
    let model = build(Formulation::Cp1, &inst);
    let cover: Vec<&str> =
        model.constraints.iter().filter(|c| c.label.starts_with("cover")).map(|c| c.label.as_str()).collect();
    assert_eq!(cover, ["cover1_1", "cover1_3", "cover2_1", "cover2_2", "cover2_3", "cover3_2", "cover3_3"]);
    assert_eq!(model.constraints.iter().filter(|c| c.label.starts_with("order")).count(), 2);
    assert_eq!(model.constraints.iter().filter(|c| c.label.starts_with("card")).count(), 2);
}

#[test]
fn clamped_t3_reduction_keeps_optimum() {
    let t3 = Instance::from_rows(&[[0, 2, 5], [2, 0, 4], [5, 4, 0]], 1).unwrap();
    let clamped = clamp_range(&t3, 2, 4);
    let (reduced, _) = reduce(&clamped);
    assert_eq!(oracle_optimum(&reduced, reduced.p()), oracle_optimum(&t3, 1));
    assert_eq!(oracle_optimum(&t3, 1), 4);
}
