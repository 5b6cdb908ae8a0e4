use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use congestion::bench_gen::{self, BenchEventKind, BenchmarkConfig, Scenario};
use congestion::features::{
    entropy_weights, fft_similarity, fuse, scalar_similarity, spatial_similarity, FeatureTag, FeatureVariant,
    SimilarityMatrix,
};
use congestion::graph::WeightedGraph;
use congestion::ingest::{aggregate_speeds, estimate_free_flow, tsi, SpeedRecord};
use congestion::local_search::{attribute_values, build_pointer_dag, find_local_leaders};
use congestion::metrics::{
    nmi, propagation_probability, sim_jaccard, sim_maxratio, sim_overlap, track_communities, EventKind,
    LabeledPartition, SnapshotCommunities, TrackingConfig, TrackingMethod,
};

fn weighted_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..30).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 1u8..=8), 0..n * 3).prop_map(move |raw| {
            let mut seen = BTreeSet::new();
            let edges: Vec<(usize, usize, f64)> = raw
                .into_iter()
                .filter(|&(u, v, _)| u != v && seen.insert((u.min(v), u.max(v))))
                .map(|(u, v, w)| (u, v, w as f64 / 4.0))
                .collect();
            WeightedGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn small_set() -> impl Strategy<Value = BTreeSet<u8>> {
    proptest::collection::btree_set(0u8..20, 1..12)
}

fn labels(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..k, n)
}

proptest! {
    #[test]
    fn tsi_is_bounded_and_decreasing_in_speed(vf in 1.0f64..150.0, a in 0.0f64..200.0, b in 0.0f64..200.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (t_lo, t_hi) = (tsi(vf, lo), tsi(vf, hi));
        prop_assert!((0.0..=1.0).contains(&t_lo) && (0.0..=1.0).contains(&t_hi));
        prop_assert!(t_hi <= t_lo);
    }

    #[test]
    fn free_flow_is_an_observed_speed(speeds in proptest::collection::vec(0.0f64..130.0, 1..60)) {
        if let Ok(v) = estimate_free_flow(&speeds) {
            prop_assert!(speeds.contains(&v));
            prop_assert!(v > 0.0);
        } else {
            prop_assert!(speeds.iter().all(|&s| s == 0.0));
        }
    }

    #[test]
    fn aggregation_ignores_record_order(
        raw in proptest::collection::vec((0i64..7200, 0u8..4, 0.0f64..120.0), 1..80),
        seed in any::<u64>(),
    ) {
        let records: Vec<SpeedRecord> = raw
            .iter()
            .map(|&(t, s, v)| SpeedRecord::new(t, format!("s{s}"), v).unwrap())
            .collect();
        let mut shuffled = records.clone();
        let n = shuffled.len();
        for i in 0..n {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7919) % n);
        }
        prop_assert_eq!(aggregate_speeds(&records, 300).unwrap(), aggregate_speeds(&shuffled, 300).unwrap());
    }

    #[test]
    fn similarity_matrices_are_symmetric_unit_range(
        values in proptest::collection::vec(-50.0f64..50.0, 1..20),
        points in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..20),
    ) {
        let scalar = scalar_similarity(&values, FeatureTag::K);
        let pts: Vec<[f64; 2]> = points.iter().map(|&(x, y)| [x, y]).collect();
        let spatial = spatial_similarity(&pts);
        for m in [&scalar, &spatial] {
            for i in 0..m.len() {
                prop_assert_eq!(m.get(i, i), 1.0);
                for j in 0..m.len() {
                    let v = m.get(i, j);
                    prop_assert!((0.0..=1.0).contains(&v));
                    prop_assert_eq!(v, m.get(j, i));
                }
            }
        }
    }

    #[test]
    fn fft_similarity_ignores_circular_shifts(
        series in proptest::collection::vec(0.0f64..1.0, 4..64),
        shift in 0usize..64,
    ) {
        let mut rotated = series.clone();
        let len = rotated.len();
        rotated.rotate_left(shift % len);
        let m = fft_similarity(&[series.clone(), rotated]).unwrap();
        let energy: f64 = congestion::features::magnitude_spectrum(&series).iter().sum();
        if energy > 1e-9 {
            prop_assert!((m.get(0, 1) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_weights_form_a_distribution(
        rows in proptest::collection::vec(proptest::collection::vec(0.0f64..10.0, 6), 1..5),
    ) {
        let tags = [FeatureTag::K, FeatureTag::D, FeatureTag::S, FeatureTag::F, FeatureTag::T];
        let ms: Vec<SimilarityMatrix> = rows.iter().zip(tags).map(|(r, t)| scalar_similarity(r, t)).collect();
        let w = entropy_weights(&ms.iter().collect::<Vec<_>>()).unwrap();
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fusion_stays_between_its_inputs(
        k in proptest::collection::vec(0.0f64..10.0, 5),
        d in proptest::collection::vec(0.0f64..10.0, 5),
        split in 0.0f64..=1.0,
    ) {
        let mk = scalar_similarity(&k, FeatureTag::K);
        let md = scalar_similarity(&d, FeatureTag::D);
        let nodes: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let m = fuse(nodes, vec![mk.clone(), md.clone()], vec![split, 1.0 - split], "KD".parse::<FeatureVariant>().unwrap()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let (a, b) = (mk.get(i, j), md.get(i, j));
                prop_assert!(m.get(i, j) >= a.min(b) - 1e-12 && m.get(i, j) <= a.max(b) + 1e-12);
            }
        }
    }

    #[test]
    fn pointers_climb_and_never_cycle(g in weighted_graph()) {
        let vg = build_pointer_dag(attribute_values(&g));
        let x = vg.values();
        for u in 0..g.node_count() {
            if let Some(v) = vg.pointer(u) {
                prop_assert!(g.weight(u, v).is_some());
                prop_assert!(x[v] > x[u] || (x[v] == x[u] && v > u));
            }
        }
        let leaders: BTreeSet<usize> = find_local_leaders(&vg).into_iter().collect();
        for (u, l) in vg.leader_of().into_iter().enumerate() {
            prop_assert!(leaders.contains(&l), "node {} ends at non-leader {}", u, l);
        }
    }

    #[test]
    fn nmi_symmetric_bounded_and_label_blind(a in labels(12, 4), b in labels(12, 4), perm in 1usize..4) {
        let x = LabeledPartition::new(a.iter().copied().enumerate(), 0);
        let y = LabeledPartition::new(b.iter().copied().enumerate(), 0);
        let renamed = LabeledPartition::new(a.iter().map(|&l| (l + perm) % 4 * 10).enumerate(), 0);
        let s = nmi(&x, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s - nmi(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!((s - nmi(&renamed, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn set_similarities_are_ordered(a in small_set(), b in small_set()) {
        let j = sim_jaccard(&a, &b);
        let r = sim_maxratio(&a, &b, 0.0);
        let o = sim_overlap(&a, &b);
        prop_assert!((0.0..=1.0).contains(&j) && (0.0..=1.0).contains(&o));
        prop_assert!(j <= r + 1e-15 && r <= o + 1e-15);
    }

    #[test]
    fn transition_entries_are_probabilities(
        src in proptest::collection::btree_map(1usize..5, small_set(), 1..4),
        dst in proptest::collection::btree_map(1usize..5, small_set(), 1..4),
    ) {
        let union: BTreeSet<u8> = src.values().chain(dst.values()).flatten().copied().collect();
        let m = propagation_probability(&src, &dst, union.len()).unwrap();
        for (_, _, p) in m.rows() {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn every_community_has_exactly_one_fate(
        parts in proptest::collection::vec(labels(15, 5), 2..5),
        method in 0usize..6,
    ) {
        let snapshots: Vec<SnapshotCommunities<usize, usize>> = parts
            .iter()
            .enumerate()
            .map(|(s, p)| {
                let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
                for (node, &l) in p.iter().enumerate() {
                    // drop a few nodes so snapshots differ in membership
                    if (node + s) % 4 != 0 {
                        groups.entry(l).or_default().insert(node);
                    }
                }
                let importance = (0..15).map(|n| (n, (n % 3 + 1) as f64)).collect();
                SnapshotCommunities::new(s, groups.into_iter().collect()).with_importance(importance)
            })
            .collect();
        let config = TrackingConfig::new(TrackingMethod::ALL[method]);
        let events = track_communities(&snapshots, &config).unwrap();
        for pair in 0..snapshots.len() - 1 {
            let on_pair: Vec<_> = events.iter().filter(|e| e.snapshot_i == pair).collect();
            for (c, _) in &snapshots[pair].communities {
                let matched = on_pair.iter().any(|e| e.community_i == Some(*c) && e.community_j.is_some());
                let died = on_pair.iter().any(|e| e.community_i == Some(*c) && e.kind == EventKind::Death);
                prop_assert!(matched != died, "source {} at {}: matched {}, died {}", c, pair, matched, died);
            }
            for (c, _) in &snapshots[pair + 1].communities {
                let matched = on_pair.iter().any(|e| e.community_j == Some(*c) && e.community_i.is_some());
                let born = on_pair.iter().any(|e| e.community_j == Some(*c) && e.kind == EventKind::Birth);
                prop_assert!(matched != born, "target {} at {}: matched {}, born {}", c, pair + 1, matched, born);
            }
        }
    }
}

fn counts(labels: &BTreeMap<u32, u32>) -> BTreeMap<u32, i64> {
    let mut out = BTreeMap::new();
    for &l in labels.values() {
        *out.entry(l).or_insert(0) += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn event_log_matches_labels(scenario in 0usize..4, seed in any::<u64>()) {
        let config = BenchmarkConfig::new(Scenario::ALL[scenario], 400, seed);
        let bench = bench_gen::generate(&config).unwrap();
        for e in &bench.events {
            let before = &bench.snapshots[e.snapshot - 2].labels;
            let after = &bench.snapshots[e.snapshot - 1].labels;
            let (cb, ca) = (counts(before), counts(after));
            let n = |m: &BTreeMap<u32, i64>, l: &u32| m.get(l).copied().unwrap_or(0);
            match e.kind {
                BenchEventKind::Death => {
                    prop_assert_eq!(n(&ca, &e.sources[0]), 0);
                    prop_assert_eq!(n(&cb, &e.sources[0]), -e.size_change);
                }
                BenchEventKind::Birth => {
                    prop_assert_eq!(n(&cb, &e.results[0]), 0);
                    prop_assert_eq!(n(&ca, &e.results[0]), e.size_change);
                }
                BenchEventKind::Expand | BenchEventKind::Contract => {
                    let l = &e.sources[0];
                    prop_assert_eq!(n(&ca, l) - n(&cb, l), e.size_change);
                }
                BenchEventKind::Merge | BenchEventKind::Split | BenchEventKind::Hide | BenchEventKind::Restore => {
                    let results: BTreeSet<u32> = e.results.iter().copied().collect();
                    for (node, l) in before {
                        if e.sources.contains(l) {
                            prop_assert!(results.contains(&after[node]));
                        }
                    }
                    for s in &e.sources {
                        prop_assert_eq!(n(&ca, s), 0);
                    }
                }
            }
        }
        for snap in &bench.snapshots {
            let nodes: BTreeSet<u32> = snap.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            prop_assert!(nodes.iter().all(|n| snap.labels.contains_key(n)));
            prop_assert!(snap.degrees().values().all(|&d| d <= config.max_degree));
        }
    }
}

/// Asynchronous label propagation in shuffled order with random tie-breaks.
fn label_propagation(n: usize, edges: &[(u32, u32)], seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut label: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..100 {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &u in &order {
            let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
            for &v in &adj[u] {
                *tally.entry(label[v]).or_insert(0) += 1;
            }
            let Some(&top) = tally.values().max() else { continue };
            if tally.get(&label[u]) == Some(&top) {
                continue;
            }
            let best: Vec<usize> = tally.iter().filter(|&(_, &c)| c == top).map(|(&l, _)| l).collect();
            label[u] = *best.choose(&mut rng).unwrap();
            changed = true;
        }
        if !changed {
            break;
        }
    }
    label
}

#[test]
fn planted_structure_is_recoverable() {
    let config = BenchmarkConfig {
        mixing: 0.1,
        snapshots: 1,
        ..BenchmarkConfig::new(Scenario::BirthDeath, 500, 9)
    };
    let bench = bench_gen::generate(&config).unwrap();
    let snap = &bench.snapshots[0];
    let nodes = snap.nodes();
    assert_eq!(nodes, (0..500).collect::<Vec<u32>>());
    let found = label_propagation(500, &snap.edges, 1);
    let detected = LabeledPartition::new(nodes.iter().map(|&n| (n, found[n as usize])), 1);
    let score = nmi(&snap.truth(1), &detected).unwrap();
    assert!(score >= 0.9, "label propagation NMI {score}");
}

