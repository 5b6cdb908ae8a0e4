//! Match communities across three snapshots with every tracking method,
//! then compute level transition probabilities between two periods.

use std::collections::{BTreeMap, BTreeSet};

use congestion::metrics::{
    propagation_probability, track_communities, SnapshotCommunities, TrackingConfig, TrackingMethod,
};

fn set(ids: &[&'static str]) -> BTreeSet<&'static str> {
    ids.iter().copied().collect()
}

fn main() -> congestion::Result<()> {
    let snapshots = vec![
        SnapshotCommunities::new(0, vec![(0, set(&["a", "b", "c", "d"])), (1, set(&["x", "y", "z"]))]),
        SnapshotCommunities::new(1, vec![(0, set(&["a", "b", "c", "d", "e", "f"])), (1, set(&["x", "y"])), (2, set(&["p", "q"]))]),
        SnapshotCommunities::new(2, vec![(0, set(&["a", "b", "c"])), (1, set(&["d", "e", "f", "x", "y"]))]),
    ];
    let importance: BTreeMap<&str, f64> = snapshots
        .iter()
        .flat_map(|s| s.communities.iter().flat_map(|(_, c)| c.iter().copied()))
        .map(|n| (n, 1.0))
        .collect();
    let snapshots: Vec<_> = snapshots.into_iter().map(|s| s.with_importance(importance.clone())).collect();

    for method in TrackingMethod::ALL {
        let events = track_communities(&snapshots, &TrackingConfig::new(method))?;
        let summary: Vec<String> = events
            .iter()
            .map(|e| format!("{}:{:?}->{:?} {:?}", e.snapshot_i, e.community_i, e.community_j, e.kind))
            .collect();
        println!("{:10} {}", method.name(), summary.join(", "));
    }

    let weekday = BTreeMap::from([(1, set(&["a", "b"])), (2, set(&["c", "x"])), (3, set(&["y"]))]);
    let weekend = BTreeMap::from([(1, set(&["a"])), (2, set(&["b", "y"])), (3, set(&["c", "z"]))]);
    let all: BTreeSet<_> = weekday.values().chain(weekend.values()).flatten().collect();
    let matrix = propagation_probability(&weekday, &weekend, all.len())?;
    for (from, to, p) in matrix.rows() {
        println!("C{from} -> C{to}: {p:.3}");
    }
    Ok(())
}
