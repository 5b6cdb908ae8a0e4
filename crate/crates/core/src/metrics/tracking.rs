//! Threshold-based matching of communities between consecutive snapshots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::similarity::{
    sim_ged, sim_icem, sim_jaccard, sim_maxratio, sim_overlap, sim_transition_vectors,
    transition_vector, IcemClass,
};
use crate::error::{Error, Result};

/// The six baseline similarity measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackingMethod {
    /// Jaccard coefficient, match when the score exceeds the threshold.
    Jaccard,
    /// Shared fraction of the larger community.
    MaxRatio,
    /// Importance-weighted inclusion.
    Ged,
    /// Harmonic overlap of transition-probability vectors.
    Transition,
    /// Two-directional inclusion with partial/very-similar classes.
    Icem,
    /// Overlap coefficient.
    Overlap,
}

impl TrackingMethod {
    pub const ALL: [TrackingMethod; 6] = [
        TrackingMethod::Jaccard,
        TrackingMethod::MaxRatio,
        TrackingMethod::Ged,
        TrackingMethod::Transition,
        TrackingMethod::Icem,
        TrackingMethod::Overlap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrackingMethod::Jaccard => "jaccard",
            TrackingMethod::MaxRatio => "maxratio",
            TrackingMethod::Ged => "ged",
            TrackingMethod::Transition => "transition",
            TrackingMethod::Icem => "icem",
            TrackingMethod::Overlap => "overlap",
        }
    }

    /// Default matching threshold for the method.
    pub fn default_threshold(self) -> f64 {
        match self {
            TrackingMethod::Jaccard => 0.1,
            TrackingMethod::MaxRatio => 0.3,
            TrackingMethod::Ged => 0.1,
            TrackingMethod::Transition => 0.3,
            TrackingMethod::Icem => 0.1,
            TrackingMethod::Overlap => 0.5,
        }
    }
}

impl fmt::Display for TrackingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrackingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "jaccard" | "greene" => Ok(Self::Jaccard),
            "maxratio" | "takaffoli" => Ok(Self::MaxRatio),
            "ged" => Ok(Self::Ged),
            "transition" | "tajeuna" => Ok(Self::Transition),
            "icem" => Ok(Self::Icem),
            "overlap" | "mazza" => Ok(Self::Overlap),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingConfig {
    pub method: TrackingMethod,
    /// Main threshold (`k`); for ICEM this is `k1`.
    pub threshold: f64,
    /// ICEM very-similar threshold `k2`.
    pub icem_k2: f64,
}

impl TrackingConfig {
    pub fn new(method: TrackingMethod) -> Self {
        Self {
            method,
            threshold: method.default_threshold(),
            icem_k2: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Continue,
    Merge,
    Split,
    Birth,
    Death,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Continue => "continue",
            EventKind::Merge => "merge",
            EventKind::Split => "split",
            EventKind::Birth => "birth",
            EventKind::Death => "death",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchEvent<C> {
    pub snapshot_i: usize,
    pub community_i: Option<C>,
    pub snapshot_j: usize,
    pub community_j: Option<C>,
    pub score: f64,
    pub kind: EventKind,
}

/// The communities of one snapshot, with per-node importance used by GED.
#[derive(Debug, Clone)]
pub struct SnapshotCommunities<K: Ord, C> {
    pub snapshot: usize,
    pub communities: Vec<(C, BTreeSet<K>)>,
    pub importance: BTreeMap<K, f64>,
}

impl<K: Ord + Clone, C> SnapshotCommunities<K, C> {
    pub fn new(snapshot: usize, communities: Vec<(C, BTreeSet<K>)>) -> Self {
        Self {
            snapshot,
            communities,
            importance: BTreeMap::new(),
        }
    }

    pub fn with_importance(mut self, importance: BTreeMap<K, f64>) -> Self {
        self.importance = importance;
        self
    }
}

/// Score a candidate pair; `None` when the pair does not match.
fn score_pair<K: Ord, C>(
    config: &TrackingConfig,
    src: &SnapshotCommunities<K, C>,
    dst: &SnapshotCommunities<K, C>,
    i: usize,
    j: usize,
) -> Option<f64> {
    let a = &src.communities[i].1;
    let b = &dst.communities[j].1;
    let k = config.threshold;
    match config.method {
        TrackingMethod::Jaccard => Some(sim_jaccard(a, b)).filter(|&s| s > k),
        TrackingMethod::MaxRatio => Some(sim_maxratio(a, b, k)).filter(|&s| s > 0.0),
        TrackingMethod::Ged => Some(sim_ged(a, b, &src.importance)).filter(|&s| s >= k && s > 0.0),
        TrackingMethod::Transition => {
            let reference: Vec<&BTreeSet<K>> = src
                .communities
                .iter()
                .chain(&dst.communities)
                .map(|(_, s)| s)
                .collect();
            let va = transition_vector(a, &reference);
            let vb = transition_vector(b, &reference);
            Some(sim_transition_vectors(&va, &vb, k)).filter(|&s| s > 0.0)
        }
        TrackingMethod::Icem => {
            let s = sim_icem(a, b, k, config.icem_k2);
            (s.class != IcemClass::Dissimilar).then_some(s.forward)
        }
        TrackingMethod::Overlap => Some(sim_overlap(a, b)).filter(|&s| s >= k && s > 0.0),
    }
}

fn match_pair<K: Ord, C: Clone>(
    config: &TrackingConfig,
    src: &SnapshotCommunities<K, C>,
    dst: &SnapshotCommunities<K, C>,
) -> Vec<MatchEvent<C>> {
    // only pairs that share a node can score above zero under any measure
    let mut owner: BTreeMap<&K, usize> = BTreeMap::new();
    for (j, (_, members)) in dst.communities.iter().enumerate() {
        for node in members {
            owner.insert(node, j);
        }
    }
    let mut matches: Vec<(usize, usize, f64)> = Vec::new();
    for (i, (_, members)) in src.communities.iter().enumerate() {
        let candidates: BTreeSet<usize> = members.iter().filter_map(|n| owner.get(n).copied()).collect();
        for j in candidates {
            if let Some(score) = score_pair(config, src, dst, i, j) {
                matches.push((i, j, score));
            }
        }
    }

    let mut out_degree = vec![0usize; src.communities.len()];
    let mut in_degree = vec![0usize; dst.communities.len()];
    for &(i, j, _) in &matches {
        out_degree[i] += 1;
        in_degree[j] += 1;
    }

    let mut events: Vec<MatchEvent<C>> = matches
        .iter()
        .map(|&(i, j, score)| MatchEvent {
            snapshot_i: src.snapshot,
            community_i: Some(src.communities[i].0.clone()),
            snapshot_j: dst.snapshot,
            community_j: Some(dst.communities[j].0.clone()),
            score,
            kind: if out_degree[i] > 1 {
                EventKind::Split
            } else if in_degree[j] > 1 {
                EventKind::Merge
            } else {
                EventKind::Continue
            },
        })
        .collect();
    for (i, (id, _)) in src.communities.iter().enumerate() {
        if out_degree[i] == 0 {
            events.push(MatchEvent {
                snapshot_i: src.snapshot,
                community_i: Some(id.clone()),
                snapshot_j: dst.snapshot,
                community_j: None,
                score: 0.0,
                kind: EventKind::Death,
            });
        }
    }
    for (j, (id, _)) in dst.communities.iter().enumerate() {
        if in_degree[j] == 0 {
            events.push(MatchEvent {
                snapshot_i: src.snapshot,
                community_i: None,
                snapshot_j: dst.snapshot,
                community_j: Some(id.clone()),
                score: 0.0,
                kind: EventKind::Birth,
            });
        }
    }
    events
}

/// Match every pair of consecutive snapshots and classify the outcome.
pub fn track_communities<K, C>(
    snapshots: &[SnapshotCommunities<K, C>],
    config: &TrackingConfig,
) -> Result<Vec<MatchEvent<C>>>
where
    K: Ord + Sync,
    C: Clone + Send + Sync,
{
    if snapshots.len() < 2 {
        return Err(Error::TooFewSnapshots(snapshots.len()));
    }
    let per_pair: Vec<Vec<MatchEvent<C>>> = snapshots
        .par_windows(2)
        .map(|w| match_pair(config, &w[0], &w[1]))
        .collect();
    Ok(per_pair.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(index: usize, groups: &[&[u32]]) -> SnapshotCommunities<u32, usize> {
        SnapshotCommunities::new(
            index,
            groups
                .iter()
                .enumerate()
                .map(|(c, g)| (c, g.iter().copied().collect()))
                .collect(),
        )
    }

    #[test]
    fn identical_partitions_continue() {
        let a = snap(0, &[&[0, 1, 2], &[3, 4, 5]]);
        let b = snap(1, &[&[0, 1, 2], &[3, 4, 5]]);
        for method in TrackingMethod::ALL {
            let events = track_communities(&[a.clone(), b.clone()], &TrackingConfig::new(method)).unwrap();
            assert_eq!(events.len(), 2, "{method}");
            for e in events {
                assert_eq!(e.kind, EventKind::Continue, "{method}");
                if method != TrackingMethod::Ged {
                    assert!((e.score - 1.0).abs() < 1e-12, "{method}: {}", e.score);
                }
            }
        }
    }

    #[test]
    fn vanished_community_dies() {
        let a = snap(0, &[&[0, 1, 2], &[3, 4, 5]]);
        let b = snap(1, &[&[0, 1, 2]]);
        let events = track_communities(&[a, b], &TrackingConfig::new(TrackingMethod::Jaccard)).unwrap();
        assert!(events
            .iter()
            .any(|e| e.kind == EventKind::Death && e.community_i == Some(1)));
    }

    #[test]
    fn split_into_halves() {
        let a = snap(0, &[&[0, 1, 2, 3, 4, 5]]);
        let b = snap(1, &[&[0, 1, 2], &[3, 4, 5]]);
        let events = track_communities(&[a, b], &TrackingConfig::new(TrackingMethod::Jaccard)).unwrap();
        let splits: Vec<_> = events.iter().filter(|e| e.kind == EventKind::Split).collect();
        assert_eq!(splits.len(), 2);
        assert!(splits.iter().all(|e| e.score == 0.5));
    }

    #[test]
    fn merge_and_birth() {
        let a = snap(0, &[&[0, 1, 2], &[3, 4, 5]]);
        let b = snap(1, &[&[0, 1, 2, 3, 4, 5], &[9, 10]]);
        let events = track_communities(&[a, b], &TrackingConfig::new(TrackingMethod::Jaccard)).unwrap();
        assert_eq!(events.iter().filter(|e| e.kind == EventKind::Merge).count(), 2);
        assert_eq!(events.iter().filter(|e| e.kind == EventKind::Birth).count(), 1);
    }

    #[test]
    fn single_snapshot_errors() {
        let a = snap(0, &[&[0]]);
        assert!(matches!(
            track_communities(&[a], &TrackingConfig::new(TrackingMethod::Jaccard)),
            Err(Error::TooFewSnapshots(1))
        ));
    }

    #[test]
    fn method_names_parse() {
        for m in TrackingMethod::ALL {
            assert_eq!(m.name().parse::<TrackingMethod>().unwrap(), m);
        }
        assert!("louvain".parse::<TrackingMethod>().is_err());
    }
}
