use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dominance::{attribute_values, build_pointer_dag, find_local_leaders, ValuedGraph};
use super::forest::{clamp_k, lbfs_link_leaders, LeaderForest};
use crate::graph::WeightedGraph;
use crate::metrics::modularity;

/// Node → community assignment produced by the local search.
///
/// Communities are numbered in center-ranking order, so community 0 holds
/// the strongest center.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub community_of: Vec<usize>,
    /// Center node per community.
    pub centers: Vec<usize>,
    /// Bottleneck level per community, 1 = most severe.
    pub levels: Vec<usize>,
    /// Center score (`value * delta`) per community.
    pub scores: Vec<f64>,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.centers.len()
    }

    pub fn is_center(&self, node: usize) -> bool {
        self.centers[self.community_of[node]] == node
    }

    pub fn level_of(&self, node: usize) -> usize {
        self.levels[self.community_of[node]]
    }
}

/// Quantile bin of each rank among `count` ranked items into `levels` bins.
fn quantile_levels(count: usize, levels: usize) -> Vec<usize> {
    let levels = levels.max(1);
    (0..count).map(|rank| rank * levels / count + 1).collect()
}

/// Reusable state for turning a center set into a partition.
pub(crate) struct Assigner<'a> {
    forest: &'a LeaderForest,
    leader_of: Vec<usize>,
    levels: usize,
}

impl<'a> Assigner<'a> {
    pub(crate) fn new(vg: &ValuedGraph<'_>, forest: &'a LeaderForest, levels: usize) -> Self {
        Self {
            forest,
            leader_of: vg.leader_of(),
            levels,
        }
    }

    fn community_of(&self, centers: &[usize]) -> Vec<usize> {
        let n = self.leader_of.len();
        let mut community_of_leader = vec![usize::MAX; n];
        for (c, &center) in centers.iter().enumerate() {
            community_of_leader[center] = c;
        }
        // parents precede children in forest order, so one pass resolves chains
        for &leader in self.forest.leaders() {
            if community_of_leader[leader] != usize::MAX {
                continue;
            }
            community_of_leader[leader] = match self.forest.parent(leader) {
                Some(parent) => community_of_leader[parent],
                // unselected root of another component joins the top community
                None => 0,
            };
        }
        (0..n)
            .map(|u| community_of_leader[self.leader_of[u]])
            .collect()
    }

    pub(crate) fn partition(&self, centers: &[usize]) -> Partition {
        let community_of = self.community_of(centers);
        let centers = centers.to_vec();
        Partition {
            community_of,
            levels: quantile_levels(centers.len(), self.levels),
            scores: centers.iter().map(|&c| self.forest.score(c)).collect(),
            centers,
        }
    }
}

/// Map every node to a community: nodes follow pointers to their leader,
/// leaders follow forest links up to the first selected center.
pub fn assign_partition(
    vg: &ValuedGraph<'_>,
    forest: &LeaderForest,
    centers: &[usize],
    levels: usize,
) -> Partition {
    Assigner::new(vg, forest, levels).partition(centers)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// `(k, modularity)` for each candidate, in candidate order.
    pub scores: Vec<(usize, Option<f64>)>,
    pub best_k: usize,
    pub modularity: Option<f64>,
    pub partition: Partition,
    pub elapsed_ms: f64,
}

fn better(candidate: Option<f64>, incumbent: Option<f64>) -> bool {
    match (candidate, incumbent) {
        (Some(c), Some(i)) => c > i,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Evaluate modularity for each candidate center count and keep the best.
/// Ties go to the smaller `k`.
pub fn modularity_sweep(
    vg: &ValuedGraph<'_>,
    forest: &LeaderForest,
    candidate_ks: &[usize],
    levels: usize,
) -> SweepResult {
    let start = Instant::now();
    let graph = vg.graph();
    let assigner = Assigner::new(vg, forest, levels);
    let ranking = forest.center_ranking();

    let mut ks: Vec<usize> = candidate_ks.iter().map(|&k| clamp_k(forest, k)).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        ks.push(clamp_k(forest, 1));
    }

    let scores: Vec<(usize, Option<f64>)> = ks
        .par_iter()
        .map(|&k| {
            let community_of = assigner.community_of(&ranking[..k]);
            (k, modularity(graph, &community_of))
        })
        .collect();

    let (best_k, best_q) = scores
        .iter()
        .fold((ks[0], scores[0].1), |(bk, bq), &(k, q)| {
            if better(q, bq) {
                (k, q)
            } else {
                (bk, bq)
            }
        });
    let partition = assigner.partition(&ranking[..best_k]);
    SweepResult {
        scores,
        best_k,
        modularity: best_q,
        partition,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Upper bound of the default candidate grid `1..=min(leaders, k_max)`.
    pub k_max: usize,
    /// Explicit candidate center counts; overrides the default grid.
    pub candidate_ks: Option<Vec<usize>>,
    /// Number of bottleneck levels.
    pub levels: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k_max: 150,
            candidate_ks: None,
            levels: 4,
        }
    }
}

impl SearchConfig {
    pub fn candidates(&self, leader_count: usize) -> Vec<usize> {
        match &self.candidate_ks {
            Some(ks) if !ks.is_empty() => ks.clone(),
            _ => (1..=leader_count.min(self.k_max).max(1)).collect(),
        }
    }
}

/// Result of running the full search on one weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Nodes of the input graph that make up the analysed component, sorted.
    pub nodes: Vec<usize>,
    /// Sweep over the component; community indices refer to positions in `nodes`.
    pub sweep: Option<SweepResult>,
    pub leader_count: usize,
    pub elapsed_ms: f64,
}

impl Detection {
    /// Community per input node, `None` for nodes outside the component.
    pub fn labels(&self, node_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; node_count];
        if let Some(sweep) = &self.sweep {
            for (local, &node) in self.nodes.iter().enumerate() {
                out[node] = Some(sweep.partition.community_of[local]);
            }
        }
        out
    }

    /// Input-graph node of each community center.
    pub fn centers(&self) -> Vec<usize> {
        self.sweep
            .as_ref()
            .map(|s| s.partition.centers.iter().map(|&c| self.nodes[c]).collect())
            .unwrap_or_default()
    }
}

/// Drop non-positive edges, keep the largest connected component, then run
/// value attribution, pointer construction, leader linking and the sweep.
pub fn detect_weighted(graph: &WeightedGraph, config: &SearchConfig) -> Detection {
    let start = Instant::now();
    if graph.node_count() == 0 {
        return Detection {
            nodes: Vec::new(),
            sweep: None,
            leader_count: 0,
            elapsed_ms: 0.0,
        };
    }
    let positive = graph.without_zero_weights();
    let nodes = positive.largest_component();
    let component = positive.induced(&nodes);
    let vg = build_pointer_dag(attribute_values(&component));
    let leaders = find_local_leaders(&vg);
    let forest = lbfs_link_leaders(&vg, &leaders);
    let sweep = modularity_sweep(&vg, &forest, &config.candidates(forest.len()), config.levels);
    Detection {
        nodes,
        sweep: Some(sweep),
        leader_count: forest.len(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

#[cfg(test)]
mod tests {
    use super::super::forest::select_centers;
    use super::*;

    fn two_triangles() -> WeightedGraph {
        WeightedGraph::from_edges(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn path_follows_pointer_chain() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let vg = build_pointer_dag(attribute_values(&g));
        let forest = lbfs_link_leaders(&vg, &find_local_leaders(&vg));
        let p = assign_partition(&vg, &forest, &[1], 4);
        assert_eq!(p.community_of, vec![0, 0, 0]);
        assert_eq!(p.centers, vec![1]);
    }

    #[test]
    fn two_triangles_two_communities() {
        let g = two_triangles();
        let vg = build_pointer_dag(attribute_values(&g));
        let leaders = find_local_leaders(&vg);
        assert_eq!(leaders, vec![2, 5]);
        let forest = lbfs_link_leaders(&vg, &leaders);
        let centers = select_centers(&forest, 2);
        let p = assign_partition(&vg, &forest, &centers, 4);
        assert_eq!(p.community_of[0], p.community_of[1]);
        assert_eq!(p.community_of[1], p.community_of[2]);
        assert_eq!(p.community_of[3], p.community_of[4]);
        assert_ne!(p.community_of[0], p.community_of[3]);

        let sweep = modularity_sweep(&vg, &forest, &[1, 2], 4);
        assert_eq!(sweep.best_k, 2);
        assert_eq!(sweep.modularity, Some(0.5));
        assert_eq!(sweep.scores, vec![(1, Some(0.0)), (2, Some(0.5))]);
    }

    #[test]
    fn single_community_connected() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 1.0), (1, 3, 0.2)])
            .unwrap();
        let vg = build_pointer_dag(attribute_values(&g));
        let forest = lbfs_link_leaders(&vg, &find_local_leaders(&vg));
        let sweep = modularity_sweep(&vg, &forest, &[1], 4);
        assert_eq!(sweep.partition.community_count(), 1);
        assert!(sweep.modularity.unwrap().abs() < 1e-15);
    }

    #[test]
    fn quantile_levels_spread() {
        assert_eq!(quantile_levels(8, 4), vec![1, 1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(quantile_levels(2, 4), vec![1, 3]);
        assert_eq!(quantile_levels(1, 4), vec![1]);
    }

    #[test]
    fn detect_single_node() {
        let g = WeightedGraph::from_edges(1, &[]).unwrap();
        let d = detect_weighted(&g, &SearchConfig::default());
        let sweep = d.sweep.unwrap();
        assert_eq!(sweep.partition.community_count(), 1);
        assert_eq!(sweep.modularity, None);
    }

    #[test]
    fn detect_empty() {
        let g = WeightedGraph::from_edges(0, &[]).unwrap();
        assert!(detect_weighted(&g, &SearchConfig::default()).sweep.is_none());
    }
}
