use super::partition::{detect_weighted, Detection, SearchConfig};
use crate::congestion_graph::CongestionSubgraph;
use crate::error::{Error, Result};
use crate::features::AdaptiveAdjacency;
use crate::graph::WeightedGraph;

/// Communities of one congestion snapshot, keyed by segment id.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotPartition {
    pub timestamp: i64,
    /// Segments of the analysed component, sorted.
    pub segments: Vec<String>,
    /// Community per entry of `segments`.
    pub community: Vec<usize>,
    /// Center segment per community.
    pub centers: Vec<String>,
    /// Bottleneck level per community, 1 = most severe.
    pub levels: Vec<usize>,
    pub modularity: Option<f64>,
    pub elapsed_ms: f64,
}

impl SnapshotPartition {
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn is_center(&self, index: usize) -> bool {
        self.centers[self.community[index]] == self.segments[index]
    }

    pub fn level(&self, index: usize) -> usize {
        self.levels[self.community[index]]
    }

    fn from_detection(subgraph: &CongestionSubgraph, detection: &Detection) -> Self {
        let segments = detection.nodes.iter().map(|&i| subgraph.nodes[i].clone()).collect();
        match &detection.sweep {
            Some(sweep) => Self {
                timestamp: subgraph.timestamp,
                segments,
                community: sweep.partition.community_of.clone(),
                centers: detection.centers().iter().map(|&c| subgraph.nodes[c].clone()).collect(),
                levels: sweep.partition.levels.clone(),
                modularity: sweep.modularity,
                elapsed_ms: detection.elapsed_ms,
            },
            None => Self {
                timestamp: subgraph.timestamp,
                segments,
                community: Vec::new(),
                centers: Vec::new(),
                levels: Vec::new(),
                modularity: None,
                elapsed_ms: detection.elapsed_ms,
            },
        }
    }
}

/// Weight the subgraph's edges from the fused adjacency, then run the
/// search on the largest connected component of positive-weight edges.
pub fn detect_communities(
    subgraph: &CongestionSubgraph,
    adjacency: &AdaptiveAdjacency,
    config: &SearchConfig,
) -> Result<SnapshotPartition> {
    if adjacency.nodes != subgraph.nodes {
        return Err(Error::ShapeMismatch("adjacency nodes differ from subgraph nodes".into()));
    }
    let edges: Vec<(usize, usize, f64)> = subgraph
        .edges
        .iter()
        .map(|&(u, v)| (u, v, adjacency.get(u, v)))
        .collect();
    let graph = WeightedGraph::from_edges(subgraph.node_count(), &edges)?;
    let detection = detect_weighted(&graph, config);
    Ok(SnapshotPartition::from_detection(subgraph, &detection))
}

/// Run the search on a subgraph whose edge weights are already set.
pub fn detect_weighted_subgraph(subgraph: &CongestionSubgraph, config: &SearchConfig) -> SnapshotPartition {
    let detection = detect_weighted(&subgraph.graph(), config);
    SnapshotPartition::from_detection(subgraph, &detection)
}
