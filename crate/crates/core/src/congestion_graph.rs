//! Per-bin graphs of congested road segments.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::ingest::{RoadNetwork, TsiMatrix};

pub const DEFAULT_THRESHOLD: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct CongestionInstance {
    pub segment_id: String,
    pub bin: usize,
    pub tsi: f64,
}

/// Congested segments of one bin. Nodes are sorted by segment id, edges
/// join network-adjacent congested segments and are stored as sorted
/// `(u, v)` index pairs with `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionSubgraph {
    pub bin: usize,
    pub timestamp: i64,
    pub nodes: Vec<String>,
    pub tsi: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
    /// Edge weights aligned with `edges`, set from the fused adjacency.
    pub weights: Option<Vec<f64>>,
}

impl CongestionSubgraph {
    pub fn empty(bin: usize, timestamp: i64) -> Self {
        Self {
            bin,
            timestamp,
            nodes: Vec::new(),
            tsi: Vec::new(),
            edges: Vec::new(),
            weights: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    /// Number of congested neighbors per node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.edges.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument("edge weights must lie in [0, 1]".into()));
        }
        self.weights = Some(weights);
        Ok(())
    }

    /// Weighted graph over node indices; unweighted subgraphs use weight 1.
    pub fn graph(&self) -> WeightedGraph {
        let edges: Vec<(usize, usize, f64)> = match &self.weights {
            Some(w) => self.edges.iter().zip(w).map(|(&(u, v), &w)| (u, v, w)).collect(),
            None => self.edges.iter().map(|&(u, v)| (u, v, 1.0)).collect(),
        };
        WeightedGraph::from_edges(self.nodes.len(), &edges).expect("subgraph edges are simple")
    }

    /// Subgraph induced by sorted node indices.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if map[u] != usize::MAX && map[v] != usize::MAX {
                edges.push((map[u], map[v]));
                if let Some(w) = &self.weights {
                    weights.push(w[i]);
                }
            }
        }
        Self {
            bin: self.bin,
            timestamp: self.timestamp,
            nodes: keep.iter().map(|&i| self.nodes[i].clone()).collect(),
            tsi: keep.iter().map(|&i| self.tsi[i]).collect(),
            edges,
            weights: self.weights.as_ref().map(|_| weights),
        }
    }

    /// Largest connected component; ties go to the component holding the
    /// lexicographically smallest segment id.
    pub fn largest_connected_component(&self) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        let unit: Vec<(usize, usize, f64)> = self.edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        let topology = WeightedGraph::from_edges(self.nodes.len(), &unit).expect("subgraph edges are simple");
        self.induced(&topology.largest_component())
    }
}

/// Congested cells of every bin: TSI present and at least `threshold`.
pub fn extract_instances(tsi: &TsiMatrix, threshold: f64) -> Result<Vec<Vec<CongestionInstance>>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} must lie in [0, 1]")));
    }
    Ok((0..tsi.bin_count())
        .map(|bin| {
            (0..tsi.segment_count())
                .filter_map(|s| {
                    let v = tsi.get(s, bin)?;
                    (v >= threshold).then(|| CongestionInstance {
                        segment_id: tsi.segment_ids()[s].clone(),
                        bin,
                        tsi: v,
                    })
                })
                .collect()
        })
        .collect())
}

/// Build one bin's subgraph; instances on segments absent from the
/// network are dropped.
pub fn build_subgraph(
    bin: usize,
    timestamp: i64,
    instances: &[CongestionInstance],
    network: &RoadNetwork,
) -> CongestionSubgraph {
    let mut found: Vec<(usize, &CongestionInstance)> = Vec::new();
    for inst in instances {
        match network.index_of(&inst.segment_id) {
            Some(i) => found.push((i, inst)),
            None => log::warn!("segment {} is not in the road network, dropped", inst.segment_id),
        }
    }
    found.sort_by_key(|&(i, _)| i);
    found.dedup_by_key(|&mut (i, _)| i);
    let mut local = vec![usize::MAX; network.len()];
    for (k, &(i, _)) in found.iter().enumerate() {
        local[i] = k;
    }
    let mut edges = Vec::new();
    for (k, &(i, _)) in found.iter().enumerate() {
        for &j in network.neighbors(i) {
            let other = local[j];
            if other != usize::MAX && other > k {
                edges.push((k, other));
            }
        }
    }
    edges.sort_unstable();
    CongestionSubgraph {
        bin,
        timestamp,
        nodes: found.iter().map(|(_, inst)| inst.segment_id.clone()).collect(),
        tsi: found.iter().map(|(_, inst)| inst.tsi).collect(),
        edges,
        weights: None,
    }
}

/// One subgraph per bin in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionGraphSequence {
    pub subgraphs: Vec<CongestionSubgraph>,
}

impl CongestionGraphSequence {
    pub fn build(tsi: &TsiMatrix, network: &RoadNetwork, threshold: f64) -> Result<Self> {
        let instances = extract_instances(tsi, threshold)?;
        let subgraphs = instances
            .par_iter()
            .enumerate()
            .map(|(bin, inst)| build_subgraph(bin, tsi.bin_start(bin), inst, network))
            .collect();
        Ok(Self { subgraphs })
    }

    pub fn len(&self) -> usize {
        self.subgraphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgraphs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Crs, Segment, SegmentGrid};

    fn network() -> RoadNetwork {
        let seg = |id: &str, a: &str, b: &str, x: f64| Segment {
            id: id.into(),
            junctions: [a.into(), b.into()],
            polyline: vec![[x, 0.0], [x + 10.0, 0.0]],
        };
        RoadNetwork::new(
            Crs {
                name: "local".into(),
                units: "m".into(),
            },
            vec![
                seg("A", "1", "2", 0.0),
                seg("B", "2", "3", 10.0),
                seg("C", "3", "4", 20.0),
                seg("D", "7", "8", 50.0),
                seg("E", "8", "9", 60.0),
            ],
        )
        .unwrap()
    }

    fn tsi(values: &[(&str, f64)]) -> TsiMatrix {
        let ids: Vec<String> = values.iter().map(|(s, _)| s.to_string()).collect();
        let mut g = SegmentGrid::new(ids, 0, 300, 1).unwrap();
        for (i, (_, v)) in values.iter().enumerate() {
            g.set(i, 0, *v);
        }
        TsiMatrix(g)
    }

    #[test]
    fn threshold_is_inclusive() {
        let inst = extract_instances(&tsi(&[("A", 0.7), ("B", 0.69)]), 0.7).unwrap();
        assert_eq!(inst[0].len(), 1);
        assert_eq!(inst[0][0].segment_id, "A");
    }

    #[test]
    fn zero_threshold_takes_everything() {
        let inst = extract_instances(&tsi(&[("A", 0.0), ("B", 0.2)]), 0.0).unwrap();
        assert_eq!(inst[0].len(), 2);
    }

    #[test]
    fn edges_follow_road_adjacency() {
        let net = network();
        let t = tsi(&[("A", 0.9), ("B", 0.8), ("C", 0.1), ("D", 0.9), ("X", 0.9)]);
        let seq = CongestionGraphSequence::build(&t, &net, 0.7).unwrap();
        let g = &seq.subgraphs[0];
        assert_eq!(g.nodes, vec!["A", "B", "D"]);
        assert_eq!(g.edges, vec![(0, 1)]);
        assert_eq!(g.degrees(), vec![1, 1, 0]);
    }

    #[test]
    fn lcc_tie_takes_smallest_id() {
        let net = network();
        let t = tsi(&[("A", 0.9), ("B", 0.9), ("D", 0.9), ("E", 0.9)]);
        let seq = CongestionGraphSequence::build(&t, &net, 0.7).unwrap();
        let lcc = seq.subgraphs[0].largest_connected_component();
        assert_eq!(lcc.nodes, vec!["A", "B"]);
        let t = tsi(&[("A", 0.9), ("B", 0.9), ("C", 0.9), ("D", 0.9), ("E", 0.9)]);
        let seq = CongestionGraphSequence::build(&t, &net, 0.7).unwrap();
        assert_eq!(seq.subgraphs[0].largest_connected_component().nodes, vec!["A", "B", "C"]);
    }

    #[test]
    fn weights_validated() {
        let mut g = build_subgraph(
            0,
            0,
            &extract_instances(&tsi(&[("A", 0.9), ("B", 0.9)]), 0.7).unwrap()[0],
            &network(),
        );
        assert!(g.set_weights(vec![0.5, 0.5]).is_err());
        assert!(g.set_weights(vec![1.5]).is_err());
        g.set_weights(vec![0.25]).unwrap();
        assert_eq!(g.graph().total_weight(), 0.25);
    }
}
