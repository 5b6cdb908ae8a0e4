//! Compact undirected weighted graph.
//!
//! Nodes are dense indices `0..n`. Every caller that needs an identifier
//! tie-break (smallest segment id, smallest benchmark node) builds the graph
//! so that index order equals identifier order, which lets the search code
//! compare indices directly.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Adjacency in compressed sparse row form. Each undirected edge is stored
/// twice, once per endpoint, and adjacency lists are sorted by neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    edge_count: usize,
    total_weight: f64,
}

impl WeightedGraph {
    pub fn from_edges(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut degree = vec![0usize; node_count];
        for &(u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::Graph(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop on node {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Graph(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut slots = vec![(0usize, 0.0f64); offsets[node_count]];
        for &(u, v, w) in edges {
            slots[cursor[u]] = (v, w);
            cursor[u] += 1;
            slots[cursor[v]] = (u, w);
            cursor[v] += 1;
        }
        for u in 0..node_count {
            let row = &mut slots[offsets[u]..offsets[u + 1]];
            row.sort_by_key(|&(v, _)| v);
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(Error::Graph(format!("duplicate edge ({u}, {})", pair[0].0)));
            }
        }

        let total_weight = edges.iter().map(|e| e.2).sum();
        let (targets, weights) = slots.into_iter().unzip();
        Ok(Self {
            offsets,
            targets,
            weights,
            edge_count: edges.len(),
            total_weight,
        })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sum of all edge weights, `m` in the modularity formula.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_ids(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Weighted degree.
    pub fn strength(&self, u: usize) -> f64 {
        self.weights[self.offsets[u]..self.offsets[u + 1]].iter().sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let row = self.neighbor_ids(u);
        row.binary_search(&v)
            .ok()
            .map(|i| self.weights[self.offsets[u] + i])
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Copy of this graph with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let edges: Vec<_> = self.edges().map(|(u, v, w)| (u, v, w * factor)).collect();
        Self::from_edges(self.node_count(), &edges).expect("scaling preserves validity")
    }

    /// Copy without the edges whose weight is not strictly positive.
    pub fn without_zero_weights(&self) -> Self {
        let edges: Vec<_> = self.edges().filter(|e| e.2 > 0.0).collect();
        Self::from_edges(self.node_count(), &edges).expect("filtering preserves validity")
    }

    /// Component label per node, labels numbered in order of their smallest node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut next = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbor_ids(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Sorted nodes of the largest connected component. Equal sizes go to the
    /// component holding the smallest node index.
    pub fn largest_component(&self) -> Vec<usize> {
        let labels = self.components();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &l in &labels {
            sizes[l] += 1;
        }
        // labels are numbered by smallest member, so the first maximum wins ties
        let Some(best) = (0..count).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))) else {
            return Vec::new();
        };
        (0..self.node_count()).filter(|&u| labels[u] == best).collect()
    }

    /// Induced subgraph on `nodes` (which must be sorted and unique). Node `i`
    /// of the result is `nodes[i]` of `self`, so index order is preserved.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for (v, w) in self.neighbors(u) {
                let j = local[v];
                if j != usize::MAX && i < j {
                    edges.push((i, j, w));
                }
            }
        }
        Self::from_edges(nodes.len(), &edges).expect("induced subgraph is valid")
    }

    /// Hop distances from `source`, `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in self.neighbor_ids(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> WeightedGraph {
        WeightedGraph::from_edges(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn builds_sorted_adjacency() {
        let g = WeightedGraph::from_edges(3, &[(2, 0, 0.5), (1, 0, 0.25)]).unwrap();
        assert_eq!(g.neighbor_ids(0), &[1, 2]);
        assert_eq!(g.strength(0), 0.75);
        assert_eq!(g.weight(2, 0), Some(0.5));
        assert_eq!(g.weight(1, 2), None);
        assert_eq!(g.edges().count(), 2);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }

    #[test]
    fn largest_component_tie_goes_to_smallest_member() {
        let g = WeightedGraph::from_edges(4, &[(2, 3, 1.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.largest_component(), vec![0, 1]);
        let g = two_triangles();
        assert_eq!(g.largest_component(), vec![0, 1, 2]);
        let g = WeightedGraph::from_edges(5, &[(3, 4, 1.0), (0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.largest_component(), vec![0, 1, 2]);
        let g = WeightedGraph::from_edges(5, &[(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(g.largest_component(), vec![2, 3, 4]);
    }

    #[test]
    fn induced_keeps_internal_edges() {
        let g = two_triangles();
        let sub = g.induced(&[3, 4, 5]);
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edge_count(), 3);
    }

    #[test]
    fn bfs_hops() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.bfs_distances(0), vec![Some(0), Some(1), Some(2), None]);
    }
}
