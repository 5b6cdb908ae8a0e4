use crate::graph::WeightedGraph;

/// A graph with a value per node and, once built, a pointer from each node
/// to its dominating neighbor.
#[derive(Debug, Clone)]
pub struct ValuedGraph<'g> {
    graph: &'g WeightedGraph,
    values: Vec<f64>,
    pointers: Vec<Option<usize>>,
}

impl<'g> ValuedGraph<'g> {
    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, u: usize) -> f64 {
        self.values[u]
    }

    pub fn pointers(&self) -> &[Option<usize>] {
        &self.pointers
    }

    pub fn pointer(&self, u: usize) -> Option<usize> {
        self.pointers[u]
    }

    /// Local leader reached from every node by following pointers.
    pub fn leader_of(&self) -> Vec<usize> {
        let n = self.values.len();
        let mut leader = vec![usize::MAX; n];
        let mut chain = Vec::new();
        for start in 0..n {
            let mut u = start;
            while leader[u] == usize::MAX {
                chain.push(u);
                match self.pointers[u] {
                    Some(v) => u = v,
                    None => {
                        leader[u] = u;
                        break;
                    }
                }
            }
            let found = leader[u];
            for w in chain.drain(..) {
                leader[w] = found;
            }
        }
        leader
    }
}

/// `x_u` = sum of the weights of the edges incident to `u`.
pub fn attribute_values(graph: &WeightedGraph) -> ValuedGraph<'_> {
    let values = (0..graph.node_count()).map(|u| graph.strength(u)).collect();
    ValuedGraph {
        graph,
        values,
        pointers: vec![None; graph.node_count()],
    }
}

/// Point every node at its largest-value neighbor when that neighbor
/// dominates it.
///
/// Among neighbors sharing the maximum value the smallest index is chosen.
/// A neighbor whose value equals the node's own only dominates when its
/// index is larger, so every pointer strictly increases `(value, index)` and
/// the result is acyclic.
pub fn build_pointer_dag(vg: ValuedGraph<'_>) -> ValuedGraph<'_> {
    let ValuedGraph { graph, values, .. } = vg;
    let pointers = (0..graph.node_count())
        .map(|u| {
            let best = graph
                .neighbor_ids(u)
                .iter()
                .map(|&v| values[v])
                .fold(f64::NEG_INFINITY, f64::max);
            if best < values[u] {
                return None;
            }
            let strict = best > values[u];
            graph
                .neighbor_ids(u)
                .iter()
                .copied()
                .find(|&v| values[v] == best && (strict || v > u))
        })
        .collect();
    ValuedGraph {
        graph,
        values,
        pointers,
    }
}

/// Nodes without an outgoing pointer, in index order. Isolated nodes lead
/// their own singleton domain.
pub fn find_local_leaders(vg: &ValuedGraph<'_>) -> Vec<usize> {
    (0..vg.values.len())
        .filter(|&u| vg.pointers[u].is_none())
        .collect()
}
