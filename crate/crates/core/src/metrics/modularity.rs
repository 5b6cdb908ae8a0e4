use crate::graph::WeightedGraph;

/// Newman–Girvan modularity of a weighted partition.
///
/// `community_of[u]` is the community index of node `u`; indices need not be
/// contiguous. Returns `None` when the graph carries no edge weight, where
/// the score is undefined.
pub fn modularity(graph: &WeightedGraph, community_of: &[usize]) -> Option<f64> {
    assert_eq!(
        community_of.len(),
        graph.node_count(),
        "partition must cover every node"
    );
    let m = graph.total_weight();
    if m <= 0.0 {
        return None;
    }
    let slots = community_of.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0f64; slots];
    let mut total = vec![0.0f64; slots];
    for u in 0..graph.node_count() {
        let cu = community_of[u];
        for (v, w) in graph.neighbors(u) {
            total[cu] += w;
            if community_of[v] == cu {
                internal[cu] += w;
            }
        }
    }
    let two_m = 2.0 * m;
    let q = internal
        .iter()
        .zip(&total)
        .map(|(&inside, &tot)| inside / two_m - (tot / two_m).powi(2))
        .sum();
    Some(q)
}
