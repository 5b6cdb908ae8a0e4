//! Walk through the local search on two weighted cliques joined by a weak
//! bridge: values, pointers, leaders, the leader forest and the sweep.

use congestion::graph::WeightedGraph;
use congestion::local_search::{
    attribute_values, build_pointer_dag, find_local_leaders, lbfs_link_leaders, modularity_sweep, SearchConfig,
};

fn main() -> congestion::Result<()> {
    let mut edges = Vec::new();
    for offset in [0, 5] {
        for i in 0..5 {
            for j in i + 1..5 {
                let hub = i == 0 || j == 0;
                edges.push((offset + i, offset + j, if hub { 1.0 } else { 0.6 }));
            }
        }
    }
    edges.push((4, 5, 0.1));
    let graph = WeightedGraph::from_edges(10, &edges)?;

    let vg = build_pointer_dag(attribute_values(&graph));
    for u in 0..graph.node_count() {
        println!("node {u}: x={:.2} -> {:?}", vg.value(u), vg.pointer(u));
    }
    let leaders = find_local_leaders(&vg);
    let forest = lbfs_link_leaders(&vg, &leaders);
    for &l in forest.leaders() {
        println!("leader {l}: parent {:?} delta {} score {:.2}", forest.parent(l), forest.delta(l), forest.score(l));
    }

    let config = SearchConfig::default();
    let sweep = modularity_sweep(&vg, &forest, &config.candidates(forest.len()), config.levels);
    for (k, q) in &sweep.scores {
        println!("k={k} Q={q:?}");
    }
    println!(
        "best k={} centers={:?} levels={:?} communities={:?}",
        sweep.best_k, sweep.partition.centers, sweep.partition.levels, sweep.partition.community_of
    );
    Ok(())
}
