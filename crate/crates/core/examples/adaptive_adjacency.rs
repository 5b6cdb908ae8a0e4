//! Build the congestion subgraph of the busiest hour and fuse its feature
//! similarities with entropy weights.

use congestion::congestion_graph::CongestionGraphSequence;
use congestion::features::{build_adjacency, matrix_entropy, FeatureVariant};
use congestion::ingest::{aggregate_speeds, compute_tsi, free_flow_table};
use congestion::synthetic::{generate_city, CityConfig};

fn main() -> congestion::Result<()> {
    let city = generate_city(&CityConfig::default())?;
    let (free_flow, _) = free_flow_table(&city.records);
    let (tsi, _) = compute_tsi(&aggregate_speeds(&city.records, 3600)?, &free_flow)?;
    let sequence = CongestionGraphSequence::build(&tsi, &city.network, 0.7)?;
    let busiest = sequence.subgraphs.iter().max_by_key(|g| g.node_count()).unwrap();
    println!(
        "busiest snapshot t={}: {} congested segments, {} adjacencies",
        busiest.timestamp,
        busiest.node_count(),
        busiest.edge_count()
    );

    for variant in ["KDSF", "KDST", "KDS", "DS"] {
        let variant: FeatureVariant = variant.parse()?;
        let adjacency = build_adjacency(busiest, &city.network, &tsi, &variant)?;
        let parts: Vec<String> = adjacency
            .matrices
            .iter()
            .zip(&adjacency.weights)
            .map(|(m, w)| format!("{}: w={w:.3} H={:.3}", m.tag().letter(), matrix_entropy(m)))
            .collect();
        let mean_edge: f64 = busiest.edges.iter().map(|&(u, v)| adjacency.get(u, v)).sum::<f64>()
            / busiest.edge_count().max(1) as f64;
        println!("{:5} mean edge weight {mean_edge:.3} | {}", variant.name(), parts.join("  "));
    }
    Ok(())
}
