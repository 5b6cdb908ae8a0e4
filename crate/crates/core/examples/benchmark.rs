//! Generate a dynamic benchmark per scenario and score the local search
//! against its planted communities.
//!
//! ```text
//! cargo run --release --example benchmark -- 2000 3
//! ```

use congestion::bench_gen::{evaluate, generate, BenchmarkConfig, EdgeWeighting, Scenario};
use congestion::local_search::SearchConfig;

fn main() -> congestion::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(2000);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    for scenario in Scenario::ALL {
        let bench = generate(&BenchmarkConfig::new(scenario, n, seed))?;
        let reports = evaluate(&bench, EdgeWeighting::Overlap, &SearchConfig::default())?;
        println!("{scenario}: {} events", bench.events.len());
        for r in &reports {
            println!(
                "  snapshot {} nodes {} edges {} centers {} Q {:.3} NMI {:.3}",
                r.snapshot,
                r.nodes,
                r.edges,
                r.community_centers,
                r.modularity.unwrap_or(f64::NAN),
                r.nmi
            );
        }
    }
    Ok(())
}
