//! Generate a synthetic city, then run ingest, detect and track on it.
//!
//! ```text
//! cargo run --release --example end_to_end -- /tmp/congestion-demo
//! ```

use std::path::PathBuf;

use congestion::pipeline::{cmd_detect, cmd_ingest, cmd_track, RunConfig};
use congestion::synthetic::{generate_city, CityConfig};

fn main() -> congestion::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("congestion-demo"), PathBuf::from);
    let city = generate_city(&CityConfig::default())?;
    let (network, speeds) = city.write(&dir.join("input"))?;

    let config = RunConfig {
        speeds: Some(speeds),
        network: Some(network),
        interval: 3600,
        out_dir: dir.join("out"),
        ..RunConfig::default()
    };
    let summary = cmd_ingest(&config)?;
    println!(
        "{} segments, {} bins ({:?} per day), coverage {:.1}%",
        summary.segments,
        summary.bins,
        summary.bins_per_day,
        100.0 * summary.coverage
    );

    let detected = cmd_detect(&config)?;
    for (p, w) in detected.partitions.iter().zip(&detected.weights) {
        if p.k() > 0 {
            println!(
                "t={} k={} Q={:.3} weights={:.3?} centers={}",
                p.timestamp,
                p.k(),
                p.modularity.unwrap_or(f64::NAN),
                w,
                p.centers.join(",")
            );
        }
    }

    let tracked = cmd_track(&config)?;
    println!("{} tracking events -> {}", tracked.event_count, tracked.events_path.display());
    if let Some(m) = tracked.transitions {
        for (a, b, p) in m.rows() {
            println!("C{a} -> C{b}: {p:.3}");
        }
    }
    Ok(())
}
