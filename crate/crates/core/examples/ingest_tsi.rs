//! Turn raw speed observations into a TSI matrix.

use congestion::ingest::{aggregate_speeds, compute_tsi, free_flow_table};
use congestion::synthetic::{generate_city, CityConfig};

fn main() -> congestion::Result<()> {
    let city = generate_city(&CityConfig { rows: 6, cols: 6, days: 1, interval: 300, ..CityConfig::default() })?;
    let speeds = aggregate_speeds(&city.records, 3600)?;
    let (free_flow, degenerate) = free_flow_table(&city.records);
    let (tsi, dropped) = compute_tsi(&speeds, &free_flow)?;
    println!(
        "{} records -> {} segments x {} hourly bins, {} degenerate, {} dropped",
        city.records.len(),
        tsi.segment_count(),
        tsi.bin_count(),
        degenerate.len(),
        dropped.len()
    );

    for bin in 0..tsi.bin_count() {
        let congested = (0..tsi.segment_count())
            .filter(|&s| tsi.get(s, bin).is_some_and(|v| v >= 0.7))
            .count();
        let bar = "#".repeat(congested);
        println!("{:02}:00 {congested:3} {bar}", bin);
    }
    Ok(())
}
