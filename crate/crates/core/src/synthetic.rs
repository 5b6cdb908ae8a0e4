//! A small synthetic city: a jittered grid road network with speed
//! observations that slow down around rush-hour hotspots. Useful for
//! demos and end-to-end tests when no real probe data is at hand.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_speed_csv, Crs, RoadNetwork, Segment, SpeedRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityConfig {
    /// Junction rows and columns of the grid.
    pub rows: usize,
    pub cols: usize,
    /// Block length in meters.
    pub spacing: f64,
    /// First bin start, UTC seconds.
    pub start: i64,
    pub days: usize,
    /// Seconds between observations.
    pub interval: i64,
    pub hotspots: usize,
    /// Hotspot radius in meters.
    pub radius: f64,
    pub free_flow_kmh: f64,
    pub noise_kmh: f64,
    pub seed: u64,
}

impl Default for CityConfig {
    fn default() -> Self {
        Self {
            rows: 12,
            cols: 12,
            spacing: 200.0,
            // Friday 2024-01-05 00:00 UTC, so the run spans a weekend
            start: 1_704_412_800,
            days: 3,
            interval: 3600,
            hotspots: 4,
            radius: 450.0,
            free_flow_kmh: 60.0,
            noise_kmh: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCity {
    pub network: RoadNetwork,
    pub records: Vec<SpeedRecord>,
}

impl SyntheticCity {
    /// Write `network.json` and `speeds.csv` into `dir` and return their
    /// paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let network = dir.join("network.json");
        let speeds = dir.join("speeds.csv");
        self.network.write(&network)?;
        write_speed_csv(&speeds, &self.records)?;
        Ok((network, speeds))
    }
}

fn grid(config: &CityConfig, rng: &mut ChaCha8Rng) -> Result<RoadNetwork> {
    let junction = |r: usize, c: usize| format!("{r}_{c}");
    let point = |r: usize, c: usize| [c as f64 * config.spacing, r as f64 * config.spacing];
    let mut segments = Vec::new();
    let mut bent = |id: String, a: (usize, usize), b: (usize, usize), rng: &mut ChaCha8Rng| {
        let (p, q) = (point(a.0, a.1), point(b.0, b.1));
        let offset = rng.gen_range(-0.15..0.15) * config.spacing;
        // perpendicular to a horizontal or vertical block
        let mid = if a.0 == b.0 {
            [(p[0] + q[0]) / 2.0, p[1] + offset]
        } else {
            [p[0] + offset, (p[1] + q[1]) / 2.0]
        };
        segments.push(Segment {
            id,
            junctions: [junction(a.0, a.1), junction(b.0, b.1)],
            polyline: vec![p, mid, q],
        });
    };
    for r in 0..config.rows {
        for c in 0..config.cols {
            if c + 1 < config.cols {
                bent(format!("h{r:03}_{c:03}"), (r, c), (r, c + 1), rng);
            }
            if r + 1 < config.rows {
                bent(format!("v{r:03}_{c:03}"), (r, c), (r + 1, c), rng);
            }
        }
    }
    RoadNetwork::new(
        Crs {
            name: "local-grid".into(),
            units: "m".into(),
        },
        segments,
    )
}

/// Rush-hour intensity in `[0, 1]` for an hour of day given the relative
/// strength of the morning and evening peaks; weekends are lighter.
fn peak(hour: f64, weekend: bool, morning: f64, evening: f64) -> f64 {
    let bump = |center: f64| (-(hour - center).powi(2) / (2.0 * 1.5f64.powi(2))).exp();
    (morning * bump(8.0)).max(evening * bump(18.0)) * if weekend { 0.8 } else { 1.0 }
}

struct Hotspot {
    center: [f64; 2],
    severity: f64,
    radius: f64,
    /// Morning and evening peak strength.
    peaks: (f64, f64),
}

pub fn generate_city(config: &CityConfig) -> Result<SyntheticCity> {
    if config.rows < 2 || config.cols < 2 || config.days == 0 || config.interval <= 0 {
        return Err(Error::InvalidArgument(
            "a city needs at least a 2×2 grid, one day and a positive interval".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let network = grid(config, &mut rng)?;
    let extent = [
        (config.cols - 1) as f64 * config.spacing,
        (config.rows - 1) as f64 * config.spacing,
    ];
    let hotspots: Vec<Hotspot> = (0..config.hotspots)
        .map(|i| {
            let weaker = rng.gen_range(0.3..1.0);
            Hotspot {
                center: [rng.gen_range(0.0..=extent[0]), rng.gen_range(0.0..=extent[1])],
                severity: rng.gen_range(0.85..1.0),
                radius: config.radius * rng.gen_range(0.6..1.4),
                // alternate morning- and evening-dominated hotspots
                peaks: if i % 2 == 0 { (1.0, weaker) } else { (weaker, 1.0) },
            }
        })
        .collect();
    let free_flow: Vec<f64> = network
        .segments()
        .iter()
        .map(|_| config.free_flow_kmh * rng.gen_range(0.85..1.15))
        .collect();

    let steps = (config.days as i64 * 86_400 / config.interval) as usize;
    let mut records = Vec::with_capacity(steps * network.len());
    for step in 0..steps {
        let t = config.start + step as i64 * config.interval;
        let day = (t.div_euclid(86_400) + 3).rem_euclid(7); // 0 = Monday
        let hour = t.rem_euclid(86_400) as f64 / 3600.0;
        let weekend = day >= 5;
        for (seg, vf) in network.segments().iter().zip(&free_flow) {
            let c = seg.centroid();
            let load: f64 = hotspots
                .iter()
                .map(|h| {
                    let d2 = (c[0] - h.center[0]).powi(2) + (c[1] - h.center[1]).powi(2);
                    h.severity * (-d2 / (2.0 * h.radius * h.radius)).exp() * peak(hour, weekend, h.peaks.0, h.peaks.1)
                })
                .sum();
            let slowdown = load.min(0.97);
            let speed = (vf * (1.0 - slowdown) + rng.gen_range(-1.0..=1.0) * config.noise_kmh).max(0.5);
            records.push(SpeedRecord {
                timestamp: t,
                segment_id: seg.id.clone(),
                speed,
            });
        }
    }
    Ok(SyntheticCity { network, records })
}
