//! End-to-end stages behind the `congest` subcommands. Every stage reads
//! its inputs from paths in [`RunConfig`] and writes CSV/JSON artifacts
//! under the output directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Weekday};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench_gen::{self, BenchmarkConfig, EdgeWeighting, Scenario, SnapshotReport};
use crate::congestion_graph::CongestionGraphSequence;
use crate::error::{Error, Result};
use crate::features::{build_adjacency_sequence, FeatureVariant};
use crate::graph::WeightedGraph;
use crate::ingest::{self, RoadNetwork};
use crate::local_search::{detect_communities, SearchConfig, SnapshotPartition};
use crate::metrics::{
    modularity, nmi, propagation_probability, track_communities, LabeledPartition, SnapshotCommunities,
    TrackingConfig, TrackingMethod, TransitionMatrix,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CONGESTION_OUT_DIR";

/// Largest tolerated fraction of malformed speed rows.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("congestion-out"), PathBuf::from)
}

/// Settings of every stage. Loaded from TOML; unset keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `timestamp,segment_id,speed_kmh` observations.
    pub speeds: Option<PathBuf>,
    /// Road network JSON.
    pub network: Option<PathBuf>,
    /// Optional `segment_id,free_flow_kmh` overrides.
    pub free_flow: Option<PathBuf>,
    /// Bin width in seconds.
    pub interval: i64,
    pub threshold: f64,
    pub variant: FeatureVariant,
    pub search: SearchConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; all cores when unset.
    pub threads: Option<usize>,
    /// Write measured run times into result files. Off by default so that
    /// reruns produce identical files.
    pub record_timing: bool,
    /// Also write each snapshot's fused adjacency and weighted edge list.
    pub dump_matrices: bool,
    pub track: TrackSettings,
    pub bench: BenchSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            speeds: None,
            network: None,
            free_flow: None,
            interval: 300,
            threshold: crate::congestion_graph::DEFAULT_THRESHOLD,
            variant: FeatureVariant::kdsf(),
            search: SearchConfig::default(),
            out_dir: default_out_dir(),
            seed: 0,
            threads: None,
            record_timing: false,
            dump_matrices: false,
            track: TrackSettings::default(),
            bench: BenchSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackSettings {
    pub method: TrackingMethod,
    /// Matching threshold; the method's default when unset.
    pub threshold: Option<f64>,
    /// Timestamp separating the two propagation periods. When unset the
    /// periods are weekdays and weekends (UTC).
    pub split_at: Option<i64>,
}

impl Default for TrackSettings {
    fn default() -> Self {
        Self {
            method: TrackingMethod::Jaccard,
            threshold: None,
            split_at: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSettings {
    pub scenarios: Vec<Scenario>,
    pub n: usize,
    pub snapshots: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub mixing: f64,
    pub min_community: usize,
    pub max_community: usize,
    pub intensity: f64,
    pub weighting: EdgeWeighting,
}

impl Default for BenchSettings {
    fn default() -> Self {
        let base = BenchmarkConfig::new(Scenario::BirthDeath, 2000, 0);
        Self {
            scenarios: Scenario::ALL.to_vec(),
            n: base.n,
            snapshots: base.snapshots,
            avg_degree: base.avg_degree,
            max_degree: base.max_degree,
            mixing: base.mixing,
            min_community: base.min_community,
            max_community: base.max_community,
            intensity: base.intensity,
            weighting: EdgeWeighting::default(),
        }
    }
}

impl BenchSettings {
    pub fn config(&self, scenario: Scenario, seed: u64) -> BenchmarkConfig {
        BenchmarkConfig {
            snapshots: self.snapshots,
            avg_degree: self.avg_degree,
            max_degree: self.max_degree,
            mixing: self.mixing,
            min_community: self.min_community,
            max_community: self.max_community,
            intensity: self.intensity,
            ..BenchmarkConfig::new(scenario, self.n, seed)
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval <= 0 {
            return Err(Error::Config(format!("interval must be positive, got {}", self.interval)));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Config(format!("threshold {} must lie in (0, 1]", self.threshold)));
        }
        if self.search.levels == 0 {
            return Err(Error::Config("at least one bottleneck level is required".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// Output directory of one variant's detection run.
    pub fn detect_dir(&self) -> PathBuf {
        self.out_dir.join(format!("detect_{}", self.variant))
    }

    fn require<'a>(&self, path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        let path = path
            .as_deref()
            .ok_or_else(|| Error::Config(format!("`{key}` path is not set")))?;
        if !path.exists() {
            return Err(Error::Config(format!("{key} file {} does not exist", path.display())));
        }
        Ok(path)
    }

    fn network(&self) -> Result<RoadNetwork> {
        RoadNetwork::read(self.require(&self.network, "network")?)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

fn require_artifact(path: &Path, hint: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingArtifact {
            path: path.to_path_buf(),
            hint: hint.into(),
        })
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub segments: usize,
    pub bins: usize,
    pub interval: i64,
    pub bins_per_day: Option<usize>,
    pub coverage: f64,
    pub total_rows: usize,
    pub malformed_rows: usize,
    pub dropped_segments: Vec<String>,
}

/// Speeds → `tsi.csv`, `free_flow.csv` and `ingest.json`.
pub fn cmd_ingest(config: &RunConfig) -> Result<IngestSummary> {
    config.validate()?;
    let speeds_path = config.require(&config.speeds, "speeds")?;
    let file = ingest::read_speed_file(speeds_path)?;
    if file.malformed_fraction() > MAX_MALFORMED_FRACTION {
        return Err(Error::TooManyMalformed {
            bad: file.malformed,
            total: file.total_rows,
        });
    }
    if file.records.is_empty() {
        return Err(Error::EmptyInput(format!("{} holds no speed observations", speeds_path.display())));
    }
    if file.malformed > 0 {
        log::warn!("skipped {} of {} malformed rows", file.malformed, file.total_rows);
    }
    let speeds = ingest::aggregate_speeds(&file.records, config.interval)?;
    let (mut table, mut dropped) = ingest::free_flow_table(&file.records);
    if let Some(path) = &config.free_flow {
        table.override_with(&ingest::read_free_flow_csv(fs::File::open(path)?)?);
    }
    let (tsi, unusable) = ingest::compute_tsi(&speeds, &table)?;
    dropped.extend(unusable);
    dropped.sort();
    dropped.dedup();

    fs::create_dir_all(&config.out_dir)?;
    ingest::write_tsi_csv(&config.out_dir.join("tsi.csv"), &tsi)?;
    let mut ff = csv::Writer::from_path(config.out_dir.join("free_flow.csv"))?;
    ff.write_record(["segment_id", "free_flow_kmh"])?;
    for (id, v) in &table.0 {
        ff.write_record([id.clone(), v.to_string()])?;
    }
    ff.flush()?;

    let summary = IngestSummary {
        segments: tsi.segment_count(),
        bins: tsi.bin_count(),
        interval: config.interval,
        bins_per_day: ingest::bins_per_day(config.interval).ok(),
        coverage: tsi.coverage(),
        total_rows: file.total_rows,
        malformed_rows: file.malformed,
        dropped_segments: dropped,
    };
    write_json(&config.out_dir.join("ingest.json"), &summary)?;
    log::info!(
        "ingested {} segments × {} bins, coverage {:.1}%",
        summary.segments,
        summary.bins,
        100.0 * summary.coverage
    );
    Ok(summary)
}

/// Result of one detection run.
#[derive(Debug, Clone)]
pub struct DetectOutput {
    pub dir: PathBuf,
    pub partitions: Vec<SnapshotPartition>,
    /// Entropy weights per snapshot, aligned with the variant's tags.
    pub weights: Vec<Vec<f64>>,
}

/// TSI artifacts → `results.csv`, `partition.csv` and `weights.csv` in
/// `detect_<VARIANT>/`.
pub fn cmd_detect(config: &RunConfig) -> Result<DetectOutput> {
    config.validate()?;
    let tsi_path = config.out_dir.join("tsi.csv");
    require_artifact(&tsi_path, "run `congest ingest` first")?;
    let tsi = ingest::read_tsi_csv(&tsi_path)?;
    let network = config.network()?;

    let mut sequence = CongestionGraphSequence::build(&tsi, &network, config.threshold)?;
    let adjacency = build_adjacency_sequence(&mut sequence, &network, &tsi, &config.variant)?;
    let partitions = sequence
        .subgraphs
        .par_iter()
        .zip(&adjacency)
        .map(|(g, adj)| detect_communities(g, adj, &config.search))
        .collect::<Result<Vec<_>>>()?;

    let dir = config.detect_dir();
    fs::create_dir_all(&dir)?;

    let mut results = csv::Writer::from_path(dir.join("results.csv"))?;
    results.write_record(["timestamp", "k", "modularity", "runtime_ms", "centers"])?;
    for p in &partitions {
        let runtime = if config.record_timing {
            p.elapsed_ms.to_string()
        } else {
            String::new()
        };
        results.write_record([
            p.timestamp.to_string(),
            p.k().to_string(),
            fmt_opt(p.modularity),
            runtime,
            p.centers.join(";"),
        ])?;
    }
    results.flush()?;

    let mut part = csv::Writer::from_path(dir.join("partition.csv"))?;
    part.write_record(["timestamp", "segment_id", "community_id", "center_flag", "level"])?;
    for p in &partitions {
        if p.k() == 0 {
            continue;
        }
        for (i, seg) in p.segments.iter().enumerate() {
            part.write_record([
                p.timestamp.to_string(),
                seg.clone(),
                p.community[i].to_string(),
                u8::from(p.is_center(i)).to_string(),
                p.level(i).to_string(),
            ])?;
        }
    }
    part.flush()?;

    let mut weights_csv = csv::Writer::from_path(dir.join("weights.csv"))?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(config.variant.tags().iter().map(|t| t.to_string()));
    weights_csv.write_record(&header)?;
    for (g, adj) in sequence.subgraphs.iter().zip(&adjacency) {
        let mut row = vec![g.timestamp.to_string()];
        row.extend(adj.weights.iter().map(|w| w.to_string()));
        weights_csv.write_record(&row)?;
    }
    weights_csv.flush()?;

    if config.dump_matrices {
        let mdir = dir.join("matrices");
        fs::create_dir_all(&mdir)?;
        let mut edges = csv::Writer::from_path(dir.join("edges.csv"))?;
        edges.write_record(["timestamp", "seg_u", "seg_v", "weight"])?;
        for (g, adj) in sequence.subgraphs.iter().zip(&adjacency) {
            if g.is_empty() {
                continue;
            }
            adj.write_csv(&mdir.join(format!("{}.csv", g.timestamp)))?;
            let weights = g.weights.as_deref().unwrap_or(&[]);
            for (e, &(u, v)) in g.edges.iter().enumerate() {
                edges.write_record([
                    g.timestamp.to_string(),
                    g.nodes[u].clone(),
                    g.nodes[v].clone(),
                    weights.get(e).map_or(String::new(), |w| w.to_string()),
                ])?;
            }
        }
        edges.flush()?;
    }

    let detected = partitions.iter().filter(|p| p.k() > 0).count();
    log::info!(
        "variant {}: {} snapshots, {} with communities",
        config.variant,
        partitions.len(),
        detected
    );
    Ok(DetectOutput {
        dir,
        partitions,
        weights: adjacency.into_iter().map(|a| a.weights).collect(),
    })
}

/// One row of `partition.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub timestamp: i64,
    pub segment_id: String,
    pub community_id: usize,
    pub center_flag: u8,
    pub level: usize,
}

/// Snapshot timestamps in `results.csv` order.
pub fn read_result_timestamps(path: &Path) -> Result<Vec<i64>> {
    let mut r = csv::Reader::from_path(path)?;
    r.records()
        .map(|row| {
            let row = row?;
            row.get(0)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::InvalidRecord(format!("bad timestamp in {}", path.display())))
        })
        .collect()
}

pub fn read_partition_csv(path: &Path) -> Result<Vec<PartitionRow>> {
    csv::Reader::from_path(path)?
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone)]
pub struct TrackOutput {
    pub events_path: PathBuf,
    pub transitions_path: PathBuf,
    pub event_count: usize,
    pub transitions: Option<TransitionMatrix>,
}

fn is_weekend(timestamp: i64) -> bool {
    DateTime::from_timestamp(timestamp, 0)
        .is_some_and(|t| matches!(t.weekday(), Weekday::Sat | Weekday::Sun))
}

/// Bottleneck centers grouped by level. A segment that is a center several
/// times in the period keeps its most severe (lowest) level.
pub fn bottleneck_levels<'a>(rows: impl IntoIterator<Item = &'a PartitionRow>) -> BTreeMap<usize, BTreeSet<String>> {
    let mut best: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows.into_iter().filter(|r| r.center_flag == 1) {
        let level = best.entry(&r.segment_id).or_insert(r.level);
        *level = (*level).min(r.level);
    }
    let mut levels: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (seg, level) in best {
        levels.entry(level).or_default().insert(seg.to_string());
    }
    levels
}

/// Detected partitions → `tracking_<method>.csv` and `transitions.csv`.
pub fn cmd_track(config: &RunConfig) -> Result<TrackOutput> {
    config.validate()?;
    let dir = config.detect_dir();
    let results_path = dir.join("results.csv");
    let partition_path = dir.join("partition.csv");
    let hint = "run `congest detect` with the same variant first";
    require_artifact(&results_path, hint)?;
    require_artifact(&partition_path, hint)?;
    let timestamps = read_result_timestamps(&results_path)?;
    if timestamps.len() < 2 {
        return Err(Error::TooFewSnapshots(timestamps.len()));
    }
    let rows = read_partition_csv(&partition_path)?;
    let network = config.network()?;

    let mut by_time: BTreeMap<i64, Vec<&PartitionRow>> = BTreeMap::new();
    for r in &rows {
        by_time.entry(r.timestamp).or_default().push(r);
    }
    let snapshots: Vec<SnapshotCommunities<String, usize>> = timestamps
        .iter()
        .enumerate()
        .map(|(s, t)| {
            let members = by_time.get(t).map_or(&[][..], Vec::as_slice);
            let mut communities: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
            for r in members {
                communities.entry(r.community_id).or_default().insert(r.segment_id.clone());
            }
            let present: BTreeSet<&str> = members.iter().map(|r| r.segment_id.as_str()).collect();
            let importance = present
                .iter()
                .map(|&seg| {
                    let degree = network.index_of(seg).map_or(0, |i| {
                        network
                            .neighbors(i)
                            .iter()
                            .filter(|&&j| present.contains(network.segments()[j].id.as_str()))
                            .count()
                    });
                    (seg.to_string(), degree as f64)
                })
                .collect();
            SnapshotCommunities::new(s, communities.into_iter().collect()).with_importance(importance)
        })
        .collect();

    let mut tracking = TrackingConfig::new(config.track.method);
    if let Some(k) = config.track.threshold {
        tracking.threshold = k;
    }
    let events = track_communities(&snapshots, &tracking)?;
    let events_path = dir.join(format!("tracking_{}.csv", config.track.method));
    let mut w = csv::Writer::from_path(&events_path)?;
    w.write_record(["snapshot_i", "community_i", "snapshot_j", "community_j", "score", "event"])?;
    for e in &events {
        let id = |c: &Option<usize>| c.map_or(String::new(), |c| c.to_string());
        w.write_record([
            timestamps[e.snapshot_i].to_string(),
            id(&e.community_i),
            timestamps[e.snapshot_j].to_string(),
            id(&e.community_j),
            e.score.to_string(),
            e.kind.to_string(),
        ])?;
    }
    w.flush()?;

    let in_first = |t: i64| match config.track.split_at {
        Some(split) => t < split,
        None => !is_weekend(t),
    };
    let src = bottleneck_levels(rows.iter().filter(|r| in_first(r.timestamp)));
    let dst = bottleneck_levels(rows.iter().filter(|r| !in_first(r.timestamp)));
    let union: BTreeSet<&String> = src.values().chain(dst.values()).flatten().collect();
    let transitions_path = dir.join("transitions.csv");
    let mut w = csv::Writer::from_path(&transitions_path)?;
    w.write_record(["src_level", "dst_level", "probability"])?;
    let transitions = if src.is_empty() || dst.is_empty() {
        log::warn!("one of the two periods has no bottlenecks; transitions.csv is empty");
        None
    } else {
        let m = propagation_probability(&src, &dst, union.len())?;
        for (a, b, p) in m.rows() {
            w.write_record([a.to_string(), b.to_string(), p.to_string()])?;
        }
        Some(m)
    };
    w.flush()?;
    log::info!("{} tracking events with method {}", events.len(), config.track.method);
    Ok(TrackOutput {
        events_path,
        transitions_path,
        event_count: events.len(),
        transitions,
    })
}

/// Generate each configured scenario, write its bundle and score detection
/// against the ground truth in `bench/<scenario>/report.csv`.
pub fn cmd_bench(config: &RunConfig) -> Result<BTreeMap<Scenario, Vec<SnapshotReport>>> {
    config.validate()?;
    let mut out = BTreeMap::new();
    for &scenario in &config.bench.scenarios {
        let bench_config = config.bench.config(scenario, config.seed);
        let bench = bench_gen::generate(&bench_config)?;
        let dir = config.out_dir.join("bench").join(scenario.name());
        bench_gen::write_bundle(&dir, &bench)?;
        let reports = bench_gen::evaluate(&bench, config.bench.weighting, &config.search)?;
        let mut w = csv::Writer::from_path(dir.join("report.csv"))?;
        w.write_record([
            "snapshot",
            "nodes",
            "edges",
            "community_centers",
            "running_time_ms",
            "modularity",
            "nmi",
        ])?;
        for r in &reports {
            log::info!(
                "{scenario} snapshot {}: {} nodes, {} centers, NMI {:.4}, {:.1} ms",
                r.snapshot,
                r.nodes,
                r.community_centers,
                r.nmi,
                r.running_time_ms
            );
            w.write_record([
                r.snapshot.to_string(),
                r.nodes.to_string(),
                r.edges.to_string(),
                r.community_centers.to_string(),
                if config.record_timing {
                    r.running_time_ms.to_string()
                } else {
                    String::new()
                },
                fmt_opt(r.modularity),
                r.nmi.to_string(),
            ])?;
        }
        w.flush()?;
        out.insert(scenario, reports);
    }
    Ok(out)
}

/// Node → label file with `node`/`segment_id` and `community`/`community_id`
/// columns, falling back to the first two columns.
pub fn read_label_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = r.headers()?.clone();
    let find = |names: &[&str], fallback: usize| {
        header
            .iter()
            .position(|h| names.contains(&h))
            .unwrap_or(fallback)
    };
    let (node_col, label_col) = (find(&["node", "segment_id"], 0), find(&["community", "community_id"], 1));
    let mut labels = BTreeMap::new();
    for row in r.records() {
        let row = row?;
        let (Some(node), Some(label)) = (row.get(node_col), row.get(label_col)) else {
            return Err(Error::InvalidRecord(format!("short row in {}", path.display())));
        };
        if labels.insert(node.to_string(), label.to_string()).is_some() {
            return Err(Error::InvalidRecord(format!(
                "node {node} is labeled twice in {}",
                path.display()
            )));
        }
    }
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub nodes: usize,
    pub truth_communities: usize,
    pub found_communities: usize,
    pub nmi: f64,
    /// Modularity of the found labels on the supplied edge list.
    pub modularity: Option<f64>,
}

/// Compare two label files; with an `u,v[,weight]` edge file also score
/// the modularity of `found`. Writes `eval.json` to the output directory.
pub fn cmd_eval(config: &RunConfig, truth: &Path, found: &Path, edges: Option<&Path>) -> Result<EvalReport> {
    let truth_labels = read_label_file(truth)?;
    let found_labels = read_label_file(found)?;
    let x = LabeledPartition::new(truth_labels.clone(), 0);
    let y = LabeledPartition::new(found_labels.clone(), 0);
    let score = nmi(&x, &y)?;
    let modularity = match edges {
        Some(path) => {
            let index: BTreeMap<&String, usize> = found_labels.keys().enumerate().map(|(i, k)| (k, i)).collect();
            let mut list = Vec::new();
            let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
            for row in r.records() {
                let row = row?;
                let lookup = |i: usize| {
                    let id = row.get(i).unwrap_or("").to_string();
                    index
                        .get(&id)
                        .copied()
                        .ok_or_else(|| Error::InvalidRecord(format!("edge endpoint {id} has no label")))
                };
                let w = match row.get(2) {
                    Some(s) if !s.is_empty() => s
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidRecord(format!("bad edge weight `{s}`")))?,
                    _ => 1.0,
                };
                list.push((lookup(0)?, lookup(1)?, w));
            }
            let graph = WeightedGraph::from_edges(index.len(), &list)?;
            let community: Vec<usize> = found_labels.keys().map(|k| y.label(k).unwrap_or(0)).collect();
            modularity(&graph, &community)
        }
        None => None,
    };
    let report = EvalReport {
        nodes: x.len(),
        truth_communities: x.community_count(),
        found_communities: y.community_count(),
        nmi: score,
        modularity,
    };
    fs::create_dir_all(&config.out_dir)?;
    write_json(&config.out_dir.join("eval.json"), &report)?;
    log::info!("NMI {:.6}", report.nmi);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_defaults() {
        let c = RunConfig::from_toml(
            "interval = 3600\nvariant = \"kdst\"\n[search]\nk_max = 20\n[track]\nmethod = \"ged\"\n",
        )
        .unwrap();
        assert_eq!(c.interval, 3600);
        assert_eq!(c.variant.name(), "KDST");
        assert_eq!(c.search.k_max, 20);
        assert_eq!(c.search.levels, 4);
        assert_eq!(c.track.method, TrackingMethod::Ged);
        assert_eq!(c.threshold, 0.7);
    }

    #[test]
    fn invalid_settings_rejected() {
        assert!(RunConfig::from_toml("threshold = 0.0").is_err());
        assert!(RunConfig::from_toml("interval = -5").is_err());
        assert!(RunConfig::from_toml("variant = \"XX\"").is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("threshold = 1.0").is_ok());
    }

    #[test]
    fn most_severe_level_wins() {
        let row = |t, s: &str, c, l| PartitionRow {
            timestamp: t,
            segment_id: s.into(),
            community_id: 0,
            center_flag: c,
            level: l,
        };
        let rows = [row(0, "a", 1, 3), row(1, "a", 1, 1), row(1, "b", 1, 2), row(1, "c", 0, 1)];
        let levels = bottleneck_levels(&rows);
        assert_eq!(levels[&1], BTreeSet::from(["a".to_string()]));
        assert_eq!(levels[&2], BTreeSet::from(["b".to_string()]));
        assert_eq!(levels.len(), 2);
    }

    #[test]
    fn weekend_split_uses_utc() {
        // 2024-01-06 was a Saturday
        assert!(is_weekend(1_704_499_200));
        assert!(!is_weekend(1_704_499_200 - 1));
    }
}
