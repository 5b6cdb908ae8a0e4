use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use congestion::bench_gen::{EdgeWeighting, Scenario};
use congestion::features::FeatureVariant;
use congestion::metrics::TrackingMethod;
use congestion::pipeline::{self, RunConfig};

#[derive(Parser)]
#[command(name = "congest", version, about = "Congestion bottleneck detection and propagation tracking")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $CONGESTION_OUT_DIR or ./congestion-out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write measured run times into result files.
    #[arg(long, global = true)]
    record_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate speeds into a TSI matrix and free-flow table.
    Ingest {
        #[arg(long)]
        speeds: Option<PathBuf>,
        #[arg(long)]
        free_flow: Option<PathBuf>,
        /// Bin width in seconds.
        #[arg(long)]
        interval: Option<i64>,
    },
    /// Build per-snapshot adjacencies and detect bottleneck communities.
    Detect {
        #[command(flatten)]
        detect: DetectArgs,
        /// Also write fused matrices and weighted edge lists.
        #[arg(long)]
        dump_matrices: bool,
    },
    /// Match communities across snapshots and compute level transitions.
    Track {
        #[command(flatten)]
        detect: DetectArgs,
        #[arg(long)]
        method: Option<TrackingMethod>,
        /// Matching threshold [default: per method]
        #[arg(long)]
        match_threshold: Option<f64>,
        /// Epoch second splitting the two propagation periods
        /// [default: weekdays vs weekends]
        #[arg(long)]
        split_at: Option<i64>,
    },
    /// Generate synthetic dynamic benchmarks and score detection on them.
    Bench {
        /// Scenario names; repeat for several [default: all four]
        #[arg(long = "scenario")]
        scenarios: Vec<Scenario>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        snapshots: Option<usize>,
        #[arg(long)]
        mixing: Option<f64>,
        #[arg(long)]
        weighting: Option<String>,
    },
    /// NMI (and modularity with an edge list) between two label files.
    Eval {
        truth: PathBuf,
        found: PathBuf,
        /// `u,v[,weight]` edges for scoring the modularity of FOUND.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    variant: Option<FeatureVariant>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
}

impl DetectArgs {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = &self.network {
            c.network = Some(v.clone());
        }
        if let Some(v) = &self.variant {
            c.variant = v.clone();
        }
        if let Some(v) = self.threshold {
            c.threshold = v;
        }
        if let Some(v) = self.k_max {
            c.search.k_max = v;
        }
        if let Some(v) = self.levels {
            c.search.levels = v;
        }
    }
}

fn parse_weighting(s: &str) -> congestion::Result<EdgeWeighting> {
    match s.to_ascii_lowercase().as_str() {
        "unit" => Ok(EdgeWeighting::Unit),
        "overlap" => Ok(EdgeWeighting::Overlap),
        _ => Err(congestion::Error::Config(format!(
            "unknown weighting `{s}`; valid: unit, overlap"
        ))),
    }
}

fn run(cli: Cli) -> congestion::Result<()> {
    let mut config = match &cli.common.config {
        Some(path) => RunConfig::read(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.common.out_dir {
        config.out_dir = v;
    }
    if let Some(v) = cli.common.seed {
        config.seed = v;
    }
    if let Some(v) = cli.common.threads {
        config.threads = Some(v);
    }
    config.record_timing |= cli.common.record_timing;

    match &cli.command {
        Command::Ingest {
            speeds,
            free_flow,
            interval,
        } => {
            config.speeds = speeds.clone().or(config.speeds);
            config.free_flow = free_flow.clone().or(config.free_flow);
            config.interval = interval.unwrap_or(config.interval);
        }
        Command::Detect { detect, dump_matrices } => {
            detect.apply(&mut config);
            config.dump_matrices |= *dump_matrices;
        }
        Command::Track {
            detect,
            method,
            match_threshold,
            split_at,
        } => {
            detect.apply(&mut config);
            if let Some(m) = *method {
                config.track.method = m;
                config.track.threshold = None;
            }
            config.track.threshold = match_threshold.or(config.track.threshold);
            config.track.split_at = split_at.or(config.track.split_at);
        }
        Command::Bench {
            scenarios,
            n,
            snapshots,
            mixing,
            weighting,
        } => {
            if !scenarios.is_empty() {
                config.bench.scenarios = scenarios.clone();
            }
            config.bench.n = n.unwrap_or(config.bench.n);
            config.bench.snapshots = snapshots.unwrap_or(config.bench.snapshots);
            config.bench.mixing = mixing.unwrap_or(config.bench.mixing);
            if let Some(w) = weighting {
                config.bench.weighting = parse_weighting(w)?;
            }
        }
        Command::Eval { .. } => {}
    }
    config.validate()?;
    if let Some(threads) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| congestion::Error::Config(e.to_string()))?;
    }

    match cli.command {
        Command::Ingest { .. } => pipeline::cmd_ingest(&config).map(drop),
        Command::Detect { .. } => pipeline::cmd_detect(&config).map(drop),
        Command::Track { .. } => pipeline::cmd_track(&config).map(drop),
        Command::Bench { .. } => pipeline::cmd_bench(&config).map(drop),
        Command::Eval { truth, found, edges } => {
            pipeline::cmd_eval(&config, &truth, &found, edges.as_deref()).map(drop)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
