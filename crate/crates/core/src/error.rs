use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no records: {0}")]
    EmptyInput(String),

    #[error("no speed observations for segment")]
    NoData,

    #[error("degenerate free-flow speed for segment {0}: all observed speeds are zero")]
    DegenerateFreeFlow(String),

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid road network: {0}")]
    InvalidNetwork(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("series length mismatch: expected {expected}, found {found}")]
    SeriesLength { expected: usize, found: usize },

    #[error("unknown feature variant `{tag}`; valid variants: {valid}")]
    UnknownVariant { tag: String, valid: String },

    #[error("unknown scenario `{0}`; valid scenarios: birthdeath, expandcontract, hide, mergesplit")]
    UnknownScenario(String),

    #[error("unknown tracking method `{0}`; valid methods: jaccard, maxratio, ged, transition, icem, overlap")]
    UnknownMethod(String),

    #[error("infeasible benchmark configuration: {0}")]
    InfeasibleConfig(String),

    #[error("node sets differ between partitions")]
    NodeSetMismatch,

    #[error("need at least 2 snapshots, found {0}")]
    TooFewSnapshots(usize),

    #[error("missing artifact {path}: {hint}")]
    MissingArtifact { path: PathBuf, hint: String },

    #[error("too many malformed rows: {bad} of {total}")]
    TooManyMalformed { bad: usize, total: usize },

    #[error("graph error: {0}")]
    Graph(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}
