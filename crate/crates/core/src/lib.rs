pub mod bench_gen;
pub mod congestion_graph;
pub mod error;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod local_search;
pub mod metrics;
pub mod pipeline;
pub mod synthetic;

pub use error::{Error, Result};
