//! Evaluation metrics, baseline community matching and bottleneck propagation.

mod modularity;
mod nmi;
mod propagation;
pub mod similarity;
mod tracking;

pub use modularity::modularity;
pub use nmi::{nmi, LabeledPartition};
pub use propagation::{propagation_probability, TransitionMatrix};
pub use similarity::{
    sim_ged, sim_icem, sim_jaccard, sim_maxratio, sim_overlap, sim_transition_vectors, IcemClass,
    IcemScore,
};
pub use tracking::{
    track_communities, EventKind, MatchEvent, SnapshotCommunities, TrackingConfig, TrackingMethod,
};
