//! Local-dominance community search.
//!
//! Each node gets a value (its weighted degree) and points at its
//! largest-value neighbor when that neighbor dominates it. Nodes without a
//! pointer are local leaders. Leaders are linked to the nearest outranking
//! leader by a breadth-first search that stops at the first hit, and the
//! hop distance of that link measures how isolated a leader is. Centers are
//! the leaders with the largest `value * distance`, and the number of centers
//! is chosen by a modularity sweep.

mod dominance;
mod forest;
mod partition;
mod snapshot;

pub use dominance::{attribute_values, build_pointer_dag, find_local_leaders, ValuedGraph};
pub use forest::{lbfs_link_leaders, select_centers, LeaderForest};
pub use partition::{
    assign_partition, detect_weighted, modularity_sweep, Detection, Partition, SearchConfig,
    SweepResult,
};
pub use snapshot::{detect_communities, detect_weighted_subgraph, SnapshotPartition};
