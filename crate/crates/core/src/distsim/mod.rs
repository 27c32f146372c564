//! In-process simulation of sharded execution: contiguous partitioning,
//! push-style cross-shard messages with per-destination merging, hub
//! mirroring, id delta encoding and load-driven boundary migration.
//!
//! Shards run synchronous supersteps and exchange only byte-encoded
//! batches. Results match the single-shard engine up to floating-point
//! reassociation; with one shard they are bitwise identical.

mod cluster;
pub mod codec;
mod merge;
mod metrics;
mod migrate;
mod ops;
mod partition;
mod replicate;

use thiserror::Error;

pub use cluster::{run_distributed, Cluster, Policies};
pub use codec::{decode_batch, encode_batch, id_section_bytes, CodecError, Encoding, MessageBatch, HEADER_BYTES};
pub use merge::merge_messages;
pub use metrics::{CommMetrics, MigrationEvent, SuperstepMetrics};
pub use migrate::{
    apply_migration, maybe_migrate, plan_migration, vertex_bytes, CostModel, MigrationDecision, MigrationPlan,
    EDGE_COST_SECONDS,
};
pub use ops::{dist_add, dist_compose, dist_mm, dist_mv, dist_rank1};
pub use partition::{partition_graph, PartitionAssignment};
pub use replicate::{replicate_hubs, ReplicationPlan, DEFAULT_REPLICATION_THRESHOLD};

use crate::engine::EngineError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("cannot split {vertices} vertices into {shards} shards")]
    ShardCount { shards: usize, vertices: usize },
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("expected {expected} vertex states, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
