//! Graph-side preprocessing: community reordering, hub splitting and
//! bucketed update scheduling. All passes are pure graph-to-graph
//! transforms.

mod bucket;
mod reorder;
mod split;

pub use bucket::{bucket_schedule, BucketSchedule, DEFAULT_BUCKET_SIZE};
pub use reorder::{community_reorder, Reordering, MAX_COMMUNITY};
pub use split::{merge_replica_results, split_hubs, HubReplicas, SplitPlan, DEFAULT_SPLIT_LIMIT};
