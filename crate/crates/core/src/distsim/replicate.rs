use serde::{Deserialize, Serialize};

use super::PartitionAssignment;
use crate::m2g::Graph;
use crate::scalar::Scalar;

pub const DEFAULT_REPLICATION_THRESHOLD: usize = crate::engine::DEFAULT_SPLIT_LIMIT;

/// Hubs whose state is mirrored read-only on every shard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    pub threshold: usize,
    pub shard_count: usize,
    pub hubs: Vec<u32>,
}

impl ReplicationPlan {
    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty()
    }

    pub fn is_hub(&self, v: usize) -> bool {
        self.hubs.binary_search(&(v as u32)).is_ok()
    }

    /// Per-vertex hub flags.
    pub fn mask(&self, vertex_count: usize) -> Vec<bool> {
        let mut mask = vec![false; vertex_count];
        for &h in &self.hubs {
            mask[h as usize] = true;
        }
        mask
    }

    /// State copies pushed each superstep: every hub to every other shard.
    pub fn mirror_updates(&self) -> usize {
        self.hubs.len() * self.shard_count.saturating_sub(1)
    }
}

/// Selects every vertex with in-degree above `threshold` for mirroring.
pub fn replicate_hubs<T: Scalar>(g: &Graph<T>, asg: &PartitionAssignment, threshold: usize) -> ReplicationPlan {
    let threshold = threshold.max(1);
    ReplicationPlan {
        threshold,
        shard_count: asg.shard_count(),
        hubs: (0..g.vertex_count()).filter(|&v| g.in_degree(v) > threshold).map(|v| v as u32).collect(),
    }
}
