use serde::{Deserialize, Serialize};

/// One migration decision taken at the end of a superstep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationEvent {
    pub triggered: bool,
    pub from: usize,
    pub to: usize,
    pub vertices: usize,
    pub bytes: usize,
    pub imbalance_seconds: f64,
    pub transfer_seconds: f64,
}

/// Traffic and load counters of one superstep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuperstepMetrics {
    /// Cross-shard messages before merging.
    pub pre_merge: usize,
    /// Entries actually shipped.
    pub post_merge: usize,
    pub batches: usize,
    pub raw_bytes: usize,
    pub encoded_bytes: usize,
    /// Estimated compute seconds per shard.
    pub shard_loads: Vec<f64>,
    pub migrations: Vec<MigrationEvent>,
    /// Hub state copies refreshed on remote shards.
    pub mirror_updates: usize,
    /// Encoded bytes whose receiver had local work to overlap them with.
    pub overlap_eligible_bytes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CommMetrics {
    pub supersteps: Vec<SuperstepMetrics>,
}

impl CommMetrics {
    pub fn total_batches(&self) -> usize {
        self.supersteps.iter().map(|s| s.batches).sum()
    }

    pub fn total_pre_merge(&self) -> usize {
        self.supersteps.iter().map(|s| s.pre_merge).sum()
    }

    pub fn total_post_merge(&self) -> usize {
        self.supersteps.iter().map(|s| s.post_merge).sum()
    }

    pub fn total_raw_bytes(&self) -> usize {
        self.supersteps.iter().map(|s| s.raw_bytes).sum()
    }

    pub fn total_encoded_bytes(&self) -> usize {
        self.supersteps.iter().map(|s| s.encoded_bytes).sum()
    }

    pub fn migration_count(&self) -> usize {
        self.supersteps.iter().flat_map(|s| &s.migrations).filter(|m| m.triggered).count()
    }

    pub fn extend(&mut self, other: CommMetrics) {
        self.supersteps.extend(other.supersteps);
    }
}
