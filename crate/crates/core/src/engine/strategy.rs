use std::fmt;

use serde::{Deserialize, Serialize};

use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionModel {
    /// Parallel over destination vertices.
    VertexCentric,
    /// Parallel over fixed-size edge ranges, reduced per destination.
    EdgeCentric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Preprocessing {
    pub reorder: bool,
    pub split_hubs: bool,
    pub bucket: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct CommFlags {
    pub merge: bool,
    pub replicate_hubs: bool,
    pub delta_encode: bool,
}

pub const DEFAULT_SPLIT_LIMIT: usize = 10;
pub const DEFAULT_BUCKET_SIZE: usize = 256;

/// How a graph operation is scheduled. Strategies change performance,
/// never results beyond floating-point reassociation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExecutionStrategy {
    pub model: ExecutionModel,
    pub preprocessing: Preprocessing,
    pub comm: CommFlags,
    pub bucket_size: usize,
    pub split_limit: usize,
}

impl Default for ExecutionStrategy {
    fn default() -> Self {
        ExecutionStrategy {
            model: ExecutionModel::VertexCentric,
            preprocessing: Preprocessing::default(),
            comm: CommFlags::default(),
            bucket_size: DEFAULT_BUCKET_SIZE,
            split_limit: DEFAULT_SPLIT_LIMIT,
        }
    }
}

impl ExecutionStrategy {
    pub fn vertex_centric() -> Self {
        Self::default()
    }

    pub fn edge_centric() -> Self {
        ExecutionStrategy { model: ExecutionModel::EdgeCentric, ..Self::default() }
    }

    pub fn with_reorder(mut self) -> Self {
        self.preprocessing.reorder = true;
        self
    }

    pub fn with_split(mut self, limit: usize) -> Self {
        self.preprocessing.split_hubs = true;
        self.split_limit = limit;
        self
    }

    pub fn with_buckets(mut self, size: usize) -> Self {
        self.preprocessing.bucket = true;
        self.bucket_size = size;
        self
    }

    pub fn with_comm(mut self, comm: CommFlags) -> Self {
        self.comm = comm;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.split_limit == 0 {
            return Err(EngineError::InvalidStrategy("split_limit must be at least 1".into()));
        }
        if self.bucket_size == 0 {
            return Err(EngineError::InvalidStrategy("bucket_size must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of enabled preprocessing and communication flags.
    pub fn enabled_flags(&self) -> usize {
        let p = self.preprocessing;
        let c = self.comm;
        [p.reorder, p.split_hubs, p.bucket, c.merge, c.replicate_hubs, c.delta_encode]
            .iter()
            .filter(|&&f| f)
            .count()
    }
}

impl fmt::Display for ExecutionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let model = match self.model {
            ExecutionModel::VertexCentric => "vertex",
            ExecutionModel::EdgeCentric => "edge",
        };
        write!(f, "{model}")?;
        if self.preprocessing.reorder {
            write!(f, "+reorder")?;
        }
        if self.preprocessing.split_hubs {
            write!(f, "+split{}", self.split_limit)?;
        }
        if self.preprocessing.bucket {
            write!(f, "+bucket{}", self.bucket_size)?;
        }
        if self.comm.merge {
            write!(f, "+merge")?;
        }
        if self.comm.replicate_hubs {
            write!(f, "+replicate")?;
        }
        if self.comm.delta_encode {
            write!(f, "+delta")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_flags() {
        let s = ExecutionStrategy::edge_centric().with_split(10).with_buckets(7);
        assert_eq!(s.to_string(), "edge+split10+bucket7");
        assert_eq!(s.enabled_flags(), 2);
        assert!(s.validate().is_ok());
        assert!(ExecutionStrategy::default().with_split(0).validate().is_err());
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_value(ExecutionStrategy::default()).unwrap();
        assert_eq!(json["model"], "vertex_centric");
        assert_eq!(json["preprocessing"]["split_hubs"], false);
        assert_eq!(json["split_limit"], 10);
    }
}
