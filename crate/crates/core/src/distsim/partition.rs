use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::DistError;
use crate::m2g::Graph;
use crate::scalar::Scalar;

/// Shards own contiguous vertex-id ranges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionAssignment {
    bounds: Vec<usize>,
}

impl PartitionAssignment {
    /// Even split of `[0, m)` into `p` ranges; the first `m % p` ranges get
    /// one extra vertex.
    pub fn even(m: usize, p: usize) -> Result<Self, DistError> {
        if p == 0 || p > m {
            return Err(DistError::ShardCount { shards: p, vertices: m });
        }
        let (base, extra) = (m / p, m % p);
        let mut bounds = Vec::with_capacity(p + 1);
        bounds.push(0);
        for s in 0..p {
            bounds.push(bounds[s] + base + usize::from(s < extra));
        }
        Ok(PartitionAssignment { bounds })
    }

    /// Ranges from explicit boundaries `0 = b0 < b1 < ... < bp = m`.
    pub fn from_bounds(bounds: Vec<usize>) -> Result<Self, DistError> {
        let valid = bounds.len() >= 2 && bounds[0] == 0 && bounds.windows(2).all(|w| w[0] < w[1]);
        if !valid {
            return Err(DistError::Partition(format!("bounds {bounds:?} are not strictly increasing from 0")));
        }
        Ok(PartitionAssignment { bounds })
    }

    pub fn shard_count(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        *self.bounds.last().expect("at least two bounds")
    }

    pub fn range(&self, shard: usize) -> Range<usize> {
        self.bounds[shard]..self.bounds[shard + 1]
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.bounds.windows(2).map(|w| w[0]..w[1])
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.ranges().map(|r| r.len()).collect()
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn shard_of(&self, v: usize) -> usize {
        self.bounds.partition_point(|&b| b <= v) - 1
    }

    /// Owning shard of every vertex.
    pub fn owners(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for (s, r) in self.ranges().enumerate() {
            out.extend(std::iter::repeat_n(s as u32, r.len()));
        }
        out
    }
}

pub fn partition_graph<T: Scalar>(g: &Graph<T>, p: usize) -> Result<PartitionAssignment, DistError> {
    PartitionAssignment::even(g.vertex_count(), p)
}
