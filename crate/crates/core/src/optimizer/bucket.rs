use std::ops::Range;

use crate::m2g::Graph;

pub const DEFAULT_BUCKET_SIZE: usize = crate::engine::DEFAULT_BUCKET_SIZE;

/// Contiguous destination-id ranges whose updates are applied together by
/// one worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketSchedule {
    pub bucket_size: usize,
    pub ranges: Vec<Range<usize>>,
}

impl BucketSchedule {
    /// Partitions `[0, vertex_count)`; a zero size is treated as one.
    pub fn for_count(vertex_count: usize, bucket_size: usize) -> Self {
        let bucket_size = bucket_size.max(1);
        let ranges = (0..vertex_count)
            .step_by(bucket_size)
            .map(|start| start..(start + bucket_size).min(vertex_count))
            .collect();
        BucketSchedule { bucket_size, ranges }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

pub fn bucket_schedule<T>(g: &Graph<T>, bucket_size: usize) -> BucketSchedule
where
    T: crate::scalar::Scalar,
{
    BucketSchedule::for_count(g.vertex_count(), bucket_size)
}
