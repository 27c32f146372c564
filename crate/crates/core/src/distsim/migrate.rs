use serde::{Deserialize, Serialize};

use super::PartitionAssignment;
use crate::m2g::Graph;
use crate::scalar::Scalar;

/// Simulated seconds per gathered edge, used for shard load estimates.
pub const EDGE_COST_SECONDS: f64 = 2e-9;

/// Simulated link between shards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub bandwidth_bytes_per_second: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { bandwidth_bytes_per_second: (1u64 << 30) as f64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MigrationDecision {
    pub migrate: bool,
    /// `max - mean` of the shard loads, the time a move could save.
    pub imbalance_seconds: f64,
    /// Time to ship the candidate vertices.
    pub transfer_seconds: f64,
}

/// Migrates iff the load imbalance exceeds the transfer time of the
/// candidate bytes.
pub fn maybe_migrate(loads: &[f64], candidate_bytes: usize, cost: &CostModel) -> MigrationDecision {
    let (max, mean) = if loads.is_empty() {
        (0.0, 0.0)
    } else {
        let max = loads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (max, loads.iter().sum::<f64>() / loads.len() as f64)
    };
    let imbalance_seconds = (max - mean).max(0.0);
    let transfer_seconds = if candidate_bytes == 0 {
        0.0
    } else {
        candidate_bytes as f64 / cost.bandwidth_bytes_per_second
    };
    MigrationDecision {
        migrate: candidate_bytes > 0 && imbalance_seconds > transfer_seconds,
        imbalance_seconds,
        transfer_seconds,
    }
}

/// A proposed boundary move between adjacent shards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationPlan {
    pub from: usize,
    pub to: usize,
    pub vertices: std::ops::Range<usize>,
    pub bytes: usize,
}

/// Bytes to move one vertex: its state plus its in-edges as (u32 source,
/// weight) pairs.
pub fn vertex_bytes<T: Scalar>(g: &Graph<T>, v: usize) -> usize {
    let w = T::KIND.width();
    w + g.in_degree(v) * (4 + w)
}

/// Picks the boundary slice of the most loaded shard that moves to its
/// less loaded neighbor, taking vertices while the moved load stays within
/// `max - mean`. Returns `None` when nothing can move.
pub fn plan_migration<T: Scalar>(g: &Graph<T>, asg: &PartitionAssignment, loads: &[f64]) -> Option<MigrationPlan> {
    let p = asg.shard_count();
    if p < 2 || loads.len() != p {
        return None;
    }
    let from = (0..p).max_by(|&a, &b| loads[a].total_cmp(&loads[b]).then(b.cmp(&a)))?;
    let mean = loads.iter().sum::<f64>() / p as f64;
    let budget = loads[from] - mean;
    let to = [from.checked_sub(1), (from + 1 < p).then_some(from + 1)]
        .into_iter()
        .flatten()
        .min_by(|&a, &b| loads[a].total_cmp(&loads[b]).then(a.cmp(&b)))?;
    let range = asg.range(from);
    let mut moved = 0.0;
    let mut count = 0;
    // keep at least one vertex on the source shard
    while count + 1 < range.len() {
        let v = if to > from { range.end - 1 - count } else { range.start + count };
        let load = g.in_degree(v) as f64 * EDGE_COST_SECONDS;
        if moved + load > budget {
            break;
        }
        moved += load;
        count += 1;
    }
    if count == 0 {
        return None;
    }
    let vertices = if to > from { range.end - count..range.end } else { range.start..range.start + count };
    let bytes = vertices.clone().map(|v| vertex_bytes(g, v)).sum();
    Some(MigrationPlan { from, to, vertices, bytes })
}

/// The assignment after applying `plan`.
pub fn apply_migration(asg: &PartitionAssignment, plan: &MigrationPlan) -> PartitionAssignment {
    let mut bounds = asg.bounds().to_vec();
    if plan.to > plan.from {
        bounds[plan.to] = plan.vertices.start;
    } else {
        bounds[plan.from] = plan.vertices.end;
    }
    PartitionAssignment::from_bounds(bounds).expect("a move keeps every shard non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_is_noop() {
        let d = maybe_migrate(&[1.0, 1.0, 1.0], 1000, &CostModel::default());
        assert!(!d.migrate);
        assert_eq!(d.imbalance_seconds, 0.0);
    }

    #[test]
    fn bandwidth_decides() {
        let loads = [10_000.0 * EDGE_COST_SECONDS, 1e-9, 1e-9, 1e-9];
        let bytes = 5000 * 12;
        assert!(maybe_migrate(&loads, bytes, &CostModel { bandwidth_bytes_per_second: 1e15 }).migrate);
        assert!(!maybe_migrate(&loads, bytes, &CostModel { bandwidth_bytes_per_second: 1e-3 }).migrate);
    }
}
