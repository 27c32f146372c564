use std::ops::Range;

use crate::engine::{EngineError, GatherApply};
use crate::m2g::Graph;
use crate::scalar::Scalar;

pub const DEFAULT_SPLIT_LIMIT: usize = crate::engine::DEFAULT_SPLIT_LIMIT;

/// Replicas standing in for one hub; replica `k` gathers
/// `edge_ranges[k]` of the hub's sorted in-edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HubReplicas {
    pub hub: u32,
    pub replicas: Vec<u32>,
    pub edge_ranges: Vec<Range<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub split_limit: usize,
    pub original_vertex_count: usize,
    pub total_vertex_count: usize,
    pub hubs: Vec<HubReplicas>,
}

impl SplitPlan {
    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty()
    }
}

/// Replaces every vertex with in-degree above `limit` by
/// `ceil(degree / limit)` gather-only replicas appended after the original
/// vertices. The hub keeps its id and its out-edges but no in-edges.
pub fn split_hubs<T: Scalar>(g: &Graph<T>, limit: usize) -> (Graph<T>, SplitPlan) {
    let limit = limit.max(1);
    let m = g.vertex_count();
    let mut plan = SplitPlan {
        split_limit: limit,
        original_vertex_count: m,
        total_vertex_count: m,
        hubs: Vec::new(),
    };
    let mut next = m;
    for v in 0..m {
        let degree = g.in_degree(v);
        if degree > limit {
            let pieces = degree.div_ceil(limit);
            let replicas = (next..next + pieces).map(|r| r as u32).collect();
            let edge_ranges = (0..pieces).map(|k| k * limit..((k + 1) * limit).min(degree)).collect();
            plan.hubs.push(HubReplicas { hub: v as u32, replicas, edge_ranges });
            next += pieces;
        }
    }
    if plan.hubs.is_empty() {
        return (g.clone(), plan);
    }
    plan.total_vertex_count = next;

    let mut offsets = Vec::with_capacity(next + 1);
    let mut sources = Vec::with_capacity(g.edge_count());
    let mut weights = Vec::with_capacity(g.edge_count());
    offsets.push(0);
    let mut hubs = plan.hubs.iter().peekable();
    for v in 0..m {
        if hubs.peek().is_some_and(|h| h.hub as usize == v) {
            hubs.next();
        } else {
            let (s, w) = g.in_edges(v);
            sources.extend_from_slice(s);
            weights.extend_from_slice(w);
        }
        offsets.push(sources.len());
    }
    for h in &plan.hubs {
        let (s, w) = g.in_edges(h.hub as usize);
        for r in &h.edge_ranges {
            sources.extend_from_slice(&s[r.clone()]);
            weights.extend_from_slice(&w[r.clone()]);
            offsets.push(sources.len());
        }
    }
    (g.with_layout(next, offsets, sources, weights), plan)
}

/// Applies the gathered messages of a split graph back onto the original
/// vertices.
///
/// `messages` holds one folded message per split-graph vertex; a hub's
/// message is the fold of its replicas' messages in ascending replica
/// order. Every original vertex is then applied against `old_states`.
pub fn merge_replica_results<T, P>(
    messages: &[T],
    old_states: &[P::State],
    plan: &SplitPlan,
    prog: &P,
) -> Result<Vec<P::State>, EngineError>
where
    T: Scalar,
    P: GatherApply<T>,
{
    if messages.len() != plan.total_vertex_count {
        return Err(EngineError::LengthMismatch { expected: plan.total_vertex_count, found: messages.len() });
    }
    if old_states.len() != plan.original_vertex_count {
        return Err(EngineError::LengthMismatch { expected: plan.original_vertex_count, found: old_states.len() });
    }
    let mut merged: Vec<T> = messages[..plan.original_vertex_count].to_vec();
    for h in &plan.hubs {
        merged[h.hub as usize] = h
            .replicas
            .iter()
            .fold(prog.identity(), |acc, &r| prog.combine(acc, messages[r as usize]));
    }
    Ok(crate::engine::apply_phase(&merged, old_states, prog))
}
