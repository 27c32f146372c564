use std::ops::Range;

use rayon::prelude::*;

use super::{EngineError, ExecutionModel, ExecutionStrategy, GatherApply};
use crate::m2g::Graph;
use crate::optimizer::{community_reorder, merge_replica_results, split_hubs, Reordering, SplitPlan};
use crate::scalar::Scalar;

/// Edges per work item in the edge-centric model. Fixed so that partial
/// sums, and therefore results, do not depend on the worker count.
pub const EDGE_CHUNK: usize = 4096;

/// Destinations per work item when no bucket schedule is requested.
pub const VERTEX_CHUNK: usize = 1024;

/// Runs `f` on a dedicated pool of `workers` threads; zero means the
/// global pool.
pub fn with_workers<R, F>(workers: usize, f: F) -> Result<R, EngineError>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EngineError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

#[inline]
fn fold_in_edges<T: Scalar, P: GatherApply<T>>(g: &Graph<T>, v: usize, states: &[P::State], prog: &P) -> T {
    let (srcs, ws) = g.in_edges(v);
    srcs.iter()
        .zip(ws)
        .fold(prog.identity(), |acc, (&s, &w)| prog.combine(acc, prog.gather(&states[s as usize], w)))
}

/// Per-destination partial folds of one contiguous edge range.
fn edge_chunk_partials<T: Scalar, P: GatherApply<T>>(
    g: &Graph<T>,
    edges: Range<usize>,
    states: &[P::State],
    prog: &P,
) -> Vec<(u32, T)> {
    let offsets = g.offsets();
    let (sources, weights) = (g.sources(), g.weights());
    let mut dst = offsets.partition_point(|&o| o <= edges.start) - 1;
    let mut out = Vec::new();
    let mut e = edges.start;
    while e < edges.end {
        while offsets[dst + 1] <= e {
            dst += 1;
        }
        let stop = offsets[dst + 1].min(edges.end);
        let mut acc = prog.identity();
        for k in e..stop {
            acc = prog.combine(acc, prog.gather(&states[sources[k] as usize], weights[k]));
        }
        out.push((dst as u32, acc));
        e = stop;
    }
    out
}

/// Folded message for every vertex of `g`. `states` is indexed by source
/// id only, so it may be shorter than the vertex count when trailing
/// vertices never appear as sources.
pub(crate) fn gather_messages<T: Scalar, P: GatherApply<T>>(
    g: &Graph<T>,
    states: &[P::State],
    prog: &P,
    model: ExecutionModel,
    chunk: usize,
) -> Vec<T> {
    let m = g.vertex_count();
    match model {
        ExecutionModel::VertexCentric => {
            let mut out = vec![prog.identity(); m];
            out.par_chunks_mut(chunk.max(1)).enumerate().for_each(|(c, slice)| {
                let base = c * chunk.max(1);
                for (k, slot) in slice.iter_mut().enumerate() {
                    *slot = fold_in_edges(g, base + k, states, prog);
                }
            });
            out
        }
        ExecutionModel::EdgeCentric => {
            let e = g.edge_count();
            let partials: Vec<Vec<(u32, T)>> = (0..e.div_ceil(EDGE_CHUNK))
                .into_par_iter()
                .map(|c| edge_chunk_partials(g, c * EDGE_CHUNK..((c + 1) * EDGE_CHUNK).min(e), states, prog))
                .collect();
            let mut out = vec![prog.identity(); m];
            for (dst, p) in partials.into_iter().flatten() {
                let slot = &mut out[dst as usize];
                *slot = prog.combine(*slot, p);
            }
            out
        }
    }
}

/// Gathers and combines the in-edge messages of every vertex.
pub fn gather_phase<T: Scalar, P: GatherApply<T>>(
    g: &Graph<T>,
    states: &[P::State],
    prog: &P,
    model: ExecutionModel,
) -> Result<Vec<T>, EngineError> {
    if states.len() != g.vertex_count() {
        return Err(EngineError::LengthMismatch { expected: g.vertex_count(), found: states.len() });
    }
    Ok(gather_messages(g, states, prog, model, VERTEX_CHUNK))
}

pub(crate) fn apply_chunked<T: Scalar, P: GatherApply<T>>(
    messages: &[T],
    old: &[P::State],
    prog: &P,
    chunk: usize,
) -> Vec<P::State> {
    let chunk = chunk.max(1);
    messages
        .par_chunks(chunk)
        .zip(old.par_chunks(chunk))
        .flat_map_iter(|(ms, os)| ms.iter().zip(os).map(|(&m, o)| prog.apply(m, o)))
        .collect()
}

/// Applies each vertex's folded message to its previous state.
pub fn apply_phase<T: Scalar, P: GatherApply<T>>(messages: &[T], old: &[P::State], prog: &P) -> Vec<P::State> {
    assert_eq!(messages.len(), old.len(), "one message per state");
    apply_chunked(messages, old, prog, VERTEX_CHUNK)
}

/// A graph with its preprocessing already applied, for running several
/// supersteps or operations under one strategy.
#[derive(Debug, Clone)]
pub struct PreparedGraph<T> {
    strategy: ExecutionStrategy,
    vertex_count: usize,
    rows: usize,
    cols: usize,
    reordering: Option<Reordering>,
    split: Option<SplitPlan>,
    graph: Graph<T>,
}

impl<T: Scalar> PreparedGraph<T> {
    pub fn new(g: &Graph<T>, strategy: ExecutionStrategy) -> Result<Self, EngineError> {
        strategy.validate()?;
        let mut graph = g.clone();
        let mut reordering = None;
        if strategy.preprocessing.reorder {
            let (h, r) = community_reorder(&graph);
            graph = h;
            reordering = Some(r);
        }
        let mut split = None;
        if strategy.preprocessing.split_hubs {
            let (h, plan) = split_hubs(&graph, strategy.split_limit);
            if !plan.is_empty() {
                graph = h;
                split = Some(plan);
            }
        }
        Ok(PreparedGraph {
            strategy,
            vertex_count: g.vertex_count(),
            rows: g.rows(),
            cols: g.cols(),
            reordering,
            split,
            graph,
        })
    }

    pub fn strategy(&self) -> &ExecutionStrategy {
        &self.strategy
    }

    /// Vertex count of the original graph.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The transformed graph the executor actually walks.
    pub fn graph(&self) -> &Graph<T> {
        &self.graph
    }

    pub fn reordering(&self) -> Option<&Reordering> {
        self.reordering.as_ref()
    }

    pub fn split_plan(&self) -> Option<&SplitPlan> {
        self.split.as_ref()
    }

    fn apply_chunk(&self) -> usize {
        if self.strategy.preprocessing.bucket {
            self.strategy.bucket_size
        } else {
            VERTEX_CHUNK
        }
    }

    /// One gather/apply superstep over the original vertex ids.
    pub fn run<P: GatherApply<T>>(&self, states: &[P::State], prog: &P) -> Result<Vec<P::State>, EngineError> {
        if states.len() != self.vertex_count {
            return Err(EngineError::LengthMismatch { expected: self.vertex_count, found: states.len() });
        }
        let permuted;
        let local: &[P::State] = match &self.reordering {
            Some(r) => {
                permuted = r.permute(states);
                &permuted
            }
            None => states,
        };
        let chunk = self.apply_chunk();
        let messages = gather_messages(&self.graph, local, prog, self.strategy.model, chunk);
        let next = match &self.split {
            Some(plan) => merge_replica_results(&messages, local, plan, prog)?,
            None => apply_chunked(&messages, local, prog, chunk),
        };
        Ok(match &self.reordering {
            Some(r) => r.restore(&next),
            None => next,
        })
    }
}

/// One superstep of `prog` over `g` under `strategy`.
pub fn run_gather_apply<T: Scalar, P: GatherApply<T>>(
    g: &Graph<T>,
    states: &[P::State],
    prog: &P,
    strategy: &ExecutionStrategy,
) -> Result<Vec<P::State>, EngineError> {
    PreparedGraph::new(g, *strategy)?.run(states, prog)
}
