//! The gather/apply executor and the matrix operations built on it.

mod exec;
mod ops;
mod program;
mod strategy;

use thiserror::Error;

pub use exec::{apply_phase, gather_phase, run_gather_apply, with_workers, PreparedGraph, EDGE_CHUNK, VERTEX_CHUNK};
pub use ops::{
    compose_graphs, graph_add, graph_add_with, graph_mm, graph_mm_via_compose, graph_mm_with, graph_mv, graph_mv_with,
    graph_rank1_update, graph_rank2_update, graph_rank_k_update,
};
pub use program::{check_combiner, program, CombinerLaw, FnProgram, GatherApply, SumProduct};
pub use strategy::{CommFlags, ExecutionModel, ExecutionStrategy, Preprocessing, DEFAULT_BUCKET_SIZE, DEFAULT_SPLIT_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("expected {expected} vertex states, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("invalid operand: {0}")]
    InvalidOperand(String),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
}
