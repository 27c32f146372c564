//! Micro-benchmark harness producing labeled samples for tree training.
//!
//! Every grid cell builds its operands from a seed derived from the base
//! seed and the cell coordinates, so matrices are reproducible while the
//! timings are not. Preprocessing (reordering, splitting) is done once per
//! candidate outside the timed region.

use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{compose_graphs, graph_add_with, with_workers, EngineError, ExecutionStrategy, PreparedGraph};
use crate::m2g::{matrix_to_graph, Graph};
use crate::strategy::{default_candidates, features_of, BenchSample, CandidateRuntime, OpKind};
use crate::testgen::{case_seed, random_coo, random_dense, random_vector, rng, TestKind};

pub const DEFAULT_SIZE_CAP: usize = 512;
pub const SAMPLES_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("benchmark grid is empty")]
    EmptyGrid,
    #[error("grid size {size} exceeds the cap of {cap}")]
    SizeTooLarge { size: usize, cap: usize },
    #[error("{op} cannot be benchmarked")]
    UnsupportedOp { op: OpKind },
    #[error("{kind} matrices are complex; the grid measures real kinds only")]
    ComplexKind { kind: &'static str },
    #[error("at least 2 candidate strategies are needed, got {0}")]
    TooFewCandidates(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub ops: Vec<OpKind>,
    pub kinds: Vec<TestKind>,
    pub sizes: Vec<usize>,
    /// Independent matrices per (op, kind, size) cell.
    pub seeds: usize,
    pub repetitions: usize,
    pub size_cap: usize,
    /// Columns of the dense right-hand side in MM cells.
    pub mm_cols: usize,
    /// Each timed repetition loops the operation for at least this long.
    pub min_rep_seconds: f64,
    /// Worker threads while timing; zero uses the global pool.
    pub workers: usize,
    pub candidates: Vec<ExecutionStrategy>,
}

impl Default for BenchGrid {
    fn default() -> Self {
        BenchGrid {
            ops: vec![OpKind::Mv, OpKind::Mm, OpKind::Add, OpKind::Compose],
            kinds: TestKind::BENCH.to_vec(),
            sizes: vec![64, 128, 256],
            seeds: 1,
            repetitions: 2,
            size_cap: DEFAULT_SIZE_CAP,
            mm_cols: 8,
            min_rep_seconds: 2e-3,
            workers: 1,
            candidates: default_candidates(),
        }
    }
}

impl BenchGrid {
    pub fn cell_count(&self) -> usize {
        self.ops.len() * self.kinds.len() * self.sizes.len() * self.seeds
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.cell_count() == 0 || self.repetitions == 0 {
            return Err(BenchError::EmptyGrid);
        }
        if let Some(&size) = self.sizes.iter().find(|&&s| s > self.size_cap || s == 0) {
            return Err(BenchError::SizeTooLarge { size, cap: self.size_cap });
        }
        if let Some(&op) = self.ops.iter().find(|op| **op == OpKind::Rank1) {
            return Err(BenchError::UnsupportedOp { op });
        }
        if let Some(k) = self.kinds.iter().find(|k| k.is_complex()) {
            return Err(BenchError::ComplexKind { kind: k.name() });
        }
        if self.candidates.len() < 2 {
            return Err(BenchError::TooFewCandidates(self.candidates.len()));
        }
        for c in &self.candidates {
            c.validate()?;
        }
        Ok(())
    }
}

/// Samples file written by `g4s bench` and read by `g4s train`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub schema_version: u32,
    pub seed: u64,
    pub grid: BenchGrid,
    pub samples: Vec<BenchSample>,
}

/// Median seconds per call over `reps` repetitions.
pub fn time_median(reps: usize, min_rep: Duration, mut f: impl FnMut()) -> f64 {
    let mut per_call: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            let mut calls = 0u32;
            loop {
                f();
                calls += 1;
                if start.elapsed() >= min_rep {
                    break;
                }
            }
            start.elapsed().as_secs_f64() / calls as f64
        })
        .collect();
    per_call.sort_by(f64::total_cmp);
    let n = per_call.len();
    let t = if n % 2 == 1 { per_call[n / 2] } else { (per_call[n / 2 - 1] + per_call[n / 2]) / 2.0 };
    t.max(1e-12)
}

fn time_candidate(
    op: OpKind,
    a: &Graph<f64>,
    b: &Graph<f64>,
    strategy: &ExecutionStrategy,
    grid: &BenchGrid,
    seed: u64,
) -> Result<f64, BenchError> {
    let n = a.cols();
    let min_rep = Duration::from_secs_f64(grid.min_rep_seconds.max(0.0));
    let mut r = rng(seed);
    let seconds = match op {
        OpKind::Mv => {
            let prepared = PreparedGraph::new(a, *strategy)?;
            let x = random_vector::<f64>(n, &mut r);
            time_median(grid.repetitions, min_rep, || {
                black_box(prepared.mv(x.as_slice()).expect("shapes match"));
            })
        }
        OpKind::Mm => {
            let prepared = PreparedGraph::new(a, *strategy)?;
            let c = random_dense::<f64>(n, grid.mm_cols.max(1), &mut r);
            time_median(grid.repetitions, min_rep, || {
                black_box(prepared.mm(&c).expect("shapes match"));
            })
        }
        OpKind::Add => time_median(grid.repetitions, min_rep, || {
            black_box(graph_add_with(a, b, strategy).expect("shapes match"));
        }),
        OpKind::Compose => time_median(grid.repetitions, min_rep, || {
            black_box(compose_graphs(a, b).expect("shapes match"));
        }),
        OpKind::Rank1 => return Err(BenchError::UnsupportedOp { op }),
    };
    Ok(seconds)
}

/// Measures every candidate on every grid cell, in grid order.
pub fn run_bench(grid: &BenchGrid, seed: u64) -> Result<Vec<BenchSample>, BenchError> {
    grid.validate()?;
    with_workers(grid.workers, || {
        let mut samples = Vec::with_capacity(grid.cell_count());
        for &op in &grid.ops {
            for &kind in &grid.kinds {
                for &size in &grid.sizes {
                    for s in 0..grid.seeds {
                        let cell = case_seed(seed, &[op.index() as u64, kind as u64, size as u64, s as u64]);
                        let mut r = rng(cell);
                        let am = random_coo::<f64>(kind, size, &mut r);
                        let bm = random_coo::<f64>(kind, size, &mut r);
                        let (a, b) = (matrix_to_graph(&am), matrix_to_graph(&bm));
                        let runtimes = grid
                            .candidates
                            .iter()
                            .map(|strategy| {
                                time_candidate(op, &a, &b, strategy, grid, cell)
                                    .map(|seconds| CandidateRuntime { strategy: *strategy, seconds })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        let features = features_of(op, &am, "cpu");
                        samples.push(BenchSample::new(features, runtimes).expect("positive runtimes"));
                    }
                }
            }
        }
        Ok(samples)
    })?
}

/// Plain compressed-row SpMV with no engine machinery, used as the
/// reference point for engine throughput.
pub fn plain_csr_spmv(offsets: &[usize], cols: &[u32], values: &[f64], x: &[f64], y: &mut [f64]) {
    for (row, out) in y.iter_mut().enumerate() {
        let span = offsets[row]..offsets[row + 1];
        *out = cols[span.clone()].iter().zip(&values[span]).map(|(&c, &v)| v * x[c as usize]).sum();
    }
}

/// Square real matrix with each entry present independently with
/// probability `density`.
pub fn random_sparse_square(n: usize, density: f64, seed: u64) -> crate::matrix::CooMatrix<f64> {
    use rand::Rng;
    let mut r = rng(seed);
    let mut entries = Vec::with_capacity((n as f64 * n as f64 * density) as usize + n);
    for i in 0..n {
        for j in 0..n {
            if r.random_bool(density) {
                entries.push((i, j, r.random_range(-1.0..1.0)));
            }
        }
    }
    let d = crate::matrix::MatrixDescriptor::general(n, n, crate::scalar::ScalarKind::Real64).expect("nonzero size");
    crate::matrix::CooMatrix::from_triplets(d, entries).expect("entries in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_spmv_matches_engine() {
        let m = random_sparse_square(40, 0.1, 3);
        let g = matrix_to_graph(&m);
        let x = random_vector::<f64>(40, &mut rng(4));
        let mut y = vec![0.0; 40];
        plain_csr_spmv(g.offsets(), g.sources(), g.weights(), x.as_slice(), &mut y);
        let expected = crate::engine::graph_mv(&g, &x).unwrap();
        assert!(crate::relative_error(&y, expected.as_slice()) <= 1e-12);
    }

    fn tiny() -> BenchGrid {
        BenchGrid {
            ops: vec![OpKind::Mv],
            kinds: vec![TestKind::Sparse],
            sizes: vec![64],
            min_rep_seconds: 0.0,
            ..BenchGrid::default()
        }
    }

    #[test]
    fn one_cell_one_row() {
        let samples = run_bench(&tiny(), 42).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0].runtimes.len(), 4);
        assert!(default_candidates().contains(&samples[0].label));
    }

    #[test]
    fn grid_errors() {
        assert_eq!(run_bench(&BenchGrid { ops: vec![], ..tiny() }, 1), Err(BenchError::EmptyGrid));
        assert_eq!(
            run_bench(&BenchGrid { sizes: vec![1024], ..tiny() }, 1),
            Err(BenchError::SizeTooLarge { size: 1024, cap: 512 })
        );
        assert!(run_bench(&BenchGrid { kinds: vec![TestKind::Hermitian], ..tiny() }, 1).is_err());
        assert!(run_bench(&BenchGrid { candidates: default_candidates()[..1].to_vec(), ..tiny() }, 1).is_err());
    }

    #[test]
    fn default_grid_counts() {
        assert_eq!(BenchGrid::default().cell_count(), 60);
    }

    #[test]
    fn median_of_two() {
        let mut k = 0;
        let t = time_median(2, Duration::ZERO, || k += 1);
        assert!(t > 0.0);
        assert_eq!(k, 2);
    }
}
