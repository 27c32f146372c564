//! Synthetic stand-ins for the routine inputs. Each generator is a pure
//! function of `(n, seed)`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::{CooMatrix, MatrixDescriptor, MatrixKind};
use crate::scalar::ScalarKind;
use crate::testgen::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Stiffness,
    Chain,
    Coupling,
}

impl Generator {
    pub fn generate(self, n: usize, seed: u64) -> CooMatrix<f64> {
        match self {
            Generator::Stiffness => stiffness_matrix(n, seed),
            Generator::Chain => chain_matrix(n, seed),
            Generator::Coupling => coupling_matrix(n, seed),
        }
    }
}

impl std::str::FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stiffness" => Ok(Generator::Stiffness),
            "chain" => Ok(Generator::Chain),
            "coupling" => Ok(Generator::Coupling),
            other => Err(format!("unknown generator `{other}` (expected stiffness, chain or coupling)")),
        }
    }
}

/// Symmetric positive definite with a mesh-like pattern: a 2-D grid
/// stencil of side `ceil(sqrt(n))` plus a few random long-range couplings,
/// made strictly diagonally dominant. Stored as the lower triangle.
pub fn stiffness_matrix(n: usize, seed: u64) -> CooMatrix<f64> {
    let mut r = rng(seed);
    let side = (n as f64).sqrt().ceil().max(1.0) as usize;
    let mut off: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in [i.checked_sub(1).filter(|_| i % side != 0), i.checked_sub(side)].into_iter().flatten() {
            off.push((i, j, -r.random_range(0.5..1.5)));
        }
    }
    for _ in 0..n / 8 {
        let (a, b) = (r.random_range(0..n), r.random_range(0..n));
        if a != b {
            let (i, j) = (a.max(b), a.min(b));
            if !off.iter().any(|&(x, y, _)| (x, y) == (i, j)) {
                off.push((i, j, -r.random_range(0.05..0.2)));
            }
        }
    }
    let mut row_abs = vec![0.0; n];
    for &(i, j, w) in &off {
        row_abs[i] += w.abs();
        row_abs[j] += w.abs();
    }
    let diag = (0..n).map(|i| (i, i, row_abs[i] + r.random_range(1.0..2.0)));
    let d = MatrixDescriptor::new(n, n, MatrixKind::Symmetric, ScalarKind::Real64).expect("square");
    CooMatrix::from_triplets(d, off.into_iter().chain(diag)).expect("lower triangle")
}

/// Dense `n x n` with entries uniform in `[-1, 1)`.
pub fn chain_matrix(n: usize, seed: u64) -> CooMatrix<f64> {
    let mut r = rng(seed);
    let d = MatrixDescriptor::general(n, n, ScalarKind::Real64).expect("square");
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push((i, j, r.random_range(-1.0..1.0)));
        }
    }
    CooMatrix::from_triplets(d, entries).expect("in bounds")
}

/// Sparse, non-negative and row-stochastic: each row couples a component
/// to itself and up to three random others, normalized to sum to one.
pub fn coupling_matrix(n: usize, seed: u64) -> CooMatrix<f64> {
    let mut r = rng(seed);
    let d = MatrixDescriptor::general(n, n, ScalarKind::Real64).expect("square");
    let mut entries = Vec::new();
    for i in 0..n {
        let mut cols: Vec<usize> = sample(&mut r, n, n.min(4)).into_iter().filter(|&j| j != i).take(3).collect();
        cols.push(i);
        cols.sort_unstable();
        let w: Vec<f64> = cols.iter().map(|_| r.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        entries.extend(cols.into_iter().zip(w).map(|(j, x)| (i, j, x / total)));
    }
    CooMatrix::from_triplets(d, entries).expect("in bounds")
}
