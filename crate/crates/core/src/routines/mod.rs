//! Scientific kernels written against the public gather/apply surface:
//! a boundary-force accumulation over a stiffness graph, a chained
//! potential-energy product, and a heat-capacity aggregation. Synthetic
//! input generators live in [`generate`].

pub mod generate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{compose_graphs, run_gather_apply, EngineError, ExecutionStrategy, GatherApply, SumProduct};
use crate::m2g::Graph;
use crate::matrix::DenseVector;
use crate::scalar::Scalar;

pub use generate::{chain_matrix, coupling_matrix, stiffness_matrix, Generator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoutineError {
    #[error("{routine} needs a square matrix, got {rows}x{cols}")]
    NotSquare { routine: &'static str, rows: usize, cols: usize },
    #[error("{what} has length {found}, expected {expected}")]
    Length { what: &'static str, expected: usize, found: usize },
    #[error("chain is empty")]
    EmptyChain,
    #[error("chain link {index} is {left_rows}x{left_cols} but link {next} has {right_rows} rows")]
    ChainMismatch { index: usize, next: usize, left_rows: usize, left_cols: usize, right_rows: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutineName {
    MantleForce,
    PotentialEnergy,
    HeatCapacity,
}

impl RoutineName {
    pub fn name(self) -> &'static str {
        match self {
            RoutineName::MantleForce => "mantle_force",
            RoutineName::PotentialEnergy => "potential_energy",
            RoutineName::HeatCapacity => "heat_capacity",
        }
    }
}

/// Vertex state of the force kernel: a velocity and the force built up so
/// far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceState<T> {
    pub u: T,
    pub f: T,
}

/// Gathers `u[source] * weight` and adds the sum onto the prior force.
#[derive(Debug, Clone, Copy, Default)]
pub struct MantleForce;

impl<T: Scalar> GatherApply<T> for MantleForce {
    type State = ForceState<T>;

    fn gather(&self, neighbor: &ForceState<T>, weight: T) -> T {
        neighbor.u * weight
    }
    fn combine(&self, a: T, b: T) -> T {
        a + b
    }
    fn identity(&self) -> T {
        T::zero()
    }
    fn apply(&self, gathered: T, old: &ForceState<T>) -> ForceState<T> {
        ForceState { u: old.u, f: old.f + gathered }
    }
}

/// Gathers `p[source] * weight` and overwrites with the sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeatCapacity;

impl<T: Scalar> GatherApply<T> for HeatCapacity {
    type State = T;

    fn gather(&self, neighbor: &T, weight: T) -> T {
        *neighbor * weight
    }
    fn combine(&self, a: T, b: T) -> T {
        a + b
    }
    fn identity(&self) -> T {
        T::zero()
    }
    fn apply(&self, gathered: T, _old: &T) -> T {
        gathered
    }
}

fn check_len(what: &'static str, v: &DenseVector<impl Scalar>, expected: usize) -> Result<(), RoutineError> {
    if v.len() != expected {
        return Err(RoutineError::Length { what, expected, found: v.len() });
    }
    Ok(())
}

fn padded<T: Scalar>(x: &[T], m: usize) -> Vec<T> {
    let mut v = x.to_vec();
    v.resize(m, T::zero());
    v
}

/// `f0 + K u` as one accumulating pass over the stiffness graph. A missing
/// `f0` starts from zero.
pub fn mantle_force<T: Scalar>(
    k: &Graph<T>,
    u: &DenseVector<T>,
    f0: Option<&DenseVector<T>>,
) -> Result<DenseVector<T>, RoutineError> {
    mantle_force_with(k, u, f0, &ExecutionStrategy::default())
}

pub fn mantle_force_with<T: Scalar>(
    k: &Graph<T>,
    u: &DenseVector<T>,
    f0: Option<&DenseVector<T>>,
    strategy: &ExecutionStrategy,
) -> Result<DenseVector<T>, RoutineError> {
    let n = k.rows();
    if n != k.cols() {
        return Err(RoutineError::NotSquare { routine: "mantle_force", rows: n, cols: k.cols() });
    }
    check_len("velocity vector", u, n)?;
    if let Some(f0) = f0 {
        check_len("initial force vector", f0, n)?;
    }
    let states: Vec<ForceState<T>> = (0..n)
        .map(|i| ForceState { u: u.get(i), f: f0.map_or(T::zero(), |f| f.get(i)) })
        .collect();
    let out = run_gather_apply(k, &states, &MantleForce, strategy)?;
    Ok(out.into_iter().map(|s| s.f).collect::<Vec<_>>().into())
}

fn check_chain<T: Scalar>(graphs: &[&Graph<T>], v: &DenseVector<T>) -> Result<(), RoutineError> {
    let last = graphs.last().ok_or(RoutineError::EmptyChain)?;
    for (index, w) in graphs.windows(2).enumerate() {
        if w[0].cols() != w[1].rows() {
            return Err(RoutineError::ChainMismatch {
                index,
                next: index + 1,
                left_rows: w[0].rows(),
                left_cols: w[0].cols(),
                right_rows: w[1].rows(),
            });
        }
    }
    check_len("chain input vector", v, last.cols())
}

fn mv_pass<T: Scalar>(g: &Graph<T>, x: &[T], strategy: &ExecutionStrategy) -> Result<Vec<T>, RoutineError> {
    let mut y = run_gather_apply(g, &padded(x, g.vertex_count()), &SumProduct, strategy)?;
    y.truncate(g.rows());
    Ok(y)
}

/// `G1 G2 ... Gk v` as `k` matrix-vector passes from the right.
pub fn potential_energy_chain<T: Scalar>(graphs: &[&Graph<T>], v: &DenseVector<T>) -> Result<DenseVector<T>, RoutineError> {
    potential_energy_chain_with(graphs, v, &ExecutionStrategy::default())
}

pub fn potential_energy_chain_with<T: Scalar>(
    graphs: &[&Graph<T>],
    v: &DenseVector<T>,
    strategy: &ExecutionStrategy,
) -> Result<DenseVector<T>, RoutineError> {
    check_chain(graphs, v)?;
    let mut x = v.as_slice().to_vec();
    for g in graphs.iter().rev() {
        x = mv_pass(g, &x, strategy)?;
    }
    Ok(x.into())
}

/// The same product with the chain first composed into one graph, so the
/// vector crosses a single direct-dependency pass.
pub fn potential_energy_chain_composed<T: Scalar>(
    graphs: &[&Graph<T>],
    v: &DenseVector<T>,
) -> Result<DenseVector<T>, RoutineError> {
    check_chain(graphs, v)?;
    let mut composed = graphs[0].clone();
    for g in &graphs[1..] {
        composed = compose_graphs(&composed, g)?;
    }
    Ok(mv_pass(&composed, v.as_slice(), &ExecutionStrategy::default())?.into())
}

/// Aggregates neighbor pressures through the coupling graph in one pass.
pub fn heat_capacity<T: Scalar>(t: &Graph<T>, p: &DenseVector<T>) -> Result<DenseVector<T>, RoutineError> {
    heat_capacity_with(t, p, &ExecutionStrategy::default())
}

pub fn heat_capacity_with<T: Scalar>(
    t: &Graph<T>,
    p: &DenseVector<T>,
    strategy: &ExecutionStrategy,
) -> Result<DenseVector<T>, RoutineError> {
    check_len("pressure vector", p, t.cols())?;
    let mut y = run_gather_apply(t, &padded(p.as_slice(), t.vertex_count()), &HeatCapacity, strategy)?;
    y.truncate(t.rows());
    Ok(y.into())
}

/// A routine with its inputs bound and checked.
#[derive(Debug, Clone)]
pub struct RoutineSpec<'a, T> {
    name: RoutineName,
    graphs: Vec<&'a Graph<T>>,
    input: &'a DenseVector<T>,
    initial: Option<&'a DenseVector<T>>,
}

impl<'a, T: Scalar> RoutineSpec<'a, T> {
    pub fn mantle_force(
        k: &'a Graph<T>,
        u: &'a DenseVector<T>,
        f0: Option<&'a DenseVector<T>>,
    ) -> Result<Self, RoutineError> {
        if k.rows() != k.cols() {
            return Err(RoutineError::NotSquare { routine: "mantle_force", rows: k.rows(), cols: k.cols() });
        }
        check_len("velocity vector", u, k.rows())?;
        if let Some(f0) = f0 {
            check_len("initial force vector", f0, k.rows())?;
        }
        Ok(RoutineSpec { name: RoutineName::MantleForce, graphs: vec![k], input: u, initial: f0 })
    }

    pub fn potential_energy(graphs: Vec<&'a Graph<T>>, v: &'a DenseVector<T>) -> Result<Self, RoutineError> {
        check_chain(&graphs, v)?;
        Ok(RoutineSpec { name: RoutineName::PotentialEnergy, graphs, input: v, initial: None })
    }

    pub fn heat_capacity(t: &'a Graph<T>, p: &'a DenseVector<T>) -> Result<Self, RoutineError> {
        check_len("pressure vector", p, t.cols())?;
        Ok(RoutineSpec { name: RoutineName::HeatCapacity, graphs: vec![t], input: p, initial: None })
    }

    pub fn name(&self) -> RoutineName {
        self.name
    }

    pub fn graphs(&self) -> &[&'a Graph<T>] {
        &self.graphs
    }

    /// Number of gather/apply passes a run performs.
    pub fn passes(&self) -> usize {
        self.graphs.len()
    }

    pub fn run(&self, strategy: &ExecutionStrategy) -> Result<DenseVector<T>, RoutineError> {
        match self.name {
            RoutineName::MantleForce => mantle_force_with(self.graphs[0], self.input, self.initial, strategy),
            RoutineName::PotentialEnergy => potential_energy_chain_with(&self.graphs, self.input, strategy),
            RoutineName::HeatCapacity => heat_capacity_with(self.graphs[0], self.input, strategy),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::m2g::matrix_to_graph;
    use crate::matrix::{oracle_mv, CooMatrix, MatrixDescriptor};
    use crate::relative_error;
    use crate::scalar::ScalarKind;

    fn graph(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Graph<f64> {
        let d = MatrixDescriptor::general(rows, cols, ScalarKind::Real64).unwrap();
        matrix_to_graph(&CooMatrix::from_triplets(d, entries).unwrap())
    }

    fn v(x: &[f64]) -> DenseVector<f64> {
        DenseVector::new(x.to_vec())
    }

    #[test]
    fn force_examples() {
        let k = graph(2, 2, vec![(0, 1, 2.0), (1, 0, 3.0)]);
        let u = v(&[1.0, 4.0]);
        assert_eq!(mantle_force(&k, &u, None).unwrap().as_slice(), &[8.0, 3.0]);
        assert_eq!(mantle_force(&k, &u, Some(&v(&[1.0, 1.0]))).unwrap().as_slice(), &[9.0, 4.0]);
        let eye = graph(3, 3, (0..3).map(|i| (i, i, 1.0)).collect());
        assert_eq!(mantle_force(&eye, &v(&[5.0, -2.0, 0.5]), None).unwrap().as_slice(), &[5.0, -2.0, 0.5]);
    }

    #[test]
    fn force_rejects_bad_shapes() {
        let rect = graph(2, 3, vec![(0, 2, 1.0)]);
        assert!(matches!(mantle_force(&rect, &v(&[1.0; 3]), None), Err(RoutineError::NotSquare { .. })));
        let k = graph(2, 2, vec![(0, 1, 2.0)]);
        assert!(matches!(mantle_force(&k, &v(&[1.0; 3]), None), Err(RoutineError::Length { .. })));
        assert!(mantle_force(&k, &v(&[1.0; 2]), Some(&v(&[0.0]))).is_err());
    }

    #[test]
    fn chain_examples() {
        let a = graph(2, 2, vec![(0, 1, 2.0), (1, 0, 3.0)]);
        let b = graph(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 1, -1.0)]);
        let x = v(&[1.0, 0.0]);
        assert_eq!(potential_energy_chain(&[&a], &x).unwrap().as_slice(), &[0.0, 3.0]);
        let inner = oracle_mv(&crate::m2g::graph_to_origin_matrix(&b), &x).unwrap();
        let expected = oracle_mv(&crate::m2g::graph_to_origin_matrix(&a), &inner).unwrap();
        assert_eq!(potential_energy_chain(&[&a, &b], &x).unwrap(), expected);
        assert_eq!(potential_energy_chain_composed(&[&a, &b], &x).unwrap(), expected);
    }

    #[test]
    fn chain_errors() {
        let a = graph(2, 3, vec![(0, 0, 1.0)]);
        let b = graph(2, 2, vec![(0, 0, 1.0)]);
        assert_eq!(potential_energy_chain::<f64>(&[], &v(&[])), Err(RoutineError::EmptyChain));
        assert!(matches!(potential_energy_chain(&[&a, &b], &v(&[1.0; 2])), Err(RoutineError::ChainMismatch { index: 0, .. })));
        assert!(potential_energy_chain(&[&b, &a], &v(&[1.0; 2])).is_err());
        assert_eq!(potential_energy_chain(&[&b, &a], &v(&[1.0; 3])).unwrap().len(), 2);
    }

    #[test]
    fn heat_examples() {
        let eye = graph(3, 3, (0..3).map(|i| (i, i, 1.0)).collect());
        assert_eq!(heat_capacity(&eye, &v(&[1.0, 2.0, 3.0])).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        let stochastic = graph(
            3,
            3,
            vec![(0, 0, 0.5), (0, 1, 0.5), (1, 0, 0.25), (1, 1, 0.25), (1, 2, 0.5), (2, 2, 1.0)],
        );
        let out = heat_capacity(&stochastic, &v(&[7.0; 3])).unwrap();
        assert!(relative_error(out.as_slice(), &[7.0; 3]) <= 1e-15);
        let zero = graph(3, 3, vec![]);
        assert_eq!(heat_capacity(&zero, &v(&[1.0; 3])).unwrap().as_slice(), &[0.0; 3]);
    }

    #[test]
    fn spec_binds_and_runs() {
        let k = graph(2, 2, vec![(0, 1, 2.0), (1, 0, 3.0)]);
        let u = v(&[1.0, 4.0]);
        let spec = RoutineSpec::mantle_force(&k, &u, None).unwrap();
        assert_eq!(spec.name().name(), "mantle_force");
        assert_eq!(spec.passes(), 1);
        assert_eq!(spec.run(&ExecutionStrategy::default()).unwrap().as_slice(), &[8.0, 3.0]);
        let chain = RoutineSpec::potential_energy(vec![&k, &k], &u).unwrap();
        assert_eq!(chain.passes(), 2);
        assert_eq!(chain.run(&ExecutionStrategy::default()).unwrap().as_slice(), &[6.0, 24.0]);
        assert!(RoutineSpec::heat_capacity(&k, &v(&[1.0])).is_err());
    }
}
