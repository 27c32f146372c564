//! Python bindings. Graphs are built from Matrix Market text, dense rows
//! or triplets; operations accept Python lists of floats or complex
//! numbers and return lists. Real graphs are promoted to complex when an
//! operand is complex.

use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::IntoPyObjectExt;
use pyo3::types::PyBytes;

use g4s::distsim::{dist_mv, Policies};
use g4s::engine::{
    compose_graphs, graph_add, graph_mm_with, graph_mv_with, graph_rank1_update, ExecutionStrategy,
};
use g4s::m2g::{graph_to_origin_matrix, matrix_data_to_graph, matrix_to_graph, read_graph_bytes, AnyGraph, Graph};
use g4s::matrix::{parse_matrix_market, write_matrix_market, CooMatrix, DenseMatrix, DenseVector, MatrixDescriptor};
use g4s::routines::{heat_capacity_with, mantle_force_with, potential_energy_chain_composed, potential_energy_chain_with};
use g4s::verify::{run_verify, Suite, VerifyConfig};
use g4s::{Complex64, Scalar, ScalarKind};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Matrix stored as a weighted directed graph: entry `A[i, j]` is the edge
/// `j -> i`.
#[pyclass(name = "Graph", module = "g4s", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGraph {
    inner: AnyGraph,
}

fn to_complex_graph(g: &Graph<f64>) -> Graph<Complex64> {
    matrix_to_graph(&graph_to_origin_matrix(g).to_complex())
}

fn dense<T: Scalar>(rows: &[Vec<T>]) -> PyResult<Graph<T>> {
    let d = DenseMatrix::from_rows(rows).map_err(value_err)?;
    let desc = MatrixDescriptor::general(d.rows(), d.cols(), T::KIND).map_err(value_err)?;
    Ok(matrix_to_graph(&CooMatrix::from_dense(desc, &d).map_err(value_err)?))
}

fn triplets<T: Scalar>(rows: usize, cols: usize, entries: Vec<(usize, usize, T)>) -> PyResult<Graph<T>> {
    let desc = MatrixDescriptor::general(rows, cols, T::KIND).map_err(value_err)?;
    Ok(matrix_to_graph(&CooMatrix::from_triplets(desc, entries).map_err(value_err)?))
}

fn dense_rows<T: Scalar>(m: &DenseMatrix<T>) -> Vec<Vec<T>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

#[pymethods]
impl PyGraph {
    /// Parses Matrix Market text.
    #[staticmethod]
    fn from_mtx(text: &str) -> PyResult<Self> {
        let m = parse_matrix_market(text).map_err(value_err)?;
        Ok(PyGraph { inner: matrix_data_to_graph(&m) })
    }

    /// Builds from a list of equal-length rows of floats or complex numbers.
    #[staticmethod]
    fn from_dense(rows: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = match rows.extract::<Vec<Vec<f64>>>() {
            Ok(r) => AnyGraph::Real(dense(&r)?),
            Err(_) => AnyGraph::Complex(dense(&rows.extract::<Vec<Vec<Complex64>>>()?)?),
        };
        Ok(PyGraph { inner })
    }

    /// Builds a `rows x cols` matrix from `(i, j, value)` triplets.
    #[staticmethod]
    fn from_triplets(rows: usize, cols: usize, entries: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = match entries.extract::<Vec<(usize, usize, f64)>>() {
            Ok(e) => AnyGraph::Real(triplets(rows, cols, e)?),
            Err(_) => AnyGraph::Complex(triplets(rows, cols, entries.extract()?)?),
        };
        Ok(PyGraph { inner })
    }

    /// Reads the `.g4s` binary format.
    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(PyGraph { inner: read_graph_bytes(data).map_err(value_err)? })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }

    /// Matrix Market text of the original (expanded) matrix.
    fn to_mtx(&self) -> String {
        match &self.inner {
            AnyGraph::Real(g) => write_matrix_market(&graph_to_origin_matrix(g)),
            AnyGraph::Complex(g) => write_matrix_market(&graph_to_origin_matrix(g)),
        }
    }

    fn to_dense<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        match &self.inner {
            AnyGraph::Real(g) => dense_rows(&graph_to_origin_matrix(g).to_dense()).into_bound_py_any(py),
            AnyGraph::Complex(g) => {
                dense_rows(&graph_to_origin_matrix(g).to_dense()).into_bound_py_any(py)
            }
        }
    }

    /// `(destination, source, weight)` for every edge.
    fn edges<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        match &self.inner {
            AnyGraph::Real(g) => g.edges().collect::<Vec<_>>().into_bound_py_any(py),
            AnyGraph::Complex(g) => g.edges().collect::<Vec<_>>().into_bound_py_any(py),
        }
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        let d = self.inner.origin();
        (d.rows, d.cols)
    }

    #[getter]
    fn is_complex(&self) -> bool {
        self.inner.origin().scalar == ScalarKind::Complex64x2
    }

    fn __repr__(&self) -> String {
        let (r, c) = self.shape();
        let scalar = if self.is_complex() { "complex" } else { "real" };
        format!("Graph({r}x{c}, {scalar}, {} edges)", self.edge_count())
    }
}

/// Parses `"vc"`, `"ec"`, optionally followed by `+reorder`,
/// `+split[=LIMIT]` and `+buckets[=SIZE]`.
fn parse_strategy(spec: Option<&str>) -> PyResult<ExecutionStrategy> {
    let Some(spec) = spec else {
        return Ok(ExecutionStrategy::default());
    };
    let mut parts = spec.split('+').map(str::trim);
    let mut s = match parts.next() {
        Some("vc") | Some("vertex_centric") => ExecutionStrategy::vertex_centric(),
        Some("ec") | Some("edge_centric") => ExecutionStrategy::edge_centric(),
        other => return Err(value_err(format!("unknown execution model {other:?}; use vc or ec"))),
    };
    for part in parts {
        let (name, arg) = match part.split_once('=') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| value_err(format!("bad number in `{part}`")))?)),
            None => (part, None),
        };
        s = match name {
            "reorder" => s.with_reorder(),
            "split" => s.with_split(arg.unwrap_or(g4s::engine::DEFAULT_SPLIT_LIMIT)),
            "buckets" => s.with_buckets(arg.unwrap_or(g4s::engine::DEFAULT_BUCKET_SIZE)),
            _ => return Err(value_err(format!("unknown strategy option `{part}`"))),
        };
    }
    s.validate().map_err(value_err)?;
    Ok(s)
}

/// Operands resolved to one scalar type.
enum Typed {
    Real(Graph<f64>, Vec<Vec<f64>>),
    Complex(Graph<Complex64>, Vec<Vec<Complex64>>),
}

/// Extracts vectors, promoting to complex if the graph or any vector is.
fn typed(g: &PyGraph, vectors: &[&Bound<'_, PyAny>]) -> PyResult<Typed> {
    if let AnyGraph::Real(g) = &g.inner {
        if let Ok(vs) = vectors.iter().map(|v| v.extract::<Vec<f64>>()).collect::<PyResult<Vec<_>>>() {
            return Ok(Typed::Real(g.clone(), vs));
        }
    }
    let vs = vectors
        .iter()
        .map(|v| v.extract::<Vec<Complex64>>())
        .collect::<PyResult<Vec<_>>>()
        .map_err(|_| PyTypeError::new_err("vectors must be lists of numbers"))?;
    let g = match &g.inner {
        AnyGraph::Real(g) => to_complex_graph(g),
        AnyGraph::Complex(g) => g.clone(),
    };
    Ok(Typed::Complex(g, vs))
}

fn list<'py, T>(py: Python<'py>, v: Vec<T>) -> PyResult<Bound<'py, PyAny>>
where
    Vec<T>: IntoPyObject<'py>,
{
    v.into_bound_py_any(py)
}

/// `A @ x`.
#[pyfunction]
#[pyo3(signature = (a, x, strategy=None))]
fn mv<'py>(py: Python<'py>, a: &PyGraph, x: &Bound<'py, PyAny>, strategy: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let s = parse_strategy(strategy)?;
    match typed(a, &[x])? {
        Typed::Real(g, mut v) => list(py, graph_mv_with(&g, &DenseVector::new(v.remove(0)), &s).map_err(value_err)?.into_vec()),
        Typed::Complex(g, mut v) => {
            list(py, graph_mv_with(&g, &DenseVector::new(v.remove(0)), &s).map_err(value_err)?.into_vec())
        }
    }
}

fn dense_from_rows<T: Scalar>(rows: Vec<Vec<T>>) -> PyResult<DenseMatrix<T>> {
    DenseMatrix::from_rows(&rows).map_err(value_err)
}

/// `A @ C` for a dense `C` given as rows.
#[pyfunction]
#[pyo3(signature = (a, c, strategy=None))]
fn mm<'py>(py: Python<'py>, a: &PyGraph, c: &Bound<'py, PyAny>, strategy: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let s = parse_strategy(strategy)?;
    let real_rows = c.extract::<Vec<Vec<f64>>>();
    match (&a.inner, real_rows) {
        (AnyGraph::Real(g), Ok(rows)) => list(py, dense_rows(&graph_mm_with(g, &dense_from_rows(rows)?, &s).map_err(value_err)?)),
        (inner, _) => {
            let g = match inner {
                AnyGraph::Real(g) => to_complex_graph(g),
                AnyGraph::Complex(g) => g.clone(),
            };
            let c = dense_from_rows(c.extract::<Vec<Vec<Complex64>>>()?)?;
            list(py, dense_rows(&graph_mm_with(&g, &c, &s).map_err(value_err)?))
        }
    }
}

fn pair(a: &PyGraph, b: &PyGraph) -> (AnyGraph, AnyGraph) {
    match (&a.inner, &b.inner) {
        (AnyGraph::Real(x), AnyGraph::Complex(y)) => (AnyGraph::Complex(to_complex_graph(x)), AnyGraph::Complex(y.clone())),
        (AnyGraph::Complex(x), AnyGraph::Real(y)) => (AnyGraph::Complex(x.clone()), AnyGraph::Complex(to_complex_graph(y))),
        (x, y) => (x.clone(), y.clone()),
    }
}

/// `A + B`.
#[pyfunction]
fn add(a: &PyGraph, b: &PyGraph) -> PyResult<PyGraph> {
    let inner = match pair(a, b) {
        (AnyGraph::Real(x), AnyGraph::Real(y)) => AnyGraph::Real(graph_add(&x, &y).map_err(value_err)?),
        (AnyGraph::Complex(x), AnyGraph::Complex(y)) => AnyGraph::Complex(graph_add(&x, &y).map_err(value_err)?),
        _ => unreachable!("pair promotes both sides"),
    };
    Ok(PyGraph { inner })
}

/// Sparse product `A @ B` as a graph.
#[pyfunction]
fn compose(a: &PyGraph, b: &PyGraph) -> PyResult<PyGraph> {
    let inner = match pair(a, b) {
        (AnyGraph::Real(x), AnyGraph::Real(y)) => AnyGraph::Real(compose_graphs(&x, &y).map_err(value_err)?),
        (AnyGraph::Complex(x), AnyGraph::Complex(y)) => AnyGraph::Complex(compose_graphs(&x, &y).map_err(value_err)?),
        _ => unreachable!("pair promotes both sides"),
    };
    Ok(PyGraph { inner })
}

/// `A + u conj(w)^T`.
#[pyfunction]
fn rank1(a: &PyGraph, u: &Bound<'_, PyAny>, w: &Bound<'_, PyAny>) -> PyResult<PyGraph> {
    let inner = match typed(a, &[u, w])? {
        Typed::Real(g, v) => AnyGraph::Real(
            graph_rank1_update(&g, &DenseVector::new(v[0].clone()), &DenseVector::new(v[1].clone())).map_err(value_err)?,
        ),
        Typed::Complex(g, v) => AnyGraph::Complex(
            graph_rank1_update(&g, &DenseVector::new(v[0].clone()), &DenseVector::new(v[1].clone())).map_err(value_err)?,
        ),
    };
    Ok(PyGraph { inner })
}

/// Sharded `A @ x`; returns `(y, metrics_json)`.
#[pyfunction]
#[pyo3(signature = (a, x, shards, merge=true, replicate=false, delta=false, migrate=false))]
#[allow(clippy::too_many_arguments)]
fn dist_matvec<'py>(
    py: Python<'py>,
    a: &PyGraph,
    x: &Bound<'py, PyAny>,
    shards: usize,
    merge: bool,
    replicate: bool,
    delta: bool,
    migrate: bool,
) -> PyResult<(Bound<'py, PyAny>, String)> {
    let policies = Policies { merge, replicate_hubs: replicate, delta_encode: delta, migrate, ..Policies::default() };
    let to_err = |e: g4s::distsim::DistError| value_err(e);
    let (y, metrics) = match typed(a, &[x])? {
        Typed::Real(g, mut v) => {
            let (y, m) = dist_mv(&g, &DenseVector::new(v.remove(0)), shards, &policies).map_err(to_err)?;
            (list(py, y.into_vec())?, m)
        }
        Typed::Complex(g, mut v) => {
            let (y, m) = dist_mv(&g, &DenseVector::new(v.remove(0)), shards, &policies).map_err(to_err)?;
            (list(py, y.into_vec())?, m)
        }
    };
    let json = serde_json::to_string(&metrics).map_err(value_err)?;
    Ok((y, json))
}

/// Forces `f0 + K u`.
#[pyfunction]
#[pyo3(signature = (k, u, f0=None, strategy=None))]
fn mantle_force<'py>(
    py: Python<'py>,
    k: &PyGraph,
    u: &Bound<'py, PyAny>,
    f0: Option<&Bound<'py, PyAny>>,
    strategy: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = parse_strategy(strategy)?;
    let mut vectors = vec![u];
    vectors.extend(f0);
    match typed(k, &vectors)? {
        Typed::Real(g, v) => {
            let f0 = v.get(1).map(|f| DenseVector::new(f.clone()));
            list(py, mantle_force_with(&g, &DenseVector::new(v[0].clone()), f0.as_ref(), &s).map_err(value_err)?.into_vec())
        }
        Typed::Complex(g, v) => {
            let f0 = v.get(1).map(|f| DenseVector::new(f.clone()));
            list(py, mantle_force_with(&g, &DenseVector::new(v[0].clone()), f0.as_ref(), &s).map_err(value_err)?.into_vec())
        }
    }
}

/// `T p` for a coupling operator `T`.
#[pyfunction]
#[pyo3(signature = (t, p, strategy=None))]
fn heat_capacity<'py>(
    py: Python<'py>,
    t: &PyGraph,
    p: &Bound<'py, PyAny>,
    strategy: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = parse_strategy(strategy)?;
    match typed(t, &[p])? {
        Typed::Real(g, mut v) => list(py, heat_capacity_with(&g, &DenseVector::new(v.remove(0)), &s).map_err(value_err)?.into_vec()),
        Typed::Complex(g, mut v) => {
            list(py, heat_capacity_with(&g, &DenseVector::new(v.remove(0)), &s).map_err(value_err)?.into_vec())
        }
    }
}

/// `A_1 (A_2 (... (A_k v)))`; with `composed=True` the chain is first
/// folded into one operator.
#[pyfunction]
#[pyo3(signature = (chain, v, composed=false, strategy=None))]
fn potential_energy<'py>(
    py: Python<'py>,
    chain: Vec<PyRef<'py, PyGraph>>,
    v: &Bound<'py, PyAny>,
    composed: bool,
    strategy: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = parse_strategy(strategy)?;
    let complex = chain.iter().any(|g| g.is_complex()) || v.extract::<Vec<f64>>().is_err();
    if !complex {
        let graphs: Vec<Graph<f64>> = chain
            .iter()
            .map(|g| match &g.inner {
                AnyGraph::Real(g) => g.clone(),
                AnyGraph::Complex(_) => unreachable!("checked above"),
            })
            .collect();
        let refs: Vec<_> = graphs.iter().collect();
        let v = DenseVector::new(v.extract::<Vec<f64>>()?);
        let out = if composed { potential_energy_chain_composed(&refs, &v) } else { potential_energy_chain_with(&refs, &v, &s) };
        return list(py, out.map_err(value_err)?.into_vec());
    }
    let graphs: Vec<Graph<Complex64>> = chain
        .iter()
        .map(|g| match &g.inner {
            AnyGraph::Real(g) => to_complex_graph(g),
            AnyGraph::Complex(g) => g.clone(),
        })
        .collect();
    let refs: Vec<_> = graphs.iter().collect();
    let v = DenseVector::new(v.extract::<Vec<Complex64>>()?);
    let out = if composed { potential_energy_chain_composed(&refs, &v) } else { potential_energy_chain_with(&refs, &v, &s) };
    list(py, out.map_err(value_err)?.into_vec())
}

/// Runs property suites; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suite="all", seed=42))]
fn verify(py: Python<'_>, suite: &str, seed: u64) -> PyResult<String> {
    let suites = Suite::select(suite).map_err(value_err)?;
    let cfg = VerifyConfig { seed, ..VerifyConfig::default() };
    Ok(py.detach(|| run_verify(&suites, &cfg)).to_json())
}

/// Largest absolute difference over `max(1, max |expected|)`.
#[pyfunction]
fn relative_error(actual: Vec<Complex64>, expected: Vec<Complex64>) -> PyResult<f64> {
    if actual.len() != expected.len() {
        return Err(value_err(format!("lengths differ: {} and {}", actual.len(), expected.len())));
    }
    Ok(g4s::relative_error(&actual, &expected))
}

#[pymodule(name = "g4s")]
fn g4s_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(mv, m)?)?;
    m.add_function(wrap_pyfunction!(mm, m)?)?;
    m.add_function(wrap_pyfunction!(add, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add_function(wrap_pyfunction!(rank1, m)?)?;
    m.add_function(wrap_pyfunction!(dist_matvec, m)?)?;
    m.add_function(wrap_pyfunction!(mantle_force, m)?)?;
    m.add_function(wrap_pyfunction!(heat_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(potential_energy, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
