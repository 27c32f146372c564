//! File loading, writing and JSON rendering of results.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use g4s::m2g::{graph_to_origin_matrix, parse_dense_grid, read_graph_bytes, AnyGraph, Graph, MAGIC};
use g4s::matrix::{
    parse_matrix_market, parse_vector, write_matrix_market, write_vector, CooMatrix, DenseMatrix, DenseVector,
    MatrixData, MatrixDescriptor, VectorData,
};
use g4s::{Complex64, Scalar, ScalarKind};

use crate::error::{CliError, CliResult};

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| CliError::invalid(format!("{} is not UTF-8 text", path.display())))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

/// Loads a matrix from Matrix Market text, a whitespace dense grid or a
/// `.g4s` graph file, chosen by content.
pub fn load_matrix(path: &Path) -> CliResult<MatrixData> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(MAGIC) {
        let g = read_graph_bytes(&bytes).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        return Ok(match g {
            AnyGraph::Real(g) => MatrixData::Real(graph_to_origin_matrix(&g)),
            AnyGraph::Complex(g) => MatrixData::Complex(graph_to_origin_matrix(&g)),
        });
    }
    let text = String::from_utf8(bytes).map_err(|_| CliError::invalid(format!("{} is not UTF-8 text", path.display())))?;
    let parsed = if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(&text).map_err(|e| e.to_string())
    } else {
        parse_dense_grid(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn load_vector(path: &Path) -> CliResult<VectorData> {
    parse_vector(&read_text(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Scalars the command line can compute in. Real inputs are promoted to
/// complex whenever any operand of a command is complex.
pub trait CliScalar: Scalar {
    fn matrix(m: MatrixData) -> CooMatrix<Self>;
    fn vector(v: VectorData) -> DenseVector<Self>;
    fn to_json(self) -> Value;
}

impl CliScalar for f64 {
    fn matrix(m: MatrixData) -> CooMatrix<f64> {
        match m {
            MatrixData::Real(m) => m,
            MatrixData::Complex(_) => unreachable!("complex operands are promoted before dispatch"),
        }
    }

    fn vector(v: VectorData) -> DenseVector<f64> {
        match v {
            VectorData::Real(v) => v,
            VectorData::Complex(_) => unreachable!("complex operands are promoted before dispatch"),
        }
    }

    fn to_json(self) -> Value {
        json!(self)
    }
}

impl CliScalar for Complex64 {
    fn matrix(m: MatrixData) -> CooMatrix<Complex64> {
        m.into_complex()
    }

    fn vector(v: VectorData) -> DenseVector<Complex64> {
        v.into_complex()
    }

    fn to_json(self) -> Value {
        json!([self.re, self.im])
    }
}

pub fn is_complex_matrix(m: &MatrixData) -> bool {
    matches!(m, MatrixData::Complex(_))
}

pub fn is_complex_vector(v: &VectorData) -> bool {
    v.scalar() == ScalarKind::Complex64x2
}

pub fn vector_json<T: CliScalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(|&x| x.to_json()).collect())
}

pub fn dense_json<T: CliScalar>(m: &DenseMatrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| m.get(i, j).to_json()).collect())).collect())
}

pub fn graph_entries_json<T: CliScalar>(g: &Graph<T>) -> Value {
    let m = graph_to_origin_matrix(g);
    Value::Array(m.entries().iter().map(|&(i, j, v)| json!([i, j, v.to_json()])).collect())
}

pub fn dense_to_mtx<T: Scalar>(m: &DenseMatrix<T>) -> CliResult<String> {
    let d = MatrixDescriptor::general(m.rows(), m.cols(), T::KIND).map_err(|e| CliError::Internal(e.to_string()))?;
    let coo = CooMatrix::from_dense(d, m).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(write_matrix_market(&coo))
}

pub fn graph_to_mtx<T: Scalar>(g: &Graph<T>) -> String {
    write_matrix_market(&graph_to_origin_matrix(g))
}

pub fn vector_text<T: Scalar>(v: &[T]) -> String {
    write_vector(v)
}
