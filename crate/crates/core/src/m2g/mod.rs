//! Matrix-to-graph transformation.
//!
//! A matrix with `x` rows and `y` columns becomes a graph with
//! `max(x, y)` vertices and one weighted edge `j -> i` per nonzero
//! `A[i, j]` of its expanded form.

pub mod binary;
mod cache;
mod detect;
mod graph;

use num_complex::Complex64;
use thiserror::Error;

pub use binary::{read_graph, read_graph_bytes, write_graph, AnyGraph, MAGIC};
pub use cache::{CacheKey, CacheStats, GraphCache};
pub use detect::{detect_matrix, parse_dense_grid, DetectError};
pub use graph::{Graph, OutAdjacency};

use crate::matrix::{CooMatrix, MatrixData};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid graph layout: {reason}")]
    InvalidCsr { reason: String },
    #[error("shape {rows}x{cols} needs {expected} vertices, graph has {found}")]
    VertexCount { rows: usize, cols: usize, expected: usize, found: usize },
    #[error("edge {src} -> {dst} lies outside a {rows}x{cols} matrix")]
    EdgeOutOfShape { dst: usize, src: usize, rows: usize, cols: usize },
    #[error("not a g4s graph file: {reason}")]
    Format { reason: String },
}

/// Transforms a matrix of any storage kind into its graph.
pub fn matrix_to_graph<T: Scalar>(m: &CooMatrix<T>) -> Graph<T> {
    let expanded = m.expand();
    let origin = *expanded.descriptor();
    Graph::from_sorted_edges(origin.vertex_count(), origin, expanded.entries().iter().copied())
}

pub fn matrix_data_to_graph(m: &MatrixData) -> AnyGraph {
    match m {
        MatrixData::Real(m) => AnyGraph::Real(matrix_to_graph(m)),
        MatrixData::Complex(m) => AnyGraph::Complex(matrix_to_graph(m)),
    }
}

/// Reads a graph back as a `General` matrix of the given shape.
pub fn graph_to_matrix<T: Scalar>(g: &Graph<T>, rows: usize, cols: usize) -> Result<CooMatrix<T>, GraphError> {
    let expected = rows.max(cols);
    if expected != g.vertex_count() {
        return Err(GraphError::VertexCount { rows, cols, expected, found: g.vertex_count() });
    }
    let mut entries = Vec::with_capacity(g.edge_count());
    for (dst, src, w) in g.edges() {
        if dst >= rows || src >= cols {
            return Err(GraphError::EdgeOutOfShape { dst, src, rows, cols });
        }
        if !w.is_zero() {
            entries.push((dst, src, w));
        }
    }
    Ok(CooMatrix::general_unchecked(rows, cols, entries))
}

/// [`graph_to_matrix`] using the graph's recorded origin shape.
pub fn graph_to_origin_matrix<T: Scalar>(g: &Graph<T>) -> CooMatrix<T> {
    graph_to_matrix(g, g.rows(), g.cols()).expect("a graph always fits its origin shape")
}

impl Graph<f64> {
    pub fn to_complex(&self) -> Graph<Complex64> {
        let m = graph_to_origin_matrix(self).to_complex();
        matrix_to_graph(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{MatrixDescriptor, MatrixKind};
    use crate::scalar::ScalarKind;

    fn desc(rows: usize, cols: usize) -> MatrixDescriptor {
        MatrixDescriptor::general(rows, cols, ScalarKind::Real64).unwrap()
    }

    #[test]
    fn identity_is_self_loops() {
        let m = CooMatrix::from_triplets(desc(2, 2), vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let g = matrix_to_graph(&m);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0, 1.0), (1, 1, 1.0)]);
    }

    #[test]
    fn rectangular_uses_larger_dimension() {
        let m = CooMatrix::from_triplets(desc(3, 2), vec![(2, 1, 5.0)]).unwrap();
        let g = matrix_to_graph(&m);
        assert_eq!(g.vertex_count(), 3);
        // source = column 1, destination = row 2
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(2, 1, 5.0)]);
        let back = graph_to_matrix(&g, 3, 2).unwrap();
        assert_eq!(back.entries(), &[(2, 1, 5.0)]);
    }

    #[test]
    fn zero_matrix_has_no_edges() {
        let g = matrix_to_graph(&CooMatrix::<f64>::zeros(desc(4, 4)).unwrap());
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 0));
        assert_eq!(graph_to_matrix(&g, 4, 4).unwrap().nnz(), 0);
    }

    #[test]
    fn inverse_rejects_bad_shapes() {
        let m = CooMatrix::from_triplets(desc(3, 2), vec![(2, 1, 5.0)]).unwrap();
        let g = matrix_to_graph(&m);
        assert!(matches!(graph_to_matrix(&g, 2, 3), Err(GraphError::EdgeOutOfShape { .. })));
        assert!(matches!(graph_to_matrix(&g, 2, 2), Err(GraphError::VertexCount { .. })));
    }

    #[test]
    fn symmetric_input_is_expanded() {
        let d = MatrixDescriptor::new(2, 2, MatrixKind::Symmetric, ScalarKind::Real64).unwrap();
        let m = CooMatrix::from_triplets(d, vec![(1, 0, 4.0)]).unwrap();
        let g = matrix_to_graph(&m);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.origin().kind, MatrixKind::General);
    }
}
