use super::{Cluster, CommMetrics, DistError, Policies};
use crate::engine::{graph_add, graph_rank1_update, EngineError, SumProduct};
use crate::m2g::Graph;
use crate::matrix::{DenseMatrix, DenseVector, MatrixDescriptor};
use crate::scalar::Scalar;

fn padded<T: Scalar>(x: &[T], m: usize) -> Vec<T> {
    let mut v = x.to_vec();
    v.resize(m, T::zero());
    v
}

/// `A · x` on `p` shards.
pub fn dist_mv<T: Scalar>(
    g: &Graph<T>,
    x: &DenseVector<T>,
    p: usize,
    policies: &Policies,
) -> Result<(DenseVector<T>, CommMetrics), DistError> {
    if x.len() != g.cols() {
        return Err(EngineError::ShapeMismatch { op: "mv", left: (g.rows(), g.cols()), right: (x.len(), 1) }.into());
    }
    let mut cluster = Cluster::new(g, p, *policies)?;
    let mut y = cluster.superstep(&padded(x.as_slice(), g.vertex_count()), &SumProduct)?;
    y.truncate(g.rows());
    Ok((y.into(), cluster.into_metrics()))
}

/// `B · C` with one superstep per column of `C`.
pub fn dist_mm<T: Scalar>(
    g: &Graph<T>,
    c: &DenseMatrix<T>,
    p: usize,
    policies: &Policies,
) -> Result<(DenseMatrix<T>, CommMetrics), DistError> {
    if c.rows() != g.cols() {
        return Err(EngineError::ShapeMismatch { op: "mm", left: (g.rows(), g.cols()), right: c.shape() }.into());
    }
    let mut cluster = Cluster::new(g, p, *policies)?;
    let mut out = DenseMatrix::zeros(g.rows(), c.cols());
    for k in 0..c.cols() {
        let y = cluster.superstep(&padded(&c.column(k), g.vertex_count()), &SumProduct)?;
        out.set_column(k, &y[..g.rows()]);
    }
    Ok((out, cluster.into_metrics()))
}

/// Graph of `A · B` with one superstep over `a` per column of `B`; exact
/// zeros are dropped.
pub fn dist_compose<T: Scalar>(
    a: &Graph<T>,
    b: &Graph<T>,
    p: usize,
    policies: &Policies,
) -> Result<(Graph<T>, CommMetrics), DistError> {
    if a.cols() != b.rows() {
        return Err(
            EngineError::ShapeMismatch { op: "compose", left: (a.rows(), a.cols()), right: (b.rows(), b.cols()) }.into(),
        );
    }
    let (rows, cols) = (a.rows(), b.cols());
    let mut cluster = Cluster::new(a, p, *policies)?;
    let out_b = b.out_adjacency();
    let mut edges = Vec::new();
    for l in 0..cols {
        let mut x = vec![T::zero(); a.vertex_count()];
        for (j, e) in out_b.out_edges(l) {
            x[j as usize] = b.weights()[e];
        }
        let y = cluster.superstep(&x, &SumProduct)?;
        edges.extend(y[..rows].iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, &v)| (i, l, v)));
    }
    edges.sort_unstable_by_key(|&(i, l, _)| (i, l));
    let origin = MatrixDescriptor::general(rows, cols, T::KIND).expect("non-zero shape");
    Ok((Graph::from_sorted_edges(rows.max(cols), origin, edges), cluster.into_metrics()))
}

/// `A + B` on `p` shards. Each output row depends only on the same row of
/// the inputs, so shards work locally and exchange nothing.
pub fn dist_add<T: Scalar>(
    a: &Graph<T>,
    b: &Graph<T>,
    p: usize,
    policies: &Policies,
) -> Result<(Graph<T>, CommMetrics), DistError> {
    let sum = graph_add(a, b)?;
    let mut cluster = Cluster::new(a, p, *policies)?;
    cluster.local_superstep(|v| a.in_degree(v) + b.in_degree(v));
    Ok((sum, cluster.into_metrics()))
}

/// `A + u · conj(w)ᵀ` on `p` shards; row-local like [`dist_add`].
pub fn dist_rank1<T: Scalar>(
    g: &Graph<T>,
    u: &DenseVector<T>,
    w: &DenseVector<T>,
    p: usize,
    policies: &Policies,
) -> Result<(Graph<T>, CommMetrics), DistError> {
    let out = graph_rank1_update(g, u, w)?;
    let mut cluster = Cluster::new(g, p, *policies)?;
    cluster.local_superstep(|v| out.in_degree(v));
    Ok((out, cluster.into_metrics()))
}
