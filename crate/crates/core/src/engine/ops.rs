use rayon::prelude::*;

use super::exec::VERTEX_CHUNK;
use super::{EngineError, ExecutionStrategy, PreparedGraph, SumProduct};
use crate::m2g::{graph_to_origin_matrix, matrix_to_graph, Graph};
use crate::matrix::{CooMatrix, DenseMatrix, DenseVector, MatrixDescriptor};
use crate::scalar::Scalar;

fn general_origin<T: Scalar>(rows: usize, cols: usize) -> MatrixDescriptor {
    MatrixDescriptor::general(rows, cols, T::KIND).expect("operand shapes are non-zero")
}

/// One destination and its sorted `(src, weight)` in-edges.
type DestinationRow<T> = (u32, Vec<(u32, T)>);

/// Builds a graph destination by destination; `row` returns the sorted
/// `(src, weight)` in-edges of one destination.
fn build_by_destination<T, F>(vertex_count: usize, origin: MatrixDescriptor, chunk: usize, row: F) -> Graph<T>
where
    T: Scalar,
    F: Fn(usize, &mut Vec<(u32, T)>) + Sync,
{
    let chunk = chunk.max(1);
    let pieces: Vec<Vec<DestinationRow<T>>> = (0..vertex_count.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            (c * chunk..((c + 1) * chunk).min(vertex_count))
                .map(|dst| {
                    let mut edges = Vec::new();
                    row(dst, &mut edges);
                    (dst as u32, edges)
                })
                .collect()
        })
        .collect();
    let edges = pieces
        .into_iter()
        .flatten()
        .flat_map(|(dst, es)| es.into_iter().map(move |(s, w)| (dst as usize, s as usize, w)));
    Graph::from_sorted_edges(vertex_count, origin, edges)
}

impl<T: Scalar> PreparedGraph<T> {
    /// `A · x` on the prepared graph.
    pub fn mv(&self, x: &[T]) -> Result<DenseVector<T>, EngineError> {
        if x.len() != self.cols() {
            return Err(EngineError::ShapeMismatch { op: "mv", left: (self.rows(), self.cols()), right: (x.len(), 1) });
        }
        let mut states = x.to_vec();
        states.resize(self.vertex_count(), T::zero());
        let mut y = self.run(&states, &SumProduct)?;
        y.truncate(self.rows());
        Ok(y.into())
    }

    /// `B · C` as one product per column of `C`, reusing the preprocessing.
    pub fn mm(&self, c: &DenseMatrix<T>) -> Result<DenseMatrix<T>, EngineError> {
        if c.rows() != self.cols() {
            return Err(EngineError::ShapeMismatch { op: "mm", left: (self.rows(), self.cols()), right: c.shape() });
        }
        let mut out = DenseMatrix::zeros(self.rows(), c.cols());
        for k in 0..c.cols() {
            let y = self.mv(&c.column(k))?;
            out.set_column(k, y.as_slice());
        }
        Ok(out)
    }
}

/// Matrix-vector product `A · x`.
pub fn graph_mv<T: Scalar>(g: &Graph<T>, x: &DenseVector<T>) -> Result<DenseVector<T>, EngineError> {
    graph_mv_with(g, x, &ExecutionStrategy::default())
}

pub fn graph_mv_with<T: Scalar>(
    g: &Graph<T>,
    x: &DenseVector<T>,
    strategy: &ExecutionStrategy,
) -> Result<DenseVector<T>, EngineError> {
    PreparedGraph::new(g, *strategy)?.mv(x.as_slice())
}

/// Dense product `B · C`.
pub fn graph_mm<T: Scalar>(g: &Graph<T>, c: &DenseMatrix<T>) -> Result<DenseMatrix<T>, EngineError> {
    graph_mm_with(g, c, &ExecutionStrategy::default())
}

pub fn graph_mm_with<T: Scalar>(
    g: &Graph<T>,
    c: &DenseMatrix<T>,
    strategy: &ExecutionStrategy,
) -> Result<DenseMatrix<T>, EngineError> {
    PreparedGraph::new(g, *strategy)?.mm(c)
}

/// `B · C` computed by transforming `C` and composing the two graphs.
pub fn graph_mm_via_compose<T: Scalar>(g: &Graph<T>, c: &DenseMatrix<T>) -> Result<DenseMatrix<T>, EngineError> {
    if c.rows() != g.cols() {
        return Err(EngineError::ShapeMismatch { op: "mm", left: (g.rows(), g.cols()), right: c.shape() });
    }
    let cm = CooMatrix::from_dense(general_origin::<T>(c.rows(), c.cols()), c)
        .map_err(|e| EngineError::InvalidOperand(e.to_string()))?;
    let product = compose_graphs(g, &matrix_to_graph(&cm))?;
    Ok(graph_to_origin_matrix(&product).to_dense())
}

/// Sum of two graphs of the same shape. Edges present in both have their
/// weights added; exact zeros are dropped.
pub fn graph_add<T: Scalar>(a: &Graph<T>, b: &Graph<T>) -> Result<Graph<T>, EngineError> {
    graph_add_with(a, b, &ExecutionStrategy::default())
}

pub fn graph_add_with<T: Scalar>(a: &Graph<T>, b: &Graph<T>, strategy: &ExecutionStrategy) -> Result<Graph<T>, EngineError> {
    strategy.validate()?;
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(EngineError::ShapeMismatch { op: "add", left: (a.rows(), a.cols()), right: (b.rows(), b.cols()) });
    }
    let chunk = if strategy.preprocessing.bucket { strategy.bucket_size } else { VERTEX_CHUNK };
    let origin = general_origin::<T>(a.rows(), a.cols());
    Ok(build_by_destination(a.vertex_count(), origin, chunk, |dst, out| {
        let (sa, wa) = a.in_edges(dst);
        let (sb, wb) = b.in_edges(dst);
        let (mut i, mut j) = (0, 0);
        while i < sa.len() || j < sb.len() {
            let (src, w) = if j == sb.len() || (i < sa.len() && sa[i] < sb[j]) {
                i += 1;
                (sa[i - 1], wa[i - 1])
            } else if i == sa.len() || sb[j] < sa[i] {
                j += 1;
                (sb[j - 1], wb[j - 1])
            } else {
                i += 1;
                j += 1;
                (sa[i - 1], wa[i - 1] + wb[j - 1])
            };
            if !w.is_zero() {
                out.push((src, w));
            }
        }
    }))
}

/// Graph of the product `A · B`, where `a` encodes `A` and `b` encodes `B`.
///
/// Row `i` of the result accumulates, for each in-edge `j -> i` of `a` in
/// ascending `j`, the in-edges of `j` in `b`. Exact zeros are dropped.
pub fn compose_graphs<T: Scalar>(a: &Graph<T>, b: &Graph<T>) -> Result<Graph<T>, EngineError> {
    if a.cols() != b.rows() {
        return Err(EngineError::ShapeMismatch { op: "compose", left: (a.rows(), a.cols()), right: (b.rows(), b.cols()) });
    }
    let (rows, cols) = (a.rows(), b.cols());
    let origin = general_origin::<T>(rows, cols);
    let vertex_count = rows.max(cols);
    let chunk = VERTEX_CHUNK;
    let pieces: Vec<Vec<(usize, usize, T)>> = (0..rows.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![T::zero(); cols];
            let mut touched = vec![false; cols];
            let mut seen: Vec<u32> = Vec::new();
            let mut out = Vec::new();
            for i in c * chunk..((c + 1) * chunk).min(rows) {
                let (sa, wa) = a.in_edges(i);
                for (&j, &x) in sa.iter().zip(wa) {
                    let (sb, wb) = b.in_edges(j as usize);
                    for (&l, &y) in sb.iter().zip(wb) {
                        let l = l as usize;
                        if !touched[l] {
                            touched[l] = true;
                            seen.push(l as u32);
                        }
                        acc[l] += x * y;
                    }
                }
                seen.sort_unstable();
                for &l in &seen {
                    let l = l as usize;
                    if !acc[l].is_zero() {
                        out.push((i, l, acc[l]));
                    }
                    acc[l] = T::zero();
                    touched[l] = false;
                }
                seen.clear();
            }
            out
        })
        .collect();
    Ok(Graph::from_sorted_edges(vertex_count, origin, pieces.into_iter().flatten()))
}

/// `A + u · conj(w)ᵀ` for a square `A`; exact zeros are dropped.
pub fn graph_rank1_update<T: Scalar>(g: &Graph<T>, u: &DenseVector<T>, w: &DenseVector<T>) -> Result<Graph<T>, EngineError> {
    let n = g.rows();
    if g.cols() != n {
        return Err(EngineError::ShapeMismatch { op: "rank1", left: (g.rows(), g.cols()), right: (g.rows(), g.cols()) });
    }
    if u.len() != n || w.len() != n {
        return Err(EngineError::ShapeMismatch { op: "rank1", left: (u.len(), 1), right: (w.len(), 1) });
    }
    let wc: Vec<(u32, T)> = w
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(j, x)| (j as u32, x.conj()))
        .collect();
    Ok(build_by_destination(n, *g.origin(), VERTEX_CHUNK, |i, out| {
        let (srcs, ws) = g.in_edges(i);
        let ui = u.get(i);
        if ui.is_zero() {
            out.extend(srcs.iter().copied().zip(ws.iter().copied()));
            return;
        }
        let mut k = 0;
        for &(j, wj) in &wc {
            while k < srcs.len() && srcs[k] < j {
                out.push((srcs[k], ws[k]));
                k += 1;
            }
            let mut v = ui * wj;
            if k < srcs.len() && srcs[k] == j {
                v = ws[k] + v;
                k += 1;
            }
            if !v.is_zero() {
                out.push((j, v));
            }
        }
        out.extend(srcs[k..].iter().copied().zip(ws[k..].iter().copied()));
    }))
}

/// `A + Σ u_k · conj(w_k)ᵀ`, applied one rank-1 term at a time.
pub fn graph_rank_k_update<T: Scalar>(
    g: &Graph<T>,
    terms: &[(DenseVector<T>, DenseVector<T>)],
) -> Result<Graph<T>, EngineError> {
    let mut out = g.clone();
    for (u, w) in terms {
        out = graph_rank1_update(&out, u, w)?;
    }
    Ok(out)
}

/// `A + u · conj(w)ᵀ + w · conj(u)ᵀ`: the symmetric (Hermitian) rank-2 update.
pub fn graph_rank2_update<T: Scalar>(g: &Graph<T>, u: &DenseVector<T>, w: &DenseVector<T>) -> Result<Graph<T>, EngineError> {
    graph_rank_k_update(g, &[(u.clone(), w.clone()), (w.clone(), u.clone())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::oracle::{oracle_add, oracle_mm, oracle_mv, oracle_rank1};
    use crate::relative_error;
    use crate::scalar::ScalarKind;
    use num_complex::Complex64;

    fn coo(rows: &[Vec<f64>]) -> CooMatrix<f64> {
        let d = DenseMatrix::from_rows(rows).unwrap();
        CooMatrix::from_dense(MatrixDescriptor::general(d.rows(), d.cols(), ScalarKind::Real64).unwrap(), &d).unwrap()
    }

    #[test]
    fn mv_rectangular() {
        let a = coo(&[vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 0.0]]);
        let g = matrix_to_graph(&a);
        let x = DenseVector::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(graph_mv(&g, &x).unwrap().as_slice(), &[7.0, 6.0]);
        assert!(graph_mv(&g, &DenseVector::new(vec![1.0, 2.0])).is_err());
        let tall = coo(&[vec![1.0], vec![2.0], vec![0.0]]);
        let y = graph_mv(&matrix_to_graph(&tall), &DenseVector::new(vec![5.0])).unwrap();
        assert_eq!(y.as_slice(), &[5.0, 10.0, 0.0]);
    }

    #[test]
    fn add_cancels_to_nothing() {
        let a = coo(&[vec![1.0, 2.0], vec![0.0, 4.0]]);
        let b = coo(&[vec![-1.0, 0.0], vec![3.0, 1.0]]);
        let s = graph_add(&matrix_to_graph(&a), &matrix_to_graph(&b)).unwrap();
        assert_eq!(s.edge_count(), 3);
        let dense = graph_to_origin_matrix(&s).to_dense();
        assert_eq!(dense, oracle_add(&a, &b).unwrap());
    }

    #[test]
    fn compose_matches_oracle() {
        let a = coo(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]]);
        let b = coo(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![4.0, 2.0]]);
        let c = compose_graphs(&matrix_to_graph(&a), &matrix_to_graph(&b)).unwrap();
        assert_eq!((c.rows(), c.cols()), (2, 2));
        let expected = oracle_mm(&a, &b.to_dense()).unwrap();
        assert_eq!(graph_to_origin_matrix(&c).to_dense(), expected);
        // the (1, 1) entry is 2 - 2 = 0 and must not be stored
        assert_eq!(c.edge_count(), 3);
    }

    #[test]
    fn mm_paths_agree() {
        let a = coo(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![0.0, 1.0]]);
        let c = DenseMatrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![-1.0, 1.0, 0.5]]).unwrap();
        let g = matrix_to_graph(&a);
        let expected = oracle_mm(&a, &c).unwrap();
        assert_eq!(graph_mm(&g, &c).unwrap(), expected);
        assert_eq!(graph_mm_via_compose(&g, &c).unwrap(), expected);
    }

    #[test]
    fn rank1_complex_conjugates() {
        let d = MatrixDescriptor::general(2, 2, ScalarKind::Complex64x2).unwrap();
        let a = CooMatrix::from_triplets(d, vec![(0, 0, Complex64::new(1.0, 0.0))]).unwrap();
        let u = DenseVector::new(vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]);
        let w = DenseVector::new(vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)]);
        let r = graph_rank1_update(&matrix_to_graph(&a), &u, &w).unwrap();
        let got = graph_to_origin_matrix(&r).to_dense();
        let expected = oracle_rank1(&a, &u, &w).unwrap();
        assert!(relative_error(got.values(), expected.values()) == 0.0);
        // 1 + i * conj(i) = 2
        assert_eq!(got.get(0, 0), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn rank2_is_hermitian_and_matches_two_rank1_oracles() {
        let d = MatrixDescriptor::general(2, 2, ScalarKind::Complex64x2).unwrap();
        let a = CooMatrix::from_triplets(d, vec![]).unwrap();
        let u = DenseVector::new(vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]);
        let w = DenseVector::new(vec![Complex64::new(2.0, -1.0), Complex64::new(0.5, 0.0)]);
        let got = graph_to_origin_matrix(&graph_rank2_update(&matrix_to_graph(&a), &u, &w).unwrap()).to_dense();
        let first = oracle_rank1(&a, &u, &w).unwrap();
        let second = oracle_rank1(&a, &w, &u).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(got.get(i, j), first.get(i, j) + second.get(i, j));
                assert_eq!(got.get(i, j), got.get(j, i).conj());
            }
        }
        assert_eq!(graph_rank_k_update(&matrix_to_graph(&a), &[]).unwrap(), matrix_to_graph(&a));
    }

    #[test]
    fn strategies_agree_on_mv() {
        use crate::engine::ExecutionStrategy as S;
        let n = 40;
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[0] = 1.0 + i as f64;
            row[i] = 2.0;
            row[(i * 7) % n] += 0.5;
        }
        for (j, x) in rows[3].iter_mut().enumerate() {
            *x = j as f64 * 0.25 - 1.0;
        }
        let a = coo(&rows);
        let g = matrix_to_graph(&a);
        let x = DenseVector::new((0..n).map(|k| (k as f64).sin()).collect());
        let oracle = oracle_mv(&a, &x).unwrap();
        for s in [
            S::vertex_centric(),
            S::edge_centric(),
            S::edge_centric().with_split(4),
            S::vertex_centric().with_reorder().with_split(3).with_buckets(5),
            S::edge_centric().with_reorder().with_buckets(1),
        ] {
            let y = graph_mv_with(&g, &x, &s).unwrap();
            assert!(relative_error(y.as_slice(), oracle.as_slice()) <= 1e-12, "{s}");
        }
    }
}
