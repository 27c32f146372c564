//! Brute-force dense reference results.
//!
//! Every operand is expanded and densified, then evaluated with textbook
//! loops summing left to right. These are the acceptance standard for
//! engine results and are intentionally O(n^2) to O(n^3).

use super::{CooMatrix, DenseMatrix, DenseVector, MatrixError};
use crate::scalar::Scalar;

/// `A · v`.
pub fn oracle_mv<T: Scalar>(a: &CooMatrix<T>, v: &DenseVector<T>) -> Result<DenseVector<T>, MatrixError> {
    if v.len() != a.cols() {
        return Err(MatrixError::ShapeMismatch { op: "mv", left: a.shape(), right: (v.len(), 1) });
    }
    let dense = a.to_dense();
    let out = (0..a.rows())
        .map(|i| {
            let mut acc = T::zero();
            for j in 0..a.cols() {
                acc += dense.get(i, j) * v.get(j);
            }
            acc
        })
        .collect::<Vec<_>>();
    Ok(out.into())
}

/// `A + B`.
pub fn oracle_add<T: Scalar>(a: &CooMatrix<T>, b: &CooMatrix<T>) -> Result<DenseMatrix<T>, MatrixError> {
    if a.shape() != b.shape() {
        return Err(MatrixError::ShapeMismatch { op: "add", left: a.shape(), right: b.shape() });
    }
    let (da, db) = (a.to_dense(), b.to_dense());
    let mut out = DenseMatrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, da.get(i, j) + db.get(i, j));
        }
    }
    Ok(out)
}

/// `B · C` for a dense right operand.
pub fn oracle_mm_dense<T: Scalar>(b: &DenseMatrix<T>, c: &DenseMatrix<T>) -> Result<DenseMatrix<T>, MatrixError> {
    if b.cols() != c.rows() {
        return Err(MatrixError::ShapeMismatch { op: "mm", left: b.shape(), right: c.shape() });
    }
    let mut out = DenseMatrix::zeros(b.rows(), c.cols());
    for i in 0..b.rows() {
        for k in 0..c.cols() {
            let mut acc = T::zero();
            for j in 0..b.cols() {
                acc += b.get(i, j) * c.get(j, k);
            }
            out.set(i, k, acc);
        }
    }
    Ok(out)
}

/// `B · C`.
pub fn oracle_mm<T: Scalar>(b: &CooMatrix<T>, c: &DenseMatrix<T>) -> Result<DenseMatrix<T>, MatrixError> {
    oracle_mm_dense(&b.to_dense(), c)
}

/// `A + u · conj(w)ᵀ`; for real scalars the conjugate is the identity.
pub fn oracle_rank1<T: Scalar>(
    a: &CooMatrix<T>,
    u: &DenseVector<T>,
    w: &DenseVector<T>,
) -> Result<DenseMatrix<T>, MatrixError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(MatrixError::ShapeMismatch { op: "rank1", left: a.shape(), right: a.shape() });
    }
    if u.len() != n || w.len() != n {
        return Err(MatrixError::ShapeMismatch { op: "rank1", left: (u.len(), 1), right: (w.len(), 1) });
    }
    let mut out = a.to_dense();
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, out.get(i, j) + u.get(i) * w.get(j).conj());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{MatrixDescriptor, MatrixKind};
    use crate::scalar::ScalarKind;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn general(rows: &[Vec<f64>]) -> CooMatrix<f64> {
        let d = DenseMatrix::from_rows(rows).unwrap();
        CooMatrix::from_dense(MatrixDescriptor::general(d.rows(), d.cols(), ScalarKind::Real64).unwrap(), &d).unwrap()
    }

    #[test]
    fn mv_identity_and_swap() {
        let id = general(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(oracle_mv(&id, &vec![7.0, -3.0].into()).unwrap().as_slice(), &[7.0, -3.0]);
        let a = general(&[vec![0.0, 2.0], vec![3.0, 0.0]]);
        assert_eq!(oracle_mv(&a, &vec![1.0, 4.0].into()).unwrap().as_slice(), &[8.0, 3.0]);
    }

    #[test]
    fn mm_small() {
        let b = general(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        let c = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let out = oracle_mm(&b, &c).unwrap();
        assert_eq!(out, DenseMatrix::from_rows(&[vec![3.0, 2.0], vec![1.0, 1.0]]).unwrap());
    }

    #[test]
    fn shape_law() {
        let a = general(&[vec![1.0, 2.0, 3.0]]);
        assert_eq!(oracle_mv(&a, &vec![1.0, 1.0, 1.0].into()).unwrap().len(), 1);
        assert!(oracle_mv(&a, &vec![1.0].into()).is_err());
        let c = DenseMatrix::zeros(3, 5);
        assert_eq!(oracle_mm(&a, &c).unwrap().shape(), (1, 5));
        assert!(oracle_mm(&a, &DenseMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn rank1_conjugates() {
        let d = MatrixDescriptor::new(2, 2, MatrixKind::Hermitian, ScalarKind::Complex64x2).unwrap();
        let a = CooMatrix::zeros(d).unwrap();
        let u: DenseVector<Complex64> = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)].into();
        let out = oracle_rank1(&a, &u, &u).unwrap();
        assert_eq!(out.get(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mv_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 16;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let a = general(&rows);
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (alpha, beta) = (0.75, -1.25);
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| alpha * x + beta * y).collect();
        let lhs = oracle_mv(&a, &mix.into()).unwrap();
        let au = oracle_mv(&a, &u.into()).unwrap();
        let av = oracle_mv(&a, &v.into()).unwrap();
        let rhs: Vec<f64> = au.as_slice().iter().zip(av.as_slice()).map(|(x, y)| alpha * x + beta * y).collect();
        assert!(crate::scalar::relative_error(lhs.as_slice(), &rhs) < 1e-12);
    }
}
