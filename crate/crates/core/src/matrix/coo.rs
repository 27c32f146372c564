use num_complex::Complex64;

use super::descriptor::Mirror;
use super::{DenseMatrix, MatrixDescriptor, MatrixError, MatrixKind, Uplo};
use crate::scalar::{Scalar, ScalarKind};

/// Coordinate-format sparse matrix; the single source of truth for matrix
/// content.
///
/// Entries are 0-based, sorted row-major, unique and nonzero. Stored
/// entries respect the kind's storage region; the implied entries of
/// symmetric-like kinds are materialized by [`CooMatrix::expand`].
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix<T> {
    descriptor: MatrixDescriptor,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> CooMatrix<T> {
    /// Builds a matrix from unordered triplets. Exact zeros are dropped.
    pub fn from_triplets(
        descriptor: MatrixDescriptor,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, MatrixError> {
        if descriptor.scalar != T::KIND {
            return Err(MatrixError::ScalarMismatch { declared: descriptor.scalar, actual: T::KIND });
        }
        let MatrixDescriptor { rows, cols, kind, .. } = descriptor;
        let mut entries = Vec::new();
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(MatrixError::IndexOutOfBounds { i, j, rows, cols });
            }
            if !v.is_finite() {
                return Err(MatrixError::NonFinite { i, j });
            }
            if v.is_zero() {
                continue;
            }
            if kind == MatrixKind::SkewSymmetric && i == j {
                return Err(MatrixError::SkewDiagonal { i });
            }
            if !kind.stores(i, j) {
                return Err(MatrixError::OutsideStorage { i, j, kind });
            }
            if kind.is_hermitian() && i == j && v.parts().1 != 0.0 {
                return Err(MatrixError::HermitianDiagonal { i });
            }
            entries.push((i, j, v));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(MatrixError::DuplicateEntry { i: w[0].0, j: w[0].1 });
        }
        Ok(CooMatrix { descriptor, entries })
    }

    pub fn zeros(descriptor: MatrixDescriptor) -> Result<Self, MatrixError> {
        Self::from_triplets(descriptor, std::iter::empty())
    }

    /// Picks the stored region of `dense` under the descriptor's kind.
    pub fn from_dense(descriptor: MatrixDescriptor, dense: &DenseMatrix<T>) -> Result<Self, MatrixError> {
        if dense.shape() != descriptor.shape() {
            return Err(MatrixError::ShapeMismatch {
                op: "from_dense",
                left: descriptor.shape(),
                right: dense.shape(),
            });
        }
        let kind = descriptor.kind;
        let triplets = (0..dense.rows())
            .flat_map(|i| (0..dense.cols()).map(move |j| (i, j)))
            .filter(|&(i, j)| kind.stores(i, j))
            .map(|(i, j)| (i, j, dense.get(i, j)));
        Self::from_triplets(descriptor, triplets)
    }

    /// Builds a matrix from BLAS column-major packed storage of one
    /// triangle. `kind` must be one of the packed kinds.
    pub fn from_packed(n: usize, kind: MatrixKind, packed: &[T]) -> Result<Self, MatrixError> {
        let uplo = match kind {
            MatrixKind::PackedSymmetric(u) | MatrixKind::PackedTriangular(u) | MatrixKind::HermitianPacked(u) => u,
            _ => return Err(MatrixError::OutsideStorage { i: 0, j: 0, kind }),
        };
        let expected = n * (n + 1) / 2;
        if packed.len() != expected {
            return Err(MatrixError::LengthMismatch { expected, found: packed.len() });
        }
        let descriptor = MatrixDescriptor::new(n, n, kind, T::KIND)?;
        let mut triplets = Vec::with_capacity(expected);
        for j in 0..n {
            let rows = match uplo {
                Uplo::Upper => 0..j + 1,
                Uplo::Lower => j..n,
            };
            for i in rows {
                triplets.push((i, j, packed[packed_index(n, uplo, i, j)]));
            }
        }
        Self::from_triplets(descriptor, triplets)
    }

    /// Builds a banded matrix from LAPACK band storage: `band` is
    /// column-major with leading dimension `kl + ku + 1`, and holds
    /// `A[i, j]` at row `ku + i - j` of column `j`.
    pub fn from_band_storage(rows: usize, cols: usize, kl: usize, ku: usize, band: &[T]) -> Result<Self, MatrixError> {
        let ld = kl + ku + 1;
        if band.len() != ld * cols {
            return Err(MatrixError::LengthMismatch { expected: ld * cols, found: band.len() });
        }
        let descriptor = MatrixDescriptor::new(rows, cols, MatrixKind::Banded { kl, ku }, T::KIND)?;
        let mut triplets = Vec::new();
        for j in 0..cols {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl + 1).min(rows);
            for i in lo..hi {
                triplets.push((i, j, band[j * ld + ku + i - j]));
            }
        }
        Self::from_triplets(descriptor, triplets)
    }

    pub fn descriptor(&self) -> &MatrixDescriptor {
        &self.descriptor
    }

    pub fn kind(&self) -> MatrixKind {
        self.descriptor.kind
    }

    pub fn rows(&self) -> usize {
        self.descriptor.rows
    }

    pub fn cols(&self) -> usize {
        self.descriptor.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        self.descriptor.shape()
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Materializes every implied entry and returns a `General` matrix.
    pub fn expand(&self) -> CooMatrix<T> {
        let mirror = self.kind().mirror();
        let mut entries = Vec::with_capacity(self.entries.len() * 2);
        for &(i, j, v) in &self.entries {
            entries.push((i, j, v));
            if i != j {
                match mirror {
                    Mirror::None => {}
                    Mirror::Equal => entries.push((j, i, v)),
                    Mirror::Negated => entries.push((j, i, -v)),
                    Mirror::Conjugated => entries.push((j, i, v.conj())),
                }
            }
        }
        if mirror != Mirror::None {
            entries.sort_by_key(|&(i, j, _)| (i, j));
        }
        CooMatrix {
            descriptor: self.descriptor.expanded(),
            entries,
        }
    }

    /// Dense form of the expanded matrix.
    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut dense = DenseMatrix::zeros(self.rows(), self.cols());
        for &(i, j, v) in self.expand().entries() {
            dense.set(i, j, v);
        }
        dense
    }

    /// Fresh `General` matrix holding `entries` that are already sorted,
    /// unique, in bounds and nonzero.
    pub(crate) fn general_unchecked(rows: usize, cols: usize, entries: Vec<(usize, usize, T)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        debug_assert!(entries.iter().all(|&(i, j, v)| i < rows && j < cols && !v.is_zero()));
        CooMatrix {
            descriptor: MatrixDescriptor {
                rows,
                cols,
                kind: MatrixKind::General,
                scalar: T::KIND,
            },
            entries,
        }
    }
}

impl CooMatrix<f64> {
    /// Same matrix with complex scalars.
    pub fn to_complex(&self) -> CooMatrix<Complex64> {
        CooMatrix {
            descriptor: MatrixDescriptor {
                scalar: ScalarKind::Complex64x2,
                ..self.descriptor
            },
            entries: self.entries.iter().map(|&(i, j, v)| (i, j, Complex64::new(v, 0.0))).collect(),
        }
    }
}

/// Index of `(i, j)` in BLAS column-major packed storage.
pub fn packed_index(n: usize, uplo: Uplo, i: usize, j: usize) -> usize {
    match uplo {
        Uplo::Upper => i + j * (j + 1) / 2,
        Uplo::Lower => i - j + j * (2 * n - j + 1) / 2,
    }
}

/// A matrix whose scalar type is only known at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixData {
    Real(CooMatrix<f64>),
    Complex(CooMatrix<Complex64>),
}

impl MatrixData {
    pub fn descriptor(&self) -> &MatrixDescriptor {
        match self {
            MatrixData::Real(m) => m.descriptor(),
            MatrixData::Complex(m) => m.descriptor(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            MatrixData::Real(m) => m.nnz(),
            MatrixData::Complex(m) => m.nnz(),
        }
    }

    pub fn expand(&self) -> MatrixData {
        match self {
            MatrixData::Real(m) => MatrixData::Real(m.expand()),
            MatrixData::Complex(m) => MatrixData::Complex(m.expand()),
        }
    }

    pub fn into_complex(self) -> CooMatrix<Complex64> {
        match self {
            MatrixData::Real(m) => m.to_complex(),
            MatrixData::Complex(m) => m,
        }
    }
}

impl From<CooMatrix<f64>> for MatrixData {
    fn from(m: CooMatrix<f64>) -> Self {
        MatrixData::Real(m)
    }
}

impl From<CooMatrix<Complex64>> for MatrixData {
    fn from(m: CooMatrix<Complex64>) -> Self {
        MatrixData::Complex(m)
    }
}
