use serde::{Deserialize, Serialize};

use super::MatrixError;
use crate::scalar::ScalarKind;

/// Which triangle a packed or triangular storage holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uplo {
    Upper,
    Lower,
}

/// Storage kind of a matrix.
///
/// Symmetric, skew-symmetric and Hermitian kinds store the lower triangle,
/// matching Matrix Market. Packed kinds store the triangle named by their
/// [`Uplo`], and `HermitianBanded { k }` stores the lower triangle within
/// `k` sub-diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
    TriangularUpper,
    TriangularLower,
    Banded { kl: usize, ku: usize },
    PackedSymmetric(Uplo),
    PackedTriangular(Uplo),
    HermitianBanded { k: usize },
    HermitianPacked(Uplo),
}

/// How stored entries expand into the full matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mirror {
    None,
    Equal,
    Negated,
    Conjugated,
}

impl MatrixKind {
    pub fn requires_square(self) -> bool {
        !matches!(self, MatrixKind::General | MatrixKind::Banded { .. })
    }

    pub fn is_hermitian(self) -> bool {
        matches!(
            self,
            MatrixKind::Hermitian | MatrixKind::HermitianBanded { .. } | MatrixKind::HermitianPacked(_)
        )
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, MatrixKind::Symmetric | MatrixKind::PackedSymmetric(_))
    }

    pub fn is_triangular(self) -> bool {
        matches!(
            self,
            MatrixKind::TriangularUpper | MatrixKind::TriangularLower | MatrixKind::PackedTriangular(_)
        )
    }

    pub fn is_banded(self) -> bool {
        matches!(self, MatrixKind::Banded { .. } | MatrixKind::HermitianBanded { .. })
    }

    pub fn is_packed(self) -> bool {
        matches!(
            self,
            MatrixKind::PackedSymmetric(_) | MatrixKind::PackedTriangular(_) | MatrixKind::HermitianPacked(_)
        )
    }

    pub(crate) fn mirror(self) -> Mirror {
        match self {
            MatrixKind::Symmetric | MatrixKind::PackedSymmetric(_) => Mirror::Equal,
            MatrixKind::SkewSymmetric => Mirror::Negated,
            MatrixKind::Hermitian | MatrixKind::HermitianBanded { .. } | MatrixKind::HermitianPacked(_) => {
                Mirror::Conjugated
            }
            _ => Mirror::None,
        }
    }

    /// Whether `(i, j)` may be stored under this kind.
    pub fn stores(self, i: usize, j: usize) -> bool {
        match self {
            MatrixKind::General => true,
            MatrixKind::Symmetric | MatrixKind::Hermitian | MatrixKind::TriangularLower => i >= j,
            MatrixKind::SkewSymmetric => i > j,
            MatrixKind::TriangularUpper => i <= j,
            MatrixKind::Banded { kl, ku } => i <= j + kl && j <= i + ku,
            MatrixKind::PackedSymmetric(uplo)
            | MatrixKind::PackedTriangular(uplo)
            | MatrixKind::HermitianPacked(uplo) => match uplo {
                Uplo::Upper => i <= j,
                Uplo::Lower => i >= j,
            },
            MatrixKind::HermitianBanded { k } => i >= j && i - j <= k,
        }
    }
}

/// Shape, storage kind and element type of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixDescriptor {
    pub rows: usize,
    pub cols: usize,
    pub kind: MatrixKind,
    pub scalar: ScalarKind,
}

impl MatrixDescriptor {
    pub fn new(rows: usize, cols: usize, kind: MatrixKind, scalar: ScalarKind) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        if kind.requires_square() && rows != cols {
            return Err(MatrixError::NotSquare { kind, rows, cols });
        }
        match kind {
            MatrixKind::Banded { kl, ku } if kl >= rows || ku >= cols => {
                return Err(MatrixError::BandOutOfRange { kl, ku, rows, cols });
            }
            MatrixKind::HermitianBanded { k } if k >= rows => {
                return Err(MatrixError::BandOutOfRange { kl: k, ku: k, rows, cols });
            }
            _ => {}
        }
        if kind.is_hermitian() && scalar != ScalarKind::Complex64x2 {
            return Err(MatrixError::NeedsComplex { kind });
        }
        Ok(MatrixDescriptor { rows, cols, kind, scalar })
    }

    pub fn general(rows: usize, cols: usize, scalar: ScalarKind) -> Result<Self, MatrixError> {
        Self::new(rows, cols, MatrixKind::General, scalar)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `max(rows, cols)`, the vertex count of the transformed graph.
    pub fn vertex_count(&self) -> usize {
        self.rows.max(self.cols)
    }

    pub(crate) fn expanded(&self) -> MatrixDescriptor {
        MatrixDescriptor {
            kind: MatrixKind::General,
            ..*self
        }
    }
}
