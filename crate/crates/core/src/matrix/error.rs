use thiserror::Error;

use super::MatrixKind;
use crate::scalar::ScalarKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("{kind:?} storage requires a square matrix, got {rows}x{cols}")]
    NotSquare { kind: MatrixKind, rows: usize, cols: usize },
    #[error("band widths kl={kl}, ku={ku} do not fit a {rows}x{cols} matrix")]
    BandOutOfRange { kl: usize, ku: usize, rows: usize, cols: usize },
    #[error("{kind:?} storage requires complex scalars")]
    NeedsComplex { kind: MatrixKind },
    #[error("descriptor declares {declared:?} scalars but values are {actual:?}")]
    ScalarMismatch { declared: ScalarKind, actual: ScalarKind },
    #[error("entry ({i}, {j}) is outside a {rows}x{cols} matrix")]
    IndexOutOfBounds { i: usize, j: usize, rows: usize, cols: usize },
    #[error("entry ({i}, {j}) appears more than once")]
    DuplicateEntry { i: usize, j: usize },
    #[error("entry ({i}, {j}) lies outside the stored region of {kind:?}")]
    OutsideStorage { i: usize, j: usize, kind: MatrixKind },
    #[error("skew-symmetric matrix stores diagonal entry ({i}, {i})")]
    SkewDiagonal { i: usize },
    #[error("hermitian diagonal entry ({i}, {i}) has a nonzero imaginary part")]
    HermitianDiagonal { i: usize },
    #[error("entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}
