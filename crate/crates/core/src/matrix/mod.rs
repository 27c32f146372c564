//! Matrix data model, Matrix Market I/O, storage expansion and the dense
//! reference oracles.

mod coo;
mod dense;
mod descriptor;
mod error;
pub mod mtx;
pub mod oracle;
pub mod vector_io;

pub use coo::{packed_index, CooMatrix, MatrixData};
pub use dense::{DenseMatrix, DenseVector};
pub use descriptor::{MatrixDescriptor, MatrixKind, Uplo};
pub use error::MatrixError;
pub use mtx::{parse_matrix_market, write_matrix_data, write_matrix_market, MtxError};
pub use oracle::{oracle_add, oracle_mm, oracle_mm_dense, oracle_mv, oracle_rank1};
pub use vector_io::{parse_vector, write_vector, write_vector_data, VectorData};

/// Materializes every implied entry of `m` as a `General` matrix.
pub fn expand_storage<T: crate::scalar::Scalar>(m: &CooMatrix<T>) -> CooMatrix<T> {
    m.expand()
}
