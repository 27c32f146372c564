//! # g4s
//!
//! Matrix computation on a graph engine. Every matrix becomes a weighted
//! directed graph (one edge per nonzero, `m = max(rows, cols)` vertices)
//! and every operation runs through two user-facing primitives: a
//! *gather* that turns a neighbor state and an edge weight into a message,
//! and an *apply* that folds the combined messages into a vertex's state.
//!
//! ```
//! use g4s::matrix::{CooMatrix, MatrixDescriptor, DenseVector};
//! use g4s::scalar::ScalarKind;
//! use g4s::{m2g::matrix_to_graph, engine::graph_mv};
//!
//! let d = MatrixDescriptor::general(2, 2, ScalarKind::Real64).unwrap();
//! let a = CooMatrix::from_triplets(d, vec![(0, 1, 2.0), (1, 0, 3.0)]).unwrap();
//! let g = matrix_to_graph(&a);
//! let y = graph_mv(&g, &DenseVector::new(vec![1.0, 4.0])).unwrap();
//! assert_eq!(y.as_slice(), &[8.0, 3.0]);
//! ```
//!
//! Modules:
//!
//! - [`matrix`]: coordinate matrices, storage kinds, Matrix Market I/O and
//!   the brute-force dense oracles.
//! - [`m2g`]: matrix-to-graph transformation, the inverse map, content
//!   keyed caching and the `.g4s` binary format.
//! - [`engine`]: the gather/apply executor and the built-in operations
//!   (MV, addition, MM, composition, rank-1 update).
//! - [`optimizer`]: community reordering, hub splitting, bucketing.
//! - [`strategy`]: featurization and the decision-tree strategy selector.
//! - [`distsim`]: sharded BSP simulation with message merging and codecs.
//! - [`routines`]: the mantle-force, potential-energy and heat-capacity
//!   kernels, plus synthetic input generators.
//! - [`bench`] and [`verify`]: benchmark harness and property suites.

pub mod bench;
pub mod distsim;
pub mod engine;
pub mod m2g;
pub mod matrix;
pub mod optimizer;
pub mod routines;
pub mod scalar;
pub mod strategy;
pub mod testgen;
pub mod verify;

pub use num_complex::Complex64;
pub use scalar::{relative_error, Scalar, ScalarKind};
