//! Seeded random operands for the property suites, the benchmark grid and
//! the format round-trip checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::m2g::{matrix_to_graph, Graph};
use crate::matrix::{CooMatrix, DenseMatrix, DenseVector, MatrixData, MatrixDescriptor, MatrixKind, Uplo};
use crate::scalar::{Scalar, ScalarKind};

/// Nonzero fraction of the sparse general kind.
pub const SPARSE_FRACTION: f64 = 0.05;

/// Matrix families used by the grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Dense,
    Sparse,
    Symmetric,
    #[serde(rename = "triangular")]
    TriangularUpper,
    Banded,
    #[serde(rename = "packed")]
    PackedSymmetric,
    Hermitian,
}

impl TestKind {
    pub const ALL: [TestKind; 7] = [
        TestKind::Dense,
        TestKind::Sparse,
        TestKind::Symmetric,
        TestKind::TriangularUpper,
        TestKind::Banded,
        TestKind::PackedSymmetric,
        TestKind::Hermitian,
    ];

    /// Families of the default benchmark grid.
    pub const BENCH: [TestKind; 5] =
        [TestKind::Dense, TestKind::Sparse, TestKind::Symmetric, TestKind::TriangularUpper, TestKind::Banded];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Dense => "dense",
            TestKind::Sparse => "sparse",
            TestKind::Symmetric => "symmetric",
            TestKind::TriangularUpper => "triangular",
            TestKind::Banded => "banded",
            TestKind::PackedSymmetric => "packed",
            TestKind::Hermitian => "hermitian",
        }
    }

    pub fn is_complex(self) -> bool {
        self == TestKind::Hermitian
    }

    /// Storage kind at size `n`; the (2, 1) band is clipped for tiny sizes.
    pub fn matrix_kind(self, n: usize) -> MatrixKind {
        match self {
            TestKind::Dense | TestKind::Sparse => MatrixKind::General,
            TestKind::Symmetric => MatrixKind::Symmetric,
            TestKind::TriangularUpper => MatrixKind::TriangularUpper,
            TestKind::Banded => MatrixKind::Banded { kl: 2.min(n - 1), ku: 1.min(n - 1) },
            TestKind::PackedSymmetric => MatrixKind::PackedSymmetric(Uplo::Upper),
            TestKind::Hermitian => MatrixKind::Hermitian,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown matrix kind `{s}`"))
    }
}

/// Deterministic seed for one grid cell.
pub fn case_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(base ^ 0x9e37_79b9_7f4a_7c15, |h, &p| {
        (h ^ p).wrapping_mul(0x1000_0000_01b3).rotate_left(29)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[-1, 1)`, with a uniform imaginary part for complex types.
pub fn random_scalar<T: Scalar>(rng: &mut impl Rng) -> T {
    T::from_parts(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector<T: Scalar>(n: usize, rng: &mut impl Rng) -> DenseVector<T> {
    DenseVector::new((0..n).map(|_| random_scalar(rng)).collect())
}

pub fn random_dense<T: Scalar>(rows: usize, cols: usize, rng: &mut impl Rng) -> DenseMatrix<T> {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| random_scalar(rng)).collect()).expect("sized")
}

/// A random `n x n` matrix of the given family. Structured families fill
/// their whole storage region; the sparse family keeps each entry with
/// probability [`SPARSE_FRACTION`].
///
/// # Panics
///
/// When `T` is real and `kind` is Hermitian.
pub fn random_coo<T: Scalar>(kind: TestKind, n: usize, rng: &mut impl Rng) -> CooMatrix<T> {
    let mk = kind.matrix_kind(n);
    match mk {
        MatrixKind::PackedSymmetric(_) => {
            let packed: Vec<T> = (0..n * (n + 1) / 2).map(|_| random_scalar(rng)).collect();
            return CooMatrix::from_packed(n, mk, &packed).expect("packed length matches");
        }
        MatrixKind::Banded { kl, ku } => {
            let ld = kl + ku + 1;
            let mut band = vec![T::zero(); ld * n];
            for j in 0..n {
                for i in j.saturating_sub(ku)..(j + kl + 1).min(n) {
                    band[j * ld + ku + i - j] = random_scalar(rng);
                }
            }
            return CooMatrix::from_band_storage(n, n, kl, ku, &band).expect("band layout");
        }
        _ => {}
    }
    let d = MatrixDescriptor::new(n, n, mk, T::KIND).expect("hermitian families need a complex scalar");
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !mk.stores(i, j) {
                continue;
            }
            if kind == TestKind::Sparse && !rng.random_bool(SPARSE_FRACTION) {
                continue;
            }
            let mut v: T = random_scalar(rng);
            if mk.is_hermitian() && i == j {
                v = T::from_f64(v.parts().0);
            }
            entries.push((i, j, v));
        }
    }
    CooMatrix::from_triplets(d, entries).expect("generated entries are valid")
}

/// [`random_coo`] with the family's natural scalar type.
pub fn random_matrix(kind: TestKind, n: usize, seed: u64) -> MatrixData {
    let mut r = rng(seed);
    if kind.is_complex() {
        MatrixData::Complex(random_coo::<Complex64>(kind, n, &mut r))
    } else {
        MatrixData::Real(random_coo::<f64>(kind, n, &mut r))
    }
}

/// A value with a wide range of magnitudes, including exact integers and
/// values near the ends of the exponent range.
fn wide_value(rng: &mut impl Rng) -> f64 {
    let v: f64 = match rng.random_range(0..6) {
        0 => rng.random_range(-1000i64..1000) as f64,
        1 => rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-300..300)),
        2 => rng.random_range(-1.0..1.0) * f64::MIN_POSITIVE * 4.0,
        3 => f64::from_bits(rng.random_range(0x0010_0000_0000_0000u64..0x7fe0_0000_0000_0000)),
        _ => rng.random_range(-1.0..1.0),
    };
    if v == 0.0 || !v.is_finite() {
        1.5
    } else {
        v
    }
}

fn random_kind(rng: &mut impl Rng, rows: usize) -> MatrixKind {
    let uplo = if rng.random_bool(0.5) { Uplo::Upper } else { Uplo::Lower };
    match rng.random_range(0..11) {
        0 => MatrixKind::General,
        1 => MatrixKind::Symmetric,
        2 => MatrixKind::SkewSymmetric,
        3 => MatrixKind::Hermitian,
        4 => MatrixKind::TriangularUpper,
        5 => MatrixKind::TriangularLower,
        6 => MatrixKind::Banded { kl: rng.random_range(0..rows), ku: 0 },
        7 => MatrixKind::PackedSymmetric(uplo),
        8 => MatrixKind::PackedTriangular(uplo),
        9 => MatrixKind::HermitianBanded { k: rng.random_range(0..rows) },
        _ => MatrixKind::HermitianPacked(uplo),
    }
}

/// A matrix of any storage kind, shape and scalar type, for format round
/// trips. Shapes stay within 12 x 12.
pub fn random_any_matrix(rng: &mut impl Rng) -> MatrixData {
    let rows = rng.random_range(1..=12);
    let mut kind = random_kind(rng, rows);
    let cols = if matches!(kind, MatrixKind::General | MatrixKind::Banded { .. }) { rng.random_range(1..=12) } else { rows };
    if let MatrixKind::Banded { kl, .. } = kind {
        kind = MatrixKind::Banded { kl, ku: rng.random_range(0..cols) };
    }
    let complex = kind.is_hermitian() || rng.random_bool(0.3);
    let fill = [0.0, 0.3, 1.0][rng.random_range(0..3)];
    let mut cells = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let allowed = kind.stores(i, j) && !(kind == MatrixKind::SkewSymmetric && i == j);
            if allowed && rng.random_bool(fill) {
                let re = wide_value(rng);
                let real_only = !complex || (i == j && kind.is_hermitian());
                let im = if real_only { 0.0 } else { wide_value(rng) };
                cells.push((i, j, re, im));
            }
        }
    }
    let scalar = if complex { ScalarKind::Complex64x2 } else { ScalarKind::Real64 };
    let d = MatrixDescriptor::new(rows, cols, kind, scalar).expect("generated descriptor is valid");
    if complex {
        let e = cells.into_iter().map(|(i, j, re, im)| (i, j, Complex64::new(re, im)));
        MatrixData::Complex(CooMatrix::from_triplets(d, e).expect("valid entries"))
    } else {
        let e = cells.into_iter().map(|(i, j, re, _)| (i, j, re));
        MatrixData::Real(CooMatrix::from_triplets(d, e).expect("valid entries"))
    }
}

/// A square real graph of up to `max_vertices` vertices with a skewed
/// in-degree distribution: about one vertex in eight is a hub with tens of
/// in-neighbors, the rest have at most four. Always has at least one edge.
pub fn random_hub_graph(rng: &mut impl Rng, max_vertices: usize) -> Graph<f64> {
    let m = rng.random_range(2..=max_vertices.max(2));
    let d = MatrixDescriptor::general(m, m, ScalarKind::Real64).expect("non-zero shape");
    let mut entries = vec![(0, m - 1, random_scalar::<f64>(rng) + 2.0)];
    for i in 0..m {
        let degree = if rng.random_bool(0.125) { rng.random_range(m.min(12)..=m) } else { rng.random_range(0..=m.min(4)) };
        for j in rand::seq::index::sample(rng, m, degree) {
            if (i, j) != (0, m - 1) {
                entries.push((i, j, random_scalar(rng)));
            }
        }
    }
    matrix_to_graph(&CooMatrix::from_triplets(d, entries).expect("distinct in-bounds entries"))
}
