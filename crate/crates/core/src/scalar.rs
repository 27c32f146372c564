//! Scalar element types shared by matrices, graphs and messages.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Element type tag carried by descriptors and binary files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarKind {
    Real64,
    Complex64x2,
}

impl ScalarKind {
    pub fn tag(self) -> u8 {
        match self {
            ScalarKind::Real64 => 0,
            ScalarKind::Complex64x2 => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ScalarKind::Real64),
            1 => Some(ScalarKind::Complex64x2),
            _ => None,
        }
    }

    /// Bytes per value in little-endian wire formats.
    pub fn width(self) -> usize {
        match self {
            ScalarKind::Real64 => 8,
            ScalarKind::Complex64x2 => 16,
        }
    }
}

/// Numeric element of a matrix, a vertex state or an edge weight.
///
/// Implemented for `f64` and `Complex64`. Arithmetic is plain IEEE double
/// arithmetic; `is_zero` is an exact comparison.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + PartialEq
    + Debug
    + Display
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    const KIND: ScalarKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    /// Modulus (absolute value for reals).
    fn modulus(self) -> f64;
    fn from_parts(re: f64, im: f64) -> Self;
    fn parts(self) -> (f64, f64);

    fn from_f64(x: f64) -> Self {
        Self::from_parts(x, 0.0)
    }

    fn is_zero(self) -> bool {
        self == Self::zero()
    }

    fn is_finite(self) -> bool {
        let (re, im) = self.parts();
        re.is_finite() && im.is_finite()
    }

    fn write_le(self, out: &mut Vec<u8>);

    /// Reads one value from the front of `bytes`; the slice must hold at
    /// least `KIND.width()` bytes.
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Real64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex64x2;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.re.to_le_bytes());
        out.extend_from_slice(&self.im.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        let re = f64::from_le_bytes(bytes[..8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        Complex64::new(re, im)
    }
}

/// Largest elementwise difference relative to `max(1, max|expected|)`.
///
/// This is the error measure used throughout the test and verification
/// suites. Slices of unequal length yield `f64::INFINITY`.
pub fn relative_error<T: Scalar>(actual: &[T], expected: &[T]) -> f64 {
    if actual.len() != expected.len() {
        return f64::INFINITY;
    }
    let scale = expected
        .iter()
        .map(|x| x.modulus())
        .fold(1.0_f64, f64::max);
    let diff = actual
        .iter()
        .zip(expected)
        .map(|(a, e)| (*a - *e).modulus())
        .fold(0.0_f64, |acc, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) });
    diff / scale
}
