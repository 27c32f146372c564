//! Vector files: one value per line (`re im` for complex), or a Matrix
//! Market `array` document with a single column.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::mtx::{parse_matrix_market, MtxError};
use super::{DenseVector, MatrixData};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Debug, Clone, PartialEq)]
pub enum VectorData {
    Real(DenseVector<f64>),
    Complex(DenseVector<Complex64>),
}

impl VectorData {
    pub fn len(&self) -> usize {
        match self {
            VectorData::Real(v) => v.len(),
            VectorData::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scalar(&self) -> ScalarKind {
        match self {
            VectorData::Real(_) => ScalarKind::Real64,
            VectorData::Complex(_) => ScalarKind::Complex64x2,
        }
    }

    pub fn into_complex(self) -> DenseVector<Complex64> {
        match self {
            VectorData::Real(v) => v.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>().into(),
            VectorData::Complex(v) => v,
        }
    }
}

pub fn parse_vector(text: &str) -> Result<VectorData, MtxError> {
    if text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket") {
        return parse_array_vector(text);
    }
    let mut real = Vec::new();
    let mut complex = Vec::new();
    let mut width = None;
    for (n, line) in text.lines().enumerate().map(|(n, l)| (n + 1, l)) {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if *width.get_or_insert(tokens.len()) != tokens.len() {
            return Err(MtxError::Malformed {
                line: n,
                reason: "mixed real and complex lines".into(),
            });
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| MtxError::NonNumeric { line: n, token: t.to_string() })
        };
        match tokens.as_slice() {
            [x] => real.push(num(x)?),
            [re, im] => complex.push(Complex64::new(num(re)?, num(im)?)),
            _ => {
                return Err(MtxError::Malformed {
                    line: n,
                    reason: format!("expected 1 or 2 values, found {}", tokens.len()),
                })
            }
        }
    }
    Ok(match width {
        Some(2) => VectorData::Complex(complex.into()),
        _ => VectorData::Real(real.into()),
    })
}

fn parse_array_vector(text: &str) -> Result<VectorData, MtxError> {
    let not_column = |cols| MtxError::Malformed {
        line: 2,
        reason: format!("vector file must have one column, found {cols}"),
    };
    match parse_matrix_market(text)? {
        MatrixData::Real(m) => {
            if m.cols() != 1 {
                return Err(not_column(m.cols()));
            }
            Ok(VectorData::Real(m.to_dense().column(0).into()))
        }
        MatrixData::Complex(m) => {
            if m.cols() != 1 {
                return Err(not_column(m.cols()));
            }
            Ok(VectorData::Complex(m.to_dense().column(0).into()))
        }
    }
}

/// One value per line with the shortest exact decimal form.
pub fn write_vector<T: Scalar>(v: &[T]) -> String {
    let mut out = String::with_capacity(v.len() * 24);
    for x in v {
        let (re, im) = x.parts();
        let _ = match T::KIND {
            ScalarKind::Real64 => writeln!(out, "{re}"),
            ScalarKind::Complex64x2 => writeln!(out, "{re} {im}"),
        };
    }
    out
}

pub fn write_vector_data(v: &VectorData) -> String {
    match v {
        VectorData::Real(v) => write_vector(v.as_slice()),
        VectorData::Complex(v) => write_vector(v.as_slice()),
    }
}
