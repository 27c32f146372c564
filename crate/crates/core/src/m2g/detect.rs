use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{CooMatrix, MatrixData, MatrixDescriptor, MatrixError};
use crate::scalar::ScalarKind;

/// Rows are reported 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("input has no rows")]
    Empty,
    #[error("row {row} has no elements")]
    EmptyRow { row: usize },
    #[error("ragged row {row}: expected {expected} elements, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("non-numeric token `{token}` at row {row}")]
    NonNumeric { row: usize, token: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Parses an integer, real, or complex token. Complex tokens are written
/// `a+bi`, `a-bj`, `bi` or `(a,b)`.
pub(crate) fn parse_number(token: &str) -> Option<(f64, f64, bool)> {
    let finite = |x: f64| x.is_finite().then_some(x);
    if let Ok(x) = token.parse::<f64>() {
        return finite(x).map(|x| (x, 0.0, false));
    }
    if let Some(inner) = token.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (re, im) = inner.split_once(',')?;
        return Some((finite(re.trim().parse().ok()?)?, finite(im.trim().parse().ok()?)?, true));
    }
    let body = token.strip_suffix('i').or_else(|| token.strip_suffix('j'))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Option<f64> {
        match s {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            s => finite(s.parse().ok()?),
        }
    };
    match split {
        Some(k) => Some((finite(body[..k].parse().ok()?)?, imag(&body[k..])?, true)),
        None => Some((0.0, imag(body)?, true)),
    }
}

/// Recognizes a dense numeric grid: every row has the same number of
/// elements and every element is numeric.
pub fn detect_matrix<S: AsRef<str>>(rows: &[S]) -> Result<MatrixDescriptor, DetectError> {
    scan(rows).map(|(d, _)| d)
}

fn scan<S: AsRef<str>>(rows: &[S]) -> Result<(MatrixDescriptor, Vec<(f64, f64)>), DetectError> {
    if rows.is_empty() {
        return Err(DetectError::Empty);
    }
    let mut width = None;
    let mut complex = false;
    let mut values = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let tokens: Vec<&str> = row.as_ref().split_whitespace().collect();
        if tokens.is_empty() {
            return Err(DetectError::EmptyRow { row: r + 1 });
        }
        let expected = *width.get_or_insert(tokens.len());
        if tokens.len() != expected {
            return Err(DetectError::Ragged { row: r + 1, expected, found: tokens.len() });
        }
        for t in tokens {
            let (re, im, is_complex) =
                parse_number(t).ok_or_else(|| DetectError::NonNumeric { row: r + 1, token: t.to_string() })?;
            complex |= is_complex;
            values.push((re, im));
        }
    }
    let scalar = if complex { ScalarKind::Complex64x2 } else { ScalarKind::Real64 };
    let d = MatrixDescriptor::general(rows.len(), width.unwrap_or(0), scalar)?;
    Ok((d, values))
}

/// Parses a whitespace-separated dense grid into a `General` matrix.
/// Blank lines and `#` comments are skipped.
pub fn parse_dense_grid(text: &str) -> Result<MatrixData, DetectError> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let (d, values) = scan(&rows)?;
    let at = |k: usize| (k / d.cols, k % d.cols);
    Ok(match d.scalar {
        ScalarKind::Real64 => MatrixData::Real(CooMatrix::from_triplets(
            d,
            values.into_iter().enumerate().map(|(k, (re, _))| (at(k).0, at(k).1, re)),
        )?),
        ScalarKind::Complex64x2 => MatrixData::Complex(CooMatrix::from_triplets(
            d,
            values
                .into_iter()
                .enumerate()
                .map(|(k, (re, im))| (at(k).0, at(k).1, Complex64::new(re, im))),
        )?),
    })
}
