//! Matrix Market reader and writer.
//!
//! Kinds Matrix Market cannot name (triangular, banded, packed) are
//! carried in a `% g4s-kind:` comment line right after the banner and
//! written with the symmetry token whose semantics they share. Readers
//! unaware of the comment still see a valid file.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use super::{CooMatrix, MatrixData, MatrixDescriptor, MatrixError, MatrixKind, Uplo};
use crate::scalar::{Scalar, ScalarKind};

const KIND_TAG: &str = "% g4s-kind:";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MtxError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: non-numeric token `{token}`")]
    NonNumeric { line: usize, token: String },
    #[error("line {line}: complex value in a {field} file")]
    ComplexInReal { line: usize, field: &'static str },
    #[error("line {line}: index ({i}, {j}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds { line: usize, i: usize, j: usize, rows: usize, cols: usize },
    #[error("line {line}: duplicate entry ({i}, {j})")]
    Duplicate { line: usize, i: usize, j: usize },
    #[error("line {line}: {source}")]
    Matrix { line: usize, source: MatrixError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Integer => "integer",
            Field::Complex => "complex",
            Field::Pattern => "pattern",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_banner(line: &str, line_no: usize) -> Result<(Format, Field, Symmetry), MtxError> {
    let header = |reason: &str| MtxError::Header { line: line_no, reason: reason.to_string() };
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(header("expected `%%MatrixMarket matrix <format> <field> <symmetry>`"));
    }
    if tokens[1] != "matrix" {
        return Err(header("object must be `matrix`"));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        _ => return Err(header("format must be `coordinate` or `array`")),
    };
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        _ => return Err(header("field must be real, integer, complex or pattern")),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        _ => return Err(header("symmetry must be general, symmetric, skew-symmetric or hermitian")),
    };
    if format == Format::Array && field == Field::Pattern {
        return Err(header("array format cannot use the pattern field"));
    }
    Ok((format, field, symmetry))
}

fn parse_uplo(token: Option<&str>) -> Option<Uplo> {
    match token? {
        "upper" => Some(Uplo::Upper),
        "lower" => Some(Uplo::Lower),
        _ => None,
    }
}

fn parse_kind_tag(rest: &str) -> Option<MatrixKind> {
    let mut t = rest.split_whitespace();
    let kind = match t.next()? {
        "general" => MatrixKind::General,
        "symmetric" => MatrixKind::Symmetric,
        "skew_symmetric" => MatrixKind::SkewSymmetric,
        "hermitian" => MatrixKind::Hermitian,
        "triangular_upper" => MatrixKind::TriangularUpper,
        "triangular_lower" => MatrixKind::TriangularLower,
        "banded" => MatrixKind::Banded {
            kl: t.next()?.parse().ok()?,
            ku: t.next()?.parse().ok()?,
        },
        "packed_symmetric" => MatrixKind::PackedSymmetric(parse_uplo(t.next())?),
        "packed_triangular" => MatrixKind::PackedTriangular(parse_uplo(t.next())?),
        "hermitian_banded" => MatrixKind::HermitianBanded { k: t.next()?.parse().ok()? },
        "hermitian_packed" => MatrixKind::HermitianPacked(parse_uplo(t.next())?),
        _ => return None,
    };
    if t.next().is_some() {
        return None;
    }
    Some(kind)
}

fn uplo_name(u: Uplo) -> &'static str {
    match u {
        Uplo::Upper => "upper",
        Uplo::Lower => "lower",
    }
}

fn kind_tag(kind: MatrixKind) -> Option<String> {
    Some(match kind {
        MatrixKind::General | MatrixKind::Symmetric | MatrixKind::SkewSymmetric | MatrixKind::Hermitian => return None,
        MatrixKind::TriangularUpper => "triangular_upper".to_string(),
        MatrixKind::TriangularLower => "triangular_lower".to_string(),
        MatrixKind::Banded { kl, ku } => format!("banded {kl} {ku}"),
        MatrixKind::PackedSymmetric(u) => format!("packed_symmetric {}", uplo_name(u)),
        MatrixKind::PackedTriangular(u) => format!("packed_triangular {}", uplo_name(u)),
        MatrixKind::HermitianBanded { k } => format!("hermitian_banded {k}"),
        MatrixKind::HermitianPacked(u) => format!("hermitian_packed {}", uplo_name(u)),
    })
}

fn symmetry_of(kind: MatrixKind) -> Symmetry {
    match kind {
        MatrixKind::SkewSymmetric => Symmetry::SkewSymmetric,
        k if k.is_symmetric() => Symmetry::Symmetric,
        k if k.is_hermitian() => Symmetry::Hermitian,
        _ => Symmetry::General,
    }
}

fn symmetry_token(s: Symmetry) -> &'static str {
    match s {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
        Symmetry::SkewSymmetric => "skew-symmetric",
        Symmetry::Hermitian => "hermitian",
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64, MtxError> {
    token
        .parse::<f64>()
        .map_err(|_| MtxError::NonNumeric { line, token: token.to_string() })
}

fn parse_index(token: &str, line: usize) -> Result<usize, MtxError> {
    token
        .parse::<usize>()
        .map_err(|_| MtxError::NonNumeric { line, token: token.to_string() })
}

/// Parses the value tokens of one entry into `(re, im)`.
fn parse_value(tokens: &[&str], field: Field, line: usize) -> Result<(f64, f64), MtxError> {
    match field {
        Field::Pattern => {
            if !tokens.is_empty() {
                return Err(MtxError::Malformed { line, reason: "pattern entries carry no value".into() });
            }
            Ok((1.0, 0.0))
        }
        Field::Real | Field::Integer => match tokens {
            [v] => {
                let x = if field == Field::Integer {
                    v.parse::<i64>()
                        .map_err(|_| MtxError::NonNumeric { line, token: v.to_string() })? as f64
                } else {
                    parse_f64(v, line)?
                };
                Ok((x, 0.0))
            }
            [_, _] => Err(MtxError::ComplexInReal { line, field: field.name() }),
            _ => Err(MtxError::Malformed { line, reason: format!("expected 1 value, found {}", tokens.len()) }),
        },
        Field::Complex => match tokens {
            [re, im] => Ok((parse_f64(re, line)?, parse_f64(im, line)?)),
            _ => Err(MtxError::Malformed { line, reason: format!("expected 2 values, found {}", tokens.len()) }),
        },
    }
}

/// Parses a Matrix Market document into a matrix with 0-based indices.
///
/// Symmetric-like files keep only their stored triangle; call
/// [`CooMatrix::expand`] to materialize the mirrored entries.
pub fn parse_matrix_market(text: &str) -> Result<MatrixData, MtxError> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    let (banner_no, banner) = lines
        .next()
        .ok_or(MtxError::Header { line: 1, reason: "empty input".into() })?;
    let (format, field, symmetry) = parse_banner(banner, banner_no)?;

    let mut tagged_kind = None;
    let mut size_line = None;
    for (n, line) in lines.by_ref() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(KIND_TAG) {
            let kind = parse_kind_tag(rest).ok_or_else(|| MtxError::Header {
                line: n,
                reason: format!("unknown storage kind `{}`", rest.trim()),
            })?;
            tagged_kind = Some((n, kind));
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((n, trimmed));
        break;
    }
    let (size_no, size_text) = size_line.ok_or(MtxError::Malformed { line: banner_no, reason: "missing size line".into() })?;
    let size_tokens: Vec<&str> = size_text.split_whitespace().collect();
    let expected_tokens = if format == Format::Coordinate { 3 } else { 2 };
    if size_tokens.len() != expected_tokens {
        return Err(MtxError::Malformed {
            line: size_no,
            reason: format!("size line needs {expected_tokens} integers"),
        });
    }
    let rows = parse_index(size_tokens[0], size_no)?;
    let cols = parse_index(size_tokens[1], size_no)?;

    let scalar = if field == Field::Complex { ScalarKind::Complex64x2 } else { ScalarKind::Real64 };
    let kind = match tagged_kind {
        Some((n, kind)) => {
            if symmetry_of(kind) != symmetry {
                return Err(MtxError::Header {
                    line: n,
                    reason: format!("storage kind {kind:?} contradicts `{}`", symmetry_token(symmetry)),
                });
            }
            kind
        }
        None => match symmetry {
            Symmetry::General => MatrixKind::General,
            Symmetry::Symmetric => MatrixKind::Symmetric,
            Symmetry::SkewSymmetric => MatrixKind::SkewSymmetric,
            Symmetry::Hermitian => MatrixKind::Hermitian,
        },
    };
    let descriptor =
        MatrixDescriptor::new(rows, cols, kind, scalar).map_err(|source| MtxError::Matrix { line: size_no, source })?;

    let mut triplets: Vec<(usize, usize, (f64, f64))> = Vec::new();
    let mut last_line = size_no;
    match format {
        Format::Coordinate => {
            let declared = parse_index(size_tokens[2], size_no)?;
            let mut seen = HashSet::new();
            for (n, line) in lines {
                last_line = n;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(MtxError::Malformed { line: n, reason: "entry needs row and column".into() });
                }
                let i = parse_index(tokens[0], n)?;
                let j = parse_index(tokens[1], n)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(MtxError::OutOfBounds { line: n, i, j, rows, cols });
                }
                if !seen.insert((i, j)) {
                    return Err(MtxError::Duplicate { line: n, i, j });
                }
                let value = parse_value(&tokens[2..], field, n)?;
                check_entry(kind, i - 1, j - 1, value, n)?;
                triplets.push((i - 1, j - 1, value));
            }
            if seen.len() != declared {
                return Err(MtxError::Malformed {
                    line: last_line,
                    reason: format!("size line declares {declared} entries, found {}", seen.len()),
                });
            }
        }
        Format::Array => {
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| {
                    let start = match symmetry {
                        Symmetry::General => 0,
                        Symmetry::SkewSymmetric => j + 1,
                        _ => j,
                    };
                    (start..rows).map(move |i| (i, j))
                })
                .collect();
            let mut next = positions.iter();
            for (n, line) in lines {
                last_line = n;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                let &(i, j) = next.next().ok_or(MtxError::Malformed {
                    line: n,
                    reason: format!("more than {} values", positions.len()),
                })?;
                let value = parse_value(&tokens, field, n)?;
                if kind.stores(i, j) {
                    check_entry(kind, i, j, value, n)?;
                    triplets.push((i, j, value));
                } else if value != (0.0, 0.0) {
                    return Err(MtxError::Matrix { line: n, source: MatrixError::OutsideStorage { i, j, kind } });
                }
            }
            if next.next().is_some() {
                return Err(MtxError::Malformed {
                    line: last_line,
                    reason: format!("expected {} values", positions.len()),
                });
            }
        }
    }

    let build = |source| MtxError::Matrix { line: last_line, source };
    match scalar {
        ScalarKind::Real64 => CooMatrix::from_triplets(descriptor, triplets.into_iter().map(|(i, j, (re, _))| (i, j, re)))
            .map(MatrixData::Real)
            .map_err(build),
        ScalarKind::Complex64x2 => CooMatrix::from_triplets(
            descriptor,
            triplets.into_iter().map(|(i, j, (re, im))| (i, j, Complex64::new(re, im))),
        )
        .map(MatrixData::Complex)
        .map_err(build),
    }
}

fn check_entry(kind: MatrixKind, i: usize, j: usize, (re, im): (f64, f64), line: usize) -> Result<(), MtxError> {
    if re == 0.0 && im == 0.0 {
        return Ok(());
    }
    let err = |source| Err(MtxError::Matrix { line, source });
    if !(re.is_finite() && im.is_finite()) {
        return err(MatrixError::NonFinite { i, j });
    }
    if kind == MatrixKind::SkewSymmetric && i == j {
        return err(MatrixError::SkewDiagonal { i });
    }
    if !kind.stores(i, j) {
        return err(MatrixError::OutsideStorage { i, j, kind });
    }
    if kind.is_hermitian() && i == j && im != 0.0 {
        return err(MatrixError::HermitianDiagonal { i });
    }
    Ok(())
}

/// Writes a coordinate-format document that [`parse_matrix_market`] maps
/// back to an identical matrix. Values use 17 significant digits.
pub fn write_matrix_market<T: Scalar>(m: &CooMatrix<T>) -> String {
    let field = match T::KIND {
        ScalarKind::Real64 => "real",
        ScalarKind::Complex64x2 => "complex",
    };
    let mut out = String::with_capacity(64 + m.nnz() * 48);
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} {}", symmetry_token(symmetry_of(m.kind())));
    if let Some(tag) = kind_tag(m.kind()) {
        let _ = writeln!(out, "{KIND_TAG} {tag}");
    }
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for &(i, j, v) in m.entries() {
        let (re, im) = v.parts();
        match T::KIND {
            ScalarKind::Real64 => writeln!(out, "{} {} {:.16e}", i + 1, j + 1, re),
            ScalarKind::Complex64x2 => writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, j + 1, re, im),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn write_matrix_data(m: &MatrixData) -> String {
    match m {
        MatrixData::Real(m) => write_matrix_market(m),
        MatrixData::Complex(m) => write_matrix_market(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(text: &str) -> CooMatrix<f64> {
        match parse_matrix_market(text).unwrap() {
            MatrixData::Real(m) => m,
            other => panic!("expected real matrix, got {other:?}"),
        }
    }

    #[test]
    fn coordinate_real_general() {
        let m = real("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 5.0\n");
        assert_eq!(m.kind(), MatrixKind::General);
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m.entries(), &[(0, 1, 5.0)]);
    }

    #[test]
    fn pattern_means_unit_weight() {
        let m = real("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n3 1\n");
        assert_eq!(m.entries(), &[(2, 0, 1.0)]);
    }

    #[test]
    fn symmetric_keeps_stored_triangle_and_drops_zero() {
        let m = real("%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n2 1 4.0\n1 1 0.0\n");
        assert_eq!(m.kind(), MatrixKind::Symmetric);
        assert_eq!(m.entries(), &[(1, 0, 4.0)]);
    }

    #[test]
    fn integer_widens() {
        let m = real("%%MatrixMarket matrix coordinate integer general\n2 2 1\n2 2 -7\n");
        assert_eq!(m.entries(), &[(1, 1, -7.0)]);
        let err = parse_matrix_market("%%MatrixMarket matrix coordinate integer general\n2 2 1\n2 2 1.5\n").unwrap_err();
        assert_eq!(err, MtxError::NonNumeric { line: 3, token: "1.5".into() });
    }

    #[test]
    fn header_is_case_insensitive() {
        let m = real("%%MatrixMarket MATRIX Coordinate Real General\n1 1 1\n1 1 2\n");
        assert_eq!(m.entries(), &[(0, 0, 2.0)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("%%MatrixMarket matrix coordinate real\n", 1),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n", 4),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0 2.0\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n", 3),
            ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n", 3),
        ];
        for (text, line) in cases {
            let err = parse_matrix_market(text).unwrap_err();
            let reported = match &err {
                MtxError::Header { line, .. }
                | MtxError::Malformed { line, .. }
                | MtxError::NonNumeric { line, .. }
                | MtxError::ComplexInReal { line, .. }
                | MtxError::OutOfBounds { line, .. }
                | MtxError::Duplicate { line, .. }
                | MtxError::Matrix { line, .. } => *line,
            };
            assert_eq!(reported, line, "{text:?} -> {err}");
        }
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0 2.0\n"),
            Err(MtxError::ComplexInReal { .. })
        ));
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 2 2.0\n2 2 3.0\n"),
            Err(MtxError::Malformed { .. })
        ));
    }

    #[test]
    fn hermitian_requires_complex_field() {
        let err = parse_matrix_market("%%MatrixMarket matrix coordinate real hermitian\n2 2 0\n").unwrap_err();
        assert!(matches!(err, MtxError::Matrix { line: 2, source: MatrixError::NeedsComplex { .. } }));
    }

    #[test]
    fn array_format() {
        let m = real("%%MatrixMarket matrix array real general\n2 2\n1\n0\n3\n4\n");
        // column-major: a00=1, a10=0, a01=3, a11=4
        assert_eq!(m.entries(), &[(0, 0, 1.0), (0, 1, 3.0), (1, 1, 4.0)]);
        let s = real("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n");
        assert_eq!(s.entries(), &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 3.0)]);
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n").is_err());
    }

    #[test]
    fn empty_matrix_writes_size_line() {
        let m = CooMatrix::<f64>::zeros(MatrixDescriptor::general(4, 4, ScalarKind::Real64).unwrap()).unwrap();
        let text = write_matrix_market(&m);
        assert_eq!(text, "%%MatrixMarket matrix coordinate real general\n4 4 0\n");
        assert_eq!(parse_matrix_market(&text).unwrap(), MatrixData::Real(m));
    }

    #[test]
    fn hermitian_roundtrip() {
        let d = MatrixDescriptor::new(2, 2, MatrixKind::Hermitian, ScalarKind::Complex64x2).unwrap();
        let m = CooMatrix::from_triplets(d, vec![(1, 0, Complex64::new(1.0, 2.0))]).unwrap();
        let text = write_matrix_market(&m);
        assert!(text.starts_with("%%MatrixMarket matrix coordinate complex hermitian\n"));
        assert_eq!(parse_matrix_market(&text).unwrap(), MatrixData::Complex(m));
    }

    #[test]
    fn tagged_kinds_roundtrip() {
        let d = MatrixDescriptor::new(4, 4, MatrixKind::Banded { kl: 2, ku: 1 }, ScalarKind::Real64).unwrap();
        let m = CooMatrix::from_triplets(d, vec![(2, 0, 0.1), (0, 1, 1.0 / 3.0)]).unwrap();
        let text = write_matrix_market(&m);
        assert!(text.contains("% g4s-kind: banded 2 1\n"));
        assert_eq!(parse_matrix_market(&text).unwrap(), MatrixData::Real(m));

        let bad = "%%MatrixMarket matrix coordinate real general\n% g4s-kind: packed_symmetric upper\n2 2 0\n";
        assert!(matches!(parse_matrix_market(bad), Err(MtxError::Header { line: 2, .. })));
    }
}
