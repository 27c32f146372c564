//! The `.g4s` binary graph file.
//!
//! Little-endian layout:
//!
//! ```text
//! "G4S1"
//! u64 vertex_count, u64 edge_count, u8 scalar kind (0 real, 1 complex)
//! u32 origin rows, u32 origin cols
//! u64 x (vertex_count + 1)   destination offsets
//! u64 x edge_count           source ids
//! f64 x edge_count           weights (f64 pairs for complex)
//! ```

use num_complex::Complex64;

use super::{Graph, GraphError};
use crate::matrix::MatrixDescriptor;
use crate::scalar::{Scalar, ScalarKind};

pub const MAGIC: &[u8; 4] = b"G4S1";

/// A graph whose scalar type is only known at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGraph {
    Real(Graph<f64>),
    Complex(Graph<Complex64>),
}

impl AnyGraph {
    pub fn vertex_count(&self) -> usize {
        match self {
            AnyGraph::Real(g) => g.vertex_count(),
            AnyGraph::Complex(g) => g.vertex_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            AnyGraph::Real(g) => g.edge_count(),
            AnyGraph::Complex(g) => g.edge_count(),
        }
    }

    pub fn origin(&self) -> &MatrixDescriptor {
        match self {
            AnyGraph::Real(g) => g.origin(),
            AnyGraph::Complex(g) => g.origin(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            AnyGraph::Real(g) => write_graph(g),
            AnyGraph::Complex(g) => write_graph(g),
        }
    }
}

pub fn write_graph<T: Scalar>(g: &Graph<T>) -> Vec<u8> {
    let m = g.vertex_count();
    let e = g.edge_count();
    let mut out = Vec::with_capacity(29 + 8 * (m + 1) + e * (8 + T::KIND.width()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m as u64).to_le_bytes());
    out.extend_from_slice(&(e as u64).to_le_bytes());
    out.push(T::KIND.tag());
    out.extend_from_slice(&(g.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(g.cols() as u32).to_le_bytes());
    for &o in g.offsets() {
        out.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &s in g.sources() {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for &w in g.weights() {
        w.write_le(&mut out);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GraphError> {
        let end = self.pos.checked_add(n).filter(|&end| end <= self.bytes.len()).ok_or_else(|| GraphError::Format {
            reason: format!("truncated at byte {}", self.pos),
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, GraphError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, GraphError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

fn format_err(reason: impl Into<String>) -> GraphError {
    GraphError::Format { reason: reason.into() }
}

pub fn read_graph_bytes(bytes: &[u8]) -> Result<AnyGraph, GraphError> {
    match bytes.get(20) {
        Some(&tag) if bytes.starts_with(MAGIC) => match ScalarKind::from_tag(tag) {
            Some(ScalarKind::Real64) => read_graph::<f64>(bytes).map(AnyGraph::Real),
            Some(ScalarKind::Complex64x2) => read_graph::<Complex64>(bytes).map(AnyGraph::Complex),
            None => Err(format_err(format!("unknown scalar kind {tag}"))),
        },
        _ if !bytes.starts_with(MAGIC) => Err(format_err("missing G4S1 magic")),
        _ => Err(format_err("truncated header")),
    }
}

/// Reads a graph whose scalar kind must be `T`.
pub fn read_graph<T: Scalar>(bytes: &[u8]) -> Result<Graph<T>, GraphError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(format_err("missing G4S1 magic"));
    }
    let m = r.u64()? as usize;
    let e = r.u64()? as usize;
    let tag = r.take(1)?[0];
    if ScalarKind::from_tag(tag) != Some(T::KIND) {
        return Err(format_err(format!("scalar kind {tag} does not match {:?}", T::KIND)));
    }
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    let width = T::KIND.width();
    let needed = m
        .checked_add(1)
        .and_then(|x| x.checked_mul(8))
        .and_then(|x| e.checked_mul(8 + width).and_then(|y| x.checked_add(y)));
    if needed != Some(bytes.len() - r.pos) {
        return Err(format_err("body length does not match the header"));
    }
    let origin = MatrixDescriptor::general(rows, cols, T::KIND).map_err(|err| format_err(err.to_string()))?;
    let offsets = (0..=m).map(|_| r.u64().map(|x| x as usize)).collect::<Result<Vec<_>, _>>()?;
    let sources = (0..e)
        .map(|_| {
            r.u64().and_then(|x| u32::try_from(x).map_err(|_| format_err(format!("source id {x} exceeds u32"))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let weights = (0..e)
        .map(|_| r.take(width).map(T::read_le))
        .collect::<Result<Vec<_>, _>>()?;
    Graph::from_csr(m, origin, offsets, sources, weights)
}
