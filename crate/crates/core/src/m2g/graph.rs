use std::sync::OnceLock;

use super::GraphError;
use crate::matrix::MatrixDescriptor;
use crate::scalar::Scalar;

/// The transposed view of a graph: out-edges grouped by source.
#[derive(Debug, Clone)]
pub struct OutAdjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    edge_ids: Vec<usize>,
}

impl OutAdjacency {
    /// Targets of `src` in ascending order, with the index of each edge in
    /// the in-adjacency arrays.
    pub fn out_edges(&self, src: usize) -> impl Iterator<Item = (u32, usize)> + '_ {
        let r = self.offsets[src]..self.offsets[src + 1];
        self.targets[r.clone()].iter().copied().zip(self.edge_ids[r].iter().copied())
    }

    pub fn out_degree(&self, src: usize) -> usize {
        self.offsets[src + 1] - self.offsets[src]
    }
}

/// A weighted directed graph stored as compressed in-adjacency.
///
/// A nonzero `A[i, j]` is the edge `j -> i` with weight `A[i, j]`, so a
/// gather at vertex `i` walks row `i`. Source lists of each destination are
/// strictly ascending, which fixes the reduction order of every gather.
/// The graph is immutable once built.
#[derive(Debug, Clone)]
pub struct Graph<T> {
    vertex_count: usize,
    origin: MatrixDescriptor,
    offsets: Vec<usize>,
    sources: Vec<u32>,
    weights: Vec<T>,
    out_view: OnceLock<OutAdjacency>,
}

impl<T: PartialEq> PartialEq for Graph<T> {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count
            && self.origin == other.origin
            && self.offsets == other.offsets
            && self.sources == other.sources
            && self.weights == other.weights
    }
}

impl<T: Scalar> Graph<T> {
    /// Validates and wraps compressed in-adjacency arrays.
    pub fn from_csr(
        vertex_count: usize,
        origin: MatrixDescriptor,
        offsets: Vec<usize>,
        sources: Vec<u32>,
        weights: Vec<T>,
    ) -> Result<Self, GraphError> {
        let invalid = |reason: String| Err(GraphError::InvalidCsr { reason });
        if vertex_count > u32::MAX as usize {
            return invalid(format!("{vertex_count} vertices exceed the u32 id space"));
        }
        if offsets.len() != vertex_count + 1 || offsets[0] != 0 {
            return invalid(format!("offsets must have {} entries starting at 0", vertex_count + 1));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return invalid("offsets are not monotone".into());
        }
        let edges = offsets[vertex_count];
        if sources.len() != edges || weights.len() != edges {
            return invalid(format!("expected {edges} sources and weights"));
        }
        for dst in 0..vertex_count {
            let srcs = &sources[offsets[dst]..offsets[dst + 1]];
            if srcs.iter().any(|&s| s as usize >= vertex_count) {
                return invalid(format!("vertex {dst} has a source outside the graph"));
            }
            if srcs.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!("sources of vertex {dst} are not strictly ascending"));
            }
        }
        Ok(Self::from_csr_unchecked(vertex_count, origin, offsets, sources, weights))
    }

    pub(crate) fn from_csr_unchecked(
        vertex_count: usize,
        origin: MatrixDescriptor,
        offsets: Vec<usize>,
        sources: Vec<u32>,
        weights: Vec<T>,
    ) -> Self {
        Graph {
            vertex_count,
            origin,
            offsets,
            sources,
            weights,
            out_view: OnceLock::new(),
        }
    }

    /// Builds from `(dst, src, weight)` triples sorted by `(dst, src)`
    /// without repeats.
    pub(crate) fn from_sorted_edges(
        vertex_count: usize,
        origin: MatrixDescriptor,
        edges: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Self {
        let mut offsets = vec![0usize; vertex_count + 1];
        let mut sources = Vec::new();
        let mut weights = Vec::new();
        for (dst, src, w) in edges {
            offsets[dst + 1] += 1;
            sources.push(src as u32);
            weights.push(w);
        }
        for v in 0..vertex_count {
            offsets[v + 1] += offsets[v];
        }
        Self::from_csr_unchecked(vertex_count, origin, offsets, sources, weights)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.sources.len()
    }

    /// Expanded (`General`) descriptor of the matrix this graph encodes.
    pub fn origin(&self) -> &MatrixDescriptor {
        &self.origin
    }

    pub fn rows(&self) -> usize {
        self.origin.rows
    }

    pub fn cols(&self) -> usize {
        self.origin.cols
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_in_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.in_degree(v)).max().unwrap_or(0)
    }

    /// In-edges of `dst` as parallel slices of sources and weights.
    pub fn in_edges(&self, dst: usize) -> (&[u32], &[T]) {
        let r = self.offsets[dst]..self.offsets[dst + 1];
        (&self.sources[r.clone()], &self.weights[r])
    }

    /// All edges as `(dst, src, weight)` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.vertex_count).flat_map(move |dst| {
            let (srcs, ws) = self.in_edges(dst);
            srcs.iter().zip(ws).map(move |(&s, &w)| (dst, s as usize, w))
        })
    }

    /// The out-adjacency view, built on first use.
    pub fn out_adjacency(&self) -> &OutAdjacency {
        self.out_view.get_or_init(|| {
            let n = self.vertex_count;
            let mut offsets = vec![0usize; n + 1];
            for &s in &self.sources {
                offsets[s as usize + 1] += 1;
            }
            for v in 0..n {
                offsets[v + 1] += offsets[v];
            }
            let mut cursor = offsets.clone();
            let mut targets = vec![0u32; self.sources.len()];
            let mut edge_ids = vec![0usize; self.sources.len()];
            for (dst, src_range) in self.offsets.windows(2).enumerate() {
                for e in src_range[0]..src_range[1] {
                    let s = self.sources[e] as usize;
                    targets[cursor[s]] = dst as u32;
                    edge_ids[cursor[s]] = e;
                    cursor[s] += 1;
                }
            }
            OutAdjacency { offsets, targets, edge_ids }
        })
    }

    /// Same graph with a different vertex count and origin; used by
    /// preprocessing passes that append vertices.
    pub(crate) fn with_layout(&self, vertex_count: usize, offsets: Vec<usize>, sources: Vec<u32>, weights: Vec<T>) -> Self {
        Self::from_csr_unchecked(vertex_count, self.origin, offsets, sources, weights)
    }
}
