use std::cmp::Reverse;
use std::collections::VecDeque;
use std::ops::Range;

use crate::m2g::Graph;
use crate::scalar::Scalar;

/// Largest community grown from a single seed.
pub const MAX_COMMUNITY: usize = 1024;

/// A vertex relabeling and its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reordering {
    forward: Vec<u32>,
    inverse: Vec<u32>,
    communities: Vec<Range<usize>>,
}

impl Reordering {
    pub fn identity(n: usize) -> Self {
        let ids: Vec<u32> = (0..n as u32).collect();
        Reordering {
            forward: ids.clone(),
            inverse: ids,
            communities: (0..n).map(|v| v..v + 1).collect(),
        }
    }

    /// Builds from a visitation order listing old ids by new id.
    fn from_order(order: Vec<u32>, communities: Vec<Range<usize>>) -> Self {
        let mut forward = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            forward[old as usize] = new as u32;
        }
        Reordering { forward, inverse: order, communities }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn new_id(&self, old: usize) -> usize {
        self.forward[old] as usize
    }

    pub fn old_id(&self, new: usize) -> usize {
        self.inverse[new] as usize
    }

    /// Communities as ranges of new ids, in visitation order.
    pub fn communities(&self) -> &[Range<usize>] {
        &self.communities
    }

    /// Moves per-vertex values from old ids to new ids.
    pub fn permute<S: Clone>(&self, old: &[S]) -> Vec<S> {
        self.inverse.iter().map(|&o| old[o as usize].clone()).collect()
    }

    /// Moves per-vertex values from new ids back to old ids.
    pub fn restore<S: Clone>(&self, new: &[S]) -> Vec<S> {
        self.forward.iter().map(|&n| new[n as usize].clone()).collect()
    }

    /// Relabels every edge endpoint and re-canonicalizes the adjacency.
    pub fn relabel<T: Scalar>(&self, g: &Graph<T>) -> Graph<T> {
        let mut edges: Vec<(usize, usize, T)> = g
            .edges()
            .map(|(dst, src, w)| (self.new_id(dst), self.new_id(src), w))
            .collect();
        edges.sort_unstable_by_key(|&(d, s, _)| (d, s));
        Graph::from_sorted_edges(g.vertex_count(), *g.origin(), edges)
    }
}

/// Undirected neighbor lists without self loops, ascending.
fn neighbor_lists<T: Scalar>(g: &Graph<T>) -> Vec<Vec<u32>> {
    let out = g.out_adjacency();
    (0..g.vertex_count())
        .map(|v| {
            let mut n: Vec<u32> = g.in_edges(v).0.iter().copied().chain(out.out_edges(v).map(|(t, _)| t)).collect();
            n.sort_unstable();
            n.dedup();
            n.retain(|&u| u as usize != v);
            n
        })
        .collect()
}

/// Groups closely connected vertices under consecutive ids.
///
/// Seeds are visited in descending total degree (ties by id); each seed
/// grows a breadth-first community over unvisited neighbors until it holds
/// [`MAX_COMMUNITY`] vertices. New ids follow visitation order.
pub fn community_reorder<T: Scalar>(g: &Graph<T>) -> (Graph<T>, Reordering) {
    let n = g.vertex_count();
    let neighbors = neighbor_lists(g);
    let out = g.out_adjacency();
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (Reverse(g.in_degree(v) + out.out_degree(v)), v));

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut communities = Vec::new();
    let mut queue = VecDeque::new();
    for seed in seeds {
        if visited[seed] {
            continue;
        }
        let start = order.len();
        visited[seed] = true;
        queue.push_back(seed as u32);
        let mut members = 1;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &neighbors[v as usize] {
                if members == MAX_COMMUNITY {
                    break;
                }
                if !visited[u as usize] {
                    visited[u as usize] = true;
                    members += 1;
                    queue.push_back(u);
                }
            }
        }
        communities.push(start..order.len());
    }
    let reordering = Reordering::from_order(order, communities);
    let relabeled = reordering.relabel(g);
    (relabeled, reordering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::m2g::matrix_to_graph;
    use crate::matrix::{CooMatrix, MatrixDescriptor};
    use crate::scalar::ScalarKind;

    fn graph(n: usize, entries: Vec<(usize, usize, f64)>) -> Graph<f64> {
        let d = MatrixDescriptor::general(n, n, ScalarKind::Real64).unwrap();
        matrix_to_graph(&CooMatrix::from_triplets(d, entries).unwrap())
    }

    #[test]
    fn cliques_get_consecutive_ids() {
        // {0, 3, 5} and {1, 2, 4}, each a directed 3-clique
        let a = [0usize, 3, 5];
        let b = [1usize, 2, 4];
        let mut entries = Vec::new();
        for clique in [a, b] {
            for &i in &clique {
                for &j in &clique {
                    if i != j {
                        entries.push((i, j, 1.0));
                    }
                }
            }
        }
        let g = graph(6, entries);
        let (_, r) = community_reorder(&g);
        for clique in [a, b] {
            let mut ids: Vec<usize> = clique.iter().map(|&v| r.new_id(v)).collect();
            ids.sort();
            assert_eq!(ids[2] - ids[0], 2, "{ids:?}");
        }
        assert_eq!(r.communities().len(), 2);
    }

    #[test]
    fn empty_graph_singletons() {
        let g = graph(5, vec![]);
        let (h, r) = community_reorder(&g);
        assert_eq!(h.edge_count(), 0);
        assert_eq!(r.communities().len(), 5);
        assert_eq!(r, Reordering::identity(5));
    }

    #[test]
    fn permutation_is_a_bijection() {
        let g = graph(6, vec![(0, 5, 1.0), (5, 2, 2.0), (3, 1, 3.0), (4, 4, 1.0)]);
        let (h, r) = community_reorder(&g);
        let mut seen = [false; 6];
        for v in 0..6 {
            assert_eq!(r.old_id(r.new_id(v)), v);
            seen[r.new_id(v)] = true;
        }
        assert!(seen.iter().all(|&s| s));
        let vals: Vec<i32> = (0..6).collect();
        assert_eq!(r.restore(&r.permute(&vals)), vals);
        let mut before: Vec<f64> = g.weights().to_vec();
        let mut after: Vec<f64> = h.weights().to_vec();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        assert_eq!(before, after);
    }

    #[test]
    fn deterministic() {
        let g = graph(6, vec![(0, 5, 1.0), (5, 2, 2.0), (3, 1, 3.0)]);
        assert_eq!(community_reorder(&g).1, community_reorder(&g).1);
    }
}
