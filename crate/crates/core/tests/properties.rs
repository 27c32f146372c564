use proptest::prelude::*;

use g4s::distsim::{decode_batch, dist_mv, encode_batch, merge_messages, Encoding, MessageBatch, Policies};
use g4s::engine::{compose_graphs, graph_add, graph_mm, graph_mv, graph_mv_with, ExecutionStrategy};
use g4s::m2g::{graph_to_matrix, graph_to_origin_matrix, matrix_data_to_graph, matrix_to_graph, read_graph_bytes};
use g4s::matrix::{oracle_add, oracle_mm, oracle_mv, parse_matrix_market, write_matrix_data, CooMatrix, MatrixDescriptor};
use g4s::optimizer::{community_reorder, split_hubs};
use g4s::testgen::{random_any_matrix, random_coo, random_dense, random_hub_graph, random_vector, rng, TestKind};
use g4s::{relative_error, ScalarKind};

fn kind() -> impl Strategy<Value = TestKind> {
    prop::sample::select(TestKind::BENCH.to_vec())
}

fn sparse_entries(n: usize) -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::btree_map((0..n, 0..n), -4.0f64..4.0, 0..3 * n)
        .prop_map(|m| m.into_iter().filter(|&(_, w)| w != 0.0).map(|((i, j), w)| (i, j, w)).collect())
}

fn coo(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> CooMatrix<f64> {
    let entries = entries.into_iter().filter(|&(i, j, _)| i < rows && j < cols);
    CooMatrix::from_triplets(MatrixDescriptor::general(rows, cols, ScalarKind::Real64).unwrap(), entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_map_restores_expanded(rows in 1usize..12, cols in 1usize..12, entries in sparse_entries(12)) {
        let m = coo(rows, cols, entries);
        let g = matrix_to_graph(&m);
        prop_assert_eq!(g.vertex_count(), rows.max(cols));
        prop_assert_eq!(graph_to_matrix(&g, rows, cols).unwrap(), m.expand());
    }

    #[test]
    fn csr_sources_ascend(k in kind(), n in 1usize..40, seed in any::<u64>()) {
        let g = matrix_to_graph(&random_coo::<f64>(k, n, &mut rng(seed)));
        for v in 0..g.vertex_count() {
            let (srcs, _) = g.in_edges(v);
            prop_assert!(srcs.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn mv_matches_oracle_across_strategies(k in kind(), n in 1usize..48, seed in any::<u64>(), limit in 1usize..12) {
        let mut r = rng(seed);
        let a = random_coo::<f64>(k, n, &mut r);
        let x = random_vector::<f64>(n, &mut r);
        let expected = oracle_mv(&a, &x).unwrap();
        let g = matrix_to_graph(&a);
        for s in [
            ExecutionStrategy::vertex_centric(),
            ExecutionStrategy::edge_centric(),
            ExecutionStrategy::vertex_centric().with_reorder().with_split(limit),
            ExecutionStrategy::edge_centric().with_split(limit).with_buckets(limit),
        ] {
            let y = graph_mv_with(&g, &x, &s).unwrap();
            prop_assert!(relative_error(y.as_slice(), expected.as_slice()) <= 1e-10);
        }
    }

    #[test]
    fn add_and_mm_match_oracle(k in kind(), n in 1usize..24, cols in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_coo::<f64>(k, n, &mut r);
        let b = random_coo::<f64>(k, n, &mut r);
        let c = random_dense::<f64>(n, cols, &mut r);
        let (ga, gb) = (matrix_to_graph(&a), matrix_to_graph(&b));
        let sum = graph_to_origin_matrix(&graph_add(&ga, &gb).unwrap()).to_dense();
        prop_assert!(relative_error(sum.values(), oracle_add(&a, &b).unwrap().values()) <= 1e-10);
        let mm = graph_mm(&ga, &c).unwrap();
        prop_assert!(relative_error(mm.values(), oracle_mm(&a, &c).unwrap().values()) <= 1e-10);
    }

    #[test]
    fn compose_is_associative(n in 1usize..12, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g: Vec<_> = (0..3).map(|_| matrix_to_graph(&random_coo::<f64>(TestKind::Sparse, n, &mut r))).collect();
        let left = compose_graphs(&compose_graphs(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
        let right = compose_graphs(&g[0], &compose_graphs(&g[1], &g[2]).unwrap()).unwrap();
        let (l, rr) = (graph_to_origin_matrix(&left).to_dense(), graph_to_origin_matrix(&right).to_dense());
        prop_assert!(relative_error(l.values(), rr.values()) <= 1e-10);
    }

    #[test]
    fn reordering_is_a_bijection(k in kind(), n in 1usize..60, seed in any::<u64>()) {
        let g = matrix_to_graph(&random_coo::<f64>(k, n, &mut rng(seed)));
        let (h, perm) = community_reorder(&g);
        let ids: Vec<usize> = (0..g.vertex_count()).collect();
        prop_assert_eq!(perm.restore(&perm.permute(&ids)), ids.clone());
        let mut seen = perm.permute(&ids);
        seen.sort_unstable();
        prop_assert_eq!(seen, ids);
        prop_assert_eq!(h.edge_count(), g.edge_count());
    }

    #[test]
    fn split_bounds_in_degree(seed in any::<u64>(), limit in 1usize..16) {
        let g = random_hub_graph(&mut rng(seed), 40);
        let (split, plan) = split_hubs(&g, limit);
        prop_assert!(split.max_in_degree() <= limit.max(1));
        prop_assert_eq!(split.edge_count(), g.edge_count());
        prop_assert_eq!(plan.is_empty(), g.max_in_degree() <= limit);
    }

    #[test]
    fn distributed_mv_matches(seed in any::<u64>(), p in 1usize..6, bits in 0usize..16) {
        let g = random_hub_graph(&mut rng(seed), 48);
        prop_assume!(p <= g.vertex_count());
        let x = random_vector::<f64>(g.vertex_count(), &mut rng(seed ^ 1));
        let base = graph_mv(&g, &x).unwrap();
        let policies = Policies::all_subsets()[bits];
        let (y, _) = dist_mv(&g, &x, p, &policies).unwrap();
        prop_assert!(relative_error(y.as_slice(), base.as_slice()) <= 1e-10);
    }

    #[test]
    fn codec_round_trips(ids in prop::collection::btree_set(0u64..1 << 40, 0..64), delta in any::<bool>()) {
        let entries: Vec<(u64, f64)> = ids.into_iter().map(|i| (i, i as f64 * 0.5 - 3.0)).collect();
        let b = MessageBatch::new(1, 2, 3, entries).unwrap();
        let mode = if delta { Encoding::Delta } else { Encoding::Raw };
        prop_assert_eq!(decode_batch::<f64>(&encode_batch(&b, mode)).unwrap(), b);
    }

    #[test]
    fn merged_messages_are_sorted_and_sum(raw in prop::collection::vec((0u64..20, -5i32..5), 0..80)) {
        let raw: Vec<(u64, f64)> = raw.into_iter().map(|(d, v)| (d, v as f64)).collect();
        let merged = merge_messages(&raw, |a, b| a + b);
        prop_assert!(merged.windows(2).all(|w| w[0].0 < w[1].0));
        for &(d, v) in &merged {
            let total: f64 = raw.iter().filter(|m| m.0 == d).map(|m| m.1).sum();
            prop_assert_eq!(v, total);
        }
        let distinct: std::collections::BTreeSet<u64> = raw.iter().map(|m| m.0).collect();
        prop_assert_eq!(merged.len(), distinct.len());
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let m = random_any_matrix(&mut rng(seed));
        prop_assert_eq!(&parse_matrix_market(&write_matrix_data(&m)).unwrap(), &m);
        let g = matrix_data_to_graph(&m);
        prop_assert_eq!(read_graph_bytes(&g.to_bytes()).unwrap(), g);
    }
}
