//! Worked examples for every public operation, checked against the dense
//! oracles where one applies.

use g4s::distsim::{
    dist_mv, encode_batch, maybe_migrate, merge_messages, replicate_hubs, CostModel, Encoding, MessageBatch,
    PartitionAssignment, Policies, EDGE_COST_SECONDS, HEADER_BYTES,
};
use g4s::engine::{
    compose_graphs, graph_add, graph_mm, graph_mv, graph_rank1_update, run_gather_apply, ExecutionStrategy, SumProduct,
};
use g4s::m2g::{detect_matrix, graph_to_matrix, graph_to_origin_matrix, matrix_to_graph, DetectError, Graph, GraphCache};
use g4s::matrix::{
    oracle_mm_dense, oracle_mv, parse_matrix_market, write_matrix_market, CooMatrix, DenseMatrix, DenseVector,
    MatrixData, MatrixDescriptor, MatrixKind,
};
use g4s::optimizer::{bucket_schedule, community_reorder, merge_replica_results, split_hubs};
use g4s::routines::{heat_capacity, mantle_force, potential_energy_chain, potential_energy_chain_composed};
use g4s::strategy::{
    default_candidates, extract_features, select_strategy, train_tree, BenchSample, CandidateRuntime, DecisionTree,
    OpKind, TreeError, TreeParams,
};
use g4s::testgen::{random_coo, random_vector, rng, TestKind};
use g4s::{relative_error, Complex64, ScalarKind};

fn real(rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> CooMatrix<f64> {
    let d = MatrixDescriptor::general(rows, cols, ScalarKind::Real64).unwrap();
    CooMatrix::from_triplets(d, entries.iter().copied()).unwrap()
}

fn dense_graph(rows: &[Vec<f64>]) -> Graph<f64> {
    let d = DenseMatrix::from_rows(rows).unwrap();
    let desc = MatrixDescriptor::general(d.rows(), d.cols(), ScalarKind::Real64).unwrap();
    matrix_to_graph(&CooMatrix::from_dense(desc, &d).unwrap())
}

fn eye(n: usize) -> Graph<f64> {
    matrix_to_graph(&real(n, n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>()))
}

fn vec(x: &[f64]) -> DenseVector<f64> {
    DenseVector::new(x.to_vec())
}

fn dense_of(g: &Graph<f64>) -> DenseMatrix<f64> {
    graph_to_origin_matrix(g).to_dense()
}

// matrix core

#[test]
fn parse_real_general() {
    let MatrixData::Real(m) = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 5.0\n").unwrap() else {
        panic!("expected a real matrix")
    };
    assert_eq!(m.kind(), MatrixKind::General);
    assert_eq!(m.entries(), &[(0, 1, 5.0)]);
}

#[test]
fn parse_pattern_means_one() {
    let MatrixData::Real(m) = parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n3 1\n").unwrap() else {
        panic!("expected a real matrix")
    };
    assert_eq!(m.entries(), &[(2, 0, 1.0)]);
}

#[test]
fn parse_symmetric_drops_explicit_zero() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 4.0\n1 1 0.0\n";
    let MatrixData::Real(m) = parse_matrix_market(text).unwrap() else { panic!("expected a real matrix") };
    assert_eq!(m.kind(), MatrixKind::Symmetric);
    assert_eq!(m.entries(), &[(1, 0, 4.0)]);
}

#[test]
fn write_empty_and_round_trip() {
    let empty = real(4, 4, &[]);
    let text = write_matrix_market(&empty);
    assert!(text.lines().any(|l| l.trim() == "4 4 0"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('%')).count(), 1);
    let m = real(2, 2, &[(0, 1, 5.0)]);
    assert_eq!(parse_matrix_market(&write_matrix_market(&m)).unwrap(), MatrixData::Real(m));
}

#[test]
fn hermitian_round_trip() {
    let d = MatrixDescriptor::new(2, 2, MatrixKind::Hermitian, ScalarKind::Complex64x2).unwrap();
    let m = CooMatrix::from_triplets(d, [(1, 0, Complex64::new(1.0, 2.0))]).unwrap();
    let text = write_matrix_market(&m);
    assert!(text.starts_with("%%MatrixMarket matrix coordinate complex hermitian"));
    assert_eq!(parse_matrix_market(&text).unwrap(), MatrixData::Complex(m));
}

#[test]
fn expansion_rules() {
    let d = MatrixDescriptor::new(2, 2, MatrixKind::Symmetric, ScalarKind::Real64).unwrap();
    let s = CooMatrix::from_triplets(d, [(1, 0, 4.0)]).unwrap().expand();
    assert_eq!(s.entries(), &[(0, 1, 4.0), (1, 0, 4.0)]);

    let d = MatrixDescriptor::new(2, 2, MatrixKind::Hermitian, ScalarKind::Complex64x2).unwrap();
    let h = CooMatrix::from_triplets(d, [(1, 0, Complex64::new(1.0, 2.0))]).unwrap().expand();
    assert_eq!(h.entries(), &[(0, 1, Complex64::new(1.0, -2.0)), (1, 0, Complex64::new(1.0, 2.0))]);

    // 4x4, kl = 1, ku = 0, band storage column-major with ld = 2
    let band = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 0.0];
    let b = CooMatrix::from_band_storage(4, 4, 1, 0, &band).unwrap().expand();
    assert!(b.entries().iter().all(|&(i, j, _)| i == j || i == j + 1));
    assert_eq!(b.nnz(), 7);
}

#[test]
fn oracle_examples() {
    let eye2 = real(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]);
    assert_eq!(oracle_mv(&eye2, &vec(&[7.0, -3.0])).unwrap().as_slice(), &[7.0, -3.0]);
    let a = real(2, 2, &[(0, 1, 2.0), (1, 0, 3.0)]);
    assert_eq!(oracle_mv(&a, &vec(&[1.0, 4.0])).unwrap().as_slice(), &[8.0, 3.0]);
    let b = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
    let c = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    assert_eq!(oracle_mm_dense(&b, &c).unwrap(), DenseMatrix::from_rows(&[vec![3.0, 2.0], vec![1.0, 1.0]]).unwrap());
}

// m2g

#[test]
fn detection() {
    let d = detect_matrix(&["1 0", "0 2"]).unwrap();
    assert_eq!((d.rows, d.cols, d.kind, d.scalar), (2, 2, MatrixKind::General, ScalarKind::Real64));
    assert!(matches!(detect_matrix(&["1 0", "0 2 3"]), Err(DetectError::Ragged { row: 2, .. })));
    assert!(matches!(detect_matrix(&["1 a", "0 2"]), Err(DetectError::NonNumeric { row: 1, .. })));
}

#[test]
fn transform_examples() {
    let g = eye(2);
    assert_eq!(g.vertex_count(), 2);
    assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0, 1.0), (1, 1, 1.0)]);

    let tall = matrix_to_graph(&real(3, 2, &[(2, 1, 5.0)]));
    assert_eq!(tall.vertex_count(), 3);
    assert_eq!(tall.edges().collect::<Vec<_>>(), vec![(2, 1, 5.0)]);
    assert_eq!(graph_to_matrix(&tall, 3, 2).unwrap().entries(), &[(2, 1, 5.0)]);

    let zero = matrix_to_graph(&real(4, 4, &[]));
    assert_eq!((zero.vertex_count(), zero.edge_count()), (4, 0));
    assert_eq!(graph_to_matrix(&zero, 4, 4).unwrap().nnz(), 0);
}

#[test]
fn inverse_round_trip_random() {
    let mut r = rng(8);
    for _ in 0..10 {
        let mut entries = Vec::new();
        while entries.len() < 20 {
            let (i, j) = (rand::Rng::random_range(&mut r, 0..8), rand::Rng::random_range(&mut r, 0..8));
            if !entries.iter().any(|&(a, b, _)| (a, b) == (i, j)) {
                entries.push((i, j, rand::Rng::random_range(&mut r, 0.5..2.0)));
            }
        }
        let m = real(8, 8, &entries);
        assert_eq!(graph_to_matrix(&matrix_to_graph(&m), 8, 8).unwrap(), m.expand());
    }
}

#[test]
fn cache_examples() {
    let cache = GraphCache::<f64>::default();
    let a = real(2, 2, &[(0, 1, 2.0), (1, 0, 3.0)]);
    let g1 = cache.get_or_transform(&a);
    let g2 = cache.get_or_transform(&a);
    assert_eq!(g1, g2);
    assert_eq!((cache.stats().hits, cache.stats().misses), (1, 1));

    let other = CacheFixture::new();
    other.cache.get_or_transform(&real(2, 2, &[(0, 1, 2.0)]));
    other.cache.get_or_transform(&real(2, 2, &[(0, 1, 2.5)]));
    assert_eq!((other.cache.stats().hits, other.cache.stats().misses), (0, 2));

    let d = MatrixDescriptor::new(2, 2, MatrixKind::Symmetric, ScalarKind::Real64).unwrap();
    let sym = CooMatrix::from_triplets(d, [(1, 0, 4.0)]).unwrap();
    let fresh = GraphCache::<f64>::default();
    fresh.get_or_transform(&sym);
    fresh.get_or_transform(&real(2, 2, &[(0, 1, 4.0), (1, 0, 4.0)]));
    assert_eq!(fresh.stats().hits, 1);
}

struct CacheFixture {
    cache: GraphCache<f64>,
}

impl CacheFixture {
    fn new() -> Self {
        CacheFixture { cache: GraphCache::default() }
    }
}

// engine

#[test]
fn gather_apply_examples() {
    let states = vec![0.5, -2.0, 3.0];
    assert_eq!(run_gather_apply(&eye(3), &states, &SumProduct, &ExecutionStrategy::default()).unwrap(), states);
    let a = dense_graph(&[vec![0.0, 2.0], vec![3.0, 0.0]]);
    assert_eq!(run_gather_apply(&a, &[1.0, 4.0], &SumProduct, &ExecutionStrategy::default()).unwrap(), vec![8.0, 3.0]);
    let empty = matrix_to_graph(&real(3, 3, &[]));
    assert_eq!(run_gather_apply(&empty, &states, &SumProduct, &ExecutionStrategy::default()).unwrap(), vec![0.0; 3]);
}

#[test]
fn mv_examples() {
    assert_eq!(graph_mv(&eye(2), &vec(&[7.0, -3.0])).unwrap().as_slice(), &[7.0, -3.0]);
    let a = dense_graph(&[vec![0.0, 2.0], vec![3.0, 0.0]]);
    assert_eq!(graph_mv(&a, &vec(&[1.0, 4.0])).unwrap().as_slice(), &[8.0, 3.0]);
    let d = MatrixDescriptor::new(2, 2, MatrixKind::Symmetric, ScalarKind::Real64).unwrap();
    let s = matrix_to_graph(&CooMatrix::from_triplets(d, [(1, 0, 4.0)]).unwrap());
    assert_eq!(graph_mv(&s, &vec(&[1.0, 1.0])).unwrap().as_slice(), &[4.0, 4.0]);
}

#[test]
fn add_examples() {
    let m = dense_graph(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
    let zero = matrix_to_graph(&real(2, 2, &[]));
    assert_eq!(graph_add(&m, &zero).unwrap(), m);
    let sum = graph_add(&m, &dense_graph(&[vec![0.0, 3.0], vec![0.0, 4.0]])).unwrap();
    assert_eq!(dense_of(&sum), DenseMatrix::from_rows(&[vec![1.0, 3.0], vec![0.0, 6.0]]).unwrap());
    let cancel = graph_add(&dense_graph(&[vec![1.0]]), &dense_graph(&[vec![-1.0]])).unwrap();
    assert_eq!(cancel.edge_count(), 0);
}

#[test]
fn mm_examples() {
    let b = dense_graph(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
    let bd = dense_of(&b);
    assert_eq!(graph_mm(&b, &DenseMatrix::identity(2)).unwrap(), bd);
    let c = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    assert_eq!(graph_mm(&b, &c).unwrap(), DenseMatrix::from_rows(&[vec![3.0, 2.0], vec![1.0, 1.0]]).unwrap());
    let col = DenseMatrix::new(2, 1, vec![5.0, -1.0]).unwrap();
    assert_eq!(graph_mm(&b, &col).unwrap().column(0), graph_mv(&b, &vec(&[5.0, -1.0])).unwrap().into_vec());
}

#[test]
fn compose_examples() {
    let a = dense_graph(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
    assert_eq!(compose_graphs(&a, &eye(2)).unwrap(), a);
    let c = dense_graph(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
    assert_eq!(dense_of(&compose_graphs(&a, &c).unwrap()), DenseMatrix::from_rows(&[vec![3.0, 2.0], vec![1.0, 1.0]]).unwrap());

    let mut r = rng(31);
    for _ in 0..5 {
        let g: Vec<Graph<f64>> = (0..3).map(|_| matrix_to_graph(&random_coo::<f64>(TestKind::Dense, 8, &mut r))).collect();
        let left = compose_graphs(&compose_graphs(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
        let right = compose_graphs(&g[0], &compose_graphs(&g[1], &g[2]).unwrap()).unwrap();
        assert!(relative_error(dense_of(&left).values(), dense_of(&right).values()) <= 1e-10);
    }
}

#[test]
fn rank1_examples() {
    let zero = matrix_to_graph(&real(2, 2, &[]));
    let u = vec(&[1.0, 2.0]);
    let out = graph_rank1_update(&zero, &u, &u).unwrap();
    assert_eq!(dense_of(&out), DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap());
    let g = dense_graph(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
    assert_eq!(graph_rank1_update(&g, &vec(&[0.0, 0.0]), &u).unwrap(), g);

    let d = MatrixDescriptor::general(2, 2, ScalarKind::Complex64x2).unwrap();
    let z = matrix_to_graph(&CooMatrix::<Complex64>::from_triplets(d, []).unwrap());
    let i = DenseVector::new(vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
    let h = graph_rank1_update(&z, &i, &i).unwrap();
    assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 0, Complex64::new(1.0, 0.0))]);
}

// optimizer

#[test]
fn reorder_examples() {
    let g = eye(6);
    let x = vec(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let (h, perm) = community_reorder(&g);
    let y = graph_mv(&h, &DenseVector::new(perm.permute(x.as_slice()))).unwrap();
    assert_eq!(perm.restore(y.as_slice()), x.into_vec());

    // cliques {0, 2, 4} and {1, 3, 5}
    let mut entries = Vec::new();
    for c in [[0, 2, 4], [1, 3, 5]] {
        for &i in &c {
            for &j in &c {
                if i != j {
                    entries.push((i, j, 1.0));
                }
            }
        }
    }
    let (_, perm) = community_reorder(&matrix_to_graph(&real(6, 6, &entries)));
    for c in [[0, 2, 4], [1, 3, 5]] {
        let mut ids: Vec<usize> = c.iter().map(|&v| perm.new_id(v)).collect();
        ids.sort_unstable();
        assert_eq!(ids[2] - ids[0], 2);
    }

    let (h, perm) = community_reorder(&matrix_to_graph(&real(5, 5, &[])));
    assert_eq!(perm.communities().len(), 5);
    assert_eq!(h.edge_count(), 0);
}

fn star(degree: usize) -> Graph<f64> {
    let n = degree + 1;
    matrix_to_graph(&real(n, n, &(1..=degree).map(|j| (0, j, j as f64)).collect::<Vec<_>>()))
}

#[test]
fn split_examples() {
    let (split, plan) = split_hubs(&star(25), 10);
    assert_eq!(plan.hubs.len(), 1);
    let degrees: Vec<usize> = plan.hubs[0].replicas.iter().map(|&r| split.in_degree(r as usize)).collect();
    assert_eq!(degrees, vec![10, 10, 5]);

    let flat = matrix_to_graph(&random_coo::<f64>(TestKind::Banded, 16, &mut rng(1)));
    let (same, plan) = split_hubs(&flat, 10);
    assert!(plan.is_empty());
    assert_eq!(same, flat);
    let (same, plan) = split_hubs(&star(10), 10);
    assert!(plan.is_empty());
    assert_eq!(same, star(10));
}

#[test]
fn merge_replica_examples() {
    let (_, empty) = split_hubs(&eye(3), 10);
    let states = vec![1.0, 2.0, 3.0];
    assert_eq!(merge_replica_results(&states, &states, &empty, &SumProduct).unwrap(), states);

    let g = star(25);
    let (_, plan) = split_hubs(&g, 10);
    let mut messages = vec![0.0; plan.total_vertex_count];
    for (&r, m) in plan.hubs[0].replicas.iter().zip([8.0, 3.0, 1.0]) {
        messages[r as usize] = m;
    }
    let out = merge_replica_results(&messages, &vec![0.0; 26], &plan, &SumProduct).unwrap();
    assert_eq!(out[0], 12.0);

    let x = random_vector::<f64>(26, &mut rng(2));
    let base = graph_mv(&g, &x).unwrap();
    let split = g4s::engine::graph_mv_with(&g, &x, &ExecutionStrategy::default().with_split(10)).unwrap();
    assert!(relative_error(split.as_slice(), base.as_slice()) <= 1e-10);
}

#[test]
fn bucket_examples() {
    let ranges = bucket_schedule(&eye(1000), 256).ranges;
    assert_eq!(ranges, vec![0..256, 256..512, 512..768, 768..1000]);
    assert_eq!(bucket_schedule(&eye(5), 256).ranges, vec![0..5]);
    let g = matrix_to_graph(&random_coo::<f64>(TestKind::Sparse, 300, &mut rng(3)));
    let x = random_vector::<f64>(300, &mut rng(4));
    let base = graph_mv(&g, &x).unwrap();
    for size in [1, 7, 256] {
        let y = g4s::engine::graph_mv_with(&g, &x, &ExecutionStrategy::default().with_buckets(size)).unwrap();
        assert_eq!(y, base);
    }
}

// strategy

#[test]
fn feature_examples() {
    let d = MatrixDescriptor::general(1024, 1024, ScalarKind::Real64).unwrap();
    let f = extract_features(OpKind::Mv, &d, 1024, "cpu");
    assert!((f.density - 0.000977).abs() < 1e-6);
    assert_eq!(f.size_log2, 10);
    let s = MatrixDescriptor::new(8, 8, MatrixKind::Symmetric, ScalarKind::Real64).unwrap();
    let f = extract_features(OpKind::Add, &s, 64, "cpu");
    assert!(f.symmetric);
    assert_eq!(f.density, 1.0);
    let one = MatrixDescriptor::general(1, 1, ScalarKind::Real64).unwrap();
    assert_eq!(extract_features(OpKind::Compose, &one, 1, "cpu").size_log2, 0);
}

fn labeled(density: f64, fast: usize) -> BenchSample {
    let d = MatrixDescriptor::general(256, 256, ScalarKind::Real64).unwrap();
    let f = extract_features(OpKind::Mv, &d, (density * 65536.0).round() as usize, "cpu");
    let runtimes = default_candidates()
        .into_iter()
        .enumerate()
        .map(|(k, strategy)| CandidateRuntime { strategy, seconds: if k == fast { 1.0 } else { 3.0 } })
        .collect();
    BenchSample::new(f, runtimes).unwrap()
}

#[test]
fn tree_examples() {
    let vc = ExecutionStrategy::vertex_centric();
    let split = ExecutionStrategy::edge_centric().with_split(10);
    let same: Vec<_> = (0..8).map(|k| labeled(0.001 * (k + 1) as f64, 0)).collect();
    let tree = train_tree(&same, &TreeParams::default()).unwrap();
    assert_eq!(tree, DecisionTree::leaf(vc));

    let mut samples: Vec<_> = (1..=10).map(|k| labeled(0.0008 * k as f64, 3)).collect();
    samples.extend((0..10).map(|k| labeled(0.01 + 0.05 * k as f64, 0)));
    let tree = train_tree(&samples, &TreeParams::default()).unwrap();
    assert_eq!(tree.depth(), 1);
    let g4s::strategy::TreeNode::Split { feature, threshold, .. } = tree.nodes[0] else { panic!("expected a split") };
    assert_eq!(g4s::strategy::FEATURE_NAMES[feature], "density");
    assert!(threshold > 0.008 && threshold < 0.01);

    let probe = |density: f64| extract_features(OpKind::Mv, &MatrixDescriptor::general(256, 256, ScalarKind::Real64).unwrap(), (density * 65536.0) as usize, "cpu");
    assert_eq!(select_strategy(&tree, &probe(0.001)), split);
    assert_eq!(select_strategy(&tree, &probe(0.5)), vc);
    assert_eq!(select_strategy(&DecisionTree::leaf(split), &probe(0.5)), split);

    assert!(matches!(train_tree(&samples[..5], &TreeParams::default()), Err(TreeError::TooFewSamples { .. })));
}

// distsim

#[test]
fn partition_examples() {
    assert_eq!(PartitionAssignment::even(10, 3).unwrap().sizes(), vec![4, 3, 3]);
    assert_eq!(PartitionAssignment::even(10, 1).unwrap().range(0), 0..10);
    assert_eq!(PartitionAssignment::even(4, 4).unwrap().sizes(), vec![1; 4]);
}

#[test]
fn merge_examples() {
    let raw = [(2, 1.0), (0, 2.0), (2, 3.0), (1, 4.0), (0, 5.0), (2, 6.0), (1, 7.0)];
    assert_eq!(merge_messages(&raw, |a, b| a + b), vec![(0, 7.0), (1, 11.0), (2, 10.0)]);
    assert_eq!(merge_messages(&[(4, 2.5)], |a, b| a + b), vec![(4, 2.5)]);
    assert!(merge_messages::<f64>(&[], |a, b| a + b).is_empty());
}

#[test]
fn codec_examples() {
    let b = MessageBatch::new(0, 1, 0, (100..108u64).map(|i| (i, i as f64)).collect()).unwrap();
    let raw = encode_batch(&b, Encoding::Raw);
    let delta = encode_batch(&b, Encoding::Delta);
    assert_eq!(raw.len() - HEADER_BYTES - 64, 64);
    assert_eq!(delta.len() - HEADER_BYTES - 64, 8 + 7);
    let one = MessageBatch::new(0, 1, 0, vec![(9, 1.0)]).unwrap();
    let diff = encode_batch(&one, Encoding::Delta).len() as isize - encode_batch(&one, Encoding::Raw).len() as isize;
    assert!((0..=1).contains(&diff));
}

#[test]
fn replication_examples() {
    let g = star(25);
    let asg = PartitionAssignment::even(26, 4).unwrap();
    let plan = replicate_hubs(&g, &asg, 10);
    assert_eq!((plan.hubs.clone(), plan.shard_count), (vec![0], 4));
    assert!(replicate_hubs(&eye(26), &asg, 10).is_empty());
}

#[test]
fn cluster_examples() {
    let g = matrix_to_graph(&random_coo::<f64>(TestKind::Sparse, 64, &mut rng(5)));
    let x = random_vector::<f64>(64, &mut rng(6));
    let base = graph_mv(&g, &x).unwrap();
    let (y, m) = dist_mv(&g, &x, 1, &Policies::default()).unwrap();
    assert_eq!(y, base);
    assert_eq!(m.total_batches(), 0);
    let (y, m) = dist_mv(&g, &x, 4, &Policies::default()).unwrap();
    assert!(relative_error(y.as_slice(), base.as_slice()) <= 1e-10);
    assert!(m.supersteps[0].batches <= 12);
}

#[test]
fn migration_examples() {
    assert!(!maybe_migrate(&[1.0; 4], 100, &CostModel::default()).migrate);
    let loads = [10_000.0 * EDGE_COST_SECONDS, 1e-8, 1e-8, 1e-8];
    assert!(maybe_migrate(&loads, 60_000, &CostModel { bandwidth_bytes_per_second: 1e15 }).migrate);
    assert!(!maybe_migrate(&loads, 60_000, &CostModel { bandwidth_bytes_per_second: 1e-3 }).migrate);
}

// routines

#[test]
fn routine_examples() {
    let k = dense_graph(&[vec![0.0, 2.0], vec![3.0, 0.0]]);
    let u = vec(&[1.0, 4.0]);
    assert_eq!(mantle_force(&eye(3), &vec(&[1.0, 2.0, 3.0]), None).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
    assert_eq!(mantle_force(&k, &u, None).unwrap().as_slice(), &[8.0, 3.0]);
    assert_eq!(mantle_force(&k, &u, Some(&vec(&[1.0, 1.0]))).unwrap().as_slice(), &[9.0, 4.0]);

    let b = dense_graph(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
    let v = vec(&[1.0, 0.0]);
    assert_eq!(potential_energy_chain(&[&k], &v).unwrap(), graph_mv(&k, &v).unwrap());
    let inner = oracle_mv(&graph_to_origin_matrix(&b), &v).unwrap();
    let nested = oracle_mv(&graph_to_origin_matrix(&k), &inner).unwrap();
    assert_eq!(potential_energy_chain(&[&k, &b], &v).unwrap(), nested);
    assert_eq!(potential_energy_chain_composed(&[&k, &b], &v).unwrap(), nested);

    assert_eq!(heat_capacity(&eye(3), &vec(&[2.0, 3.0, 4.0])).unwrap().as_slice(), &[2.0, 3.0, 4.0]);
    let stochastic = dense_graph(&[vec![0.2, 0.3, 0.5], vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5]]);
    let out = heat_capacity(&stochastic, &vec(&[3.0; 3])).unwrap();
    assert!(relative_error(out.as_slice(), &[3.0; 3]) <= 1e-15);
    let zero = matrix_to_graph(&real(3, 3, &[]));
    assert_eq!(heat_capacity(&zero, &vec(&[1.0; 3])).unwrap().as_slice(), &[0.0; 3]);
}
