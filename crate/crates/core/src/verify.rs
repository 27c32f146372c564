//! Property suites behind `g4s verify` and the acceptance tests.
//!
//! Reports hold no timings, so the same configuration always yields the
//! same bytes. A failing suite keeps its first counterexample, whose
//! inputs can be written to disk for replay.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distsim::{
    decode_batch, dist_add, dist_compose, dist_mm, dist_mv, dist_rank1, encode_batch, id_section_bytes, CommMetrics,
    DistError, Encoding, MessageBatch, Policies,
};
use crate::engine::{
    compose_graphs, graph_add, graph_mm, graph_mv, graph_mv_with, graph_rank1_update, EngineError, ExecutionModel,
    ExecutionStrategy,
};
use crate::m2g::{graph_to_origin_matrix, matrix_to_graph, Graph};
use crate::matrix::{
    oracle_add, oracle_mm, oracle_mv, oracle_rank1, write_matrix_market, write_vector, CooMatrix, DenseMatrix,
    DenseVector, MatrixDescriptor,
};
use crate::optimizer::{community_reorder, split_hubs};
use crate::routines::{
    chain_matrix, coupling_matrix, heat_capacity, mantle_force, potential_energy_chain,
    potential_energy_chain_composed, stiffness_matrix,
};
use crate::scalar::{relative_error, Scalar, ScalarKind};
use crate::testgen::{case_seed, random_coo, random_dense, random_hub_graph, random_scalar, random_vector, rng, TestKind};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const REAL_TOLERANCE: f64 = 1e-10;
pub const COMPLEX_TOLERANCE: f64 = 1e-9;
pub const CHAIN_TOLERANCE: f64 = 1e-9;
pub const GRID_SIZES: [usize; 6] = [1, 2, 3, 8, 33, 64];
pub const SHARD_COUNTS: [usize; 4] = [1, 2, 4, 8];
pub const SPLIT_LIMITS: [usize; 4] = [1, 2, 10, 1000];
pub const BUCKET_SIZES: [usize; 3] = [1, 7, 256];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    OracleGrid,
    Split,
    Reorder,
    Distsim,
    Codec,
    Routines,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::OracleGrid, Suite::Split, Suite::Reorder, Suite::Distsim, Suite::Codec, Suite::Routines];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OracleGrid => "oracle-grid",
            Suite::Split => "split",
            Suite::Reorder => "reorder",
            Suite::Distsim => "distsim",
            Suite::Codec => "codec",
            Suite::Routines => "routines",
        }
    }

    /// Parses a suite name or `all`.
    pub fn select(s: &str) -> Result<Vec<Suite>, String> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.parse().map(|x| vec![x])
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}` (expected one of {}, all)", names.join(", "))
        })
    }
}

/// Operations of the oracle grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridOp {
    Mv,
    Add,
    MmDense,
    MmCompose,
    Rank1,
}

impl GridOp {
    pub const ALL: [GridOp; 5] = [GridOp::Mv, GridOp::Add, GridOp::MmDense, GridOp::MmCompose, GridOp::Rank1];

    pub fn name(self) -> &'static str {
        match self {
            GridOp::Mv => "mv",
            GridOp::Add => "add",
            GridOp::MmDense => "mm_dense",
            GridOp::MmCompose => "mm_compose",
            GridOp::Rank1 => "rank1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Seeds per oracle-grid cell.
    pub grid_seeds: usize,
    /// Seeds per distribution-grid cell.
    pub dist_seeds: usize,
    /// Random graphs for the split and reorder suites.
    pub graphs: usize,
    /// Random batches for the codec suite.
    pub batches: usize,
    /// Corrupts one weight of the first fixture of every suite.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42, grid_seeds: 10, dist_seeds: 10, graphs: 20, batches: 1000, inject_fault: false }
    }
}

/// A failing case and the inputs needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub case: String,
    pub error: Option<f64>,
    pub reason: String,
    /// File name to content; written by [`dump_counterexamples`].
    #[serde(skip)]
    pub inputs: BTreeMap<String, String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub skipped: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Suite-specific figures, such as codec size ratios.
    pub metrics: BTreeMap<String, f64>,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub inject_fault: bool,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Result of one case inside a suite.
struct Outcome {
    error: f64,
    tolerance: f64,
    skipped: bool,
    failure: Option<Counterexample>,
}

impl Outcome {
    fn skipped() -> Self {
        Outcome { error: 0.0, tolerance: 0.0, skipped: true, failure: None }
    }

    fn checked(error: f64, tolerance: f64, case: impl FnOnce() -> (String, BTreeMap<String, String>)) -> Self {
        let failure = (error.is_nan() || error > tolerance).then(|| {
            let (case, inputs) = case();
            counterexample(case, Some(error), format!("error {error:e} exceeds {tolerance:e}"), inputs)
        });
        Outcome { error, tolerance, skipped: false, failure }
    }

    fn failed(reason: String, case: String, inputs: BTreeMap<String, String>) -> Self {
        Outcome { error: f64::INFINITY, tolerance: 0.0, skipped: false, failure: Some(counterexample(case, None, reason, inputs)) }
    }
}

fn counterexample(case: String, error: Option<f64>, reason: String, inputs: BTreeMap<String, String>) -> Counterexample {
    let error = error.filter(|e| e.is_finite());
    let files = inputs.keys().cloned().collect();
    Counterexample { case, error, reason, inputs, files }
}

fn summarize(suite: Suite, tolerance: f64, outcomes: Vec<Outcome>, metrics: BTreeMap<String, f64>) -> SuiteReport {
    let mut report = SuiteReport {
        suite,
        cases: 0,
        skipped: 0,
        failures: 0,
        max_error: 0.0,
        tolerance,
        passed: true,
        metrics,
        counterexample: None,
    };
    for o in outcomes {
        if o.skipped {
            report.skipped += 1;
            continue;
        }
        report.cases += 1;
        if o.error.is_finite() {
            report.max_error = report.max_error.max(o.error);
        }
        if let Some(c) = o.failure {
            report.failures += 1;
            report.counterexample.get_or_insert(c);
        }
        report.tolerance = report.tolerance.max(o.tolerance);
    }
    report.passed = report.failures == 0;
    report
}

/// Bumps the first edge weight, leaving graphs without edges untouched.
pub fn corrupt_first_weight<T: Scalar>(g: &Graph<T>) -> Graph<T> {
    let mut weights = g.weights().to_vec();
    if let Some(w) = weights.first_mut() {
        *w += T::from_f64(1.0);
    }
    Graph::from_csr_unchecked(g.vertex_count(), *g.origin(), g.offsets().to_vec(), g.sources().to_vec(), weights)
}

fn tolerance_of<T: Scalar>() -> f64 {
    if T::KIND == ScalarKind::Complex64x2 {
        COMPLEX_TOLERANCE
    } else {
        REAL_TOLERANCE
    }
}

fn dense_of<T: Scalar>(g: &Graph<T>) -> DenseMatrix<T> {
    graph_to_origin_matrix(g).to_dense()
}

fn dense_to_mtx<T: Scalar>(c: &DenseMatrix<T>) -> String {
    let d = MatrixDescriptor::general(c.rows(), c.cols(), T::KIND).expect("non-zero shape");
    write_matrix_market(&CooMatrix::from_dense(d, c).expect("dense entries are valid"))
}

/// Every operand a grid case might need, drawn from one case seed.
pub struct GridOperands<T> {
    pub a: CooMatrix<T>,
    pub b: CooMatrix<T>,
    pub c: DenseMatrix<T>,
    pub x: DenseVector<T>,
    pub u: DenseVector<T>,
    pub w: DenseVector<T>,
}

impl<T: Scalar> GridOperands<T> {
    pub fn generate(kind: TestKind, n: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        GridOperands {
            a: random_coo(kind, n, &mut r),
            b: random_coo(kind, n, &mut r),
            c: random_dense(n, n, &mut r),
            x: random_vector(n, &mut r),
            u: random_vector(n, &mut r),
            w: random_vector(n, &mut r),
        }
    }

    fn inputs(&self, op: GridOp, engine_a: &Graph<T>, corrupted: bool) -> BTreeMap<String, String> {
        let mut files = BTreeMap::new();
        files.insert("A.mtx".to_string(), write_matrix_market(&self.a));
        if corrupted {
            files.insert("A_engine.mtx".to_string(), write_matrix_market(&graph_to_origin_matrix(engine_a)));
        }
        match op {
            GridOp::Mv => {
                files.insert("x.txt".into(), write_vector(self.x.as_slice()));
            }
            GridOp::Add | GridOp::MmCompose => {
                files.insert("B.mtx".into(), write_matrix_market(&self.b));
            }
            GridOp::MmDense => {
                files.insert("C.mtx".into(), dense_to_mtx(&self.c));
            }
            GridOp::Rank1 => {
                files.insert("u.txt".into(), write_vector(self.u.as_slice()));
                files.insert("w.txt".into(), write_vector(self.w.as_slice()));
            }
        }
        files
    }
}

/// Coordinates of one grid case, in suite order.
#[derive(Debug, Clone, Copy)]
struct GridCase {
    op: GridOp,
    kind: TestKind,
    n: usize,
    seed_index: usize,
}

impl GridCase {
    fn seed(&self, base: u64) -> u64 {
        case_seed(base, &[self.op as u64, self.kind as u64, self.n as u64, self.seed_index as u64])
    }

    fn describe(&self, base: u64) -> String {
        format!(
            "op={} kind={} n={} seed_index={} case_seed={}",
            self.op.name(),
            self.kind.name(),
            self.n,
            self.seed_index,
            self.seed(base)
        )
    }
}

fn grid_cases(seeds: usize) -> Vec<GridCase> {
    let mut out = Vec::new();
    for op in GridOp::ALL {
        for kind in TestKind::ALL {
            for n in GRID_SIZES {
                for seed_index in 0..seeds {
                    out.push(GridCase { op, kind, n, seed_index });
                }
            }
        }
    }
    out
}

/// Engine output of a grid op as flat dense values.
pub fn engine_grid_op<T: Scalar>(op: GridOp, a: &Graph<T>, ops: &GridOperands<T>) -> Result<Vec<T>, EngineError> {
    Ok(match op {
        GridOp::Mv => graph_mv(a, &ops.x)?.into_vec(),
        GridOp::Add => dense_of(&graph_add(a, &matrix_to_graph(&ops.b))?).values().to_vec(),
        GridOp::MmDense => graph_mm(a, &ops.c)?.values().to_vec(),
        GridOp::MmCompose => dense_of(&compose_graphs(a, &matrix_to_graph(&ops.b))?).values().to_vec(),
        GridOp::Rank1 => dense_of(&graph_rank1_update(a, &ops.u, &ops.w)?).values().to_vec(),
    })
}

/// Dense oracle output of a grid op.
pub fn oracle_grid_op<T: Scalar>(op: GridOp, ops: &GridOperands<T>) -> Vec<T> {
    let out = match op {
        GridOp::Mv => return oracle_mv(&ops.a, &ops.x).expect("square operands").into_vec(),
        GridOp::Add => oracle_add(&ops.a, &ops.b),
        GridOp::MmDense => oracle_mm(&ops.a, &ops.c),
        GridOp::MmCompose => oracle_mm(&ops.a, &ops.b.to_dense()),
        GridOp::Rank1 => oracle_rank1(&ops.a, &ops.u, &ops.w),
    };
    out.expect("square operands").values().to_vec()
}

/// Distributed output of a grid op plus its traffic counters.
pub fn dist_grid_op<T: Scalar>(
    op: GridOp,
    a: &Graph<T>,
    ops: &GridOperands<T>,
    p: usize,
    policies: &Policies,
) -> Result<(Vec<T>, CommMetrics), DistError> {
    Ok(match op {
        GridOp::Mv => {
            let (y, m) = dist_mv(a, &ops.x, p, policies)?;
            (y.into_vec(), m)
        }
        GridOp::Add => {
            let (g, m) = dist_add(a, &matrix_to_graph(&ops.b), p, policies)?;
            (dense_of(&g).values().to_vec(), m)
        }
        GridOp::MmDense => {
            let (c, m) = dist_mm(a, &ops.c, p, policies)?;
            (c.values().to_vec(), m)
        }
        GridOp::MmCompose => {
            let (g, m) = dist_compose(a, &matrix_to_graph(&ops.b), p, policies)?;
            (dense_of(&g).values().to_vec(), m)
        }
        GridOp::Rank1 => {
            let (g, m) = dist_rank1(a, &ops.u, &ops.w, p, policies)?;
            (dense_of(&g).values().to_vec(), m)
        }
    })
}

fn oracle_case<T: Scalar>(case: GridCase, base: u64, corrupt: bool) -> Outcome {
    let ops = GridOperands::<T>::generate(case.kind, case.n, case.seed(base));
    let clean = matrix_to_graph(&ops.a);
    let a = if corrupt { corrupt_first_weight(&clean) } else { clean };
    let expected = oracle_grid_op(case.op, &ops);
    match engine_grid_op(case.op, &a, &ops) {
        Ok(actual) => Outcome::checked(relative_error(&actual, &expected), tolerance_of::<T>(), || {
            (case.describe(base), ops.inputs(case.op, &a, corrupt))
        }),
        Err(e) => Outcome::failed(e.to_string(), case.describe(base), ops.inputs(case.op, &a, corrupt)),
    }
}

pub fn oracle_grid_suite(cfg: &VerifyConfig) -> SuiteReport {
    let outcomes: Vec<Outcome> = grid_cases(cfg.grid_seeds)
        .into_par_iter()
        .enumerate()
        .map(|(i, case)| {
            let corrupt = cfg.inject_fault && i == 0;
            if case.kind.is_complex() {
                oracle_case::<Complex64>(case, cfg.seed, corrupt)
            } else {
                oracle_case::<f64>(case, cfg.seed, corrupt)
            }
        })
        .collect();
    summarize(Suite::OracleGrid, REAL_TOLERANCE, outcomes, BTreeMap::new())
}

/// Largest batch count of any merged superstep relative to `p (p - 1)`,
/// or a violation message.
fn check_traffic(metrics: &CommMetrics, p: usize, merge: bool) -> Result<f64, String> {
    let bound = p * p.saturating_sub(1);
    let mut worst: f64 = 0.0;
    for (k, s) in metrics.supersteps.iter().enumerate() {
        if s.post_merge > s.pre_merge {
            return Err(format!("superstep {k}: {} post-merge entries exceed {} messages", s.post_merge, s.pre_merge));
        }
        if merge {
            if s.batches > bound {
                return Err(format!("superstep {k}: {} batches exceed p(p-1) = {bound}", s.batches));
            }
            if bound > 0 {
                worst = worst.max(s.batches as f64 / bound as f64);
            }
        }
    }
    Ok(worst)
}

fn dist_case<T: Scalar>(case: GridCase, base: u64, corrupt: bool) -> Vec<(Outcome, f64)> {
    let ops = GridOperands::<T>::generate(case.kind, case.n, case.seed(base));
    let a = matrix_to_graph(&ops.a);
    let baseline = engine_grid_op(case.op, &a, &ops).expect("engine handles grid operands");
    let dist_a = if corrupt { corrupt_first_weight(&a) } else { a.clone() };
    let mut out = Vec::new();
    for p in SHARD_COUNTS {
        for (k, policies) in Policies::all_subsets().into_iter().enumerate() {
            if p > a.vertex_count() {
                out.push((Outcome::skipped(), 0.0));
                continue;
            }
            let describe = || format!("{} p={p} policies={policies:?}", case.describe(base));
            let inputs = || ops.inputs(case.op, &dist_a, corrupt);
            let corrupt_here = corrupt && p == 1 && k == 0;
            let g = if corrupt_here { &dist_a } else { &a };
            match dist_grid_op(case.op, g, &ops, p, &policies) {
                Ok((actual, metrics)) => match check_traffic(&metrics, p, policies.merge) {
                    Ok(ratio) => out.push((
                        Outcome::checked(relative_error(&actual, &baseline), REAL_TOLERANCE, || (describe(), inputs())),
                        ratio,
                    )),
                    Err(reason) => out.push((Outcome::failed(reason, describe(), inputs()), 0.0)),
                },
                Err(e) => out.push((Outcome::failed(e.to_string(), describe(), inputs()), 0.0)),
            }
        }
    }
    out
}

pub fn distsim_suite(cfg: &VerifyConfig) -> SuiteReport {
    let results: Vec<Vec<(Outcome, f64)>> = grid_cases(cfg.dist_seeds)
        .into_par_iter()
        .enumerate()
        .map(|(i, case)| {
            let corrupt = cfg.inject_fault && i == 0;
            if case.kind.is_complex() {
                dist_case::<Complex64>(case, cfg.seed, corrupt)
            } else {
                dist_case::<f64>(case, cfg.seed, corrupt)
            }
        })
        .collect();
    let mut worst: f64 = 0.0;
    let outcomes = results
        .into_iter()
        .flatten()
        .map(|(o, ratio)| {
            worst = worst.max(ratio);
            o
        })
        .collect();
    let metrics = BTreeMap::from([("max_batches_over_bound".to_string(), worst)]);
    summarize(Suite::Distsim, REAL_TOLERANCE, outcomes, metrics)
}

fn graph_inputs(g: &Graph<f64>, x: &DenseVector<f64>) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("A.mtx".to_string(), write_matrix_market(&graph_to_origin_matrix(g))),
        ("x.txt".to_string(), write_vector(x.as_slice())),
    ])
}

fn neutrality_graphs(cfg: &VerifyConfig, salt: u64) -> Vec<(Graph<f64>, DenseVector<f64>)> {
    (0..cfg.graphs)
        .map(|k| {
            let mut r = rng(case_seed(cfg.seed, &[salt, k as u64]));
            let g = random_hub_graph(&mut r, 256);
            let x = random_vector(g.cols(), &mut r);
            (g, x)
        })
        .collect()
}

fn neutrality_check(
    g: &Graph<f64>,
    x: &DenseVector<f64>,
    strategy: &ExecutionStrategy,
    baseline: &DenseVector<f64>,
    case: String,
) -> Outcome {
    match graph_mv_with(g, x, strategy) {
        Ok(y) => Outcome::checked(relative_error(y.as_slice(), baseline.as_slice()), REAL_TOLERANCE, || {
            (case, graph_inputs(g, x))
        }),
        Err(e) => Outcome::failed(e.to_string(), case, graph_inputs(g, x)),
    }
}

pub fn split_suite(cfg: &VerifyConfig) -> SuiteReport {
    let mut outcomes = Vec::new();
    let mut max_degree_over_limit: f64 = 0.0;
    for (k, (g, x)) in neutrality_graphs(cfg, 1).into_iter().enumerate() {
        let baseline = graph_mv(&g, &x).expect("square graph");
        let run_g = if cfg.inject_fault && k == 0 { corrupt_first_weight(&g) } else { g.clone() };
        for limit in SPLIT_LIMITS {
            let (split, _) = split_hubs(&g, limit);
            let degree = split.max_in_degree();
            max_degree_over_limit = max_degree_over_limit.max(degree as f64 / limit as f64);
            let case = format!("graph={k} vertices={} limit={limit}", g.vertex_count());
            if degree > limit {
                let reason = format!("max in-degree {degree} after splitting exceeds limit {limit}");
                outcomes.push(Outcome::failed(reason, case.clone(), graph_inputs(&g, &x)));
            }
            for model in [ExecutionModel::VertexCentric, ExecutionModel::EdgeCentric] {
                let strategy = ExecutionStrategy { model, ..ExecutionStrategy::default() }.with_split(limit);
                outcomes.push(neutrality_check(&run_g, &x, &strategy, &baseline, format!("{case} model={model:?}")));
            }
        }
    }
    let metrics = BTreeMap::from([("max_in_degree_over_limit".to_string(), max_degree_over_limit)]);
    summarize(Suite::Split, REAL_TOLERANCE, outcomes, metrics)
}

/// Community reordering and bucketed scheduling against the baseline.
pub fn reorder_suite(cfg: &VerifyConfig) -> SuiteReport {
    let mut outcomes = Vec::new();
    for (k, (g, x)) in neutrality_graphs(cfg, 2).into_iter().enumerate() {
        let baseline = graph_mv(&g, &x).expect("square graph");
        let run_g = if cfg.inject_fault && k == 0 { corrupt_first_weight(&g) } else { g.clone() };
        let (_, reordering) = community_reorder(&g);
        let ids: Vec<usize> = (0..g.vertex_count()).collect();
        if reordering.restore(&reordering.permute(&ids)) != ids {
            outcomes.push(Outcome::failed("reordering is not a bijection".into(), format!("graph={k}"), graph_inputs(&g, &x)));
        }
        let mut strategies = vec![("reorder".to_string(), ExecutionStrategy::default().with_reorder())];
        strategies.extend(BUCKET_SIZES.map(|b| (format!("bucket={b}"), ExecutionStrategy::default().with_buckets(b))));
        strategies.push(("reorder+split+bucket".into(), ExecutionStrategy::edge_centric().with_reorder().with_split(10).with_buckets(7)));
        for (name, strategy) in strategies {
            let case = format!("graph={k} vertices={} {name}", g.vertex_count());
            outcomes.push(neutrality_check(&run_g, &x, &strategy, &baseline, case));
        }
    }
    summarize(Suite::Reorder, REAL_TOLERANCE, outcomes, BTreeMap::new())
}

fn random_batch<T: Scalar>(r: &mut impl rand::Rng) -> MessageBatch<T> {
    let len = r.random_range(0..200usize);
    let max_gap: u64 = [1, 4, 300, 1 << 20, 1 << 40][r.random_range(0..5)];
    let mut id: u64 = r.random_range(0..1u64 << 32);
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        entries.push((id, random_scalar::<T>(r)));
        id += r.random_range(1..=max_gap);
    }
    MessageBatch::new(r.random(), r.random(), r.random(), entries).expect("ascending ids")
}

fn codec_round_trip<T: Scalar>(b: &MessageBatch<T>, mode: Encoding, corrupt: bool) -> Result<(), String> {
    let mut bytes = encode_batch(b, mode);
    if corrupt {
        let last = bytes.len() - 1;
        bytes[last] ^= 0x40;
    }
    match decode_batch::<T>(&bytes) {
        Ok(d) if d == *b => Ok(()),
        Ok(_) => Err("decoded batch differs from the original".into()),
        Err(e) => Err(format!("decode failed: {e}")),
    }
}

pub fn codec_suite(cfg: &VerifyConfig) -> SuiteReport {
    let mut outcomes = Vec::new();
    let mut r = rng(case_seed(cfg.seed, &[3]));
    for k in 0..cfg.batches {
        let complex = k % 4 == 3;
        for mode in [Encoding::Raw, Encoding::Delta] {
            let corrupt = cfg.inject_fault && k == 0 && mode == Encoding::Raw;
            let (result, hex) = if complex {
                let b = random_batch::<Complex64>(&mut r);
                let b = if b.is_empty() { MessageBatch::new(0, 1, 0, vec![(0, Complex64::new(1.0, 1.0))]).unwrap() } else { b };
                (codec_round_trip(&b, mode, corrupt), hex_of(&encode_batch(&b, mode)))
            } else {
                let b = random_batch::<f64>(&mut r);
                let b = if b.is_empty() { MessageBatch::new(0, 1, 0, vec![(0, 1.0)]).unwrap() } else { b };
                (codec_round_trip(&b, mode, corrupt), hex_of(&encode_batch(&b, mode)))
            };
            outcomes.push(match result {
                Ok(()) => Outcome { error: 0.0, tolerance: 0.0, skipped: false, failure: None },
                Err(reason) => Outcome::failed(
                    reason,
                    format!("batch={k} mode={mode:?} complex={complex}"),
                    BTreeMap::from([("batch.hex".to_string(), hex)]),
                ),
            });
        }
    }

    // 64 consecutive destination ids
    let entries: Vec<(u64, f64)> = (0..64u64).map(|i| (1000 + i, random_scalar(&mut r))).collect();
    let b = MessageBatch::new(0, 1, 0, entries).expect("ascending ids");
    let (raw, delta) = (encode_batch(&b, Encoding::Raw), encode_batch(&b, Encoding::Delta));
    let id_ratio = id_section_bytes(&b, Encoding::Delta) as f64 / id_section_bytes(&b, Encoding::Raw) as f64;
    let total_ratio = delta.len() as f64 / raw.len() as f64;
    if id_ratio > 0.5 {
        outcomes.push(Outcome::failed(
            format!("delta id bytes are {id_ratio:.3} of raw, above 0.5"),
            "consecutive-ids".into(),
            BTreeMap::from([("batch.hex".to_string(), hex_of(&raw))]),
        ));
    }
    let metrics = BTreeMap::from([
        ("consecutive_id_bytes_ratio".to_string(), id_ratio),
        ("consecutive_total_bytes_ratio".to_string(), total_ratio),
    ]);
    summarize(Suite::Codec, 0.0, outcomes, metrics)
}

fn hex_of(bytes: &[u8]) -> String {
    let mut s: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    s.push('\n');
    s
}

fn routine_inputs(named: &[(&str, &Graph<f64>)], vectors: &[(&str, &DenseVector<f64>)]) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    for (name, g) in named {
        files.insert(format!("{name}.mtx"), write_matrix_market(&graph_to_origin_matrix(g)));
    }
    for (name, v) in vectors {
        files.insert(format!("{name}.txt"), write_vector(v.as_slice()));
    }
    files
}

pub const ROUTINE_SIZES: [usize; 5] = [1, 8, 33, 64, 128];

pub fn routines_suite(cfg: &VerifyConfig) -> SuiteReport {
    let mut outcomes = Vec::new();
    let mut chain_max: f64 = 0.0;
    for n in ROUTINE_SIZES {
        for s in 0..cfg.grid_seeds {
            let seed = case_seed(cfg.seed, &[4, n as u64, s as u64]);
            let mut r = rng(seed);
            let corrupt = cfg.inject_fault && n == ROUTINE_SIZES[0] && s == 0;
            let fix = |g: Graph<f64>| if corrupt { corrupt_first_weight(&g) } else { g };
            let case = |name: &str| format!("routine={name} n={n} seed_index={s} case_seed={seed}");

            let k_coo = stiffness_matrix(n, seed);
            let k = fix(matrix_to_graph(&k_coo));
            let u = random_vector::<f64>(n, &mut r);
            let f0 = random_vector::<f64>(n, &mut r);
            let ku = oracle_mv(&k_coo, &u).expect("square");
            let expected: Vec<f64> = ku.as_slice().iter().zip(f0.as_slice()).map(|(a, b)| a + b).collect();
            let inputs = || routine_inputs(&[("K", &k)], &[("u", &u), ("f0", &f0)]);
            outcomes.push(match mantle_force(&k, &u, Some(&f0)) {
                Ok(f) => Outcome::checked(relative_error(f.as_slice(), &expected), REAL_TOLERANCE, || (case("mantle_force"), inputs())),
                Err(e) => Outcome::failed(e.to_string(), case("mantle_force"), inputs()),
            });

            let t_coo = coupling_matrix(n, seed);
            let t = fix(matrix_to_graph(&t_coo));
            let p = random_vector::<f64>(n, &mut r);
            let expected = oracle_mv(&t_coo, &p).expect("square");
            let inputs = || routine_inputs(&[("T", &t)], &[("p", &p)]);
            outcomes.push(match heat_capacity(&t, &p) {
                Ok(h) => Outcome::checked(relative_error(h.as_slice(), expected.as_slice()), REAL_TOLERANCE, || {
                    (case("heat_capacity"), inputs())
                }),
                Err(e) => Outcome::failed(e.to_string(), case("heat_capacity"), inputs()),
            });

            let coos: Vec<CooMatrix<f64>> = (0..3).map(|l| chain_matrix(n, seed.wrapping_add(l))).collect();
            let graphs: Vec<Graph<f64>> = coos.iter().map(matrix_to_graph).map(&fix).collect();
            let refs: Vec<&Graph<f64>> = graphs.iter().collect();
            let v = random_vector::<f64>(n, &mut r);
            let mut expected = v.clone();
            for c in coos.iter().rev() {
                expected = oracle_mv(c, &expected).expect("square");
            }
            let named: Vec<(String, &Graph<f64>)> = graphs.iter().enumerate().map(|(l, g)| (format!("A{}", l + 1), g)).collect();
            let inputs = || {
                let named: Vec<(&str, &Graph<f64>)> = named.iter().map(|(s, g)| (s.as_str(), *g)).collect();
                routine_inputs(&named, &[("v", &v)])
            };
            let outcome = match (potential_energy_chain(&refs, &v), potential_energy_chain_composed(&refs, &v)) {
                (Ok(seq), Ok(comp)) => {
                    let paths = relative_error(comp.as_slice(), seq.as_slice());
                    chain_max = chain_max.max(paths);
                    let err = relative_error(seq.as_slice(), expected.as_slice()).max(paths);
                    Outcome::checked(err, CHAIN_TOLERANCE, || (case("potential_energy"), inputs()))
                }
                (Err(e), _) | (_, Err(e)) => Outcome::failed(e.to_string(), case("potential_energy"), inputs()),
            };
            outcomes.push(outcome);
        }
    }

    // five random 8x8 chains of length 3: sequential against composed
    for s in 0..5u64 {
        let mut r = rng(case_seed(cfg.seed, &[5, s]));
        let graphs: Vec<Graph<f64>> = (0..3).map(|_| matrix_to_graph(&random_coo::<f64>(TestKind::Dense, 8, &mut r))).collect();
        let refs: Vec<&Graph<f64>> = graphs.iter().collect();
        let v = random_vector::<f64>(8, &mut r);
        let seq = potential_energy_chain(&refs, &v).expect("compatible chain");
        let comp = potential_energy_chain_composed(&refs, &v).expect("compatible chain");
        let err = relative_error(comp.as_slice(), seq.as_slice());
        chain_max = chain_max.max(err);
        outcomes.push(Outcome::checked(err, CHAIN_TOLERANCE, || {
            let named = [("A1", &graphs[0]), ("A2", &graphs[1]), ("A3", &graphs[2])];
            (format!("chain-agreement seed_index={s}"), routine_inputs(&named, &[("v", &v)]))
        }));
    }
    let metrics = BTreeMap::from([("chain_paths_max_error".to_string(), chain_max)]);
    summarize(Suite::Routines, CHAIN_TOLERANCE, outcomes, metrics)
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    match suite {
        Suite::OracleGrid => oracle_grid_suite(cfg),
        Suite::Split => split_suite(cfg),
        Suite::Reorder => reorder_suite(cfg),
        Suite::Distsim => distsim_suite(cfg),
        Suite::Codec => codec_suite(cfg),
        Suite::Routines => routines_suite(cfg),
    }
}

pub fn run_verify(suites: &[Suite], cfg: &VerifyConfig) -> VerifyReport {
    let suites: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, cfg)).collect();
    VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        seed: cfg.seed,
        inject_fault: cfg.inject_fault,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

/// Writes the counterexample inputs of every failed suite under `dir` as
/// `<suite>/<file>` and returns the paths written.
pub fn dump_counterexamples(report: &VerifyReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for s in &report.suites {
        let Some(c) = &s.counterexample else { continue };
        let sub = dir.join(s.suite.name());
        std::fs::create_dir_all(&sub)?;
        let case = serde_json::to_string_pretty(c).expect("counterexample serializes");
        std::fs::write(sub.join("case.json"), case + "\n")?;
        written.push(sub.join("case.json"));
        for (name, content) in &c.inputs {
            std::fs::write(sub.join(name), content)?;
            written.push(sub.join(name));
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { grid_seeds: 1, dist_seeds: 1, graphs: 3, batches: 20, ..VerifyConfig::default() }
    }

    #[test]
    fn suites_pass_on_small_config() {
        let report = run_verify(&Suite::ALL, &small());
        for s in &report.suites {
            assert!(s.passed, "{}: {:?}", s.suite, s.counterexample);
            assert!(s.cases > 0);
        }
        assert!(report.passed);
    }

    #[test]
    fn fault_is_caught_everywhere() {
        let cfg = VerifyConfig { inject_fault: true, ..small() };
        let report = run_verify(&Suite::ALL, &cfg);
        assert!(!report.passed);
        for s in &report.suites {
            assert!(!s.passed, "{} missed the fault", s.suite);
            assert!(!s.counterexample.as_ref().unwrap().inputs.is_empty());
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_verify(&[Suite::Codec, Suite::Split], &small()).to_json();
        let b = run_verify(&[Suite::Codec, Suite::Split], &small()).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn suite_selector() {
        assert_eq!(Suite::select("all").unwrap().len(), 6);
        assert_eq!(Suite::select("oracle-grid").unwrap(), vec![Suite::OracleGrid]);
        assert!(Suite::select("nope").is_err());
    }

    #[test]
    fn dump_writes_inputs() {
        let cfg = VerifyConfig { inject_fault: true, ..small() };
        let report = run_verify(&[Suite::OracleGrid], &cfg);
        let dir = std::env::temp_dir().join(format!("g4s-dump-{}", std::process::id()));
        let written = dump_counterexamples(&report, &dir).unwrap();
        assert!(written.iter().any(|p| p.ends_with("A.mtx")));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
