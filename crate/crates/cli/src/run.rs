//! `g4s run`: one operation end to end.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};

use g4s::distsim::{dist_add, dist_compose, dist_mm, dist_mv, dist_rank1, CommMetrics, Policies};
use g4s::engine::{
    compose_graphs, graph_add_with, graph_mm_with, graph_mv_with, graph_rank1_update, ExecutionStrategy,
};
use g4s::m2g::{graph_to_origin_matrix, Graph, GraphCache};
use g4s::matrix::{oracle_add, oracle_mm, oracle_mm_dense, oracle_mv, oracle_rank1, CooMatrix, DenseMatrix, DenseVector};
use g4s::strategy::{features_of, select_strategy, static_strategy, DecisionTree, OpKind};
use g4s::verify::{COMPLEX_TOLERANCE, REAL_TOLERANCE};
use g4s::{relative_error, Complex64, Scalar, ScalarKind};

use crate::error::{CliError, CliResult};
use crate::io::{self, CliScalar};
use crate::{Report, REPORT_SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    #[value(alias = "vertex-centric")]
    Vc,
    #[value(alias = "edge-centric")]
    Ec,
}

/// Explicit strategy flags; any of them overrides `--tree`.
#[derive(Debug, Clone, Default, Args)]
pub struct StrategyFlags {
    /// Execution model.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Apply community reordering before execution.
    #[arg(long)]
    pub reorder: bool,
    /// Split hubs whose in-degree exceeds this limit.
    #[arg(long, value_name = "LIMIT")]
    pub split: Option<usize>,
    /// Process destinations in buckets of this size.
    #[arg(long, value_name = "SIZE")]
    pub buckets: Option<usize>,
    /// Decision tree JSON used when no explicit flag is given.
    #[arg(long, value_name = "PATH")]
    pub tree: Option<PathBuf>,
    /// Platform string fed to the tree.
    #[arg(long, default_value = "cpu")]
    pub platform: String,
}

impl StrategyFlags {
    fn explicit(&self) -> Option<ExecutionStrategy> {
        if self.model.is_none() && !self.reorder && self.split.is_none() && self.buckets.is_none() {
            return None;
        }
        let mut s = match self.model {
            Some(Model::Ec) => ExecutionStrategy::edge_centric(),
            _ => ExecutionStrategy::vertex_centric(),
        };
        if self.reorder {
            s = s.with_reorder();
        }
        if let Some(limit) = self.split {
            s = s.with_split(limit);
        }
        if let Some(size) = self.buckets {
            s = s.with_buckets(size);
        }
        Some(s)
    }

    /// Resolves the strategy by precedence: flags, then tree, then the
    /// built-in fallback. Returns the strategy and its source label.
    pub fn resolve<T: Scalar>(&self, op: OpKind, a: &CooMatrix<T>) -> CliResult<(ExecutionStrategy, &'static str)> {
        let (strategy, source) = if let Some(s) = self.explicit() {
            if self.tree.is_some() {
                eprintln!("g4s: explicit strategy flags given; ignoring --tree");
            }
            (s, "flags")
        } else if let Some(path) = &self.tree {
            let tree = DecisionTree::from_json(&io::read_text(path)?)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            (select_strategy(&tree, &features_of(op, a, &self.platform)), "tree")
        } else {
            (static_strategy(&features_of(op, a, &self.platform)), "fallback")
        };
        strategy.validate().map_err(CliError::invalid)?;
        Ok((strategy, source))
    }
}

/// Communication policy flags for sharded runs.
#[derive(Debug, Clone, Default, Args)]
pub struct PolicyFlags {
    /// Number of simulated shards; 1 runs the plain engine.
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    /// Ship every message on its own instead of merging per destination.
    #[arg(long)]
    pub no_merge: bool,
    /// Mirror hub states on every shard.
    #[arg(long)]
    pub replicate: bool,
    /// Delta-encode destination ids.
    #[arg(long)]
    pub delta: bool,
    /// Allow load-driven boundary migration between supersteps.
    #[arg(long)]
    pub migrate: bool,
}

impl PolicyFlags {
    pub fn policies(&self, strategy: &ExecutionStrategy) -> Policies {
        let mut p = Policies::from_comm(&strategy.comm);
        p.merge = !self.no_merge;
        p.replicate_hubs |= self.replicate;
        p.delta_encode |= self.delta;
        p.migrate |= self.migrate;
        p
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Operation: mv, add, mm, compose or rank1.
    #[arg(long)]
    pub op: OpKind,
    /// Left (graph) operand.
    #[arg(long)]
    pub a: PathBuf,
    /// Second matrix: added for add, dense right side for mm, right factor for compose.
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Input vector for mv.
    #[arg(long)]
    pub x: Option<PathBuf>,
    /// Left vector for rank1.
    #[arg(long)]
    pub u: Option<PathBuf>,
    /// Right vector for rank1.
    #[arg(long)]
    pub w: Option<PathBuf>,
    /// Result file; omitted, the result is inlined in the report.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Compare the result with the dense oracle; exit 3 beyond tolerance.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub strategy: StrategyFlags,
    #[command(flatten)]
    pub policy: PolicyFlags,
}

struct Inputs {
    a: g4s::matrix::MatrixData,
    b: Option<g4s::matrix::MatrixData>,
    x: Option<g4s::matrix::VectorData>,
    u: Option<g4s::matrix::VectorData>,
    w: Option<g4s::matrix::VectorData>,
}

fn require<T>(v: Option<T>, flag: &str, op: OpKind) -> CliResult<T> {
    v.ok_or_else(|| CliError::invalid(format!("--op {op} needs --{flag}")))
}

enum Output<T> {
    Vector(DenseVector<T>),
    Dense(DenseMatrix<T>),
    Sparse(Graph<T>),
}

pub fn cmd_run(args: &RunArgs, seed: u64, workers: usize) -> CliResult<Report> {
    let start = Instant::now();
    let inputs = Inputs {
        a: io::load_matrix(&args.a)?,
        b: args.b.as_deref().map(io::load_matrix).transpose()?,
        x: args.x.as_deref().map(io::load_vector).transpose()?,
        u: args.u.as_deref().map(io::load_vector).transpose()?,
        w: args.w.as_deref().map(io::load_vector).transpose()?,
    };
    let complex = io::is_complex_matrix(&inputs.a)
        || inputs.b.as_ref().is_some_and(io::is_complex_matrix)
        || [&inputs.x, &inputs.u, &inputs.w].iter().any(|v| v.as_ref().is_some_and(io::is_complex_vector));
    let mut report = if complex { execute::<Complex64>(args, inputs)? } else { execute::<f64>(args, inputs)? };
    report.insert("seed".into(), json!(seed));
    report.insert("workers".into(), json!(workers));
    report.insert("wall_time_seconds".into(), json!(start.elapsed().as_secs_f64()));
    let failure = match (report.get("max_rel_error_vs_oracle"), report.get("verified")) {
        (Some(err), Some(Value::Bool(false))) => Some(format!("result differs from the oracle by {err}")),
        _ => None,
    };
    Ok(Report { value: Value::Object(report), failure })
}

fn shape_of<T: Scalar>(m: &CooMatrix<T>) -> Value {
    json!([m.rows(), m.cols()])
}

fn execute<T: CliScalar>(args: &RunArgs, inputs: Inputs) -> CliResult<Map<String, Value>> {
    let op = args.op;
    let a = T::matrix(inputs.a);
    let b = inputs.b.map(T::matrix);
    let x = inputs.x.map(T::vector);
    let u = inputs.u.map(T::vector);
    let w = inputs.w.map(T::vector);

    let mut shapes = Map::new();
    shapes.insert("a".into(), shape_of(&a));
    if let Some(b) = &b {
        shapes.insert("b".into(), shape_of(b));
    }
    for (name, v) in [("x", &x), ("u", &u), ("w", &w)] {
        if let Some(v) = v {
            shapes.insert(name.into(), json!([v.len()]));
        }
    }

    let (strategy, source) = args.strategy.resolve(op, &a)?;
    let p = args.policy.shards;
    let policies = args.policy.policies(&strategy);
    let cache = GraphCache::<T>::with_capacity(4);
    let ga = cache.get_or_transform(&a);

    let mut metrics: Option<CommMetrics> = None;
    let mut record = |m: CommMetrics| metrics = Some(m);
    let (output, expected): (Output<T>, Option<Vec<T>>) = match op {
        OpKind::Mv => {
            let x = require(x, "x", op)?;
            if x.len() != a.cols() {
                return Err(CliError::invalid(format!("x has length {} but A has {} columns", x.len(), a.cols())));
            }
            let y = if p > 1 {
                let (y, m) = dist_mv(&ga, &x, p, &policies)?;
                record(m);
                y
            } else {
                graph_mv_with(&ga, &x, &strategy)?
            };
            let expected = args.verify.then(|| oracle_mv(&a, &x).map(|v| v.into_vec())).transpose().map_err(CliError::invalid)?;
            (Output::Vector(y), expected)
        }
        OpKind::Mm => {
            let c = require(b, "b", op)?.to_dense();
            if c.rows() != a.cols() {
                return Err(CliError::invalid(format!("B has {} rows but A has {} columns", c.rows(), a.cols())));
            }
            let out = if p > 1 {
                let (out, m) = dist_mm(&ga, &c, p, &policies)?;
                record(m);
                out
            } else {
                graph_mm_with(&ga, &c, &strategy)?
            };
            let expected =
                args.verify.then(|| oracle_mm(&a, &c).map(|m| m.values().to_vec())).transpose().map_err(CliError::invalid)?;
            (Output::Dense(out), expected)
        }
        OpKind::Add => {
            let b = require(b, "b", op)?;
            if b.shape() != a.shape() {
                return Err(CliError::invalid(format!("A is {:?} but B is {:?}", a.shape(), b.shape())));
            }
            let gb = cache.get_or_transform(&b);
            let sum = if p > 1 {
                let (s, m) = dist_add(&ga, &gb, p, &policies)?;
                record(m);
                s
            } else {
                graph_add_with(&ga, &gb, &strategy)?
            };
            let expected =
                args.verify.then(|| oracle_add(&a, &b).map(|m| m.values().to_vec())).transpose().map_err(CliError::invalid)?;
            (Output::Sparse(sum), expected)
        }
        OpKind::Compose => {
            let b = require(b, "b", op)?;
            if b.rows() != a.cols() {
                return Err(CliError::invalid(format!("B has {} rows but A has {} columns", b.rows(), a.cols())));
            }
            let gb = cache.get_or_transform(&b);
            let c = if p > 1 {
                let (c, m) = dist_compose(&ga, &gb, p, &policies)?;
                record(m);
                c
            } else {
                compose_graphs(&ga, &gb)?
            };
            let expected = args
                .verify
                .then(|| oracle_mm_dense(&a.to_dense(), &b.to_dense()).map(|m| m.values().to_vec()))
                .transpose()
                .map_err(CliError::invalid)?;
            (Output::Sparse(c), expected)
        }
        OpKind::Rank1 => {
            let (u, w) = (require(u, "u", op)?, require(w, "w", op)?);
            if a.rows() != a.cols() || u.len() != a.rows() || w.len() != a.rows() {
                return Err(CliError::invalid(format!(
                    "rank1 needs a square A and vectors of its size; A is {:?}, u has {}, w has {}",
                    a.shape(),
                    u.len(),
                    w.len()
                )));
            }
            let out = if p > 1 {
                let (out, m) = dist_rank1(&ga, &u, &w, p, &policies)?;
                record(m);
                out
            } else {
                graph_rank1_update(&ga, &u, &w)?
            };
            let expected = args
                .verify
                .then(|| oracle_rank1(&a, &u, &w).map(|m| m.values().to_vec()))
                .transpose()
                .map_err(CliError::invalid)?;
            (Output::Sparse(out), expected)
        }
    };

    let mut report = Map::new();
    report.insert("schema_version".into(), json!(REPORT_SCHEMA_VERSION));
    report.insert("command".into(), json!("run"));
    report.insert("op".into(), json!(op.name()));
    report.insert("scalar".into(), json!(if T::KIND == ScalarKind::Complex64x2 { "complex" } else { "real" }));
    report.insert("shapes".into(), Value::Object(shapes));
    report.insert("strategy_used".into(), serde_json::to_value(strategy)?);
    report.insert("strategy_source".into(), json!(source));
    report.insert("shards".into(), json!(p));
    if p > 1 {
        report.insert("policies".into(), serde_json::to_value(policies)?);
    }
    let stats = cache.stats();
    report.insert("cache".into(), json!({"hits": stats.hits, "misses": stats.misses}));

    let (text, inline) = match &output {
        Output::Vector(y) => (io::vector_text(y.as_slice()), io::vector_json(y.as_slice())),
        Output::Dense(m) => (io::dense_to_mtx(m)?, io::dense_json(m)),
        Output::Sparse(g) => (io::graph_to_mtx(g), io::graph_entries_json(g)),
    };
    match &args.output {
        Some(path) => {
            io::write_file(path, text)?;
            report.insert("result_path".into(), json!(path.display().to_string()));
        }
        None => {
            report.insert("result".into(), inline);
        }
    }
    report.insert("comm_metrics".into(), metrics.map(serde_json::to_value).transpose()?.unwrap_or(Value::Null));

    if let Some(expected) = expected {
        let actual: Vec<T> = match &output {
            Output::Vector(y) => y.as_slice().to_vec(),
            Output::Dense(m) => m.values().to_vec(),
            Output::Sparse(g) => graph_to_origin_matrix(g).to_dense().values().to_vec(),
        };
        let err = relative_error(&actual, &expected);
        let tol = if T::KIND == ScalarKind::Complex64x2 { COMPLEX_TOLERANCE } else { REAL_TOLERANCE };
        report.insert("max_rel_error_vs_oracle".into(), json!(err));
        report.insert("tolerance".into(), json!(tol));
        report.insert("verified".into(), json!(err <= tol));
    }
    Ok(report)
}
