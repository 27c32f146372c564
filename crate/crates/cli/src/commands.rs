//! Every command except `run`.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use g4s::bench::{run_bench, BenchGrid, SampleSet, SAMPLES_SCHEMA_VERSION};
use g4s::m2g::{matrix_data_to_graph, CacheKey, MAGIC};
use g4s::matrix::{oracle_mv, write_matrix_data, write_vector_data, CooMatrix, DenseVector, MatrixData, VectorData};
use g4s::routines::{
    chain_matrix, coupling_matrix, heat_capacity_with, mantle_force_with, potential_energy_chain_composed,
    potential_energy_chain_with, stiffness_matrix, Generator,
};
use g4s::strategy::{cross_validate, train_tree, OpKind, TreeParams};
use g4s::testgen::{case_seed, random_matrix, random_vector, rng, TestKind};
use g4s::verify::{dump_counterexamples, run_verify, Suite, VerifyConfig, CHAIN_TOLERANCE, COMPLEX_TOLERANCE, REAL_TOLERANCE};
use g4s::{relative_error, Complex64, ScalarKind};

use crate::error::{CliError, CliResult};
use crate::io::{self, CliScalar};
use crate::run::StrategyFlags;
use crate::{Report, REPORT_SCHEMA_VERSION};

// transform

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Matrix Market, dense text grid, or `.g4s` file.
    pub input: PathBuf,
    /// Destination; `.g4s` input is written back as Matrix Market.
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn cmd_transform(args: &TransformArgs) -> CliResult<Report> {
    let start = Instant::now();
    let from_graph = std::fs::read(&args.input).map(|b| b.starts_with(MAGIC)).unwrap_or(false);
    let m = io::load_matrix(&args.input)?;
    let g = matrix_data_to_graph(&m);
    let key = match &m {
        MatrixData::Real(m) => CacheKey::of(m),
        MatrixData::Complex(m) => CacheKey::of(m),
    };
    let direction = if from_graph {
        io::write_file(&args.output, write_matrix_data(&m))?;
        "graph-to-matrix"
    } else {
        io::write_file(&args.output, g.to_bytes())?;
        "matrix-to-graph"
    };
    let d = m.descriptor();
    Ok(Report::ok(json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "transform",
        "direction": direction,
        "input": args.input.display().to_string(),
        "output": args.output.display().to_string(),
        "shape": [d.rows, d.cols],
        "kind": format!("{:?}", d.kind),
        "scalar": scalar_name(d.scalar),
        "stored_entries": m.nnz(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "cache_key": format!("{key:?}"),
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    })))
}

fn scalar_name(s: ScalarKind) -> &'static str {
    match s {
        ScalarKind::Real64 => "real",
        ScalarKind::Complex64x2 => "complex",
    }
}

// bench

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Full grid as JSON; individual flags below override its fields.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub ops: Option<Vec<OpKind>>,
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<TestKind>>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Matrices per grid cell.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub size_cap: Option<usize>,
    /// Samples JSON destination; omitted, samples are inlined.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_bench(args: &BenchArgs, seed: u64, workers: usize) -> CliResult<Report> {
    let start = Instant::now();
    let mut grid = match &args.grid {
        Some(path) => serde_json::from_str(&io::read_text(path)?)
            .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?,
        None => BenchGrid::default(),
    };
    if let Some(v) = &args.ops {
        grid.ops = v.clone();
    }
    if let Some(v) = &args.kinds {
        grid.kinds = v.clone();
    }
    if let Some(v) = &args.sizes {
        grid.sizes = v.clone();
    }
    if let Some(v) = args.seeds {
        grid.seeds = v;
    }
    if let Some(v) = args.repetitions {
        grid.repetitions = v;
    }
    if let Some(v) = args.size_cap {
        grid.size_cap = v;
    }
    grid.workers = workers;
    let samples = run_bench(&grid, seed).map_err(CliError::invalid)?;
    let set = SampleSet { schema_version: SAMPLES_SCHEMA_VERSION, seed, grid, samples };
    let mut report = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "bench",
        "cells": set.grid.cell_count(),
        "candidates": set.grid.candidates.len(),
        "samples": set.samples.len(),
        "seed": seed,
    });
    match &args.output {
        Some(path) => {
            io::write_file(path, serde_json::to_string_pretty(&set)?)?;
            report["output"] = json!(path.display().to_string());
        }
        None => report["sample_set"] = serde_json::to_value(&set)?,
    }
    report["wall_time_seconds"] = json!(start.elapsed().as_secs_f64());
    Ok(Report::ok(report))
}

// train

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Samples JSON written by `g4s bench`.
    #[arg(long)]
    pub samples: PathBuf,
    /// Tree JSON destination; omitted, the tree is inlined.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = TreeParams::default().max_depth)]
    pub max_depth: usize,
    #[arg(long, default_value_t = TreeParams::default().min_leaf)]
    pub min_leaf: usize,
    /// Folds for held-out evaluation; 0 skips it.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Allowed slowdown over the per-case best for a held-out hit.
    #[arg(long, default_value_t = 1.25)]
    pub tolerance: f64,
}

pub fn cmd_train(args: &TrainArgs, seed: u64) -> CliResult<Report> {
    let start = Instant::now();
    let text = io::read_text(&args.samples)?;
    let set: SampleSet =
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", args.samples.display())))?;
    if set.schema_version != SAMPLES_SCHEMA_VERSION {
        return Err(CliError::invalid(format!(
            "{}: samples schema {} is not supported (expected {SAMPLES_SCHEMA_VERSION})",
            args.samples.display(),
            set.schema_version
        )));
    }
    let params = TreeParams { max_depth: args.max_depth, min_leaf: args.min_leaf };
    let tree = train_tree(&set.samples, &params).map_err(CliError::invalid)?;
    let cv = if args.folds > 0 {
        Some(cross_validate(&set.samples, args.folds, &params, args.tolerance).map_err(CliError::invalid)?)
    } else {
        None
    };
    let mut report = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "train",
        "samples": set.samples.len(),
        "depth": tree.depth(),
        "nodes": tree.nodes.len(),
        "cross_validation": cv.as_ref().map(|cv| json!({
            "folds": args.folds,
            "cases": cv.cases,
            "within_tolerance": cv.within_tolerance,
            "tolerance": cv.tolerance,
            "fraction": cv.fraction(),
        })),
        "seed": seed,
    });
    match &args.output {
        Some(path) => {
            io::write_file(path, tree.to_json())?;
            report["output"] = json!(path.display().to_string());
        }
        None => report["tree"] = serde_json::from_str(&tree.to_json())?,
    }
    report["wall_time_seconds"] = json!(start.elapsed().as_secs_f64());
    Ok(Report::ok(report))
}

// verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Corrupt one fixture weight per suite to prove failures are caught.
    #[arg(long)]
    pub inject_fault: bool,
    /// Where counterexample inputs are written on failure.
    #[arg(long, default_value = "g4s-counterexamples")]
    pub dump_dir: PathBuf,
    /// Seeds per oracle-grid cell.
    #[arg(long, default_value_t = VerifyConfig::default().grid_seeds)]
    pub grid_seeds: usize,
    /// Seeds per distribution-grid cell.
    #[arg(long, default_value_t = VerifyConfig::default().dist_seeds)]
    pub dist_seeds: usize,
    /// Random graphs for the split and reorder suites.
    #[arg(long, default_value_t = VerifyConfig::default().graphs)]
    pub graphs: usize,
    /// Random batches for the codec suite.
    #[arg(long, default_value_t = VerifyConfig::default().batches)]
    pub batches: usize,
}

pub fn cmd_verify(args: &VerifyArgs, seed: u64) -> CliResult<Report> {
    let suites = Suite::select(&args.suite).map_err(CliError::Invalid)?;
    let cfg = VerifyConfig {
        seed,
        grid_seeds: args.grid_seeds,
        dist_seeds: args.dist_seeds,
        graphs: args.graphs,
        batches: args.batches,
        inject_fault: args.inject_fault,
    };
    let report = run_verify(&suites, &cfg);
    for s in &report.suites {
        eprintln!(
            "g4s verify: {:<12} {} ({} cases, max error {:.3e})",
            s.suite.name(),
            if s.passed { "pass" } else { "FAIL" },
            s.cases,
            s.max_error
        );
    }
    let failure = if report.passed {
        None
    } else {
        let files = dump_counterexamples(&report, &args.dump_dir)
            .map_err(|e| CliError::Internal(format!("cannot dump counterexamples: {e}")))?;
        for f in &files {
            eprintln!("g4s verify: wrote {}", f.display());
        }
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.suite.name()).collect();
        Some(format!("failing suites: {}", failed.join(", ")))
    };
    let value: Value = serde_json::from_str(&report.to_json())?;
    Ok(Report { value, failure })
}

// routine

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoutineKind {
    MantleForce,
    PotentialEnergy,
    HeatCapacity,
}

#[derive(Debug, Args)]
pub struct RoutineArgs {
    #[arg(value_enum)]
    pub routine: RoutineKind,
    /// Operator matrices; several form a potential-energy chain, applied
    /// right to left. Omitted, a synthetic operator of size `--n` is used.
    #[arg(long = "a")]
    pub matrices: Vec<PathBuf>,
    /// Input vector: displacements, chain input or temperatures.
    #[arg(long)]
    pub x: Option<PathBuf>,
    /// Initial forces for mantle-force.
    #[arg(long)]
    pub f0: Option<PathBuf>,
    /// Size of generated inputs.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Links in a generated chain.
    #[arg(long, default_value_t = 3)]
    pub links: usize,
    /// Use the composed operator instead of sequential products.
    #[arg(long)]
    pub composed: bool,
    /// Compare with the oracle formulation; exit 3 beyond tolerance.
    #[arg(long)]
    pub verify: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub strategy: StrategyFlags,
}

pub fn cmd_routine(args: &RoutineArgs, seed: u64, workers: usize) -> CliResult<Report> {
    let start = Instant::now();
    let mut matrices: Vec<MatrixData> = args.matrices.iter().map(|p| io::load_matrix(p)).collect::<CliResult<_>>()?;
    if matrices.is_empty() {
        if args.n == 0 {
            return Err(CliError::invalid("--n must be positive"));
        }
        let count = if args.routine == RoutineKind::PotentialEnergy { args.links.max(1) } else { 1 };
        for k in 0..count {
            let s = case_seed(seed, &[k as u64]);
            matrices.push(MatrixData::Real(match args.routine {
                RoutineKind::MantleForce => stiffness_matrix(args.n, s),
                RoutineKind::PotentialEnergy => chain_matrix(args.n, s),
                RoutineKind::HeatCapacity => coupling_matrix(args.n, s),
            }));
        }
    } else if matrices.len() > 1 && args.routine != RoutineKind::PotentialEnergy {
        return Err(CliError::invalid("only potential-energy takes more than one --a"));
    }
    let x = args.x.as_deref().map(io::load_vector).transpose()?;
    let f0 = args.f0.as_deref().map(io::load_vector).transpose()?;
    let complex = matrices.iter().any(io::is_complex_matrix)
        || x.as_ref().is_some_and(io::is_complex_vector)
        || f0.as_ref().is_some_and(io::is_complex_vector);
    let mut report = if complex {
        routine_typed::<Complex64>(args, matrices, x, f0, seed)?
    } else {
        routine_typed::<f64>(args, matrices, x, f0, seed)?
    };
    report["seed"] = json!(seed);
    report["workers"] = json!(workers);
    report["wall_time_seconds"] = json!(start.elapsed().as_secs_f64());
    let failure = (report.get("verified") == Some(&Value::Bool(false)))
        .then(|| format!("routine differs from its oracle by {}", report["max_rel_error_vs_oracle"]));
    Ok(Report { value: report, failure })
}

fn routine_typed<T: CliScalar>(
    args: &RoutineArgs,
    matrices: Vec<MatrixData>,
    x: Option<VectorData>,
    f0: Option<VectorData>,
    seed: u64,
) -> CliResult<Value> {
    let coos: Vec<CooMatrix<T>> = matrices.into_iter().map(T::matrix).collect();
    let last_cols = coos.last().map(|m| m.cols()).unwrap_or(0);
    let x: DenseVector<T> = match x {
        Some(v) => T::vector(v),
        None => random_vector::<T>(last_cols, &mut rng(case_seed(seed, &[u64::MAX]))),
    };
    let f0 = f0.map(T::vector);
    let op = OpKind::Mv;
    let (strategy, source) = args.strategy.resolve(op, &coos[0])?;
    let graphs: Vec<_> = coos.iter().map(g4s::m2g::matrix_to_graph).collect();
    let refs: Vec<_> = graphs.iter().collect();

    let (out, expected, tol) = match args.routine {
        RoutineKind::MantleForce => {
            let out = mantle_force_with(&graphs[0], &x, f0.as_ref(), &strategy)?;
            let mut e = oracle_mv(&coos[0], &x).map_err(CliError::invalid)?.into_vec();
            if let Some(f0) = &f0 {
                e.iter_mut().zip(f0.as_slice()).for_each(|(e, &f)| *e += f);
            }
            (out, e, REAL_TOLERANCE)
        }
        RoutineKind::PotentialEnergy => {
            let out = if args.composed {
                potential_energy_chain_composed(&refs, &x)?
            } else {
                potential_energy_chain_with(&refs, &x, &strategy)?
            };
            let mut e = x.clone();
            for m in coos.iter().rev() {
                e = oracle_mv(m, &e).map_err(CliError::invalid)?;
            }
            (out, e.into_vec(), CHAIN_TOLERANCE)
        }
        RoutineKind::HeatCapacity => {
            let out = heat_capacity_with(&graphs[0], &x, &strategy)?;
            (out, oracle_mv(&coos[0], &x).map_err(CliError::invalid)?.into_vec(), REAL_TOLERANCE)
        }
    };
    let tol = if T::KIND == ScalarKind::Complex64x2 { tol.max(COMPLEX_TOLERANCE) } else { tol };
    let mut report = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "routine",
        "routine": args.routine.to_possible_value().map(|v| v.get_name().to_string()),
        "operators": coos.iter().map(|m| json!([m.rows(), m.cols()])).collect::<Vec<_>>(),
        "generated_inputs": args.matrices.is_empty(),
        "composed": args.composed,
        "strategy_used": strategy,
        "strategy_source": source,
    });
    match &args.output {
        Some(path) => {
            io::write_file(path, io::vector_text(out.as_slice()))?;
            report["result_path"] = json!(path.display().to_string());
        }
        None => report["result"] = io::vector_json(out.as_slice()),
    }
    if args.verify {
        let err = relative_error(out.as_slice(), &expected);
        report["max_rel_error_vs_oracle"] = json!(err);
        report["tolerance"] = json!(tol);
        report["verified"] = json!(err <= tol);
    }
    Ok(report)
}

// gen

#[derive(Debug, Subcommand)]
pub enum GenTarget {
    /// Synthetic routine operator: stiffness, chain or coupling.
    Operator {
        generator: Generator,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Random matrix of a storage kind: dense, sparse, symmetric,
    /// triangular, banded, packed or hermitian.
    Matrix {
        kind: TestKind,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Random vector, real unless `--complex`.
    Vector {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        complex: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub target: GenTarget,
}

pub fn cmd_gen(args: &GenArgs, seed: u64) -> CliResult<Report> {
    let (what, text, shape, nnz, output) = match &args.target {
        GenTarget::Operator { generator, n, output } => {
            check_size(*n)?;
            let m = MatrixData::Real(generator.generate(*n, seed));
            (format!("{generator:?}").to_lowercase(), write_matrix_data(&m), vec![*n, *n], m.nnz(), output)
        }
        GenTarget::Matrix { kind, n, output } => {
            check_size(*n)?;
            let m = random_matrix(*kind, *n, seed);
            (kind.name().to_string(), write_matrix_data(&m), vec![*n, *n], m.nnz(), output)
        }
        GenTarget::Vector { n, complex, output } => {
            check_size(*n)?;
            let mut r = rng(seed);
            let v = if *complex {
                VectorData::Complex(random_vector::<Complex64>(*n, &mut r))
            } else {
                VectorData::Real(random_vector::<f64>(*n, &mut r))
            };
            ("vector".to_string(), write_vector_data(&v), vec![*n], *n, output)
        }
    };
    io::write_file(output, text)?;
    Ok(Report::ok(json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "gen",
        "generated": what,
        "shape": shape,
        "entries": nnz,
        "seed": seed,
        "output": output.display().to_string(),
    })))
}

fn check_size(n: usize) -> CliResult<()> {
    if n == 0 {
        Err(CliError::invalid("--n must be positive"))
    } else {
        Ok(())
    }
}
