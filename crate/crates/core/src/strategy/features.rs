use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{ExecutionModel, ExecutionStrategy};
use crate::matrix::{CooMatrix, MatrixDescriptor};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Mv,
    Add,
    Mm,
    Rank1,
    Compose,
}

impl OpKind {
    pub const ALL: [OpKind; 5] = [OpKind::Mv, OpKind::Add, OpKind::Mm, OpKind::Rank1, OpKind::Compose];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Mv => "mv",
            OpKind::Add => "add",
            OpKind::Mm => "mm",
            OpKind::Rank1 => "rank1",
            OpKind::Compose => "compose",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OpKind::ALL
            .into_iter()
            .find(|op| op.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown operation `{s}` (expected mv, add, mm, rank1 or compose)"))
    }
}

/// What the strategy selector sees of an operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub op: OpKind,
    pub density: f64,
    pub symmetric: bool,
    pub triangular: bool,
    pub banded: bool,
    pub packed: bool,
    pub hermitian: bool,
    pub size_log2: u32,
    pub platform: String,
}

pub const FEATURE_NAMES: [&str; 8] =
    ["op", "density", "symmetric", "triangular", "banded", "packed", "hermitian", "size_log2"];

impl FeatureVector {
    /// Numeric view used by the tree; the platform tag is not a feature.
    pub fn values(&self) -> [f64; 8] {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        [
            self.op.index() as f64,
            self.density,
            b(self.symmetric),
            b(self.triangular),
            b(self.banded),
            b(self.packed),
            b(self.hermitian),
            self.size_log2 as f64,
        ]
    }
}

/// Featurizes an operation on a matrix with `nnz` nonzeros in its
/// expanded form. Density is clamped to `[0, 1]`.
pub fn extract_features(op: OpKind, descriptor: &MatrixDescriptor, nnz: usize, platform: &str) -> FeatureVector {
    let cells = (descriptor.rows as f64) * (descriptor.cols as f64);
    let kind = descriptor.kind;
    FeatureVector {
        op,
        density: (nnz as f64 / cells).clamp(0.0, 1.0),
        symmetric: kind.is_symmetric(),
        triangular: kind.is_triangular(),
        banded: kind.is_banded(),
        packed: kind.is_packed(),
        hermitian: kind.is_hermitian(),
        size_log2: descriptor.vertex_count().ilog2(),
        platform: platform.to_string(),
    }
}

/// [`extract_features`] with the expanded nonzero count taken from `m`.
pub fn features_of<T: Scalar>(op: OpKind, m: &CooMatrix<T>, platform: &str) -> FeatureVector {
    extract_features(op, m.descriptor(), m.expand().nnz(), platform)
}

/// Density below which the fallback treats a matrix as sparse.
pub const SPARSE_DENSITY: f64 = 0.01;

/// Built-in choice used before any tree is trained: addition runs edge
/// centric, very sparse operands run edge centric with hub splitting,
/// everything else vertex centric.
pub fn static_strategy(f: &FeatureVector) -> ExecutionStrategy {
    if f.op == OpKind::Add {
        ExecutionStrategy::edge_centric()
    } else if f.density < SPARSE_DENSITY {
        ExecutionStrategy::edge_centric().with_split(crate::engine::DEFAULT_SPLIT_LIMIT)
    } else {
        ExecutionStrategy::vertex_centric()
    }
}

/// Ordering used wherever strategies tie: vertex centric first, then fewer
/// enabled flags, then the derived order.
pub(crate) fn preference_key(s: &ExecutionStrategy) -> (bool, usize, ExecutionStrategy) {
    (s.model != ExecutionModel::VertexCentric, s.enabled_flags(), *s)
}

/// The four strategies the benchmark harness measures.
pub fn default_candidates() -> Vec<ExecutionStrategy> {
    let limit = crate::engine::DEFAULT_SPLIT_LIMIT;
    vec![
        ExecutionStrategy::vertex_centric(),
        ExecutionStrategy::vertex_centric().with_buckets(crate::engine::DEFAULT_BUCKET_SIZE),
        ExecutionStrategy::edge_centric(),
        ExecutionStrategy::edge_centric().with_split(limit),
    ]
}

/// One measured runtime of a candidate strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRuntime {
    pub strategy: ExecutionStrategy,
    pub seconds: f64,
}

/// A benchmark row: features, per-candidate runtimes and the fastest one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSample {
    pub features: FeatureVector,
    pub runtimes: Vec<CandidateRuntime>,
    pub label: ExecutionStrategy,
}

impl BenchSample {
    /// Labels the sample with its fastest candidate; exact ties go to the
    /// preferred strategy. Needs two or more positive, finite runtimes.
    pub fn new(features: FeatureVector, runtimes: Vec<CandidateRuntime>) -> Result<Self, String> {
        if runtimes.len() < 2 {
            return Err(format!("a sample needs at least 2 candidate runtimes, got {}", runtimes.len()));
        }
        if let Some(bad) = runtimes.iter().find(|r| !(r.seconds.is_finite() && r.seconds > 0.0)) {
            return Err(format!("runtime {} for {} is not a positive number", bad.seconds, bad.strategy));
        }
        let label = runtimes
            .iter()
            .min_by(|a, b| a.seconds.total_cmp(&b.seconds).then_with(|| preference_key(&a.strategy).cmp(&preference_key(&b.strategy))))
            .map(|r| r.strategy)
            .expect("non-empty");
        Ok(BenchSample { features, runtimes, label })
    }

    pub fn runtime_of(&self, s: &ExecutionStrategy) -> Option<f64> {
        self.runtimes.iter().find(|r| r.strategy == *s).map(|r| r.seconds)
    }

    pub fn best_runtime(&self) -> f64 {
        self.runtimes.iter().map(|r| r.seconds).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixKind;
    use crate::scalar::ScalarKind;

    #[test]
    fn featurization_examples() {
        let d = MatrixDescriptor::general(1024, 1024, ScalarKind::Real64).unwrap();
        let f = extract_features(OpKind::Mv, &d, 1024, "cpu");
        assert!((f.density - 0.000977).abs() < 1e-6);
        assert_eq!(f.size_log2, 10);

        let d = MatrixDescriptor::new(8, 8, MatrixKind::Symmetric, ScalarKind::Real64).unwrap();
        let lower: Vec<_> = (0..8).flat_map(|i| (0..=i).map(move |j| (i, j, 1.0))).collect();
        let m = CooMatrix::from_triplets(d, lower).unwrap();
        let f = features_of(OpKind::Add, &m, "cpu");
        assert!(f.symmetric);
        assert_eq!(f.density, 1.0);

        let d = MatrixDescriptor::general(1, 1, ScalarKind::Real64).unwrap();
        assert_eq!(extract_features(OpKind::Compose, &d, 1, "cpu").size_log2, 0);
    }

    #[test]
    fn fallback_table() {
        let d = MatrixDescriptor::general(64, 64, ScalarKind::Real64).unwrap();
        let dense = extract_features(OpKind::Mv, &d, 64 * 64, "cpu");
        assert_eq!(static_strategy(&dense), ExecutionStrategy::vertex_centric());
        let sparse = extract_features(OpKind::Mv, &d, 10, "cpu");
        assert_eq!(static_strategy(&sparse), ExecutionStrategy::edge_centric().with_split(10));
        let add = extract_features(OpKind::Add, &d, 64 * 64, "cpu");
        assert_eq!(static_strategy(&add), ExecutionStrategy::edge_centric());
    }

    #[test]
    fn labels_pick_fastest_then_preferred() {
        let d = MatrixDescriptor::general(4, 4, ScalarKind::Real64).unwrap();
        let f = extract_features(OpKind::Mv, &d, 4, "cpu");
        let c = default_candidates();
        let rt = |s: [f64; 4]| c.iter().zip(s).map(|(&strategy, seconds)| CandidateRuntime { strategy, seconds }).collect();
        assert_eq!(BenchSample::new(f.clone(), rt([2.0, 3.0, 1.0, 4.0])).unwrap().label, c[2]);
        assert_eq!(BenchSample::new(f.clone(), rt([1.0, 1.0, 1.0, 1.0])).unwrap().label, c[0]);
        assert!(BenchSample::new(f.clone(), rt([1.0, 0.0, 1.0, 1.0])).is_err());
        assert!(BenchSample::new(f, vec![]).is_err());
    }
}
