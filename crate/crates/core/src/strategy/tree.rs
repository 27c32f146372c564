use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::features::{preference_key, BenchSample, FeatureVector, FEATURE_NAMES};
use crate::engine::ExecutionStrategy;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("training needs at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("samples carry different labels but no feature varies")]
    NoVariance,
    #[error("invalid tree: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: 6, min_leaf: 3 }
    }
}

/// A tree node; samples with `value <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { leaf: ExecutionStrategy },
}

/// A trained strategy selector. Node 0 is the root and children always
/// follow their parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

fn gini(counts: &BTreeMap<ExecutionStrategy, usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.values().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

fn label_counts<'a>(labels: impl Iterator<Item = &'a ExecutionStrategy>) -> BTreeMap<ExecutionStrategy, usize> {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(*l).or_insert(0) += 1;
    }
    counts
}

fn majority(counts: &BTreeMap<ExecutionStrategy, usize>) -> ExecutionStrategy {
    *counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| preference_key(b.0).cmp(&preference_key(a.0))))
        .map(|(s, _)| s)
        .expect("a node holds at least one sample")
}

struct Trainer<'a> {
    x: Vec<[f64; 8]>,
    y: Vec<ExecutionStrategy>,
    params: &'a TreeParams,
    nodes: Vec<TreeNode>,
}

impl Trainer<'_> {
    fn best_split(&self, idx: &[usize]) -> Option<(usize, f64, f64)> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<(usize, f64, f64)> = None;
        for feature in 0..FEATURE_NAMES.len() {
            let mut order: Vec<usize> = idx.to_vec();
            order.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]));
            let mut left: BTreeMap<ExecutionStrategy, usize> = BTreeMap::new();
            let mut right = label_counts(order.iter().map(|&i| &self.y[i]));
            for k in 0..n - 1 {
                let i = order[k];
                *left.entry(self.y[i]).or_insert(0) += 1;
                let r = right.get_mut(&self.y[i]).expect("counted");
                *r -= 1;
                if *r == 0 {
                    right.remove(&self.y[i]);
                }
                let (lo, hi) = (self.x[i][feature], self.x[order[k + 1]][feature]);
                if lo == hi || k + 1 < min_leaf || n - k - 1 < min_leaf {
                    continue;
                }
                let (nl, nr) = (k + 1, n - k - 1);
                let impurity = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                if best.is_none_or(|(_, _, b)| impurity < b) {
                    best = Some((feature, lo + (hi - lo) / 2.0, impurity));
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = label_counts(idx.iter().map(|&i| &self.y[i]));
        self.nodes.push(TreeNode::Leaf { leaf: majority(&counts) });
        if counts.len() == 1 || depth >= self.params.max_depth {
            return id;
        }
        let parent = gini(&counts, idx.len());
        let Some((feature, threshold, impurity)) = self.best_split(&idx) else {
            return id;
        };
        if impurity >= parent {
            return id;
        }
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = TreeNode::Split { feature, threshold, left, right };
        id
    }
}

/// Canonical sample order: by feature values, then label.
pub fn canonical_order(samples: &mut [BenchSample]) {
    samples.sort_by(|a, b| {
        let (va, vb) = (a.features.values(), b.features.values());
        va.iter()
            .zip(&vb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.label.cmp(&b.label))
    });
}

/// Trains a CART tree minimizing Gini impurity of the sample labels.
///
/// Split ties go to the lowest feature index, then the lowest threshold;
/// leaf label ties prefer vertex centric, then fewer enabled flags. The
/// result does not depend on sample order.
pub fn train_tree(samples: &[BenchSample], params: &TreeParams) -> Result<DecisionTree, TreeError> {
    let needed = 2 * params.min_leaf;
    if samples.len() < needed || samples.is_empty() {
        return Err(TreeError::TooFewSamples { needed: needed.max(1), found: samples.len() });
    }
    let mut sorted = samples.to_vec();
    canonical_order(&mut sorted);
    let x: Vec<[f64; 8]> = sorted.iter().map(|s| s.features.values()).collect();
    let y: Vec<ExecutionStrategy> = sorted.iter().map(|s| s.label).collect();
    let distinct_labels = label_counts(y.iter()).len();
    if distinct_labels > 1 && (0..FEATURE_NAMES.len()).all(|f| x.iter().all(|v| v[f] == x[0][f])) {
        return Err(TreeError::NoVariance);
    }
    let mut trainer = Trainer { x, y, params, nodes: Vec::new() };
    trainer.grow((0..sorted.len()).collect(), 0);
    Ok(DecisionTree { nodes: trainer.nodes })
}

impl DecisionTree {
    pub fn leaf(strategy: ExecutionStrategy) -> Self {
        DecisionTree { nodes: vec![TreeNode::Leaf { leaf: strategy }] }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Checks indices, feature numbers and leaf strategies.
    pub fn validate(&self) -> Result<(), TreeError> {
        if self.nodes.is_empty() {
            return Err(TreeError::Invalid("no nodes".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                TreeNode::Split { feature, threshold, left, right } => {
                    if feature >= FEATURE_NAMES.len() {
                        return Err(TreeError::Invalid(format!("node {i}: feature {feature} does not exist")));
                    }
                    if !threshold.is_finite() {
                        return Err(TreeError::Invalid(format!("node {i}: threshold is not finite")));
                    }
                    for child in [left, right] {
                        if child <= i || child >= self.nodes.len() {
                            return Err(TreeError::Invalid(format!("node {i}: child {child} out of order")));
                        }
                    }
                }
                TreeNode::Leaf { leaf } => {
                    leaf.validate().map_err(|e| TreeError::Invalid(format!("node {i}: {e}")))?;
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, TreeError> {
        let tree: DecisionTree = serde_json::from_str(text).map_err(|e| TreeError::Invalid(e.to_string()))?;
        tree.validate()?;
        Ok(tree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trees always serialize")
    }
}

/// Root-to-leaf descent.
pub fn select_strategy(tree: &DecisionTree, f: &FeatureVector) -> ExecutionStrategy {
    let x = f.values();
    let mut i = 0;
    loop {
        match tree.nodes[i] {
            TreeNode::Leaf { leaf } => return leaf,
            TreeNode::Split { feature, threshold, left, right } => {
                i = if x[feature] <= threshold { left } else { right };
            }
        }
    }
}

/// Outcome of k-fold held-out selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub cases: usize,
    pub within_tolerance: usize,
    pub tolerance: f64,
}

impl CrossValidation {
    pub fn fraction(&self) -> f64 {
        if self.cases == 0 {
            0.0
        } else {
            self.within_tolerance as f64 / self.cases as f64
        }
    }
}

/// Trains on all folds but one and counts held-out cases whose selected
/// strategy runs within `tolerance` times the case's best runtime. Fold
/// membership is the sample's canonical index modulo `folds`.
pub fn cross_validate(
    samples: &[BenchSample],
    folds: usize,
    params: &TreeParams,
    tolerance: f64,
) -> Result<CrossValidation, TreeError> {
    let folds = folds.max(2);
    let mut sorted = samples.to_vec();
    canonical_order(&mut sorted);
    let mut result = CrossValidation { cases: 0, within_tolerance: 0, tolerance };
    for fold in 0..folds {
        let (test, train): (Vec<_>, Vec<_>) = sorted.iter().enumerate().partition(|(i, _)| i % folds == fold);
        let train: Vec<BenchSample> = train.into_iter().map(|(_, s)| s.clone()).collect();
        let tree = train_tree(&train, params)?;
        for (_, s) in test {
            let chosen = select_strategy(&tree, &s.features);
            let runtime = s.runtime_of(&chosen).unwrap_or(f64::INFINITY);
            result.cases += 1;
            if runtime <= tolerance * s.best_runtime() {
                result.within_tolerance += 1;
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixDescriptor;
    use crate::scalar::ScalarKind;
    use crate::strategy::features::{default_candidates, extract_features, CandidateRuntime, OpKind};

    fn sample(density: f64, fast: usize) -> BenchSample {
        let d = MatrixDescriptor::general(256, 256, ScalarKind::Real64).unwrap();
        let nnz = (density * 65536.0).round() as usize;
        let f = extract_features(OpKind::Mv, &d, nnz, "cpu");
        let runtimes = default_candidates()
            .into_iter()
            .enumerate()
            .map(|(k, strategy)| CandidateRuntime { strategy, seconds: if k == fast { 1.0 } else { 2.0 } })
            .collect();
        BenchSample::new(f, runtimes).unwrap()
    }

    fn separable() -> Vec<BenchSample> {
        let mut out = Vec::new();
        for k in 0..10 {
            out.push(sample(0.0005 + 0.0008 * k as f64, 3));
            out.push(sample(0.02 + 0.002 * k as f64, 0));
        }
        out
    }

    #[test]
    fn single_label_gives_single_leaf() {
        let samples: Vec<_> = (0..8).map(|k| sample(0.1 * k as f64, 0)).collect();
        let tree = train_tree(&samples, &TreeParams::default()).unwrap();
        assert_eq!(tree, DecisionTree::leaf(ExecutionStrategy::vertex_centric()));
    }

    #[test]
    fn density_split() {
        let tree = train_tree(&separable(), &TreeParams::default()).unwrap();
        assert_eq!(tree.nodes.len(), 3);
        let TreeNode::Split { feature, threshold, .. } = tree.nodes[0] else { panic!("root must split") };
        assert_eq!(FEATURE_NAMES[feature], "density");
        assert!(threshold > 0.0077 && threshold < 0.02, "{threshold}");
        let at = |d: f64| sample(d, 0).features;
        assert_eq!(select_strategy(&tree, &at(0.001)), ExecutionStrategy::edge_centric().with_split(10));
        assert_eq!(select_strategy(&tree, &at(0.5)), ExecutionStrategy::vertex_centric());
        let cv = cross_validate(&separable(), 5, &TreeParams::default(), 1.0).unwrap();
        assert_eq!(cv.fraction(), 1.0);
    }

    #[test]
    fn order_independent_and_serializable() {
        let samples = separable();
        let mut reversed = samples.clone();
        reversed.reverse();
        let a = train_tree(&samples, &TreeParams::default()).unwrap();
        let b = train_tree(&reversed, &TreeParams::default()).unwrap();
        assert_eq!(a, b);
        let json = a.to_json();
        assert_eq!(DecisionTree::from_json(&json).unwrap(), a);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v["nodes"][0]["feature"].is_u64());
        assert!(v["nodes"][1]["leaf"]["model"].is_string());
    }

    #[test]
    fn too_few_samples() {
        let samples: Vec<_> = (0..5).map(|k| sample(0.1 * k as f64, k % 2)).collect();
        assert!(matches!(train_tree(&samples, &TreeParams::default()), Err(TreeError::TooFewSamples { .. })));
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(DecisionTree::from_json(r#"{"nodes":[]}"#).is_err());
        assert!(DecisionTree::from_json(r#"{"nodes":[{"feature":9,"threshold":0.5,"left":1,"right":2}]}"#).is_err());
        assert!(DecisionTree::from_json(r#"{"nodes":[{"feature":1,"threshold":0.5,"left":0,"right":0}]}"#).is_err());
    }

    #[test]
    fn depth_bounded() {
        let samples: Vec<_> = (0..200).map(|k| sample((k as f64 * 0.37) % 1.0, (k * 7 / 3) % 4)).collect();
        let params = TreeParams { max_depth: 3, min_leaf: 3 };
        assert!(train_tree(&samples, &params).unwrap().depth() <= 3);
    }
}
