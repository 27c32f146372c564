//! Operation featurization and the decision-tree strategy selector.

mod features;
mod tree;

pub use features::{
    default_candidates, extract_features, features_of, static_strategy, BenchSample, CandidateRuntime, FeatureVector,
    OpKind, FEATURE_NAMES, SPARSE_DENSITY,
};
pub use tree::{
    canonical_order, cross_validate, select_strategy, train_tree, CrossValidation, DecisionTree, TreeError, TreeNode,
    TreeParams,
};
