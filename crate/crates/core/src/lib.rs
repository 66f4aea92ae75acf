//! Modular active learning.
//!
//! Learners pair an [`Estimator`] with accumulated labeled data and a query
//! strategy. Most strategies are a [`Utility`] composed with a [`Selector`];
//! any utility works with any selector.
//!
//! The `parallel` feature (on by default) evaluates per-candidate and
//! per-member work on the rayon pool. Without it the same code runs
//! sequentially and yields identical results.

pub mod batch;
pub mod bayesopt;
pub mod committee;
pub mod data;
pub mod eer;
pub mod error;
pub mod estimator;
pub mod estimators;
pub mod learner;
pub mod multilabel;
pub mod parallel;
pub mod strategy;
pub mod stream;
pub mod uncertainty;

pub use batch::{
    density_weighted_utility, information_density, ranked_batch, ranked_batch_picks, similarity,
    DensityWeighted, RankedBatch, RankedPick, SimilarityKind,
};
pub use bayesopt::{
    acquisition_ei, acquisition_pi, acquisition_strategy, acquisition_ucb, acquisition_values,
    optimizer_query, Acquisition, AcquisitionParams, AcquisitionUtility, BayesianOptimizer,
};
pub use committee::{
    consensus_entropy, disagreement_strategy, kl_divergence, max_disagreement, std_sampling,
    vote_entropy, Committee, CommitteeRegressor, Disagreement, MaxStd,
};
pub use data::{FeatureMatrix, ProbabilityMatrix, QuerySelection, Targets, UtilityArray};
pub use eer::{eer_strategy, expected_error_reduction, EerConfig, EerLoss, ExpectedErrorReduction};
pub use error::{AlError, Result};
pub use estimator::{Capabilities, Estimator};
pub use learner::{score_predictions, ActiveLearner, TrainingSet};
pub use multilabel::{multilabel_strategy, MultilabelMeasure};
pub use strategy::{
    compose, select_argmax, select_shuffled_argmax, Argmax, Composed, QueryStrategy,
    RandomSampling, Selector, ShuffledArgmax, Utility,
};
pub use stream::{qbd_decide, stream_decide, StreamDecision, Verdict};
pub use uncertainty::{
    classifier_entropy, classifier_margin, classifier_uncertainty, uncertainty_sampling,
    uncertainty_strategy, Uncertainty, UncertaintyMeasure,
};
