//! The contract every model plugged into a learner must satisfy.

use std::fmt;

use ndarray::Array2;

use crate::data::{FeatureMatrix, ProbabilityMatrix, Targets};
use crate::error::{AlError, Result};

/// Optional behaviors an estimator may expose.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Capabilities {
    /// `predict_proba` returns class distributions.
    pub probabilistic: bool,
    /// `decision_values` returns signed per-label margins.
    pub decision_scores: bool,
    /// Fits continuous targets; `predict_with_std` may be available.
    pub regression: bool,
}

/// A fit/predict model. Refitting fully replaces any prior fitted state.
///
/// Calling a behavior whose capability flag is off returns
/// [`AlError::MissingCapability`].
pub trait Estimator: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn capabilities(&self) -> Capabilities;

    fn fit(&mut self, x: &FeatureMatrix, y: &Targets) -> Result<()>;

    fn is_fitted(&self) -> bool;

    /// Feature count seen at fit time.
    fn n_features(&self) -> Option<usize>;

    /// Sorted class ids observed at fit time (classifiers only).
    fn classes(&self) -> Result<&[usize]> {
        Err(self.missing("class labels"))
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Targets>;

    fn predict_proba(&self, _x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        Err(self.missing("predict_proba"))
    }

    /// Signed per-label scores `d_j(x)`; `d_j >= 0` means label `j` is predicted relevant.
    fn decision_values(&self, _x: &FeatureMatrix) -> Result<Array2<f64>> {
        Err(self.missing("decision_values"))
    }

    /// Independent per-label relevance probabilities (rows need not sum to 1).
    fn label_probabilities(&self, _x: &FeatureMatrix) -> Result<Array2<f64>> {
        Err(self.missing("label_probabilities"))
    }

    /// Predictive mean and standard deviation for regression estimators.
    fn predict_with_std(&self, _x: &FeatureMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
        Err(self.missing("predictive standard deviation"))
    }

    fn clone_box(&self) -> Box<dyn Estimator>;

    #[doc(hidden)]
    fn missing(&self, capability: &'static str) -> AlError {
        AlError::MissingCapability {
            estimator: self.name(),
            capability,
        }
    }
}

impl Clone for Box<dyn Estimator> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

pub(crate) fn check_fit_inputs(x: &FeatureMatrix, y: &Targets) -> Result<()> {
    if x.is_empty() {
        return Err(AlError::Empty("training matrix"));
    }
    if x.cols() == 0 {
        return Err(AlError::Empty("feature columns"));
    }
    if x.rows() != y.len() {
        return Err(AlError::Shape(format!(
            "{} instances but {} targets",
            x.rows(),
            y.len()
        )));
    }
    y.validate()
}

pub(crate) fn check_predict_inputs(expected: Option<usize>, x: &FeatureMatrix) -> Result<()> {
    let cols = expected.ok_or(AlError::NotFitted)?;
    if x.cols() != cols {
        return Err(AlError::Shape(format!(
            "model was fitted on {cols} features, got {}",
            x.cols()
        )));
    }
    Ok(())
}

/// Sorted distinct labels.
pub(crate) fn unique_classes(y: &[usize]) -> Vec<usize> {
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
}
