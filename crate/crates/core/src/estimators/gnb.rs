use std::f64::consts::PI;

use ndarray::{Array1, Array2};

use crate::data::{FeatureMatrix, ProbabilityMatrix, Targets};
use crate::error::{AlError, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, unique_classes, Capabilities, Estimator};

/// Floor applied to every per-class feature variance.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes classifier.
#[derive(Debug, Clone, Default)]
pub struct GaussianNb {
    required_classes: Option<usize>,
    model: Option<GaussianNbModel>,
}

/// Fitted parameters: one row of means/variances per class.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNbModel {
    pub classes: Vec<usize>,
    pub means: Array2<f64>,
    pub variances: Array2<f64>,
    pub log_priors: Vec<f64>,
}

impl GaussianNb {
    /// Class universe is whatever labels appear in the training data.
    pub fn new() -> Self {
        Self::default()
    }

    /// Requires every class in `0..n_classes` to be present at fit time.
    pub fn with_classes(n_classes: usize) -> Self {
        Self {
            required_classes: Some(n_classes),
            model: None,
        }
    }

    pub fn model(&self) -> Option<&GaussianNbModel> {
        self.model.as_ref()
    }

    fn fitted(&self) -> Result<&GaussianNbModel> {
        self.model.as_ref().ok_or(AlError::NotFitted)
    }

    /// Unnormalized log joint `ln P(c) + Σ_j ln N(x_j; μ_cj, σ²_cj)` per class.
    fn joint_log_likelihood(model: &GaussianNbModel, x: &FeatureMatrix) -> Array2<f64> {
        let k = model.classes.len();
        let mut out = Array2::zeros((x.rows(), k));
        for (i, row) in x.view().rows().into_iter().enumerate() {
            for c in 0..k {
                let mut ll = model.log_priors[c];
                for (j, &v) in row.iter().enumerate() {
                    let var = model.variances[[c, j]];
                    let diff = v - model.means[[c, j]];
                    ll -= 0.5 * (2.0 * PI * var).ln() + diff * diff / (2.0 * var);
                }
                out[[i, c]] = ll;
            }
        }
        out
    }
}

impl Estimator for GaussianNb {
    fn name(&self) -> &'static str {
        "gnb"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            probabilistic: true,
            ..Capabilities::default()
        }
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &Targets) -> Result<()> {
        check_fit_inputs(x, y)?;
        let labels = y.as_classes()?;
        let classes = match self.required_classes {
            Some(k) => {
                let present = unique_classes(labels);
                if let Some(&bad) = present.iter().find(|&&c| c >= k) {
                    return Err(AlError::InvalidArgument(format!(
                        "label {bad} outside 0..{k}"
                    )));
                }
                if let Some(missing) = (0..k).find(|c| !present.contains(c)) {
                    return Err(AlError::EmptyClass(missing));
                }
                (0..k).collect()
            }
            None => unique_classes(labels),
        };

        let d = x.cols();
        let k = classes.len();
        let mut means = Array2::zeros((k, d));
        let mut variances = Array2::zeros((k, d));
        let mut counts = vec![0usize; k];
        for (row, &label) in x.view().rows().into_iter().zip(labels) {
            let c = classes.binary_search(&label).expect("label in class list");
            counts[c] += 1;
            let mut m = means.row_mut(c);
            m += &row;
        }
        for (mut m, &count) in means.rows_mut().into_iter().zip(&counts) {
            m /= count as f64;
        }
        for (row, &label) in x.view().rows().into_iter().zip(labels) {
            let c = classes.binary_search(&label).expect("label in class list");
            let diff: Array1<f64> = &row - &means.row(c);
            let mut v = variances.row_mut(c);
            v += &diff.mapv(|e| e * e);
        }
        for (mut v, &count) in variances.rows_mut().into_iter().zip(&counts) {
            let n = count as f64;
            v.mapv_inplace(|s| (s / n).max(VARIANCE_FLOOR));
        }
        let total = labels.len() as f64;
        let log_priors = counts.iter().map(|&n| (n as f64 / total).ln()).collect();

        self.model = Some(GaussianNbModel {
            classes,
            means,
            variances,
            log_priors,
        });
        Ok(())
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn n_features(&self) -> Option<usize> {
        self.model.as_ref().map(|m| m.means.ncols())
    }

    fn classes(&self) -> Result<&[usize]> {
        Ok(&self.fitted()?.classes)
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Targets> {
        Ok(Targets::Classes(self.predict_proba(x)?.argmax_classes()))
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        check_predict_inputs(self.n_features(), x)?;
        let model = self.fitted()?;
        let mut jll = Self::joint_log_likelihood(model, x);
        for mut row in jll.rows_mut() {
            let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            row.mapv_inplace(|v| (v - max).exp());
            let sum = row.sum();
            row /= sum;
        }
        ProbabilityMatrix::with_classes(jll, model.classes.clone())
    }

    fn clone_box(&self) -> Box<dyn Estimator> {
        Box::new(self.clone())
    }
}
