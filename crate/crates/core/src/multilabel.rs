//! Multilabel query strategies over one-vs-rest decision values `d_j(x)` and
//! per-label relevance probabilities `P_j(x)`.
//!
//! Conventions: label `j` is predicted relevant iff `d_j ≥ 0`; hard
//! predictions are `p_j = ±1`; confidence is `|2P_j − 1|`. Every utility is
//! oriented so that larger means query first.

use ndarray::ArrayView2;

use crate::data::{FeatureMatrix, UtilityArray};
use crate::error::{AlError, Result};
use crate::learner::ActiveLearner;
use crate::strategy::{compose, Argmax, Composed, Utility};

fn check(m: ArrayView2<f64>, what: &'static str) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(AlError::Empty(what));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(AlError::NonFinite(what));
    }
    Ok(())
}

fn check_pair(d: ArrayView2<f64>, p: ArrayView2<f64>) -> Result<()> {
    check(d, "decision matrix")?;
    check(p, "label probabilities")?;
    if d.dim() != p.dim() {
        return Err(AlError::Shape(format!(
            "decision matrix {:?} vs probabilities {:?}",
            d.dim(),
            p.dim()
        )));
    }
    Ok(())
}

fn hard(d: f64) -> f64 {
    if d >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn hinge_total(d: ArrayView2<f64>, i: usize, reference: impl Fn(usize) -> f64) -> f64 {
    d.row(i)
        .iter()
        .enumerate()
        .map(|(j, &dj)| (1.0 - hard(dj) * reference(j)).max(0.0))
        .sum()
}

/// `−min_j |d_j(x)|`: the instance closest to any per-label boundary.
pub fn svm_binary_minimum(d: ArrayView2<f64>) -> Result<UtilityArray> {
    check(d, "decision matrix")?;
    UtilityArray::new(
        d.rows()
            .into_iter()
            .map(|row| -row.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
            .collect(),
    )
}

/// Hinge loss of the hard predictions against the pattern that marks only the
/// most probable label relevant (ties to the lower label index).
pub fn max_loss(d: ArrayView2<f64>, p: ArrayView2<f64>) -> Result<UtilityArray> {
    check_pair(d, p)?;
    let values = (0..d.nrows())
        .map(|i| {
            let row = p.row(i);
            let mut top = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[top] {
                    top = j;
                }
            }
            hinge_total(d, i, |j| if j == top { 1.0 } else { -1.0 })
        })
        .collect();
    UtilityArray::new(values)
}

/// Hinge loss averaged over all one-hot reference patterns.
pub fn mean_max_loss(d: ArrayView2<f64>) -> Result<UtilityArray> {
    check(d, "decision matrix")?;
    let labels = d.ncols();
    let values = (0..d.nrows())
        .map(|i| {
            (0..labels)
                .map(|c| hinge_total(d, i, |j| if j == c { 1.0 } else { -1.0 }))
                .sum::<f64>()
                / labels as f64
        })
        .collect();
    UtilityArray::new(values)
}

fn confidences(p: ArrayView2<f64>) -> Result<Vec<Vec<f64>>> {
    check(p, "label probabilities")?;
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(AlError::InvalidProbabilities(
            "label probabilities must lie in [0, 1]".into(),
        ));
    }
    Ok(p.rows()
        .into_iter()
        .map(|row| row.iter().map(|&v| (2.0 * v - 1.0).abs()).collect())
        .collect())
}

/// `−min_j |2P_j − 1|`.
pub fn min_confidence(p: ArrayView2<f64>) -> Result<UtilityArray> {
    UtilityArray::new(
        confidences(p)?
            .into_iter()
            .map(|c| -c.into_iter().fold(f64::INFINITY, f64::min))
            .collect(),
    )
}

/// `−mean_j |2P_j − 1|`.
pub fn avg_confidence(p: ArrayView2<f64>) -> Result<UtilityArray> {
    UtilityArray::new(
        confidences(p)?
            .into_iter()
            .map(|c| -c.iter().sum::<f64>() / c.len() as f64)
            .collect(),
    )
}

/// Decision-space score `s_j = d_j · p_j`, which equals `|d_j|`.
fn scores(d: ArrayView2<f64>) -> Result<Vec<Vec<f64>>> {
    check(d, "decision matrix")?;
    Ok(d.rows()
        .into_iter()
        .map(|row| row.iter().map(|&v| v * hard(v)).collect())
        .collect())
}

/// `−min_j s_j`.
pub fn min_score(d: ArrayView2<f64>) -> Result<UtilityArray> {
    UtilityArray::new(
        scores(d)?
            .into_iter()
            .map(|s| -s.into_iter().fold(f64::INFINITY, f64::min))
            .collect(),
    )
}

/// `−mean_j s_j`.
pub fn avg_score(d: ArrayView2<f64>) -> Result<UtilityArray> {
    UtilityArray::new(
        scores(d)?
            .into_iter()
            .map(|s| -s.iter().sum::<f64>() / s.len() as f64)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultilabelMeasure {
    SvmBinaryMinimum,
    MaxLoss,
    MeanMaxLoss,
    MinConfidence,
    AvgConfidence,
    MinScore,
    AvgScore,
}

impl MultilabelMeasure {
    pub const ALL: [MultilabelMeasure; 7] = [
        MultilabelMeasure::SvmBinaryMinimum,
        MultilabelMeasure::MaxLoss,
        MultilabelMeasure::MeanMaxLoss,
        MultilabelMeasure::MinConfidence,
        MultilabelMeasure::AvgConfidence,
        MultilabelMeasure::MinScore,
        MultilabelMeasure::AvgScore,
    ];

    /// Evaluates the measure on precomputed decision values and probabilities.
    pub fn apply(self, d: ArrayView2<f64>, p: ArrayView2<f64>) -> Result<UtilityArray> {
        match self {
            MultilabelMeasure::SvmBinaryMinimum => svm_binary_minimum(d),
            MultilabelMeasure::MaxLoss => max_loss(d, p),
            MultilabelMeasure::MeanMaxLoss => mean_max_loss(d),
            MultilabelMeasure::MinConfidence => min_confidence(p),
            MultilabelMeasure::AvgConfidence => avg_confidence(p),
            MultilabelMeasure::MinScore => min_score(d),
            MultilabelMeasure::AvgScore => avg_score(d),
        }
    }

    fn needs_probabilities(self) -> bool {
        matches!(
            self,
            MultilabelMeasure::MaxLoss | MultilabelMeasure::MinConfidence | MultilabelMeasure::AvgConfidence
        )
    }

    fn needs_decisions(self) -> bool {
        !matches!(self, MultilabelMeasure::MinConfidence | MultilabelMeasure::AvgConfidence)
    }
}

impl Utility<ActiveLearner> for MultilabelMeasure {
    fn utility(&self, learner: &ActiveLearner, pool: &FeatureMatrix) -> Result<UtilityArray> {
        if !learner.is_fitted() {
            return Err(AlError::NotFitted);
        }
        let est = learner.estimator();
        let d = if self.needs_decisions() {
            Some(est.decision_values(pool)?)
        } else {
            None
        };
        let p = if self.needs_probabilities() {
            Some(est.label_probabilities(pool)?)
        } else {
            None
        };
        let filler = ndarray::Array2::<f64>::zeros((0, 0));
        let dv = d.as_ref().map_or(filler.view(), |m| m.view());
        let pv = p.as_ref().map_or(filler.view(), |m| m.view());
        self.apply(dv, pv)
    }
}

pub fn multilabel_strategy(measure: MultilabelMeasure) -> Composed<MultilabelMeasure, Argmax> {
    compose(measure, Argmax)
}
