use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::data::{FeatureMatrix, ProbabilityMatrix, Targets};
use crate::error::{AlError, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, unique_classes, Capabilities, Estimator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

/// One binary logistic model per label, trained by full-batch gradient
/// descent from zero weights.
///
/// Fitted on [`Targets::Classes`] it acts as a multiclass classifier over
/// one-hot columns (probabilities renormalized per row); fitted on
/// [`Targets::Multilabel`] it exposes independent per-label probabilities.
#[derive(Debug, Clone, Default)]
pub struct LogisticOvr {
    params: LogisticParams,
    model: Option<LogisticOvrModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticOvrModel {
    /// Row `j` holds the weights of label `j`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    /// `Some(classes)` when fitted on class labels; `None` for multilabel.
    pub classes: Option<Vec<usize>>,
    /// Regularized training loss per label, recorded before every epoch and
    /// once after the last.
    pub loss_history: Vec<Vec<f64>>,
}

pub(crate) fn sigmoid(d: f64) -> f64 {
    if d >= 0.0 {
        1.0 / (1.0 + (-d).exp())
    } else {
        let e = d.exp();
        e / (1.0 + e)
    }
}

fn softplus(d: f64) -> f64 {
    if d > 0.0 {
        d + (-d).exp().ln_1p()
    } else {
        d.exp().ln_1p()
    }
}

/// Mean log loss plus `l2/2 · ‖w‖²` (bias unregularized).
pub(crate) fn binary_loss(w: ArrayView1<f64>, b: f64, x: ArrayView2<f64>, y: ArrayView1<f64>, l2: f64) -> f64 {
    let d = x.dot(&w) + b;
    let data: f64 = d.iter().zip(y).map(|(&d, &t)| softplus(d) - t * d).sum();
    data / x.nrows() as f64 + 0.5 * l2 * w.dot(&w)
}

/// Gradient of [`binary_loss`] with respect to `(w, b)`.
pub(crate) fn binary_gradient(
    w: ArrayView1<f64>,
    b: f64,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    l2: f64,
) -> (Array1<f64>, f64) {
    let n = x.nrows() as f64;
    let residual: Array1<f64> = (x.dot(&w) + b).mapv(sigmoid) - y;
    let gw = x.t().dot(&residual) / n + &w * l2;
    (gw, residual.sum() / n)
}

impl LogisticOvr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_params(params: LogisticParams) -> Self {
        Self { params, model: None }
    }

    pub fn params(&self) -> LogisticParams {
        self.params
    }

    pub fn model(&self) -> Option<&LogisticOvrModel> {
        self.model.as_ref()
    }

    fn fitted(&self) -> Result<&LogisticOvrModel> {
        self.model.as_ref().ok_or(AlError::NotFitted)
    }

    fn decision(&self, x: &FeatureMatrix) -> Result<Array2<f64>> {
        check_predict_inputs(self.n_features(), x)?;
        let m = self.fitted()?;
        Ok(x.view().dot(&m.weights.t()) + &m.bias)
    }
}

impl Estimator for LogisticOvr {
    fn name(&self) -> &'static str {
        "logistic_ovr"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            probabilistic: true,
            decision_scores: true,
            regression: false,
        }
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &Targets) -> Result<()> {
        check_fit_inputs(x, y)?;
        let (columns, classes) = match y {
            Targets::Classes(labels) => {
                let classes = unique_classes(labels);
                let mut onehot = Array2::zeros((labels.len(), classes.len()));
                for (i, label) in labels.iter().enumerate() {
                    let c = classes.binary_search(label).expect("known class");
                    onehot[[i, c]] = 1.0;
                }
                (onehot, Some(classes))
            }
            Targets::Multilabel(m) => (m.mapv(f64::from), None),
            other => {
                return Err(AlError::TargetKind {
                    expected: "classes or multilabel",
                    found: other.kind(),
                })
            }
        };
        for (j, col) in columns.axis_iter(Axis(1)).enumerate() {
            let positives = col.sum();
            if positives == 0.0 || positives == col.len() as f64 {
                return Err(AlError::ConstantLabel(j));
            }
        }

        let LogisticParams { learning_rate, epochs, l2 } = self.params;
        let xv = x.view();
        let labels = columns.ncols();
        let mut weights = Array2::zeros((labels, x.cols()));
        let mut bias = Array1::zeros(labels);
        let mut loss_history = Vec::with_capacity(labels);
        for j in 0..labels {
            let target = columns.column(j);
            let mut w = Array1::zeros(x.cols());
            let mut b = 0.0;
            let mut history = Vec::with_capacity(epochs + 1);
            for _ in 0..epochs {
                history.push(binary_loss(w.view(), b, xv, target, l2));
                let (gw, gb) = binary_gradient(w.view(), b, xv, target, l2);
                w.scaled_add(-learning_rate, &gw);
                b -= learning_rate * gb;
            }
            history.push(binary_loss(w.view(), b, xv, target, l2));
            if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
                return Err(AlError::Diverged);
            }
            weights.row_mut(j).assign(&w);
            bias[j] = b;
            loss_history.push(history);
        }
        self.model = Some(LogisticOvrModel {
            weights,
            bias,
            classes,
            loss_history,
        });
        Ok(())
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn n_features(&self) -> Option<usize> {
        self.model.as_ref().map(|m| m.weights.ncols())
    }

    fn classes(&self) -> Result<&[usize]> {
        self.fitted()?
            .classes
            .as_deref()
            .ok_or(AlError::TargetKind {
                expected: "classes",
                found: "multilabel",
            })
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Targets> {
        match self.fitted()?.classes {
            Some(_) => Ok(Targets::Classes(self.predict_proba(x)?.argmax_classes())),
            None => Ok(Targets::Multilabel(
                self.decision(x)?.mapv(|d| u8::from(d >= 0.0)),
            )),
        }
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        let classes = self.classes()?.to_vec();
        // normalize in log space: ln σ(d) = -softplus(-d)
        let mut p = self.decision(x)?.mapv(|d| -softplus(-d));
        for mut row in p.rows_mut() {
            let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            row.mapv_inplace(|v| (v - max).exp());
            let sum = row.sum();
            row /= sum;
        }
        ProbabilityMatrix::with_classes(p, classes)
    }

    fn decision_values(&self, x: &FeatureMatrix) -> Result<Array2<f64>> {
        self.decision(x)
    }

    fn label_probabilities(&self, x: &FeatureMatrix) -> Result<Array2<f64>> {
        Ok(self.decision(x)?.mapv(sigmoid))
    }

    fn clone_box(&self) -> Box<dyn Estimator> {
        Box::new(self.clone())
    }
}
