use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::data::{FeatureMatrix, Targets};
use crate::error::{AlError, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, Capabilities, Estimator};

pub const INITIAL_JITTER: f64 = 1e-10;
pub const MAX_JITTER: f64 = 1e-4;

/// Fixed hyperparameters of the squared-exponential kernel
/// `k(a, b) = σ_f² · exp(−‖a − b‖² / (2ℓ²))` plus observation noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfKernel {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl RbfKernel {
    pub fn new(length_scale: f64, signal_variance: f64, noise_variance: f64) -> Result<Self> {
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return Err(AlError::InvalidArgument(format!(
                "length scale must be positive, got {length_scale}"
            )));
        }
        if !(signal_variance > 0.0 && signal_variance.is_finite()) {
            return Err(AlError::InvalidArgument(format!(
                "signal variance must be positive, got {signal_variance}"
            )));
        }
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(AlError::InvalidArgument(format!(
                "noise variance must be non-negative, got {noise_variance}"
            )));
        }
        Ok(Self {
            length_scale,
            signal_variance,
            noise_variance,
        })
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        self.signal_variance * (-d2 / (2.0 * self.length_scale * self.length_scale)).exp()
    }
}

impl Default for RbfKernel {
    fn default() -> Self {
        Self {
            length_scale: 1.0,
            signal_variance: 1.0,
            noise_variance: 1e-6,
        }
    }
}

/// Gaussian-process regressor with fixed RBF hyperparameters.
#[derive(Debug, Clone, Default)]
pub struct GaussianProcess {
    kernel: RbfKernel,
    model: Option<GpModel>,
}

#[derive(Debug, Clone)]
pub struct GpModel {
    pub x: Vec<Vec<f64>>,
    /// Factorization of `K + (σ_n² + jitter)·I`.
    pub factor: Cholesky<f64, Dyn>,
    /// `(K + σ_n² I)⁻¹ y`
    pub alpha: DVector<f64>,
    /// Diagonal jitter that made the factorization succeed.
    pub jitter: f64,
}

impl GaussianProcess {
    pub fn new(kernel: RbfKernel) -> Self {
        Self { kernel, model: None }
    }

    pub fn kernel(&self) -> RbfKernel {
        self.kernel
    }

    pub fn model(&self) -> Option<&GpModel> {
        self.model.as_ref()
    }

    fn cross_kernel(&self, model: &GpModel, q: &[f64]) -> DVector<f64> {
        DVector::from_iterator(model.x.len(), model.x.iter().map(|xi| self.kernel.eval(q, xi)))
    }
}

impl Estimator for GaussianProcess {
    fn name(&self) -> &'static str {
        "gp"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            regression: true,
            ..Capabilities::default()
        }
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &Targets) -> Result<()> {
        check_fit_inputs(x, y)?;
        let targets = y.as_continuous()?;
        let rows = x.to_rows();
        let n = rows.len();
        let gram = DMatrix::from_fn(n, n, |i, j| self.kernel.eval(&rows[i], &rows[j]));

        let mut jitter = INITIAL_JITTER;
        let factor = loop {
            let mut a = gram.clone();
            for i in 0..n {
                a[(i, i)] += self.kernel.noise_variance + jitter;
            }
            if let Some(f) = Cholesky::new(a) {
                break f;
            }
            if jitter >= MAX_JITTER {
                return Err(AlError::Factorization(jitter));
            }
            jitter *= 10.0;
        };
        let alpha = factor.solve(&DVector::from_column_slice(targets));
        self.model = Some(GpModel {
            x: rows,
            factor,
            alpha,
            jitter,
        });
        Ok(())
    }

    fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    fn n_features(&self) -> Option<usize> {
        self.model.as_ref().map(|m| m.x[0].len())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Targets> {
        Ok(Targets::Continuous(self.predict_with_std(x)?.0))
    }

    fn predict_with_std(&self, x: &FeatureMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
        check_predict_inputs(self.n_features(), x)?;
        let model = self.model.as_ref().ok_or(AlError::NotFitted)?;
        let mut mean = Vec::with_capacity(x.rows());
        let mut std = Vec::with_capacity(x.rows());
        for row in x.view().rows() {
            let q = row.to_vec();
            let ks = self.cross_kernel(model, &q);
            mean.push(ks.dot(&model.alpha));
            let v = model.factor.l().solve_lower_triangular(&ks).expect("non-singular factor");
            let var = self.kernel.signal_variance - v.dot(&v);
            std.push(var.max(0.0).sqrt());
        }
        Ok((mean, std))
    }

    fn clone_box(&self) -> Box<dyn Estimator> {
        Box::new(self.clone())
    }
}
