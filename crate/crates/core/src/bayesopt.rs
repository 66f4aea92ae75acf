//! Bayesian optimization over a pool of candidates with a regression surrogate
//! that reports a predictive mean and standard deviation.
//!
//! Maximization throughout: `y_max` is the best observed target and every
//! acquisition rewards candidates expected to exceed it.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use libm::erfc;

use crate::data::{FeatureMatrix, QuerySelection, Targets, UtilityArray};
use crate::error::{AlError, Result};
use crate::estimator::Estimator;
use crate::learner::{check_query_args, refit, TrainingSet};
use crate::parallel::map_range;
use crate::strategy::{compose, Argmax, Composed, QueryStrategy, Utility};

/// Standard normal CDF via `erfc`.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_nan() || sigma < 0.0 {
        Err(AlError::InvalidArgument(format!(
            "standard deviation must be non-negative, got {sigma}"
        )))
    } else {
        Ok(())
    }
}

/// Probability of improvement `Φ((μ − f* − ξ)/σ)`.
pub fn acquisition_pi(mu: f64, sigma: f64, f_best: f64, xi: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let gain = mu - f_best - xi;
    if sigma == 0.0 {
        return Ok(if gain > 0.0 { 1.0 } else { 0.0 });
    }
    Ok(norm_cdf(gain / sigma))
}

/// Expected improvement `(μ − f* − ξ)Φ(z) + σφ(z)`.
pub fn acquisition_ei(mu: f64, sigma: f64, f_best: f64, xi: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let gain = mu - f_best - xi;
    if sigma == 0.0 {
        return Ok(gain.max(0.0));
    }
    let z = gain / sigma;
    Ok((gain * norm_cdf(z) + sigma * norm_pdf(z)).max(0.0))
}

/// Upper confidence bound `μ + κσ`.
pub fn acquisition_ucb(mu: f64, sigma: f64, kappa: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(mu + kappa * sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Acquisition {
    ProbabilityOfImprovement,
    ExpectedImprovement,
    UpperConfidenceBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionParams {
    pub xi: f64,
    pub kappa: f64,
}

impl Default for AcquisitionParams {
    fn default() -> Self {
        Self { xi: 0.01, kappa: 2.0 }
    }
}

impl AcquisitionParams {
    pub fn new(xi: f64, kappa: f64) -> Result<Self> {
        let p = Self { xi, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("xi", self.xi), ("kappa", self.kappa)] {
            if !v.is_finite() || v < 0.0 {
                return Err(AlError::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Acquisition {
    pub fn eval(self, mu: f64, sigma: f64, f_best: f64, params: &AcquisitionParams) -> Result<f64> {
        match self {
            Acquisition::ProbabilityOfImprovement => acquisition_pi(mu, sigma, f_best, params.xi),
            Acquisition::ExpectedImprovement => acquisition_ei(mu, sigma, f_best, params.xi),
            Acquisition::UpperConfidenceBound => acquisition_ucb(mu, sigma, params.kappa),
        }
    }
}

/// A surrogate regressor, its observations, and the best observation so far.
#[derive(Clone)]
pub struct BayesianOptimizer {
    estimator: Box<dyn Estimator>,
    training: Option<TrainingSet>,
    best: Option<(Vec<f64>, f64)>,
    strategy: Arc<dyn QueryStrategy<BayesianOptimizer>>,
}

impl fmt::Debug for BayesianOptimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BayesianOptimizer")
            .field("estimator", &self.estimator)
            .field("observations", &self.n_observed())
            .field("y_max", &self.y_max())
            .finish_non_exhaustive()
    }
}

impl BayesianOptimizer {
    pub fn new(
        estimator: Box<dyn Estimator>,
        strategy: impl QueryStrategy<BayesianOptimizer> + 'static,
    ) -> Result<Self> {
        if !estimator.capabilities().regression {
            return Err(estimator.missing("predictive standard deviation"));
        }
        Ok(Self {
            estimator,
            training: None,
            best: None,
            strategy: Arc::new(strategy),
        })
    }

    pub fn estimator(&self) -> &dyn Estimator {
        self.estimator.as_ref()
    }

    pub fn training(&self) -> Option<&TrainingSet> {
        self.training.as_ref()
    }

    pub fn n_observed(&self) -> usize {
        self.training.as_ref().map_or(0, TrainingSet::len)
    }

    pub fn is_fitted(&self) -> bool {
        self.training.is_some() && self.estimator.is_fitted()
    }

    pub fn y_max(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.1)
    }

    pub fn x_max(&self) -> Option<&[f64]> {
        self.best.as_ref().map(|b| b.0.as_slice())
    }

    /// Appends observations, refits the surrogate, and raises `y_max` if a
    /// new target exceeds it. Leaves the state unchanged on error.
    pub fn teach(&mut self, x: FeatureMatrix, y: Vec<f64>) -> Result<()> {
        let new = TrainingSet::new(x, Targets::Continuous(y))?;
        let data = match &self.training {
            Some(current) => current.append(&new)?,
            None => new.clone(),
        };
        let estimator = refit(self.estimator.as_ref(), &data, None)?;

        let ys = new.y.as_continuous()?;
        let mut best = self.best.clone();
        for (i, &v) in ys.iter().enumerate() {
            if best.as_ref().is_none_or(|b| v > b.1) {
                best = Some((new.x.row(i).to_vec(), v));
            }
        }
        self.estimator = estimator;
        self.training = Some(data);
        self.best = best;
        Ok(())
    }

    /// Posterior `(μ, σ)` at each candidate.
    pub fn posterior(&self, candidates: &FeatureMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
        if !self.is_fitted() {
            return Err(AlError::NotFitted);
        }
        self.estimator.predict_with_std(candidates)
    }

    pub fn query(&self, candidates: &FeatureMatrix, n: usize) -> Result<QuerySelection> {
        check_query_args(candidates, n)?;
        if !self.is_fitted() {
            return Err(AlError::NotFitted);
        }
        let indices = self.strategy.query(self, candidates, n)?;
        QuerySelection::from_pool(candidates, indices)
    }
}

/// Acquisition values at every candidate.
pub fn acquisition_values(
    optimizer: &BayesianOptimizer,
    candidates: &FeatureMatrix,
    acquisition: Acquisition,
    params: &AcquisitionParams,
) -> Result<UtilityArray> {
    params.validate()?;
    if candidates.is_empty() {
        return Err(AlError::Empty("candidates"));
    }
    let (mu, sigma) = optimizer.posterior(candidates)?;
    let f_best = optimizer.y_max().ok_or(AlError::NotFitted)?;
    let values = map_range(mu.len(), |i| acquisition.eval(mu[i], sigma[i], f_best, params))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    UtilityArray::new(values)
}

#[derive(Debug, Clone, Copy)]
pub struct AcquisitionUtility {
    pub acquisition: Acquisition,
    pub params: AcquisitionParams,
}

impl Utility<BayesianOptimizer> for AcquisitionUtility {
    fn utility(&self, optimizer: &BayesianOptimizer, pool: &FeatureMatrix) -> Result<UtilityArray> {
        acquisition_values(optimizer, pool, self.acquisition, &self.params)
    }
}

pub fn acquisition_strategy(
    acquisition: Acquisition,
    params: AcquisitionParams,
) -> Composed<AcquisitionUtility, Argmax> {
    compose(AcquisitionUtility { acquisition, params }, Argmax)
}

/// Argmax of `acquisition` over `candidates`, ignoring the configured strategy.
pub fn optimizer_query(
    optimizer: &BayesianOptimizer,
    candidates: &FeatureMatrix,
    n: usize,
    acquisition: Acquisition,
    params: AcquisitionParams,
) -> Result<QuerySelection> {
    check_query_args(candidates, n)?;
    let indices = acquisition_strategy(acquisition, params).query(optimizer, candidates, n)?;
    QuerySelection::from_pool(candidates, indices)
}
