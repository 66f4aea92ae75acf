//! The fit / query / teach lifecycle around a single estimator.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureMatrix, ProbabilityMatrix, QuerySelection, Targets};
use crate::error::{AlError, Result};
use crate::estimator::Estimator;
use crate::strategy::QueryStrategy;

/// Accumulated labeled data.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub x: FeatureMatrix,
    pub y: Targets,
}

impl TrainingSet {
    pub fn new(x: FeatureMatrix, y: Targets) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(AlError::Shape(format!(
                "{} instances but {} targets",
                x.rows(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(AlError::Empty("training matrix"));
        }
        y.validate()?;
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `self ⧺ other`; feature counts and target kinds must agree.
    pub fn append(&self, other: &TrainingSet) -> Result<Self> {
        Ok(Self {
            x: self.x.stack(&other.x)?,
            y: self.y.concat(&other.y)?,
        })
    }

    /// Same-size resample with replacement.
    pub fn bootstrap(&self, seed: u64) -> Self {
        let idx = bootstrap_indices(self.len(), seed);
        Self {
            x: self.x.select(&idx),
            y: self.y.select(&idx),
        }
    }
}

pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Fits a fresh copy of `estimator` on `data` and returns it; the original is
/// left untouched so a failed refit never corrupts learner state.
pub(crate) fn refit(
    estimator: &dyn Estimator,
    data: &TrainingSet,
    bootstrap_seed: Option<u64>,
) -> Result<Box<dyn Estimator>> {
    let mut fresh = estimator.clone_box();
    match bootstrap_seed {
        Some(seed) => {
            let sample = data.bootstrap(seed);
            fresh.fit(&sample.x, &sample.y)?;
        }
        None => fresh.fit(&data.x, &data.y)?,
    }
    Ok(fresh)
}

/// Fraction of exact matches for classes, subset accuracy for multilabel,
/// coefficient of determination for continuous targets.
pub fn score_predictions(predicted: &Targets, truth: &Targets) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(AlError::Shape(format!(
            "{} predictions for {} targets",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(AlError::Empty("evaluation set"));
    }
    let n = truth.len() as f64;
    match (predicted, truth) {
        (Targets::Classes(p), Targets::Classes(t)) => {
            Ok(p.iter().zip(t).filter(|(a, b)| a == b).count() as f64 / n)
        }
        (Targets::Multilabel(p), Targets::Multilabel(t)) => {
            if p.ncols() != t.ncols() {
                return Err(AlError::Shape("label counts differ".into()));
            }
            let hits = p
                .rows()
                .into_iter()
                .zip(t.rows())
                .filter(|(a, b)| a == b)
                .count();
            Ok(hits as f64 / n)
        }
        (Targets::Continuous(p), Targets::Continuous(t)) => {
            let mean = t.iter().sum::<f64>() / n;
            let ss_res: f64 = p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum();
            let ss_tot: f64 = t.iter().map(|b| (b - mean) * (b - mean)).sum();
            if ss_tot == 0.0 {
                Ok(if ss_res == 0.0 { 1.0 } else { 0.0 })
            } else {
                Ok(1.0 - ss_res / ss_tot)
            }
        }
        (p, t) => Err(AlError::TargetKind {
            expected: t.kind(),
            found: p.kind(),
        }),
    }
}

/// An estimator, the labeled data it was fitted on, and a query strategy.
///
/// `fit` replaces the training data; `teach` appends to it. Both refit from
/// scratch. Queries never mutate the learner.
#[derive(Clone)]
pub struct ActiveLearner {
    estimator: Box<dyn Estimator>,
    training: Option<TrainingSet>,
    strategy: Arc<dyn QueryStrategy<ActiveLearner>>,
}

impl fmt::Debug for ActiveLearner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActiveLearner")
            .field("estimator", &self.estimator)
            .field("labeled", &self.n_labeled())
            .finish_non_exhaustive()
    }
}

impl ActiveLearner {
    pub fn new(
        estimator: Box<dyn Estimator>,
        strategy: impl QueryStrategy<ActiveLearner> + 'static,
    ) -> Self {
        Self::with_shared_strategy(estimator, Arc::new(strategy))
    }

    pub fn with_shared_strategy(
        estimator: Box<dyn Estimator>,
        strategy: Arc<dyn QueryStrategy<ActiveLearner>>,
    ) -> Self {
        Self {
            estimator,
            training: None,
            strategy,
        }
    }

    /// Constructs and fits in one step.
    pub fn fitted(
        estimator: Box<dyn Estimator>,
        strategy: impl QueryStrategy<ActiveLearner> + 'static,
        x: FeatureMatrix,
        y: Targets,
    ) -> Result<Self> {
        let mut learner = Self::new(estimator, strategy);
        learner.fit(x, y)?;
        Ok(learner)
    }

    pub fn estimator(&self) -> &dyn Estimator {
        self.estimator.as_ref()
    }

    pub fn training(&self) -> Option<&TrainingSet> {
        self.training.as_ref()
    }

    pub fn n_labeled(&self) -> usize {
        self.training.as_ref().map_or(0, TrainingSet::len)
    }

    pub fn is_fitted(&self) -> bool {
        self.training.is_some() && self.estimator.is_fitted()
    }

    pub fn strategy(&self) -> &Arc<dyn QueryStrategy<ActiveLearner>> {
        &self.strategy
    }

    pub fn set_strategy(&mut self, strategy: Arc<dyn QueryStrategy<ActiveLearner>>) {
        self.strategy = strategy;
    }

    /// Replaces the training data with `(x, y)` and refits.
    pub fn fit(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        self.replace(TrainingSet::new(x, y)?, None)
    }

    /// Replaces the training data and fits on a seeded resample of it.
    pub fn fit_bootstrap(&mut self, x: FeatureMatrix, y: Targets, seed: u64) -> Result<()> {
        self.replace(TrainingSet::new(x, y)?, Some(seed))
    }

    /// Appends `(x, y)` to the training data and refits on the whole set.
    pub fn teach(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        self.extend(x, y, None)
    }

    /// Appends and refits on a seeded same-size resample of the accumulated set.
    pub fn teach_bootstrap(&mut self, x: FeatureMatrix, y: Targets, seed: u64) -> Result<()> {
        self.extend(x, y, Some(seed))
    }

    fn extend(&mut self, x: FeatureMatrix, y: Targets, seed: Option<u64>) -> Result<()> {
        let new = TrainingSet::new(x, y)?;
        let data = match &self.training {
            Some(current) => current.append(&new)?,
            None => new,
        };
        self.replace(data, seed)
    }

    fn replace(&mut self, data: TrainingSet, seed: Option<u64>) -> Result<()> {
        self.estimator = refit(self.estimator.as_ref(), &data, seed)?;
        self.training = Some(data);
        Ok(())
    }

    fn ensure_fitted(&self) -> Result<()> {
        if self.is_fitted() {
            Ok(())
        } else {
            Err(AlError::NotFitted)
        }
    }

    /// Runs the learner's strategy over `pool` and returns `n` picks.
    pub fn query(&self, pool: &FeatureMatrix, n: usize) -> Result<QuerySelection> {
        self.query_with(self.strategy.as_ref(), pool, n)
    }

    /// Queries with an explicit strategy instead of the configured one.
    pub fn query_with(
        &self,
        strategy: &dyn QueryStrategy<ActiveLearner>,
        pool: &FeatureMatrix,
        n: usize,
    ) -> Result<QuerySelection> {
        check_query_args(pool, n)?;
        self.ensure_fitted()?;
        let indices = strategy.query(self, pool, n)?;
        if indices.len() != n {
            return Err(AlError::InvalidArgument(format!(
                "strategy returned {} indices, expected {n}",
                indices.len()
            )));
        }
        QuerySelection::from_pool(pool, indices)
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Targets> {
        self.ensure_fitted()?;
        self.estimator.predict(x)
    }

    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        self.ensure_fitted()?;
        self.estimator.predict_proba(x)
    }

    pub fn score(&self, x: &FeatureMatrix, y: &Targets) -> Result<f64> {
        self.ensure_fitted()?;
        if x.is_empty() {
            return Err(AlError::Empty("evaluation matrix"));
        }
        score_predictions(&self.estimator.predict(x)?, y)
    }
}

pub(crate) fn check_query_args(pool: &FeatureMatrix, n: usize) -> Result<()> {
    if pool.is_empty() {
        return Err(AlError::Empty("pool"));
    }
    if n == 0 || n > pool.rows() {
        return Err(AlError::SelectionOutOfRange {
            requested: n,
            available: pool.rows(),
        });
    }
    Ok(())
}
