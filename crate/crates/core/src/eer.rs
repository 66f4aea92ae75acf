//! Expected error reduction: one-step lookahead over every (candidate, label)
//! pair.
//!
//! For candidate `x_i` the expected future error is
//! `Σ_c P(c|x_i) · Err(model refitted on train ∪ {(x_i, c)})`, where `Err`
//! sums a per-instance loss over the whole pool. The utility is its negation.
//! Lookahead refits are private copies; the learner is never mutated.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureMatrix, ProbabilityMatrix, Targets, UtilityArray};
use crate::error::{AlError, Result};
use crate::learner::{refit, ActiveLearner, TrainingSet};
use crate::parallel::try_map_range;
use crate::strategy::{compose, Argmax, Composed, Utility};
use crate::uncertainty::entropy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EerLoss {
    /// `1 − max_c P(c|x)` summed over the pool.
    Binary,
    /// Entropy of `P(·|x)` summed over the pool.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerConfig {
    pub loss: EerLoss,
    /// Fraction of pool instances evaluated as candidates, in `(0, 1]`.
    pub subsample_fraction: f64,
    pub seed: u64,
}

impl Default for EerConfig {
    fn default() -> Self {
        Self {
            loss: EerLoss::Binary,
            subsample_fraction: 1.0,
            seed: 0,
        }
    }
}

impl EerConfig {
    pub fn with_loss(loss: EerLoss) -> Self {
        Self {
            loss,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.subsample_fraction > 0.0 && self.subsample_fraction <= 1.0 {
            Ok(())
        } else {
            Err(AlError::InvalidArgument(format!(
                "subsample fraction must be in (0, 1], got {}",
                self.subsample_fraction
            )))
        }
    }
}

/// Total pool loss under `p`.
pub fn pool_error(p: &ProbabilityMatrix, loss: EerLoss) -> f64 {
    p.view()
        .rows()
        .into_iter()
        .map(|row| match loss {
            EerLoss::Binary => 1.0 - row.fold(0.0f64, |a, &b| a.max(b)),
            EerLoss::Log => entropy(row.iter().copied()),
        })
        .sum()
}

/// Candidate mask: `true` marks instances left out of the lookahead.
fn candidate_exclusions(pool_rows: usize, config: &EerConfig) -> Vec<bool> {
    if config.subsample_fraction >= 1.0 {
        return vec![false; pool_rows];
    }
    let keep = ((pool_rows as f64 * config.subsample_fraction).ceil() as usize).clamp(1, pool_rows);
    let mut order: Vec<usize> = (0..pool_rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut excluded = vec![true; pool_rows];
    for &i in &order[..keep] {
        excluded[i] = false;
    }
    excluded
}

/// Negated expected pool error after labeling each candidate.
pub fn expected_error_reduction(
    learner: &ActiveLearner,
    pool: &FeatureMatrix,
    config: &EerConfig,
) -> Result<UtilityArray> {
    config.validate()?;
    if pool.is_empty() {
        return Err(AlError::Empty("pool"));
    }
    let training = learner.training().ok_or(AlError::NotFitted)?;
    let current = learner.predict_proba(pool)?;
    let classes = current.classes().to_vec();
    let excluded = candidate_exclusions(pool.rows(), config);

    let estimator = learner.estimator();
    let values = try_map_range(pool.rows(), |i| {
        if excluded[i] {
            return Ok(0.0);
        }
        let x_i = pool.select(&[i]);
        let mut expected = 0.0;
        for (c, &class) in classes.iter().enumerate() {
            let weight = current.row(i)[c];
            if weight == 0.0 {
                continue;
            }
            let extra = TrainingSet::new(x_i.clone(), Targets::Classes(vec![class]))?;
            let model = refit(estimator, &training.append(&extra)?, None)?;
            expected += weight * pool_error(&model.predict_proba(pool)?, config.loss);
        }
        Ok(-expected)
    })?;
    UtilityArray::with_exclusions(values, excluded)
}

/// Expected error reduction as a pool utility.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpectedErrorReduction(pub EerConfig);

impl Utility<ActiveLearner> for ExpectedErrorReduction {
    fn utility(&self, learner: &ActiveLearner, pool: &FeatureMatrix) -> Result<UtilityArray> {
        expected_error_reduction(learner, pool, &self.0)
    }
}

pub fn eer_strategy(config: EerConfig) -> Composed<ExpectedErrorReduction, Argmax> {
    compose(ExpectedErrorReduction(config), Argmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{GaussianNb, GaussianProcess, KnnClassifier};
    use crate::uncertainty::{uncertainty_strategy, UncertaintyMeasure};

    fn learner(config: EerConfig) -> ActiveLearner {
        let x = FeatureMatrix::from_rows(&[[-2.0], [-1.0], [1.0], [2.5]]).unwrap();
        ActiveLearner::fitted(Box::new(GaussianNb::new()), eer_strategy(config), x, Targets::Classes(vec![0, 0, 1, 1]))
            .unwrap()
    }

    #[test]
    fn single_instance_pool() {
        let pool = FeatureMatrix::from_rows(&[[0.3]]).unwrap();
        for loss in [EerLoss::Binary, EerLoss::Log] {
            let cfg = EerConfig { loss, subsample_fraction: 0.1, seed: 9 };
            assert_eq!(learner(cfg).query(&pool, 1).unwrap().indices, vec![0]);
        }
    }

    #[test]
    fn full_fraction_ignores_seed() {
        let pool = FeatureMatrix::from_rows(&[[0.3], [-0.2], [1.7], [3.0]]).unwrap();
        let a = expected_error_reduction(&learner(EerConfig::default()), &pool, &EerConfig { seed: 1, ..EerConfig::default() }).unwrap();
        let b = expected_error_reduction(&learner(EerConfig::default()), &pool, &EerConfig { seed: 2, ..EerConfig::default() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subsample_excludes_and_never_selects_excluded() {
        let pool = FeatureMatrix::from_rows(&[[0.3], [-0.2], [1.7], [3.0], [0.0], [0.9]]).unwrap();
        let cfg = EerConfig { loss: EerLoss::Log, subsample_fraction: 0.5, seed: 4 };
        let u = expected_error_reduction(&learner(cfg), &pool, &cfg).unwrap();
        assert_eq!(u.eligible().count(), 3);
        let picks = learner(cfg).query(&pool, 3).unwrap();
        assert!(picks.indices.iter().all(|&i| !u.is_excluded(i)));
        assert!(learner(cfg).query(&pool, 4).is_err());
        assert!(u.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn duplicate_training_point_keeps_log_error() {
        // A 1-NN model breaks distance ties toward the earlier training row,
        // so re-adding a stored point under any label changes nothing.
        let x = FeatureMatrix::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
        let cfg = EerConfig::with_loss(EerLoss::Log);
        let l = ActiveLearner::fitted(
            Box::new(KnnClassifier::new(1).unwrap()),
            eer_strategy(cfg),
            x,
            Targets::Classes(vec![0, 1, 0]),
        )
        .unwrap();
        let pool = FeatureMatrix::from_rows(&[[1.0], [0.4], [2.2]]).unwrap();
        let u = expected_error_reduction(&l, &pool, &cfg).unwrap();
        let current = pool_error(&l.predict_proba(&pool).unwrap(), EerLoss::Log);
        assert_eq!(-u.values()[0], current);
    }

    #[test]
    fn rejects_bad_configs_and_estimators() {
        let pool = FeatureMatrix::from_rows(&[[0.0]]).unwrap();
        let bad = EerConfig { subsample_fraction: 0.0, ..EerConfig::default() };
        assert!(expected_error_reduction(&learner(EerConfig::default()), &pool, &bad).is_err());
        let unfitted = ActiveLearner::new(Box::new(GaussianNb::new()), uncertainty_strategy(UncertaintyMeasure::Margin));
        assert_eq!(
            expected_error_reduction(&unfitted, &pool, &EerConfig::default()).unwrap_err(),
            AlError::NotFitted
        );
        let gp = ActiveLearner::fitted(
            Box::new(GaussianProcess::default()),
            eer_strategy(EerConfig::default()),
            pool.clone(),
            Targets::Continuous(vec![1.0]),
        )
        .unwrap();
        assert!(matches!(
            expected_error_reduction(&gp, &pool, &EerConfig::default()),
            Err(AlError::MissingCapability { .. })
        ));
    }
}
