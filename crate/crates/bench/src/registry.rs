//! String-keyed strategy and estimator registries.

use al_core::estimators::{GaussianNb, GaussianProcess, KnnClassifier, LogisticOvr};
use al_core::{
    disagreement_strategy, eer_strategy, multilabel_strategy, uncertainty_strategy, ActiveLearner, Argmax,
    Committee, DensityWeighted, Disagreement, EerConfig, EerLoss, Estimator, FeatureMatrix, MultilabelMeasure,
    ProbabilityMatrix, QuerySelection, RandomSampling, RankedBatch, SimilarityKind, Targets, Uncertainty,
    UncertaintyMeasure,
};

use crate::error::{BenchError, Result};

pub const STRATEGIES: [&str; 18] = [
    "random",
    "least_confident",
    "margin",
    "entropy",
    "qbc_vote",
    "qbc_consensus",
    "qbc_kl",
    "eer_binary",
    "eer_log",
    "ranked_batch",
    "density_lc",
    "svm_bin_min",
    "max_loss",
    "mean_max_loss",
    "min_conf",
    "avg_conf",
    "min_score",
    "avg_score",
];

/// Short names accepted in addition to [`STRATEGIES`].
pub const ALIASES: [(&str, &str); 2] = [("qbc", "qbc_vote"), ("eer", "eer_binary")];

pub const ESTIMATORS: [&str; 4] = ["gnb", "knn", "logistic_ovr", "gp"];

pub const COMMITTEE_SIZE: usize = 3;
pub const KNN_NEIGHBOURS: usize = 3;

pub fn canonical_strategy(name: &str) -> Result<&'static str> {
    if let Some(&(_, target)) = ALIASES.iter().find(|(alias, _)| *alias == name) {
        return Ok(target);
    }
    STRATEGIES.iter().copied().find(|s| *s == name).ok_or_else(|| {
        BenchError::Usage(format!(
            "unknown strategy `{name}` (valid: {}; aliases: {})",
            STRATEGIES.join(", "),
            ALIASES.map(|(a, t)| format!("{a}={t}")).join(", ")
        ))
    })
}

pub fn make_estimator(name: &str) -> Result<Box<dyn Estimator>> {
    Ok(match name {
        "gnb" => Box::new(GaussianNb::new()),
        "knn" => Box::new(KnnClassifier::new(KNN_NEIGHBOURS)?),
        "logistic_ovr" => Box::new(LogisticOvr::new()),
        "gp" => Box::new(GaussianProcess::default()),
        other => {
            return Err(BenchError::Usage(format!(
                "unknown estimator `{other}` (valid: {})",
                ESTIMATORS.join(", ")
            )))
        }
    })
}

/// Checks both names without building anything.
pub fn validate_names(strategy: &str, estimator: &str) -> Result<()> {
    canonical_strategy(strategy)?;
    make_estimator(estimator).map(|_| ())
}

/// A single learner or a bootstrap committee, driven through one interface.
#[derive(Debug, Clone)]
pub enum Learner {
    Single(ActiveLearner),
    Committee {
        committee: Committee,
        seed: u64,
        rounds: u64,
    },
}

fn committee_seed(seed: u64, round: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(round.wrapping_mul(1_000_003))
}

impl Learner {
    /// Builds an unfitted learner. `seed` drives random sampling, EER
    /// subsampling, and committee bootstraps.
    pub fn build(strategy: &str, estimator: &str, seed: u64) -> Result<Self> {
        let strategy = canonical_strategy(strategy)?;
        let est = make_estimator(estimator)?;
        let single = |s| Ok(Learner::Single(ActiveLearner::with_shared_strategy(est.clone(), s)));
        use std::sync::Arc;
        match strategy {
            "random" => single(Arc::new(RandomSampling { seed })),
            "least_confident" => single(Arc::new(uncertainty_strategy(UncertaintyMeasure::LeastConfident))),
            "margin" => single(Arc::new(uncertainty_strategy(UncertaintyMeasure::Margin))),
            "entropy" => single(Arc::new(uncertainty_strategy(UncertaintyMeasure::Entropy))),
            "eer_binary" | "eer_log" => {
                let loss = if strategy == "eer_log" { EerLoss::Log } else { EerLoss::Binary };
                single(Arc::new(eer_strategy(EerConfig { loss, subsample_fraction: 1.0, seed })))
            }
            "ranked_batch" => single(Arc::new(RankedBatch::default())),
            "density_lc" => single(Arc::new(al_core::compose(
                DensityWeighted {
                    base: Uncertainty(UncertaintyMeasure::LeastConfident),
                    kind: SimilarityKind::EuclideanInverse,
                    beta: 1.0,
                },
                Argmax,
            ))),
            "qbc_vote" | "qbc_consensus" | "qbc_kl" => {
                let measure = match strategy {
                    "qbc_vote" => Disagreement::VoteEntropy,
                    "qbc_consensus" => Disagreement::ConsensusEntropy,
                    _ => Disagreement::MaxKl,
                };
                let members = (0..COMMITTEE_SIZE)
                    .map(|_| ActiveLearner::new(est.clone(), RandomSampling { seed }))
                    .collect();
                Ok(Learner::Committee {
                    committee: Committee::new(members, disagreement_strategy(measure))?,
                    seed,
                    rounds: 0,
                })
            }
            multilabel => {
                let measure = match multilabel {
                    "svm_bin_min" => MultilabelMeasure::SvmBinaryMinimum,
                    "max_loss" => MultilabelMeasure::MaxLoss,
                    "mean_max_loss" => MultilabelMeasure::MeanMaxLoss,
                    "min_conf" => MultilabelMeasure::MinConfidence,
                    "avg_conf" => MultilabelMeasure::AvgConfidence,
                    "min_score" => MultilabelMeasure::MinScore,
                    "avg_score" => MultilabelMeasure::AvgScore,
                    other => unreachable!("registry entry `{other}` has no constructor"),
                };
                single(Arc::new(multilabel_strategy(measure)))
            }
        }
    }

    pub fn fit(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        match self {
            Learner::Single(l) => l.fit(x, y)?,
            Learner::Committee { committee, seed, rounds } => {
                committee.fit_bootstrap(x, y, committee_seed(*seed, *rounds))?;
                *rounds += 1;
            }
        }
        Ok(())
    }

    pub fn teach(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        match self {
            Learner::Single(l) => l.teach(x, y)?,
            Learner::Committee { committee, seed, rounds } => {
                committee.teach_bootstrap(x, y, committee_seed(*seed, *rounds))?;
                *rounds += 1;
            }
        }
        Ok(())
    }

    pub fn query(&self, pool: &FeatureMatrix, n: usize) -> Result<QuerySelection> {
        Ok(match self {
            Learner::Single(l) => l.query(pool, n)?,
            Learner::Committee { committee, .. } => committee.query(pool, n)?,
        })
    }

    pub fn score(&self, x: &FeatureMatrix, y: &Targets) -> Result<f64> {
        Ok(match self {
            Learner::Single(l) => l.score(x, y)?,
            Learner::Committee { committee, .. } => committee.score(x, y)?,
        })
    }

    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        Ok(match self {
            Learner::Single(l) => l.predict_proba(x)?,
            Learner::Committee { committee, .. } => committee.predict_proba(x)?,
        })
    }

    pub fn n_labeled(&self) -> usize {
        match self {
            Learner::Single(l) => l.n_labeled(),
            Learner::Committee { committee, .. } => committee.members()[0].n_labeled(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_builds() {
        for s in STRATEGIES {
            for e in ["gnb", "logistic_ovr"] {
                Learner::build(s, e, 0).unwrap();
            }
        }
        assert_eq!(canonical_strategy("qbc").unwrap(), "qbc_vote");
        assert_eq!(canonical_strategy("eer").unwrap(), "eer_binary");
    }

    #[test]
    fn unknown_names_list_the_valid_ones() {
        let err = Learner::build("foo", "gnb", 0).unwrap_err();
        assert!(err.to_string().contains("least_confident") && err.exit_code() == 1);
        let err = Learner::build("margin", "svm", 0).unwrap_err();
        assert!(err.to_string().contains("logistic_ovr"));
    }

    #[test]
    fn committee_rounds_reseed() {
        let x = FeatureMatrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let mut l = Learner::build("qbc_kl", "gnb", 5).unwrap();
        l.fit(x.clone(), Targets::Classes(vec![0, 0, 1, 1])).unwrap();
        l.teach(x.select(&[0]), Targets::Classes(vec![0])).unwrap();
        assert_eq!(l.n_labeled(), 5);
        assert!(matches!(l, Learner::Committee { rounds: 2, .. }));
    }
}
