//! Stream-based sampling: instances arrive one at a time and are queried or
//! skipped immediately. Deciding never mutates the learner.

use crate::committee::{vote_entropy, Committee};
use crate::data::FeatureMatrix;
use crate::error::{AlError, Result};
use crate::learner::ActiveLearner;
use crate::uncertainty::UncertaintyMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Query,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamDecision {
    pub verdict: Verdict,
    pub utility: f64,
}

impl StreamDecision {
    pub fn is_query(&self) -> bool {
        self.verdict == Verdict::Query
    }
}

fn single_row(instance: &[f64]) -> Result<FeatureMatrix> {
    FeatureMatrix::from_rows(&[instance])
}

/// Queries iff `measure(instance) ≥ threshold`.
pub fn stream_decide(
    learner: &ActiveLearner,
    instance: &[f64],
    measure: UncertaintyMeasure,
    threshold: f64,
) -> Result<StreamDecision> {
    if !threshold.is_finite() {
        return Err(AlError::NonFinite("threshold"));
    }
    let p = learner.predict_proba(&single_row(instance)?)?;
    let utility = measure.apply(&p)?.values()[0];
    let verdict = if utility >= threshold {
        Verdict::Query
    } else {
        Verdict::Skip
    };
    Ok(StreamDecision { verdict, utility })
}

/// Query by disagreement: queries iff the members' hard predictions differ.
/// The utility is the vote entropy, which is 0 on unanimity.
pub fn qbd_decide(committee: &Committee, instance: &[f64]) -> Result<StreamDecision> {
    let x = single_row(instance)?;
    let votes = committee.vote(&x)?;
    let row = votes.row(0);
    if row.iter().all(|&v| v == row[0]) {
        return Ok(StreamDecision {
            verdict: Verdict::Skip,
            utility: 0.0,
        });
    }
    Ok(StreamDecision {
        verdict: Verdict::Query,
        utility: vote_entropy(committee, &x)?.values()[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::committee::disagreement_strategy;
    use crate::committee::Disagreement;
    use crate::data::Targets;
    use crate::estimators::{GaussianNb, KnnClassifier};
    use crate::uncertainty::uncertainty_strategy;
    use proptest::prelude::*;

    fn gnb() -> ActiveLearner {
        let x = FeatureMatrix::from_rows(&[[-2.0], [-1.0], [1.0], [2.0]]).unwrap();
        ActiveLearner::fitted(
            Box::new(GaussianNb::new()),
            uncertainty_strategy(UncertaintyMeasure::LeastConfident),
            x,
            Targets::Classes(vec![0, 0, 1, 1]),
        )
        .unwrap()
    }

    const MEASURES: [UncertaintyMeasure; 3] = [
        UncertaintyMeasure::LeastConfident,
        UncertaintyMeasure::Margin,
        UncertaintyMeasure::Entropy,
    ];

    #[test]
    fn boundary_instance_is_queried() {
        let d = stream_decide(&gnb(), &[0.0], UncertaintyMeasure::LeastConfident, 0.4).unwrap();
        assert_eq!(d.verdict, Verdict::Query);
        assert!((d.utility - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thresholds_at_the_bounds() {
        let l = gnb();
        for x in [-3.0, -0.5, 0.0, 0.7, 5.0] {
            for m in MEASURES {
                assert!(stream_decide(&l, &[x], m, 0.0).unwrap().is_query());
            }
            let d = stream_decide(&l, &[x], UncertaintyMeasure::Entropy, std::f64::consts::LN_2 + 1e-9).unwrap();
            assert_eq!(d.verdict, Verdict::Skip);
        }
        assert!(stream_decide(&l, &[0.0], UncertaintyMeasure::Entropy, f64::NAN).is_err());
    }

    #[test]
    fn unfitted_learner_errors() {
        let l = ActiveLearner::new(Box::new(GaussianNb::new()), uncertainty_strategy(UncertaintyMeasure::Entropy));
        assert_eq!(
            stream_decide(&l, &[0.0], UncertaintyMeasure::Entropy, 0.1).unwrap_err(),
            AlError::NotFitted
        );
    }

    fn memorizer(x: &[[f64; 1]], y: &[usize]) -> ActiveLearner {
        ActiveLearner::fitted(
            Box::new(KnnClassifier::new(1).unwrap()),
            uncertainty_strategy(UncertaintyMeasure::LeastConfident),
            FeatureMatrix::from_rows(x).unwrap(),
            Targets::Classes(y.to_vec()),
        )
        .unwrap()
    }

    #[test]
    fn qbd_examples() {
        let same = Committee::new(
            vec![memorizer(&[[0.0], [3.0]], &[0, 1]), memorizer(&[[0.0], [3.0]], &[0, 1])],
            disagreement_strategy(Disagreement::VoteEntropy),
        )
        .unwrap();
        for x in [-1.0, 1.4, 2.0, 9.0] {
            let d = qbd_decide(&same, &[x]).unwrap();
            assert_eq!(d, StreamDecision { verdict: Verdict::Skip, utility: 0.0 });
        }
        let opposed = Committee::new(
            vec![memorizer(&[[0.0]], &[0]), memorizer(&[[0.0]], &[1])],
            disagreement_strategy(Disagreement::VoteEntropy),
        )
        .unwrap();
        let d = qbd_decide(&opposed, &[0.3]).unwrap();
        assert_eq!(d.verdict, Verdict::Query);
        assert!((d.utility - std::f64::consts::LN_2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn queried_sets_shrink_as_threshold_rises(stream in proptest::collection::vec(-4.0f64..4.0, 1..60),
                                                 t1 in 0.0f64..0.7, dt in 0.0f64..0.5) {
            let l = gnb();
            for m in MEASURES {
                for &x in &stream {
                    let hi = stream_decide(&l, &[x], m, t1 + dt).unwrap();
                    let lo = stream_decide(&l, &[x], m, t1).unwrap();
                    prop_assert!(!hi.is_query() || lo.is_query());
                    prop_assert_eq!(hi.is_query(), hi.utility >= t1 + dt);
                }
            }
        }
    }
}
