//! Classifier uncertainty: least confident, margin, and entropy.

use crate::data::{FeatureMatrix, ProbabilityMatrix, QuerySelection, UtilityArray};
use crate::error::{AlError, Result};
use crate::learner::ActiveLearner;
use crate::strategy::{compose, Argmax, Composed, Selector, Utility};

/// Lower clamp for probabilities inside logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// `−Σ p ln p` with `0 · ln 0 = 0`.
pub fn entropy(p: impl IntoIterator<Item = f64>) -> f64 {
    -p.into_iter()
        .filter(|&v| v > 0.0)
        .map(|v| v * v.max(LOG_FLOOR).ln())
        .sum::<f64>()
}

fn non_empty(p: &ProbabilityMatrix) -> Result<()> {
    if p.rows() == 0 || p.n_classes() == 0 {
        Err(AlError::Empty("probability matrix"))
    } else {
        Ok(())
    }
}

/// `1 − max_c P(c|x)`.
pub fn classifier_uncertainty(p: &ProbabilityMatrix) -> Result<UtilityArray> {
    non_empty(p)?;
    UtilityArray::new(
        p.view()
            .rows()
            .into_iter()
            .map(|row| 1.0 - row.fold(0.0f64, |a, &b| a.max(b)))
            .collect(),
    )
}

/// `1 − (P_first − P_second)`, oriented so that a small margin scores high.
pub fn classifier_margin(p: &ProbabilityMatrix) -> Result<UtilityArray> {
    non_empty(p)?;
    if p.n_classes() < 2 {
        return Err(AlError::InvalidArgument(
            "margin needs at least two classes".into(),
        ));
    }
    UtilityArray::new(
        p.view()
            .rows()
            .into_iter()
            .map(|row| {
                let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for &v in row {
                    if v > first {
                        second = first;
                        first = v;
                    } else if v > second {
                        second = v;
                    }
                }
                1.0 - (first - second)
            })
            .collect(),
    )
}

/// Shannon entropy of each row, natural log.
pub fn classifier_entropy(p: &ProbabilityMatrix) -> Result<UtilityArray> {
    non_empty(p)?;
    UtilityArray::new(
        p.view()
            .rows()
            .into_iter()
            .map(|row| entropy(row.iter().copied()))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncertaintyMeasure {
    LeastConfident,
    Margin,
    Entropy,
}

impl UncertaintyMeasure {
    pub fn apply(self, p: &ProbabilityMatrix) -> Result<UtilityArray> {
        match self {
            UncertaintyMeasure::LeastConfident => classifier_uncertainty(p),
            UncertaintyMeasure::Margin => classifier_margin(p),
            UncertaintyMeasure::Entropy => classifier_entropy(p),
        }
    }
}

/// Uncertainty of the learner's own predictions as a pool utility.
#[derive(Debug, Clone, Copy)]
pub struct Uncertainty(pub UncertaintyMeasure);

impl Utility<ActiveLearner> for Uncertainty {
    fn utility(&self, learner: &ActiveLearner, pool: &FeatureMatrix) -> Result<UtilityArray> {
        self.0.apply(&learner.predict_proba(pool)?)
    }
}

/// Uncertainty sampling with the deterministic argmax selector.
pub fn uncertainty_strategy(measure: UncertaintyMeasure) -> Composed<Uncertainty, Argmax> {
    compose(Uncertainty(measure), Argmax)
}

/// `selector(measure(predict_proba(pool)), n)`.
pub fn uncertainty_sampling(
    learner: &ActiveLearner,
    pool: &FeatureMatrix,
    n: usize,
    measure: UncertaintyMeasure,
    selector: impl Selector + 'static,
) -> Result<QuerySelection> {
    learner.query_with(&compose(Uncertainty(measure), selector), pool, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Targets;
    use crate::estimators::{GaussianNb, GaussianProcess};
    use proptest::prelude::*;

    fn p(rows: &[&[f64]]) -> ProbabilityMatrix {
        ProbabilityMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn least_confident_examples() {
        assert_eq!(classifier_uncertainty(&p(&[&[1.0, 0.0, 0.0]])).unwrap().values(), &[0.0]);
        assert_eq!(classifier_uncertainty(&p(&[&[0.5, 0.5]])).unwrap().values(), &[0.5]);
        let u = classifier_uncertainty(&p(&[&[0.1, 0.9], &[0.6, 0.4]])).unwrap();
        assert!((u.values()[0] - 0.1).abs() < 1e-12 && (u.values()[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(classifier_margin(&p(&[&[1.0, 0.0]])).unwrap().values(), &[0.0]);
        assert_eq!(classifier_margin(&p(&[&[0.5, 0.5]])).unwrap().values(), &[1.0]);
        assert!((classifier_margin(&p(&[&[0.3, 0.7]])).unwrap().values()[0] - 0.6).abs() < 1e-12);
        assert!(classifier_margin(&p(&[&[1.0]])).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(classifier_entropy(&p(&[&[1.0, 0.0]])).unwrap().values(), &[0.0]);
        let h = classifier_entropy(&p(&[&[0.5, 0.5]])).unwrap().values()[0];
        assert!((h - std::f64::consts::LN_2).abs() < 1e-9);
        let h = classifier_entropy(&p(&[&[0.25, 0.75]])).unwrap().values()[0];
        assert!((h - 0.562335).abs() < 1e-6);
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let empty = ProbabilityMatrix::new(ndarray::Array2::zeros((0, 2))).unwrap();
        assert!(classifier_uncertainty(&empty).is_err());
        assert!(classifier_entropy(&empty).is_err());
    }

    fn mirrored_learner() -> ActiveLearner {
        let x = FeatureMatrix::from_rows(&[[-2.0, 0.5], [-1.0, -0.5], [2.0, -0.5], [1.0, 0.5]]).unwrap();
        ActiveLearner::fitted(
            Box::new(GaussianNb::new()),
            uncertainty_strategy(UncertaintyMeasure::LeastConfident),
            x,
            Targets::Classes(vec![0, 0, 1, 1]),
        )
        .unwrap()
    }

    #[test]
    fn boundary_point_is_queried_first_under_every_measure() {
        let learner = mirrored_learner();
        let pool = FeatureMatrix::from_rows(&[[-1.5, 0.0], [0.0, 0.0], [1.7, 0.1], [0.9, 0.0]]).unwrap();
        for m in [UncertaintyMeasure::LeastConfident, UncertaintyMeasure::Margin, UncertaintyMeasure::Entropy] {
            let sel = uncertainty_sampling(&learner, &pool, 1, m, Argmax).unwrap();
            assert_eq!(sel.indices, vec![1], "{m:?}");
        }
        let all = learner.query(&pool, 4).unwrap();
        let u = classifier_uncertainty(&learner.predict_proba(&pool).unwrap()).unwrap();
        for w in all.indices.windows(2) {
            assert!(u.values()[w[0]] >= u.values()[w[1]]);
        }
    }

    #[test]
    fn identical_rows_tie_to_lower_index() {
        let learner = mirrored_learner();
        let pool = FeatureMatrix::from_rows(&[[3.0, 0.0], [0.2, 0.0], [0.2, 0.0]]).unwrap();
        assert_eq!(learner.query(&pool, 2).unwrap().indices, vec![1, 2]);
    }

    #[test]
    fn non_probabilistic_estimator_is_rejected() {
        let x = FeatureMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let learner = ActiveLearner::fitted(
            Box::new(GaussianProcess::default()),
            uncertainty_strategy(UncertaintyMeasure::Entropy),
            x.clone(),
            Targets::Continuous(vec![0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(learner.query(&x, 1), Err(AlError::MissingCapability { .. })));
    }

    fn random_rows(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, k), 1..30).prop_map(|rows| {
            rows.into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.iter().map(|v| v / s).collect()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn measures_are_permutation_equivariant(rows in random_rows(3), rot in 0usize..30) {
            let n = rows.len();
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
            for m in [UncertaintyMeasure::LeastConfident, UncertaintyMeasure::Margin, UncertaintyMeasure::Entropy] {
                let a = m.apply(&ProbabilityMatrix::from_rows(&rows).unwrap()).unwrap();
                let b = m.apply(&ProbabilityMatrix::from_rows(&permuted).unwrap()).unwrap();
                for (j, &i) in perm.iter().enumerate() {
                    prop_assert_eq!(a.values()[i], b.values()[j]);
                }
            }
        }
    }
}
