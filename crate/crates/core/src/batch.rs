//! Ranked batch-mode selection and information-density weighting.

use ndarray::ArrayView1;

use crate::data::{FeatureMatrix, QuerySelection, UtilityArray};
use crate::error::{AlError, Result};
use crate::learner::{check_query_args, ActiveLearner};
use crate::parallel::map_range;
use crate::strategy::{QueryStrategy, Utility};
use crate::uncertainty::classifier_uncertainty;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SimilarityKind {
    /// `1 / (1 + ‖a − b‖₂)`, in `(0, 1]`.
    #[default]
    EuclideanInverse,
    /// `a·b / (‖a‖‖b‖)`, in `[−1, 1]`; 0 when either vector is zero.
    Cosine,
}

pub fn similarity(a: ArrayView1<f64>, b: ArrayView1<f64>, kind: SimilarityKind) -> Result<f64> {
    if a.len() != b.len() {
        return Err(AlError::Shape(format!(
            "cannot compare rows of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(similarity_unchecked(a, b, kind))
}

fn similarity_unchecked(a: ArrayView1<f64>, b: ArrayView1<f64>, kind: SimilarityKind) -> f64 {
    match kind {
        SimilarityKind::EuclideanInverse => {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            1.0 / (1.0 + d2.sqrt())
        }
        SimilarityKind::Cosine => {
            let na = a.dot(&a).sqrt();
            let nb = b.dot(&b).sqrt();
            if na == 0.0 || nb == 0.0 {
                0.0
            } else {
                (a.dot(&b) / (na * nb)).clamp(-1.0, 1.0)
            }
        }
    }
}

/// Mean similarity of each pool row to every pool row, itself included.
pub fn information_density(pool: &FeatureMatrix, kind: SimilarityKind) -> Result<Vec<f64>> {
    if pool.is_empty() {
        return Err(AlError::Empty("pool"));
    }
    let p = pool.rows() as f64;
    Ok(map_range(pool.rows(), |i| {
        (0..pool.rows())
            .map(|j| similarity_unchecked(pool.row(i), pool.row(j), kind))
            .sum::<f64>()
            / p
    }))
}

/// `base_i · density_i^β`.
pub fn density_weighted_utility(base: &UtilityArray, density: &[f64], beta: f64) -> Result<UtilityArray> {
    if base.len() != density.len() {
        return Err(AlError::Shape(format!(
            "{} utilities but {} densities",
            base.len(),
            density.len()
        )));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(AlError::InvalidArgument(format!("β must be ≥ 0, got {beta}")));
    }
    if beta.fract() != 0.0 && density.iter().any(|&d| d < 0.0) {
        return Err(AlError::InvalidArgument(
            "negative density cannot be raised to a fractional power".into(),
        ));
    }
    if beta == 0.0 {
        return Ok(base.clone());
    }
    let values = base
        .values()
        .iter()
        .zip(density)
        .map(|(u, d)| u * d.powf(beta))
        .collect();
    let excluded = (0..base.len()).map(|i| base.is_excluded(i)).collect();
    UtilityArray::with_exclusions(values, excluded)
}

/// Wraps a base utility with an information-density weight.
#[derive(Debug, Clone, Copy)]
pub struct DensityWeighted<U> {
    pub base: U,
    pub kind: SimilarityKind,
    pub beta: f64,
}

impl<L: ?Sized, U: Utility<L>> Utility<L> for DensityWeighted<U> {
    fn utility(&self, learner: &L, pool: &FeatureMatrix) -> Result<UtilityArray> {
        let base = self.base.utility(learner, pool)?;
        let density = information_density(pool, self.kind)?;
        density_weighted_utility(&base, &density, self.beta)
    }
}

/// One greedy pick of a ranked batch, with the score it won on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedPick {
    pub index: usize,
    pub score: f64,
}

/// Greedy batch that trades least-confident uncertainty against
/// dissimilarity to everything labeled so far.
///
/// At each step, with `u` unpicked pool rows and `l` labeled rows (`labeled`
/// plus earlier picks), `α = u / (u + l)` and each candidate scores
/// `α·(1 − Φ) + (1 − α)·U`, where `Φ` is its largest similarity to a labeled
/// row (0 when none exist). Score ties go to the higher uncertainty, then the
/// lower index; with nothing labeled, `α = 1` and the first pick is the most
/// uncertain row.
pub fn ranked_batch_picks(
    learner: &ActiveLearner,
    pool: &FeatureMatrix,
    labeled: &FeatureMatrix,
    n: usize,
    kind: SimilarityKind,
) -> Result<Vec<RankedPick>> {
    check_query_args(pool, n)?;
    if !labeled.is_empty() && labeled.cols() != pool.cols() {
        return Err(AlError::Shape(format!(
            "labeled rows have {} features, pool has {}",
            labeled.cols(),
            pool.cols()
        )));
    }
    let uncertainty = classifier_uncertainty(&learner.predict_proba(pool)?)?;
    let uncertainty = uncertainty.values();

    let mut max_sim: Vec<f64> = map_range(pool.rows(), |i| {
        (0..labeled.rows())
            .map(|j| similarity_unchecked(pool.row(i), labeled.row(j), kind))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let mut picked = vec![false; pool.rows()];
    let mut picks = Vec::with_capacity(n);

    for step in 0..n {
        let remaining = pool.rows() - step;
        let labeled_count = labeled.rows() + step;
        let alpha = remaining as f64 / (remaining + labeled_count) as f64;
        let mut best: Option<RankedPick> = None;
        for i in (0..pool.rows()).filter(|&i| !picked[i]) {
            let phi = if labeled_count == 0 { 0.0 } else { max_sim[i] };
            let score = alpha * (1.0 - phi) + (1.0 - alpha) * uncertainty[i];
            let better = best.is_none_or(|b| {
                score > b.score || (score == b.score && uncertainty[i] > uncertainty[b.index])
            });
            if better {
                best = Some(RankedPick { index: i, score });
            }
        }
        let pick = best.expect("at least one unpicked row");
        picked[pick.index] = true;
        let chosen = pool.row(pick.index);
        let updates = map_range(pool.rows(), |i| similarity_unchecked(pool.row(i), chosen, kind));
        for (m, s) in max_sim.iter_mut().zip(updates) {
            *m = m.max(s);
        }
        picks.push(pick);
    }
    Ok(picks)
}

pub fn ranked_batch(
    learner: &ActiveLearner,
    pool: &FeatureMatrix,
    labeled: &FeatureMatrix,
    n: usize,
    kind: SimilarityKind,
) -> Result<QuerySelection> {
    let picks = ranked_batch_picks(learner, pool, labeled, n, kind)?;
    QuerySelection::from_pool(pool, picks.iter().map(|p| p.index).collect())
}

/// Ranked batch-mode against the learner's own training data.
#[derive(Debug, Clone, Copy, Default)]
pub struct RankedBatch {
    pub kind: SimilarityKind,
}

impl QueryStrategy<ActiveLearner> for RankedBatch {
    fn query(&self, learner: &ActiveLearner, pool: &FeatureMatrix, n: usize) -> Result<Vec<usize>> {
        let labeled = learner
            .training()
            .map(|t| t.x.clone())
            .unwrap_or_else(|| FeatureMatrix::empty(pool.cols()));
        Ok(ranked_batch_picks(learner, pool, &labeled, n, self.kind)?
            .into_iter()
            .map(|p| p.index)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Targets;
    use crate::estimators::GaussianNb;
    use ndarray::array;

    #[test]
    fn similarity_examples() {
        let e = SimilarityKind::EuclideanInverse;
        assert_eq!(similarity(array![1.0, 2.0].view(), array![1.0, 2.0].view(), e).unwrap(), 1.0);
        assert!((similarity(array![0.0, 0.0].view(), array![3.0, 4.0].view(), e).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let c = SimilarityKind::Cosine;
        assert_eq!(similarity(array![1.0, 0.0].view(), array![0.0, 1.0].view(), c).unwrap(), 0.0);
        assert_eq!(similarity(array![0.0, 0.0].view(), array![0.0, 1.0].view(), c).unwrap(), 0.0);
        assert!(similarity(array![1.0].view(), array![0.0, 1.0].view(), c).is_err());
    }

    #[test]
    fn density_examples() {
        let same = FeatureMatrix::from_rows(&[[2.0, 1.0]; 4]).unwrap();
        assert_eq!(information_density(&same, SimilarityKind::EuclideanInverse).unwrap(), vec![1.0; 4]);
        let one = FeatureMatrix::from_rows(&[[5.0]]).unwrap();
        assert_eq!(information_density(&one, SimilarityKind::EuclideanInverse).unwrap(), vec![1.0]);
        let three = FeatureMatrix::from_rows(&[[0.0, 0.0], [3.0, 4.0], [0.0, 1.0]]).unwrap();
        let d = information_density(&three, SimilarityKind::EuclideanInverse).unwrap();
        let mut expected = [0.0; 3];
        for (i, e) in expected.iter_mut().enumerate() {
            for j in 0..3 {
                let (a, b) = (three.row(i), three.row(j));
                let dist = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                *e += 1.0 / (1.0 + dist) / 3.0;
            }
        }
        for (got, want) in d.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(information_density(&FeatureMatrix::empty(2), SimilarityKind::Cosine).is_err());
    }

    #[test]
    fn weighting_examples() {
        let base = UtilityArray::new(vec![0.5, 0.2]).unwrap();
        assert_eq!(density_weighted_utility(&base, &[0.3, 0.9], 0.0).unwrap(), base);
        assert_eq!(density_weighted_utility(&base, &[1.0, 1.0], 1.0).unwrap(), base);
        let w = density_weighted_utility(&base, &[0.25, 1.0], 2.0).unwrap();
        assert!((w.values()[0] - 0.03125).abs() < 1e-15 && (w.values()[1] - 0.2).abs() < 1e-15);
        assert!(density_weighted_utility(&base, &[-0.5, 1.0], 0.5).is_err());
        assert!(density_weighted_utility(&base, &[-0.5, 1.0], 2.0).is_ok());
        assert!(density_weighted_utility(&base, &[1.0], 1.0).is_err());
    }

    fn learner() -> ActiveLearner {
        let x = FeatureMatrix::from_rows(&[[-2.0], [-1.0], [1.0], [2.0]]).unwrap();
        ActiveLearner::fitted(Box::new(GaussianNb::new()), RankedBatch::default(), x, Targets::Classes(vec![0, 0, 1, 1]))
            .unwrap()
    }

    #[test]
    fn first_pick_is_most_uncertain_without_labeled_rows() {
        let l = learner();
        let pool = FeatureMatrix::from_rows(&[[-1.8], [0.3], [1.2], [0.05], [2.2]]).unwrap();
        let picks = ranked_batch_picks(&l, &pool, &FeatureMatrix::empty(1), 3, SimilarityKind::EuclideanInverse).unwrap();
        let u = classifier_uncertainty(&l.predict_proba(&pool).unwrap()).unwrap();
        let top = crate::strategy::select_argmax(u.values(), 1).unwrap()[0];
        assert_eq!(picks[0].index, top);
        let alpha = 1.0;
        assert!((picks[0].score - (alpha + (1.0 - alpha) * u.values()[top])).abs() < 1e-15);
    }

    #[test]
    fn duplicate_is_fully_penalized() {
        let l = learner();
        let pool = FeatureMatrix::from_rows(&[[0.4], [0.4]]).unwrap();
        let labeled = FeatureMatrix::from_rows(&[[-2.0], [-1.0], [1.0], [2.0]]).unwrap();
        let picks = ranked_batch_picks(&l, &pool, &labeled, 2, SimilarityKind::EuclideanInverse).unwrap();
        let u = classifier_uncertainty(&l.predict_proba(&pool).unwrap()).unwrap().values()[0];
        // step 2: u = 1 remaining, l = 4 + 1 labeled
        let alpha = 1.0 / 6.0;
        assert_eq!(picks[1].index, 1);
        assert!((picks[1].score - (1.0 - alpha) * u).abs() < 1e-15);
    }

    #[test]
    fn strategy_uses_training_rows() {
        let l = learner();
        let pool = FeatureMatrix::from_rows(&[[-1.0], [0.1], [3.0]]).unwrap();
        let sel = l.query(&pool, 3).unwrap();
        let mut sorted = sel.indices.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }
}
