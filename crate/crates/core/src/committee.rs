//! Committees of learners and disagreement-based utilities.
//!
//! Members may have seen different label subsets (bootstrap resamples can
//! miss rare classes), so every committee-level distribution is aligned over
//! the union of the members' classes; a class a member never saw contributes
//! probability 0 for that member.

use std::fmt;
use std::sync::Arc;

use ndarray::Array2;

use crate::data::{FeatureMatrix, ProbabilityMatrix, QuerySelection, Targets, UtilityArray};
use crate::error::{AlError, Result};
use crate::learner::{check_query_args, score_predictions, ActiveLearner};
use crate::parallel::try_map_range;
use crate::strategy::{compose, Argmax, Composed, QueryStrategy, Utility};
use crate::uncertainty::{classifier_entropy, entropy, LOG_FLOOR};

/// `Σ p ln(p/q)` with `0 · ln 0 = 0` and `q` clamped away from zero.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi.max(LOG_FLOOR).ln() - qi.max(LOG_FLOOR).ln()))
        .sum()
}

/// Classification committee.
#[derive(Clone)]
pub struct Committee {
    members: Vec<ActiveLearner>,
    strategy: Arc<dyn QueryStrategy<Committee>>,
}

impl fmt::Debug for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Committee")
            .field("members", &self.members)
            .finish_non_exhaustive()
    }
}

impl Committee {
    pub fn new(
        members: Vec<ActiveLearner>,
        strategy: impl QueryStrategy<Committee> + 'static,
    ) -> Result<Self> {
        if members.len() < 2 {
            return Err(AlError::CommitteeSize(members.len()));
        }
        Ok(Self {
            members,
            strategy: Arc::new(strategy),
        })
    }

    pub fn members(&self) -> &[ActiveLearner] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_fitted(&self) -> bool {
        self.members.iter().all(ActiveLearner::is_fitted)
    }

    fn ensure_fitted(&self) -> Result<()> {
        if self.is_fitted() {
            Ok(())
        } else {
            Err(AlError::NotFitted)
        }
    }

    /// Sorted union of the members' class ids.
    pub fn classes(&self) -> Result<Vec<usize>> {
        self.ensure_fitted()?;
        let mut all = Vec::new();
        for m in &self.members {
            all.extend_from_slice(m.estimator().classes()?);
        }
        all.sort_unstable();
        all.dedup();
        Ok(all)
    }

    /// Fits every member on the same data.
    pub fn fit(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        self.apply_all(|_, m| m.fit(x.clone(), y.clone()))
    }

    /// Fits member `m` on a resample drawn with seed `base_seed + m`.
    pub fn fit_bootstrap(&mut self, x: FeatureMatrix, y: Targets, base_seed: u64) -> Result<()> {
        self.apply_all(|i, m| m.fit_bootstrap(x.clone(), y.clone(), base_seed.wrapping_add(i as u64)))
    }

    /// Teaches every member the same instances.
    pub fn teach(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        self.apply_all(|_, m| m.teach(x.clone(), y.clone()))
    }

    /// Teaches every member; member `m` refits on a resample with seed `base_seed + m`.
    pub fn teach_bootstrap(&mut self, x: FeatureMatrix, y: Targets, base_seed: u64) -> Result<()> {
        self.apply_all(|i, m| m.teach_bootstrap(x.clone(), y.clone(), base_seed.wrapping_add(i as u64)))
    }

    /// All-or-nothing update: members are only replaced if every one succeeds.
    fn apply_all(&mut self, f: impl Fn(usize, &mut ActiveLearner) -> Result<()>) -> Result<()> {
        let mut updated = self.members.clone();
        for (i, m) in updated.iter_mut().enumerate() {
            f(i, m)?;
        }
        self.members = updated;
        Ok(())
    }

    /// Predicted label of every member for every pool row (`rows × members`).
    pub fn vote(&self, pool: &FeatureMatrix) -> Result<Array2<usize>> {
        if pool.is_empty() {
            return Err(AlError::Empty("pool"));
        }
        self.ensure_fitted()?;
        let votes = try_map_range(self.members.len(), |m| {
            match self.members[m].predict(pool)? {
                Targets::Classes(v) => Ok(v),
                other => Err(AlError::TargetKind {
                    expected: "classes",
                    found: other.kind(),
                }),
            }
        })?;
        Ok(Array2::from_shape_fn((pool.rows(), votes.len()), |(i, m)| votes[m][i]))
    }

    /// Each member's distribution, aligned over [`Committee::classes`].
    pub fn member_probabilities(&self, pool: &FeatureMatrix) -> Result<Vec<Array2<f64>>> {
        let classes = self.classes()?;
        try_map_range(self.members.len(), |m| {
            let p = self.members[m].predict_proba(pool)?;
            let mut aligned = Array2::zeros((pool.rows(), classes.len()));
            for (j, class) in p.classes().iter().enumerate() {
                let col = classes.binary_search(class).map_err(|_| {
                    AlError::InvalidArgument(format!("member class {class} outside committee universe"))
                })?;
                aligned.column_mut(col).assign(&p.view().column(j));
            }
            Ok(aligned)
        })
    }

    /// Elementwise mean of the members' aligned distributions.
    pub fn predict_proba(&self, pool: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        let members = self.member_probabilities(pool)?;
        let mut mean = Array2::zeros(members[0].raw_dim());
        for p in &members {
            mean += p;
        }
        mean /= members.len() as f64;
        ProbabilityMatrix::with_classes(mean, self.classes()?)
    }

    pub fn predict(&self, pool: &FeatureMatrix) -> Result<Targets> {
        Ok(Targets::Classes(self.predict_proba(pool)?.argmax_classes()))
    }

    pub fn score(&self, x: &FeatureMatrix, y: &Targets) -> Result<f64> {
        score_predictions(&self.predict(x)?, y)
    }

    pub fn query(&self, pool: &FeatureMatrix, n: usize) -> Result<QuerySelection> {
        check_query_args(pool, n)?;
        self.ensure_fitted()?;
        let indices = self.strategy.query(self, pool, n)?;
        QuerySelection::from_pool(pool, indices)
    }
}

/// Entropy of the hard-vote distribution per instance.
pub fn vote_entropy(committee: &Committee, pool: &FeatureMatrix) -> Result<UtilityArray> {
    let votes = committee.vote(pool)?;
    let classes = committee.classes()?;
    let m = committee.len() as f64;
    let mut counts = vec![0usize; classes.len()];
    let values = votes
        .rows()
        .into_iter()
        .map(|row| {
            counts.iter_mut().for_each(|c| *c = 0);
            for label in row {
                let c = classes.binary_search(label).expect("vote within committee classes");
                counts[c] += 1;
            }
            entropy(counts.iter().map(|&c| c as f64 / m))
        })
        .collect();
    UtilityArray::new(values)
}

/// Entropy of the consensus distribution.
pub fn consensus_entropy(committee: &Committee, pool: &FeatureMatrix) -> Result<UtilityArray> {
    classifier_entropy(&committee.predict_proba(pool)?)
}

/// Largest KL divergence from any member's distribution to the consensus.
pub fn max_disagreement(committee: &Committee, pool: &FeatureMatrix) -> Result<UtilityArray> {
    let members = committee.member_probabilities(pool)?;
    let mut consensus = Array2::zeros(members[0].raw_dim());
    for p in &members {
        consensus += p;
    }
    consensus /= members.len() as f64;
    let values = (0..pool.rows())
        .map(|i| {
            let q = consensus.row(i).to_vec();
            members
                .iter()
                .map(|p| kl_divergence(&p.row(i).to_vec(), &q))
                .fold(0.0f64, f64::max)
        })
        .collect();
    UtilityArray::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Disagreement {
    VoteEntropy,
    ConsensusEntropy,
    MaxKl,
}

impl Utility<Committee> for Disagreement {
    fn utility(&self, committee: &Committee, pool: &FeatureMatrix) -> Result<UtilityArray> {
        match self {
            Disagreement::VoteEntropy => vote_entropy(committee, pool),
            Disagreement::ConsensusEntropy => consensus_entropy(committee, pool),
            Disagreement::MaxKl => max_disagreement(committee, pool),
        }
    }
}

pub fn disagreement_strategy(measure: Disagreement) -> Composed<Disagreement, Argmax> {
    compose(measure, Argmax)
}

/// Committee of regressors; the spread of member predictions is the utility.
#[derive(Clone)]
pub struct CommitteeRegressor {
    members: Vec<ActiveLearner>,
    strategy: Arc<dyn QueryStrategy<CommitteeRegressor>>,
}

impl fmt::Debug for CommitteeRegressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CommitteeRegressor")
            .field("members", &self.members)
            .finish_non_exhaustive()
    }
}

impl CommitteeRegressor {
    pub fn new(
        members: Vec<ActiveLearner>,
        strategy: impl QueryStrategy<CommitteeRegressor> + 'static,
    ) -> Result<Self> {
        if members.len() < 2 {
            return Err(AlError::CommitteeSize(members.len()));
        }
        if let Some(m) = members.iter().find(|m| !m.estimator().capabilities().regression) {
            return Err(AlError::MissingCapability {
                estimator: m.estimator().name(),
                capability: "regression",
            });
        }
        Ok(Self {
            members,
            strategy: Arc::new(strategy),
        })
    }

    pub fn members(&self) -> &[ActiveLearner] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn ensure_fitted(&self) -> Result<()> {
        if self.members.iter().all(ActiveLearner::is_fitted) {
            Ok(())
        } else {
            Err(AlError::NotFitted)
        }
    }

    pub fn fit(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        let mut updated = self.members.clone();
        for m in &mut updated {
            m.fit(x.clone(), y.clone())?;
        }
        self.members = updated;
        Ok(())
    }

    pub fn teach(&mut self, x: FeatureMatrix, y: Targets) -> Result<()> {
        let mut updated = self.members.clone();
        for m in &mut updated {
            m.teach(x.clone(), y.clone())?;
        }
        self.members = updated;
        Ok(())
    }

    pub fn teach_bootstrap(&mut self, x: FeatureMatrix, y: Targets, base_seed: u64) -> Result<()> {
        let mut updated = self.members.clone();
        for (i, m) in updated.iter_mut().enumerate() {
            m.teach_bootstrap(x.clone(), y.clone(), base_seed.wrapping_add(i as u64))?;
        }
        self.members = updated;
        Ok(())
    }

    /// Member predictions, one vector per member.
    pub fn member_predictions(&self, pool: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        self.ensure_fitted()?;
        try_map_range(self.members.len(), |m| match self.members[m].predict(pool)? {
            Targets::Continuous(v) => Ok(v),
            other => Err(AlError::TargetKind {
                expected: "continuous",
                found: other.kind(),
            }),
        })
    }

    /// Mean member prediction.
    pub fn predict(&self, pool: &FeatureMatrix) -> Result<Vec<f64>> {
        let preds = self.member_predictions(pool)?;
        let m = preds.len() as f64;
        Ok((0..pool.rows())
            .map(|i| preds.iter().map(|p| p[i]).sum::<f64>() / m)
            .collect())
    }

    pub fn query(&self, pool: &FeatureMatrix, n: usize) -> Result<QuerySelection> {
        check_query_args(pool, n)?;
        self.ensure_fitted()?;
        let indices = self.strategy.query(self, pool, n)?;
        QuerySelection::from_pool(pool, indices)
    }
}

/// Population standard deviation of member predictions.
pub fn std_sampling(committee: &CommitteeRegressor, pool: &FeatureMatrix) -> Result<UtilityArray> {
    let preds = committee.member_predictions(pool)?;
    let m = preds.len() as f64;
    let values = (0..pool.rows())
        .map(|i| {
            let mean = preds.iter().map(|p| p[i]).sum::<f64>() / m;
            (preds.iter().map(|p| (p[i] - mean).powi(2)).sum::<f64>() / m).sqrt()
        })
        .collect();
    UtilityArray::new(values)
}

/// Regression committee utility based on [`std_sampling`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxStd;

impl Utility<CommitteeRegressor> for MaxStd {
    fn utility(&self, committee: &CommitteeRegressor, pool: &FeatureMatrix) -> Result<UtilityArray> {
        std_sampling(committee, pool)
    }
}
