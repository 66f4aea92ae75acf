//! Query strategies as a utility function composed with a selector.
//!
//! A [`Utility`] scores every pool instance (higher = more informative), and a
//! [`Selector`] turns scores into an ordered list of pool indices. Any utility
//! composes with any selector through [`Composed`]. Strategies that are not
//! separable this way (ranked batch-mode) implement [`QueryStrategy`] directly.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureMatrix, UtilityArray};
use crate::error::{AlError, Result};

/// Scores pool instances for a learner of type `L`.
pub trait Utility<L: ?Sized>: Send + Sync {
    fn utility(&self, learner: &L, pool: &FeatureMatrix) -> Result<UtilityArray>;
}

impl<L: ?Sized, F> Utility<L> for F
where
    F: Fn(&L, &FeatureMatrix) -> Result<UtilityArray> + Send + Sync,
{
    fn utility(&self, learner: &L, pool: &FeatureMatrix) -> Result<UtilityArray> {
        self(learner, pool)
    }
}

/// Picks `n` instances from a utility vector.
pub trait Selector: Send + Sync {
    fn select(&self, utilities: &UtilityArray, n: usize) -> Result<Vec<usize>>;
}

/// Full query: pool indices for a learner, in selection order.
pub trait QueryStrategy<L: ?Sized>: Send + Sync {
    fn query(&self, learner: &L, pool: &FeatureMatrix, n: usize) -> Result<Vec<usize>>;
}

/// A utility paired with a selector.
#[derive(Debug, Clone)]
pub struct Composed<U, S> {
    pub utility: U,
    pub selector: S,
}

pub fn compose<U, S>(utility: U, selector: S) -> Composed<U, S> {
    Composed { utility, selector }
}

impl<L: ?Sized, U: Utility<L>, S: Selector> QueryStrategy<L> for Composed<U, S> {
    fn query(&self, learner: &L, pool: &FeatureMatrix, n: usize) -> Result<Vec<usize>> {
        let u = self.utility.utility(learner, pool)?;
        if u.len() != pool.rows() {
            return Err(AlError::Shape(format!(
                "{} utilities for a pool of {}",
                u.len(),
                pool.rows()
            )));
        }
        self.selector.select(&u, n)
    }
}

/// Deterministic top-n: descending utility, ties to the lower index.
#[derive(Debug, Clone, Copy, Default)]
pub struct Argmax;

/// Top-n with ties broken by a seeded permutation.
#[derive(Debug, Clone, Copy)]
pub struct ShuffledArgmax {
    pub seed: u64,
}

impl Selector for Argmax {
    fn select(&self, utilities: &UtilityArray, n: usize) -> Result<Vec<usize>> {
        let eligible: Vec<usize> = utilities.eligible().collect();
        let values: Vec<f64> = eligible.iter().map(|&i| utilities.values()[i]).collect();
        Ok(select_argmax(&values, n)?
            .into_iter()
            .map(|k| eligible[k])
            .collect())
    }
}

impl Selector for ShuffledArgmax {
    fn select(&self, utilities: &UtilityArray, n: usize) -> Result<Vec<usize>> {
        let eligible: Vec<usize> = utilities.eligible().collect();
        let values: Vec<f64> = eligible.iter().map(|&i| utilities.values()[i]).collect();
        Ok(select_shuffled_argmax(&values, n, self.seed)?
            .into_iter()
            .map(|k| eligible[k])
            .collect())
    }
}

fn check_selectable(utilities: &[f64], n: usize) -> Result<()> {
    if utilities.iter().any(|u| u.is_nan()) {
        return Err(AlError::NonFinite("utilities (NaN)"));
    }
    if n > utilities.len() {
        return Err(AlError::SelectionOutOfRange {
            requested: n,
            available: utilities.len(),
        });
    }
    Ok(())
}

/// Indices of the `n` largest utilities, descending, ties to the lower index.
pub fn select_argmax(utilities: &[f64], n: usize) -> Result<Vec<usize>> {
    check_selectable(utilities, n)?;
    let mut order: Vec<usize> = (0..utilities.len()).collect();
    order.sort_by(|&a, &b| utilities[b].total_cmp(&utilities[a]).then(a.cmp(&b)));
    order.truncate(n);
    Ok(order)
}

/// Like [`select_argmax`], but equal utilities are ordered by a permutation
/// drawn from `seed`.
pub fn select_shuffled_argmax(utilities: &[f64], n: usize, seed: u64) -> Result<Vec<usize>> {
    check_selectable(utilities, n)?;
    let mut rank: Vec<usize> = (0..utilities.len()).collect();
    rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut order: Vec<usize> = (0..utilities.len()).collect();
    order.sort_by(|&a, &b| utilities[b].total_cmp(&utilities[a]).then(rank[a].cmp(&rank[b])));
    order.truncate(n);
    Ok(order)
}

/// Uniform random baseline. The draw depends on the seed and the pool size,
/// so a loop that removes queried rows gets a fresh draw each step while
/// staying reproducible.
#[derive(Debug, Clone, Copy)]
pub struct RandomSampling {
    pub seed: u64,
}

impl<L: ?Sized> QueryStrategy<L> for RandomSampling {
    fn query(&self, _learner: &L, pool: &FeatureMatrix, n: usize) -> Result<Vec<usize>> {
        if n > pool.rows() {
            return Err(AlError::SelectionOutOfRange {
                requested: n,
                available: pool.rows(),
            });
        }
        let step_seed = self
            .seed
            .wrapping_add((pool.rows() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(step_seed);
        let mut order: Vec<usize> = (0..pool.rows()).collect();
        order.partial_shuffle(&mut rng, n);
        order.truncate(n);
        Ok(order)
    }
}
