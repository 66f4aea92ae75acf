//! Learning curves: seeded split, simulated-oracle query loop, held-out accuracy
//! after every step.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use al_core::parallel::map_range;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{BenchError, Result};
use crate::registry::{validate_names, Learner};

/// Fraction of rows held out for evaluation.
pub const TEST_FRACTION: f64 = 0.2;

/// Row ids of the three disjoint parts of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub test: Vec<usize>,
    pub initial: Vec<usize>,
    pub pool: Vec<usize>,
}

/// Shuffles row ids with `seed`, takes the first 20% as the test set, the next
/// `initial` as the labeled seed set, and leaves the rest as the pool.
pub fn split(rows: usize, initial: usize, seed: u64) -> Result<Split> {
    let test_size = (rows as f64 * TEST_FRACTION).round() as usize;
    if initial == 0 || test_size + initial > rows {
        return Err(BenchError::Usage(format!(
            "initial labeled set of {initial} does not fit {rows} rows with {test_size} held out"
        )));
    }
    let mut order: Vec<usize> = (0..rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pool = order.split_off(test_size + initial);
    let initial_ids = order.split_off(test_size);
    Ok(Split {
        test: order,
        initial: initial_ids,
        pool,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveConfig {
    pub strategy: String,
    pub estimator: String,
    pub initial: usize,
    pub n_queries: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl CurveConfig {
    pub fn validate(&self, rows: usize) -> Result<()> {
        validate_names(&self.strategy, &self.estimator)?;
        if self.n_queries == 0 || self.batch_size == 0 {
            return Err(BenchError::Usage("queries and batch size must be at least 1".into()));
        }
        let s = split(rows, self.initial, self.seed)?;
        let needed = self.n_queries * self.batch_size;
        if needed > s.pool.len() {
            return Err(BenchError::Usage(format!(
                "pool exhausted: {} queries of {} need {needed} rows but the pool has {}",
                self.n_queries,
                self.batch_size,
                s.pool.len()
            )));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "strategy={} estimator={} initial={} queries={} batch={} seed={}",
            self.strategy, self.estimator, self.initial, self.n_queries, self.batch_size, self.seed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRecord {
    pub step: usize,
    pub labeled: usize,
    pub pool_remaining: usize,
    pub accuracy: f64,
    /// Cumulative wall-clock seconds since the query loop started.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveResult {
    pub config: CurveConfig,
    pub test_size: usize,
    pub records: Vec<CurveRecord>,
    /// Dataset row ids in the order they were queried.
    pub queried: Vec<usize>,
}

impl CurveResult {
    /// First step whose accuracy reaches `target`. Step 0 is the initial fit.
    pub fn first_crossing(&self, target: f64) -> Option<usize> {
        self.records.iter().find(|r| r.accuracy >= target).map(|r| r.step)
    }

    pub fn write_csv(&self, mut out: impl Write, dataset_label: &str) -> Result<()> {
        let mut s = String::new();
        writeln!(s, "# config: dataset={dataset_label} {}", self.config.describe()).unwrap();
        writeln!(s, "step,labeled,accuracy,seconds").unwrap();
        for r in &self.records {
            writeln!(s, "{},{},{},{}", r.step, r.labeled, r.accuracy, r.seconds).unwrap();
        }
        out.write_all(s.as_bytes()).map_err(|source| BenchError::Io {
            path: "<curve output>".into(),
            source,
        })
    }
}

pub fn run_learning_curve(dataset: &Dataset, config: &CurveConfig) -> Result<CurveResult> {
    config.validate(dataset.rows())?;
    let parts = split(dataset.rows(), config.initial, config.seed)?;
    let test_x = dataset.x.select(&parts.test);
    let test_y = dataset.y.select(&parts.test);

    let mut learner = Learner::build(&config.strategy, &config.estimator, config.seed)?;
    learner.fit(dataset.x.select(&parts.initial), dataset.y.select(&parts.initial))?;

    let mut pool = parts.pool;
    let mut records = vec![CurveRecord {
        step: 0,
        labeled: config.initial,
        pool_remaining: pool.len(),
        accuracy: learner.score(&test_x, &test_y)?,
        seconds: 0.0,
    }];
    let mut queried = Vec::with_capacity(config.n_queries * config.batch_size);
    let start = Instant::now();
    for step in 1..=config.n_queries {
        let pool_x = dataset.x.select(&pool);
        let sel = learner.query(&pool_x, config.batch_size)?;
        let ids: Vec<usize> = sel.indices.iter().map(|&i| pool[i]).collect();
        learner.teach(sel.instances, dataset.y.select(&ids))?;
        let mut drop = sel.indices;
        drop.sort_unstable_by(|a, b| b.cmp(a));
        for i in drop {
            pool.remove(i);
        }
        queried.extend(ids);
        records.push(CurveRecord {
            step,
            labeled: learner.n_labeled(),
            pool_remaining: pool.len(),
            accuracy: learner.score(&test_x, &test_y)?,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(CurveResult {
        config: config.clone(),
        test_size: parts.test.len(),
        records,
        queried,
    })
}

/// Runs `config` once per seed, in parallel when the `parallel` feature is on.
pub fn run_seeds(dataset: &Dataset, config: &CurveConfig, seeds: &[u64]) -> Result<Vec<CurveResult>> {
    map_range(seeds.len(), |i| {
        let cfg = CurveConfig {
            seed: seeds[i],
            ..config.clone()
        };
        run_learning_curve(dataset, &cfg)
    })
    .into_iter()
    .collect()
}
