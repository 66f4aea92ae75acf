//! Labeling session state machine. Every mutation is an [`Event`]; live
//! requests and log replay both go through [`Session::apply`].

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use al_core::{FeatureMatrix, Targets};
use albench::registry::{validate_names, Learner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSource {
    Inline { rows: Vec<Vec<f64>> },
    /// Server-side CSV in the bench dataset format; its label columns are ignored.
    Path { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub id: usize,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Holdout {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

fn default_estimator() -> String {
    "gnb".into()
}

fn default_batch() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub dataset: DatasetSource,
    pub strategy: String,
    #[serde(default = "default_estimator")]
    pub estimator: String,
    /// Labeled seed rows, by dataset row id.
    pub initial: Vec<LabeledRow>,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// Label `i` displays as `class_names[i]`.
    pub class_names: Vec<String>,
    #[serde(default)]
    pub holdout: Option<Holdout>,
}

impl SessionConfig {
    /// Replaces a path dataset with its rows so the config is self-contained.
    pub fn resolve(mut self) -> Result<Self> {
        if let DatasetSource::Path { path } = &self.dataset {
            let d = albench::load_csv(path).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
            self.dataset = DatasetSource::Inline { rows: d.x.to_rows() };
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Created { id: String, config: SessionConfig, at_ms: u64 },
    Queried { ids: Vec<usize>, at_ms: u64 },
    Labeled { labels: Vec<LabeledRow>, at_ms: u64 },
    Cancelled { at_ms: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub id: usize,
    pub label: usize,
    pub at_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyPoint {
    pub step: usize,
    pub labeled: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub class: usize,
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub labeled_count: usize,
    /// Unlabeled rows, pending ones included.
    pub pool_remaining: usize,
    pub pending: usize,
    pub class_counts: Vec<ClassCount>,
    pub accuracy: Option<f64>,
    pub accuracy_series: Vec<AccuracyPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub id: String,
    pub strategy: String,
    pub estimator: String,
    pub class_names: Vec<String>,
    pub batch_size: usize,
    pub n_rows: usize,
    pub n_features: usize,
    /// Unlabeled rows, pending ones included.
    pub pool_size: usize,
    pub pending: Vec<usize>,
    pub labeled_count: usize,
    pub labeled: Vec<LabeledRow>,
    pub has_holdout: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub id: usize,
    pub features: Vec<f64>,
    /// One entry per class name.
    pub proba: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub rows: Vec<BatchRow>,
}

/// Outcome of a query request before it touches state.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryPlan {
    /// The current pending batch, returned again.
    Existing,
    /// A new batch to stage via [`Event::Queried`].
    New(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    config: SessionConfig,
    x: FeatureMatrix,
    learner: Learner,
    holdout: Option<(FeatureMatrix, Targets)>,
    pool: BTreeSet<usize>,
    pending: Vec<usize>,
    history: Vec<HistoryEntry>,
    series: Vec<AccuracyPoint>,
    created_ms: u64,
}

fn bad(msg: impl Into<String>) -> ServiceError {
    ServiceError::BadRequest(msg.into())
}

impl Session {
    /// Validates `config`, fits the learner on the initial rows, and stages
    /// everything else as pool. Path datasets must be resolved first.
    pub fn create(id: String, config: SessionConfig, created_ms: u64) -> Result<Self> {
        validate_names(&config.strategy, &config.estimator)?;
        let DatasetSource::Inline { rows } = &config.dataset else {
            return Err(bad("dataset path must be resolved before creating a session"));
        };
        if rows.is_empty() {
            return Err(bad("dataset has no rows"));
        }
        let x = FeatureMatrix::from_rows(rows)?;
        let k = config.class_names.len();
        if k < 2 {
            return Err(bad("at least two class names are required"));
        }
        if config.class_names.iter().collect::<HashSet<_>>().len() != k {
            return Err(bad("class names must be distinct"));
        }
        if config.batch_size == 0 {
            return Err(bad("batch_size must be at least 1"));
        }
        if config.initial.is_empty() {
            return Err(bad("at least one initial labeled row is required"));
        }
        let mut seen = HashSet::new();
        for r in &config.initial {
            if r.id >= x.rows() {
                return Err(bad(format!("initial row id {} out of range (dataset has {} rows)", r.id, x.rows())));
            }
            if r.label >= k {
                return Err(bad(format!("initial label {} outside 0..{k}", r.label)));
            }
            if !seen.insert(r.id) {
                return Err(bad(format!("initial row id {} repeated", r.id)));
            }
        }
        let holdout = match &config.holdout {
            None => None,
            Some(h) => {
                if h.rows.is_empty() || h.rows.len() != h.labels.len() {
                    return Err(bad("holdout needs one label per row and at least one row"));
                }
                if h.labels.iter().any(|&l| l >= k) {
                    return Err(bad(format!("holdout label outside 0..{k}")));
                }
                let hx = FeatureMatrix::from_rows(&h.rows)?;
                if hx.cols() != x.cols() {
                    return Err(bad("holdout width differs from the dataset"));
                }
                Some((hx, Targets::Classes(h.labels.clone())))
            }
        };

        let ids: Vec<usize> = config.initial.iter().map(|r| r.id).collect();
        let labels: Vec<usize> = config.initial.iter().map(|r| r.label).collect();
        let mut learner = Learner::build(&config.strategy, &config.estimator, config.seed)?;
        learner.fit(x.select(&ids), Targets::Classes(labels))?;
        let pool = (0..x.rows()).filter(|i| !seen.contains(i)).collect();

        let mut session = Session {
            id,
            config,
            x,
            learner,
            holdout,
            pool,
            pending: Vec::new(),
            history: Vec::new(),
            series: Vec::new(),
            created_ms,
        };
        session.record_accuracy(0)?;
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn created_ms(&self) -> u64 {
        self.created_ms
    }

    /// Rows available for a new query, in ascending id order.
    pub fn pool(&self) -> impl Iterator<Item = usize> + '_ {
        self.pool.iter().copied()
    }

    pub fn pending(&self) -> &[usize] {
        &self.pending
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Initial rows followed by taught rows, in teaching order.
    pub fn taught(&self) -> Vec<LabeledRow> {
        self.config
            .initial
            .iter()
            .copied()
            .chain(self.history.iter().map(|h| LabeledRow { id: h.id, label: h.label }))
            .collect()
    }

    fn n_classes(&self) -> usize {
        self.config.class_names.len()
    }

    fn record_accuracy(&mut self, step: usize) -> Result<()> {
        if let Some((hx, hy)) = &self.holdout {
            let accuracy = self.learner.score(hx, hy)?;
            self.series.push(AccuracyPoint {
                step,
                labeled: self.config.initial.len() + self.history.len(),
                accuracy,
            });
        }
        Ok(())
    }

    /// True when pool, pending, and taught ids partition the dataset rows.
    pub fn partition_holds(&self) -> bool {
        let taught = self.taught();
        let n = self.pool.len() + self.pending.len() + taught.len();
        let mut all: HashSet<usize> = self.pool.iter().copied().collect();
        all.extend(&self.pending);
        all.extend(taught.iter().map(|r| r.id));
        n == self.x.rows() && all.len() == n && all.iter().all(|&i| i < self.x.rows())
    }

    /// Decides what a query for `n` rows (default: the batch size) returns.
    pub fn plan_query(&self, n: Option<usize>) -> Result<QueryPlan> {
        if n == Some(0) {
            return Err(bad("n must be at least 1"));
        }
        if !self.pending.is_empty() {
            return match n {
                None => Ok(QueryPlan::Existing),
                Some(n) if n == self.pending.len() => Ok(QueryPlan::Existing),
                Some(n) => Err(ServiceError::Conflict(format!(
                    "a different batch of {} rows is pending; label or cancel it before asking for {n}",
                    self.pending.len()
                ))),
            };
        }
        if self.pool.is_empty() {
            return Err(ServiceError::Gone);
        }
        let ids: Vec<usize> = self.pool.iter().copied().collect();
        let want = n.unwrap_or(self.config.batch_size).min(ids.len());
        let sel = self.learner.query(&self.x.select(&ids), want)?;
        Ok(QueryPlan::New(sel.indices.iter().map(|&i| ids[i]).collect()))
    }

    /// Checks a label submission against the pending batch and class universe.
    pub fn check_labels(&self, labels: &[LabeledRow]) -> Result<()> {
        if labels.is_empty() {
            return Err(bad("no labels given"));
        }
        let mut seen = HashSet::new();
        for l in labels {
            if !seen.insert(l.id) {
                return Err(bad(format!("row {} labeled twice in one submission", l.id)));
            }
            if !self.pending.contains(&l.id) {
                return Err(ServiceError::Conflict(format!("row {} is not pending", l.id)));
            }
            if l.label >= self.n_classes() {
                return Err(bad(format!("label {} outside 0..{}", l.label, self.n_classes())));
            }
        }
        Ok(())
    }

    /// Applies a non-creation event. On error the session is unchanged.
    pub fn apply(&mut self, event: &Event) -> Result<()> {
        match event {
            Event::Created { .. } => Err(bad("session already exists")),
            Event::Queried { ids, .. } => {
                if !self.pending.is_empty() {
                    return Err(ServiceError::Conflict("a batch is already pending".into()));
                }
                if ids.is_empty() || ids.iter().collect::<HashSet<_>>().len() != ids.len() {
                    return Err(bad("queried ids must be distinct and non-empty"));
                }
                if let Some(id) = ids.iter().find(|id| !self.pool.contains(id)) {
                    return Err(ServiceError::Conflict(format!("row {id} is not in the pool")));
                }
                for id in ids {
                    self.pool.remove(id);
                }
                self.pending = ids.clone();
                Ok(())
            }
            Event::Labeled { labels, at_ms } => {
                self.check_labels(labels)?;
                let ids: Vec<usize> = labels.iter().map(|l| l.id).collect();
                let y = Targets::Classes(labels.iter().map(|l| l.label).collect());
                let mut learner = self.learner.clone();
                learner.teach(self.x.select(&ids), y)?;
                let accuracy = match &self.holdout {
                    Some((hx, hy)) => Some(learner.score(hx, hy)?),
                    None => None,
                };
                self.learner = learner;
                self.pending.retain(|p| !ids.contains(p));
                self.history
                    .extend(labels.iter().map(|l| HistoryEntry { id: l.id, label: l.label, at_ms: *at_ms }));
                if let Some(accuracy) = accuracy {
                    self.series.push(AccuracyPoint {
                        step: self.series.len(),
                        labeled: self.config.initial.len() + self.history.len(),
                        accuracy,
                    });
                }
                Ok(())
            }
            Event::Cancelled { .. } => {
                self.pool.extend(self.pending.drain(..));
                Ok(())
            }
        }
    }

    /// The pending rows with current class probabilities.
    pub fn batch(&self) -> Result<Batch> {
        if self.pending.is_empty() {
            return Ok(Batch { rows: Vec::new() });
        }
        let x = self.x.select(&self.pending);
        let proba = self.class_proba(&x)?;
        Ok(Batch {
            rows: self
                .pending
                .iter()
                .zip(proba)
                .enumerate()
                .map(|(i, (&id, proba))| BatchRow { id, features: x.row(i).to_vec(), proba })
                .collect(),
        })
    }

    /// Probabilities spread over every class name; classes the learner has
    /// not seen get 0.
    pub fn class_proba(&self, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        let p = self.learner.predict_proba(x)?;
        let k = self.n_classes();
        Ok((0..p.rows())
            .map(|i| {
                let mut row = vec![0.0; k];
                for (j, &c) in p.classes().iter().enumerate() {
                    if c < k {
                        row[c] = p.row(i)[j];
                    }
                }
                row
            })
            .collect())
    }

    /// Probabilities for every dataset row.
    pub fn all_proba(&self) -> Result<Vec<Vec<f64>>> {
        self.class_proba(&self.x)
    }

    pub fn metrics(&self) -> Metrics {
        let taught = self.taught();
        let class_counts = self
            .config
            .class_names
            .iter()
            .enumerate()
            .map(|(class, name)| ClassCount {
                class,
                name: name.clone(),
                count: taught.iter().filter(|r| r.label == class).count(),
            })
            .collect();
        Metrics {
            labeled_count: taught.len(),
            pool_remaining: self.pool.len() + self.pending.len(),
            pending: self.pending.len(),
            class_counts,
            accuracy: self.series.last().map(|p| p.accuracy),
            accuracy_series: self.series.clone(),
        }
    }

    pub fn summary(&self) -> Summary {
        let labeled = self.taught();
        Summary {
            id: self.id.clone(),
            strategy: self.config.strategy.clone(),
            estimator: self.config.estimator.clone(),
            class_names: self.config.class_names.clone(),
            batch_size: self.config.batch_size,
            n_rows: self.x.rows(),
            n_features: self.x.cols(),
            pool_size: self.pool.len() + self.pending.len(),
            pending: self.pending.clone(),
            labeled_count: labeled.len(),
            labeled,
            has_holdout: self.holdout.is_some(),
        }
    }

    /// Observable state, learner outputs included; equal snapshots mean
    /// indistinguishable sessions.
    pub fn snapshot(&self) -> Result<Snapshot> {
        Ok(Snapshot {
            summary: self.summary(),
            metrics: self.metrics(),
            pool: self.pool.iter().copied().collect(),
            history: self.history.clone(),
            proba: self.all_proba()?,
            next_query: self.plan_query(None).ok(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub summary: Summary,
    pub metrics: Metrics,
    pub pool: Vec<usize>,
    pub history: Vec<HistoryEntry>,
    pub proba: Vec<Vec<f64>>,
    pub next_query: Option<QueryPlan>,
}

/// Rebuilds a session from its event log.
pub fn replay(events: &[Event]) -> Result<Session> {
    let Some((Event::Created { id, config, at_ms }, rest)) = events.split_first() else {
        return Err(bad("event log does not start with a creation event"));
    };
    let mut session = Session::create(id.clone(), config.clone(), *at_ms)?;
    for e in rest {
        session.apply(e)?;
    }
    Ok(session)
}
