//! Runtime protocol: per strategy, `repeats` timed runs of `queries`
//! single-instance query + teach iterations after one discarded warm-up run.

use std::io::{Read, Write};
use std::time::Instant;

use crate::curve::split;
use crate::dataset::Dataset;
use crate::error::{BenchError, Result};
use crate::registry::{canonical_strategy, validate_names, Learner};

pub const DEFAULT_REPEATS: usize = 10;
pub const DEFAULT_QUERIES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeConfig {
    pub strategies: Vec<String>,
    pub repeats: usize,
    pub n_queries: usize,
    pub estimator: String,
    pub initial: usize,
    pub seed: u64,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self {
            strategies: vec!["least_confident".into(), "qbc".into(), "eer".into()],
            repeats: DEFAULT_REPEATS,
            n_queries: DEFAULT_QUERIES,
            estimator: "gnb".into(),
            initial: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeRow {
    pub strategy: String,
    pub mean_s: f64,
    pub std_s: f64,
    pub repeats: usize,
    pub queries: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuntimeResult {
    pub rows: Vec<RuntimeRow>,
}

impl RuntimeResult {
    pub fn get(&self, strategy: &str) -> Option<&RuntimeRow> {
        let name = canonical_strategy(strategy).ok()?;
        self.rows
            .iter()
            .find(|r| canonical_strategy(&r.strategy).ok() == Some(name))
    }

    pub fn write_csv(&self, out: impl Write, config_line: &str) -> Result<()> {
        let mut out = out;
        let io = |source| BenchError::Io {
            path: "<runtime output>".into(),
            source,
        };
        writeln!(out, "# config: {config_line}").map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| BenchError::Data(format!("write failed: {e}"));
        w.write_record(["strategy", "mean_s", "std_s", "repeats", "queries"]).map_err(err)?;
        for r in &self.rows {
            w.write_record([
                r.strategy.clone(),
                r.mean_s.to_string(),
                r.std_s.to_string(),
                r.repeats.to_string(),
                r.queries.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(io)
    }

    pub fn parse_csv(input: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let bad = |what: &str, line: u64| BenchError::Data(format!("line {line}: invalid {what}"));
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| BenchError::Data(format!("malformed runtime csv: {e}")))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 5 {
                return Err(bad("column count", line));
            }
            rows.push(RuntimeRow {
                strategy: rec[0].to_string(),
                mean_s: rec[1].parse().map_err(|_| bad("mean_s", line))?,
                std_s: rec[2].parse().map_err(|_| bad("std_s", line))?,
                repeats: rec[3].parse().map_err(|_| bad("repeats", line))?,
                queries: rec[4].parse().map_err(|_| bad("queries", line))?,
            });
        }
        Ok(Self { rows })
    }
}

/// Mean and population standard deviation; a single sample has std 0.
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Seconds for one run; setup (split, build, initial fit) is not timed.
fn timed_run(dataset: &Dataset, strategy: &str, config: &RuntimeConfig, run_seed: u64) -> Result<f64> {
    let parts = split(dataset.rows(), config.initial, config.seed)?;
    let mut learner = Learner::build(strategy, &config.estimator, run_seed)?;
    learner.fit(dataset.x.select(&parts.initial), dataset.y.select(&parts.initial))?;
    let mut pool = parts.pool;

    let start = Instant::now();
    for _ in 0..config.n_queries {
        let sel = learner.query(&dataset.x.select(&pool), 1)?;
        let id = pool.remove(sel.indices[0]);
        learner.teach(sel.instances, dataset.y.select(&[id]))?;
    }
    Ok(start.elapsed().as_secs_f64())
}

pub fn run_runtime_bench(dataset: &Dataset, config: &RuntimeConfig) -> Result<RuntimeResult> {
    if config.repeats == 0 || config.n_queries == 0 {
        return Err(BenchError::Usage("repeats and queries must be at least 1".into()));
    }
    if config.strategies.is_empty() {
        return Err(BenchError::Usage("no strategies given".into()));
    }
    for s in &config.strategies {
        validate_names(s, &config.estimator)?;
    }
    let pool = split(dataset.rows(), config.initial, config.seed)?.pool.len();
    if config.n_queries > pool {
        return Err(BenchError::Usage(format!(
            "pool exhausted: {} queries but the pool has {pool} rows",
            config.n_queries
        )));
    }

    let mut rows = Vec::with_capacity(config.strategies.len());
    for strategy in &config.strategies {
        timed_run(dataset, strategy, config, config.seed)?;
        let samples = (0..config.repeats)
            .map(|r| timed_run(dataset, strategy, config, config.seed + r as u64))
            .collect::<Result<Vec<_>>>()?;
        let (mean_s, std_s) = mean_std(&samples);
        rows.push(RuntimeRow {
            strategy: strategy.clone(),
            mean_s,
            std_s,
            repeats: config.repeats,
            queries: config.n_queries,
        });
    }
    Ok(RuntimeResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::two_gaussians;

    #[test]
    fn single_repeat_has_zero_std() {
        let d = two_gaussians(60, 1);
        let cfg = RuntimeConfig {
            strategies: vec!["least_confident".into(), "random".into()],
            repeats: 1,
            n_queries: 3,
            ..RuntimeConfig::default()
        };
        let r = run_runtime_bench(&d, &cfg).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row.std_s == 0.0 && row.mean_s >= 0.0 && row.repeats == 1));
    }

    #[test]
    fn csv_round_trips() {
        let r = RuntimeResult {
            rows: vec![
                RuntimeRow { strategy: "eer".into(), mean_s: 0.123456789012345, std_s: 1e-7, repeats: 10, queries: 10 },
                RuntimeRow { strategy: "least_confident".into(), mean_s: 3.0e-5, std_s: 0.0, repeats: 10, queries: 10 },
            ],
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf, "x").unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# config: x\nstrategy,mean_s,std_s,repeats,queries\n"));
        assert_eq!(RuntimeResult::parse_csv(buf.as_slice()).unwrap(), r);
        assert_eq!(r.get("eer_binary").unwrap().mean_s, 0.123456789012345);
    }

    #[test]
    fn validation() {
        let d = two_gaussians(30, 1);
        let bad = RuntimeConfig { strategies: vec!["nope".into()], ..RuntimeConfig::default() };
        assert_eq!(run_runtime_bench(&d, &bad).unwrap_err().exit_code(), 1);
        let zero = RuntimeConfig { repeats: 0, ..RuntimeConfig::default() };
        assert!(run_runtime_bench(&d, &zero).is_err());
        let many = RuntimeConfig { n_queries: 100, ..RuntimeConfig::default() };
        assert!(run_runtime_bench(&d, &many).is_err());
    }

    #[test]
    fn mean_std_reference() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.25f64.sqrt()).abs() < 1e-15);
    }
}
