//! Benchmark harness for al-core: CSV datasets, synthetic generators, a
//! string-keyed strategy registry, learning curves, and the runtime protocol.

pub mod cli;
pub mod curve;
pub mod dataset;
pub mod error;
pub mod registry;
pub mod runtime;
pub mod synth;

pub use curve::{run_learning_curve, run_seeds, split, CurveConfig, CurveRecord, CurveResult, Split};
pub use dataset::{load_csv, parse_csv, save_csv, write_csv, Dataset};
pub use error::{BenchError, Result};
pub use registry::{Learner, ESTIMATORS, STRATEGIES};
pub use runtime::{run_runtime_bench, RuntimeConfig, RuntimeResult, RuntimeRow};
