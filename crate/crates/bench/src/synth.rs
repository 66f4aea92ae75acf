//! Seeded synthetic datasets.

use std::str::FromStr;

use al_core::{FeatureMatrix, Targets};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Two classes, unit-variance Gaussians centred at (−2, 0) and (2, 0).
    TwoGaussians,
    /// Four unit-variance Gaussians at (±2, ±2); `label_0` marks x > 0 and
    /// `label_1` marks y > 0 by centre.
    Quadrants,
}

impl FromStr for SynthKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-gaussians" => Ok(SynthKind::TwoGaussians),
            "quadrants" => Ok(SynthKind::Quadrants),
            other => Err(BenchError::Usage(format!(
                "unknown dataset kind `{other}` (valid: two-gaussians, quadrants)"
            ))),
        }
    }
}

/// Row `i` belongs to class `i mod 2`; class sizes differ by at most one.
pub fn two_gaussians(rows: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..rows).map(|i| i % 2).collect();
    let x = Array2::from_shape_fn((rows, 2), |(i, j)| {
        let centre = match (j, labels[i]) {
            (0, 0) => -2.0,
            (0, _) => 2.0,
            _ => 0.0,
        };
        let noise: f64 = StandardNormal.sample(&mut rng);
        centre + noise
    });
    Dataset {
        feature_names: vec!["x0".into(), "x1".into()],
        label_names: vec!["label".into()],
        x: FeatureMatrix::new(x).expect("finite samples"),
        y: Targets::Classes(labels),
    }
}

/// Row `i` is drawn around quadrant `i mod 4`.
pub fn quadrants(rows: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quadrant = |i: usize| (((i % 4) & 1) as u8, (((i % 4) >> 1) & 1) as u8);
    let x = Array2::from_shape_fn((rows, 2), |(i, j)| {
        let (a, b) = quadrant(i);
        let bit = if j == 0 { a } else { b };
        let noise: f64 = StandardNormal.sample(&mut rng);
        let centre = if bit == 1 { 2.0 } else { -2.0 };
        centre + noise
    });
    let y = Array2::from_shape_fn((rows, 2), |(i, j)| {
        let (a, b) = quadrant(i);
        if j == 0 {
            a
        } else {
            b
        }
    });
    Dataset {
        feature_names: vec!["x0".into(), "x1".into()],
        label_names: vec!["label_0".into(), "label_1".into()],
        x: FeatureMatrix::new(x).expect("finite samples"),
        y: Targets::Multilabel(y),
    }
}

pub fn generate(kind: SynthKind, rows: usize, seed: u64) -> Dataset {
    match kind {
        SynthKind::TwoGaussians => two_gaussians(rows, seed),
        SynthKind::Quadrants => quadrants(rows, seed),
    }
}
