//! Acceptance harness and the independent oracles the criteria compare against.
//! Oracles here share no code with al-core.

use std::time::{Duration, Instant};

pub type Outcome = Result<String, String>;

/// One acceptance criterion with its wall-clock budget.
pub struct Criterion {
    pub name: &'static str,
    pub budget: Duration,
    pub run: fn() -> Outcome,
}

pub struct Report {
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub detail: String,
}

/// Runs a criterion; it passes only if the check holds and finishes within budget.
pub fn evaluate(c: &Criterion) -> Report {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(d) if elapsed <= c.budget => (true, d),
        Ok(d) => (false, format!("{d}; over budget")),
        Err(d) => (false, d),
    };
    Report { name: c.name, passed, elapsed, detail }
}

pub fn format_report(r: &Report, budget: Duration) -> String {
    format!(
        "{} {} [{:.3}s / {}s] {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.name,
        r.elapsed.as_secs_f64(),
        budget.as_secs(),
        r.detail
    )
}

/// `Ok(())` when `cond`, else the message.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Indices sorted by descending value, ties by lower index.
pub fn argsort_desc(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    idx
}

/// Gaussian naive Bayes written from the density formula: per-class means,
/// population variances floored at `floor`, empirical priors.
#[derive(Debug, Clone)]
pub struct NaiveBayes {
    classes: Vec<usize>,
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
    priors: Vec<f64>,
}

impl NaiveBayes {
    pub fn fit(x: &[Vec<f64>], y: &[usize], floor: f64) -> Self {
        let mut classes: Vec<usize> = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let d = x[0].len();
        let mut means = Vec::new();
        let mut vars = Vec::new();
        let mut priors = Vec::new();
        for &c in &classes {
            let members: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
            let n = members.len() as f64;
            let mu: Vec<f64> = (0..d).map(|j| members.iter().map(|r| r[j]).sum::<f64>() / n).collect();
            let var: Vec<f64> = (0..d)
                .map(|j| (members.iter().map(|r| (r[j] - mu[j]).powi(2)).sum::<f64>() / n).max(floor))
                .collect();
            means.push(mu);
            vars.push(var);
            priors.push(n / y.len() as f64);
        }
        Self { classes, means, vars, priors }
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn proba(&self, q: &[f64]) -> Vec<f64> {
        let logs: Vec<f64> = (0..self.classes.len())
            .map(|c| {
                let mut s = self.priors[c].ln();
                for ((&qj, &m), &v) in q.iter().zip(&self.means[c]).zip(&self.vars[c]) {
                    s += -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (qj - m).powi(2) / (2.0 * v);
                }
                s
            })
            .collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|v| v / z).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    ZeroOne,
    Entropy,
}

fn row_loss(p: &[f64], loss: Loss) -> f64 {
    match loss {
        Loss::ZeroOne => 1.0 - p.iter().cloned().fold(0.0, f64::max),
        Loss::Entropy => -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>(),
    }
}

/// Enumerates every (candidate, label) refit and returns the candidate with
/// the smallest expected pool loss, ties to the lower index.
pub fn eer_oracle(train_x: &[Vec<f64>], train_y: &[usize], pool: &[Vec<f64>], loss: Loss, floor: f64) -> usize {
    let base = NaiveBayes::fit(train_x, train_y, floor);
    let mut best = (0, f64::INFINITY);
    for (i, cand) in pool.iter().enumerate() {
        let now = base.proba(cand);
        let mut expected = 0.0;
        for (ci, &class) in base.classes().iter().enumerate() {
            let mut x = train_x.to_vec();
            let mut y = train_y.to_vec();
            x.push(cand.clone());
            y.push(class);
            let model = NaiveBayes::fit(&x, &y, floor);
            let err: f64 = pool.iter().map(|q| row_loss(&model.proba(q), loss)).sum();
            expected += now[ci] * err;
        }
        if expected < best.1 {
            best = (i, expected);
        }
    }
    best.0
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `E[max(Y − f_best − ξ, 0)]` for `Y ~ N(μ, σ²)` by quadrature.
pub fn ei_quadrature(mu: f64, sigma: f64, f_best: f64, xi: f64) -> f64 {
    let t = f_best + xi;
    let pdf = |y: f64| (-(y - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let lo = t.max(mu - 12.0 * sigma);
    let hi = mu + 12.0 * sigma;
    if hi <= lo {
        return 0.0;
    }
    simpson(|y| (y - t) * pdf(y), lo, hi, 20_000)
}

/// GP posterior from an explicit 2×2 inverse.
pub fn gp_two_point(x: [f64; 2], y: [f64; 2], q: f64, ell: f64, sf2: f64, sn2: f64) -> (f64, f64) {
    let k = |a: f64, b: f64| sf2 * (-(a - b).powi(2) / (2.0 * ell * ell)).exp();
    let (a, b, d) = (k(x[0], x[0]) + sn2, k(x[0], x[1]), k(x[1], x[1]) + sn2);
    let det = a * d - b * b;
    let inv = [[d / det, -b / det], [-b / det, a / det]];
    let ks = [k(q, x[0]), k(q, x[1])];
    let w = [ks[0] * inv[0][0] + ks[1] * inv[1][0], ks[0] * inv[0][1] + ks[1] * inv[1][1]];
    let mean = w[0] * y[0] + w[1] * y[1];
    let var = k(q, q) - (w[0] * ks[0] + w[1] * ks[1]);
    (mean, var)
}
