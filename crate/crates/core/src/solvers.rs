//! First-order solvers and the recovery metric.

use rand::seq::index;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{accumulate_terms, eval_dense, DenseTarget, Loss};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_iters: usize,
    /// Fraction of the `n²` terms sampled (without replacement) per step.
    pub batch_fraction: f64,
    pub seed: u64,
    pub init_std: f64,
    /// Record the objective every this many iterations.
    pub log_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            momentum: 0.9,
            max_iters: 200_000,
            batch_fraction: 0.1,
            seed: 0,
            init_std: 1.0,
            log_every: 1000,
        }
    }
}

impl SolverConfig {
    /// Defaults with the iteration budget scaled to the problem size.
    pub fn for_dimension(n: usize) -> Self {
        Self { max_iters: if n <= 20 { 200_000 } else { 500_000 }, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be finite and non-negative, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum must lie in [0, 1), got {}", self.momentum));
        }
        if !(self.batch_fraction > 0.0 && self.batch_fraction <= 1.0) {
            return bad(format!("batch_fraction must lie in (0, 1], got {}", self.batch_fraction));
        }
        if !(self.init_std > 0.0 && self.init_std.is_finite()) {
            return bad(format!("init_std must be positive, got {}", self.init_std));
        }
        if self.log_every == 0 {
            return bad("log_every must be at least 1".into());
        }
        Ok(())
    }

    fn initial_point(&self, rng: &mut Stream, dim: usize) -> Vec<f64> {
        let normal = Normal::new(0.0, self.init_std).expect("validated std");
        (0..dim).map(|_| normal.sample(rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub initial_point: Vec<f64>,
    pub final_point: Vec<f64>,
    /// `(iteration, objective)` at iteration 0, every `log_every` steps, and
    /// at the last iteration.
    pub objective_history: Vec<(usize, f64)>,
    pub iterations_run: usize,
}

/// Heavy-ball SGD on the dense loss: `v ← μv − lr·g`, `x ← x + v`, where `g`
/// is the mean (sub)gradient over a uniformly sampled batch of terms.
pub fn sgd_momentum(target: &DenseTarget, mode: Loss, cfg: &SolverConfig) -> Result<SolveTrace> {
    sgd_momentum_until(target, mode, cfg, |_| false)
}

/// [`sgd_momentum`] that also stops at a logging step where `stop(x)` holds.
pub fn sgd_momentum_until(
    target: &DenseTarget,
    mode: Loss,
    cfg: &SolverConfig,
    mut stop: impl FnMut(&[f64]) -> bool,
) -> Result<SolveTrace> {
    cfg.validate()?;
    let n = target.dim();
    let terms = n * n;
    let batch = ((cfg.batch_fraction * terms as f64).ceil() as usize).clamp(1, terms);
    let mut rng = stream(cfg.seed);
    let initial_point = cfg.initial_point(&mut rng, n);
    let mut x = initial_point.clone();
    let mut v = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut history = vec![(0, eval_dense(target, &x, mode)?)];
    let mut iters = 0;
    while iters < cfg.max_iters {
        g.iter_mut().for_each(|e| *e = 0.0);
        if batch == terms {
            accumulate_terms(target, &x, mode, 0..terms, &mut g);
        } else {
            accumulate_terms(target, &x, mode, index::sample(&mut rng, terms, batch), &mut g);
        }
        let scale = cfg.learning_rate / batch as f64;
        for i in 0..n {
            v[i] = cfg.momentum * v[i] - scale * g[i];
            x[i] += v[i];
        }
        iters += 1;
        if iters % cfg.log_every == 0 {
            history.push((iters, eval_dense(target, &x, mode)?));
            if stop(&x) {
                break;
            }
        }
    }
    if history.last().map(|h| h.0) != Some(iters) {
        history.push((iters, eval_dense(target, &x, mode)?));
    }
    Ok(SolveTrace { initial_point, final_point: x, objective_history: history, iterations_run: iters })
}

/// Full-batch subgradient method `x ← x − lr·g(x)` from a Gaussian start.
/// `momentum` and `batch_fraction` are ignored.
pub fn subgradient_descent(
    f: &dyn Fn(&[f64]) -> f64,
    subgrad: &dyn Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    cfg: &SolverConfig,
) -> Result<SolveTrace> {
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be positive".into()));
    }
    let mut rng = stream(cfg.seed);
    let initial_point = cfg.initial_point(&mut rng, dim);
    let mut x = initial_point.clone();
    let mut history = vec![(0, f(&x))];
    for it in 1..=cfg.max_iters {
        let g = subgrad(&x);
        if g.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
        }
        x.iter_mut().zip(&g).for_each(|(xi, gi)| *xi -= cfg.learning_rate * gi);
        if it % cfg.log_every == 0 || it == cfg.max_iters {
            history.push((it, f(&x)));
        }
    }
    Ok(SolveTrace { initial_point, final_point: x, objective_history: history, iterations_run: cfg.max_iters })
}

/// `min_σ ‖x − σy‖ / ‖y‖` over `σ = +1`, and also `σ = −1` when `d` is even.
pub fn relative_error(x: &[f64], y: &[f64], d: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), got: x.len() });
    }
    let norm_y = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_y == 0.0 {
        return Err(Error::InvalidProblem("relative error is undefined for y = 0".into()));
    }
    let dist = |s: f64| x.iter().zip(y).map(|(a, b)| (a - s * b).powi(2)).sum::<f64>().sqrt();
    let mut best = dist(1.0);
    if d % 2 == 0 {
        best = best.min(dist(-1.0));
    }
    Ok(best / norm_y)
}
