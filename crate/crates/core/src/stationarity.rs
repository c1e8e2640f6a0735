//! Clarke first-order stationarity of `f₁`.
//!
//! At a point `x`, the Clarke inclusion for coordinate `i` reads
//!
//! ```text
//! 0 ∈ Σ_τ X_τ · sign(X_τ x_i − Y_τ y_i)
//! ```
//!
//! over `(d−1)`-tuples `τ`, where `X_τ`, `Y_τ` are the products of the selected
//! entries and `sign(0) = [−1, 1]`. The right-hand side is an interval; it is
//! the subdifferential of `f₁` along `x_i` divided by `d`.
//!
//! When no `y_i` vanishes and `x ≠ 0`, dividing by `y_i` turns every
//! coordinate's inclusion into the same increasing set-valued step function
//! (the [`Staircase`]) evaluated at the ratio `t = x_i / y_i`. Each `τ` with
//! `X_τ ≠ 0` contributes a jump of height `2|X_τ|` at `t* = Y_τ / X_τ`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{eval_f1, max_product_of, TensorProblem};
use crate::rng;

/// Default containment tolerance for `0 ∈ [lo, hi]`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Residuals with `|r| ≤ ZERO_RESIDUAL_RTOL · (|X x_i| + |Y y_i|)` count as zero.
pub const ZERO_RESIDUAL_RTOL: f64 = 1e-12;

/// Relative tolerance for merging jump points and for matching `t` to a jump.
pub const JUMP_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lo - tol <= v && v <= self.hi + tol
    }

    /// Distance from `v` to the interval (0 when inside).
    pub fn gap(&self, v: f64) -> f64 {
        (self.lo - v).max(v - self.hi).max(0.0)
    }

    fn negated(self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub stationary: bool,
    pub per_coordinate_interval: Vec<Interval>,
    /// `y_i = 0 ⇒ |x_i| ≤ tol` for every `i`.
    pub lemma1_zero_pattern_ok: bool,
    /// `max_ratio_product ≤ 1 + tol`.
    pub lemma1_ratio_bound_ok: bool,
    /// Largest `x`-product over `y`-product on tuples whose `y`-product is
    /// nonzero; `0` when every `y_i` is zero.
    pub max_ratio_product: f64,
}

fn is_zero_residual(cx: f64, xi: f64, cy: f64, yi: f64) -> bool {
    let r = cx * xi - cy * yi;
    r.abs() <= ZERO_RESIDUAL_RTOL * ((cx * xi).abs() + (cy * yi).abs())
}

/// The set-valued Clarke sum for coordinate `i`.
pub fn clarke_interval(prob: &TensorProblem, x: &[f64], i: usize) -> Result<Interval> {
    prob.check_point(x)?;
    if i >= prob.dim() {
        return Err(Error::InvalidProblem(format!("coordinate {i} out of range for n = {}", prob.dim())));
    }
    let (xi, yi) = (x[i], prob.truth()[i]);
    let (mut lo, mut hi) = (0.0, 0.0);
    prob.for_each_cotuple(x, |cx, cy| {
        if cx == 0.0 {
            return;
        }
        if is_zero_residual(cx, xi, cy, yi) {
            lo -= cx.abs();
            hi += cx.abs();
        } else {
            let s = if cx * xi - cy * yi > 0.0 { cx } else { -cx };
            lo += s;
            hi += s;
        }
    });
    Ok(Interval { lo, hi })
}

pub fn is_clarke_stationary(prob: &TensorProblem, x: &[f64], tol: f64) -> Result<StationarityReport> {
    prob.check_point(x)?;
    let intervals = (0..prob.dim())
        .map(|i| clarke_interval(prob, x, i))
        .collect::<Result<Vec<_>>>()?;
    let stationary = intervals.iter().all(|iv| iv.contains(0.0, tol));

    let y = prob.truth();
    let zero_ok = x.iter().zip(y).all(|(&a, &b)| b != 0.0 || a.abs() <= tol);
    let ratios: Vec<f64> = x.iter().zip(y).filter(|(_, &b)| b != 0.0).map(|(a, b)| a / b).collect();
    let max_ratio = max_product_of(&ratios, prob.order()).unwrap_or(0.0);

    Ok(StationarityReport {
        stationary,
        per_coordinate_interval: intervals,
        lemma1_zero_pattern_ok: zero_ok,
        lemma1_ratio_bound_ok: max_ratio <= 1.0 + tol,
        max_ratio_product: max_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub point: f64,
    pub weight: f64,
}

/// Increasing set-valued step function whose roots are the ratios `x_i/y_i`
/// of a stationary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Staircase {
    jumps: Vec<Jump>,
    base: f64,
}

fn same_point(a: f64, b: f64) -> bool {
    (a - b).abs() <= JUMP_RTOL * a.abs().max(b.abs())
}

impl Staircase {
    /// Jump points in increasing order, duplicates merged.
    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Value left of every jump.
    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn eval(&self, t: f64) -> Interval {
        let mut below = 0.0;
        let mut at = 0.0;
        for j in &self.jumps {
            if same_point(j.point, t) {
                at += j.weight;
            } else if j.point < t {
                below += j.weight;
            } else {
                break;
            }
        }
        let lo = self.base + 2.0 * below;
        Interval { lo, hi: lo + 2.0 * at }
    }

    pub fn has_root_at(&self, t: f64, tol: f64) -> bool {
        self.eval(t).contains(0.0, tol)
    }
}

fn check_nonzero_truth(prob: &TensorProblem) -> Result<()> {
    match prob.truth().iter().position(|&v| v == 0.0) {
        Some(i) => Err(Error::ZeroTruthEntry(i)),
        None => Ok(()),
    }
}

pub fn build_staircase(prob: &TensorProblem, x: &[f64]) -> Result<Staircase> {
    prob.check_point(x)?;
    check_nonzero_truth(prob)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroPoint);
    }

    let mut raw = Vec::new();
    prob.for_each_cotuple(x, |cx, cy| {
        if cx != 0.0 {
            raw.push(Jump { point: cy / cx, weight: cx.abs() });
        }
    });
    raw.sort_by(|a, b| a.point.total_cmp(&b.point));

    let mut jumps: Vec<Jump> = Vec::with_capacity(raw.len());
    for j in raw {
        match jumps.last_mut() {
            Some(last) if same_point(last.point, j.point) => last.weight += j.weight,
            _ => jumps.push(j),
        }
    }
    let base = -jumps.iter().map(|j| j.weight).sum::<f64>();
    Ok(Staircase { jumps, base })
}

/// For a stationary `x`: every positive jump point bounds all ratios `x_i/y_i`
/// from above and every negative jump point bounds them from below.
///
/// Errors with [`Error::NotStationary`] when `x` fails the stationarity test at
/// [`DEFAULT_TOL`].
pub fn verify_root_jump_separation(prob: &TensorProblem, x: &[f64]) -> Result<bool> {
    let report = is_clarke_stationary(prob, x, DEFAULT_TOL)?;
    if !report.stationary {
        let gap = report
            .per_coordinate_interval
            .iter()
            .map(|iv| iv.gap(0.0))
            .fold(0.0, f64::max);
        return Err(Error::NotStationary(gap));
    }
    let stairs = build_staircase(prob, x)?;
    let ratios: Vec<f64> = x.iter().zip(prob.truth()).map(|(a, b)| a / b).collect();
    let ok = stairs.jumps().iter().all(|j| {
        let slack = DEFAULT_TOL * j.point.abs().max(1.0);
        if j.point > 0.0 {
            ratios.iter().all(|&t| t <= j.point + slack)
        } else {
            ratios.iter().all(|&t| t >= j.point - slack)
        }
    });
    Ok(ok)
}

/// Staircase value at `x_i / y_i` expressed through coordinate `i`'s Clarke
/// interval: the two agree up to the sign of `y_i`.
pub fn staircase_from_clarke(prob: &TensorProblem, x: &[f64], i: usize) -> Result<Interval> {
    let iv = clarke_interval(prob, x, i)?;
    Ok(if prob.truth()[i] < 0.0 { iv.negated() } else { iv })
}

/// A point with `Σ|y_i| x_i/y_i = 0` and every ratio `|x_i/y_i| < 1`: Clarke
/// stationary, inside the region, and not a local minimum.
///
/// Built from the first two coordinates, with ratios `(a, −a|y₁|/|y₂|, 0, …)`
/// and `a` drawn from `seed`.
pub fn make_remark_point(prob: &TensorProblem, seed: u64) -> Result<Vec<f64>> {
    if prob.dim() < 2 {
        return Err(Error::InvalidProblem("remark points need n >= 2".into()));
    }
    if prob.order() < 2 {
        return Err(Error::InvalidProblem("remark points need d >= 2".into()));
    }
    check_nonzero_truth(prob)?;
    let y = prob.truth();
    let mut rng = rng::stream(seed);
    let a: f64 = rng.random_range(0.1..0.9);
    let mut u = vec![0.0; y.len()];
    u[0] = a;
    u[1] = -a * y[0].abs() / y[1].abs();
    if u[1].abs() > 0.9 {
        let s = 0.9 / u[1].abs();
        u[0] *= s;
        u[1] *= s;
    }
    Ok(u.iter().zip(y).map(|(r, b)| r * b).collect())
}

/// Samples `samples` points uniformly on each sphere of the given radii around
/// `x` and returns the first one where `f₁` is strictly smaller.
pub fn ball_descent_witness(
    prob: &TensorProblem,
    x: &[f64],
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Option<Vec<f64>>> {
    let center = eval_f1(prob, x)?;
    let mut rng = rng::stream(seed);
    let mut dir = vec![0.0; x.len()];
    for &radius in radii {
        for _ in 0..samples {
            dir.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, v)| a + radius * v / norm).collect();
            if eval_f1(prob, &cand)? < center {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}
