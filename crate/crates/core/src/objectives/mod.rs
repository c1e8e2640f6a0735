//! Rank-one tensor objectives.
//!
//! For a ground truth `y ∈ ℝⁿ` and order `d`, every objective here is a
//! function of the residuals `x_{i1}⋯x_{id} − y_{i1}⋯y_{id}` over all `nᵈ`
//! index tuples:
//!
//! - `f₁`  : sum of absolute residuals
//! - `f_p` : sum of `|r|^p`, `p > 1` (smooth)
//! - `h_p` : `f_p^{1/p}`
//! - `f_∞` : maximum absolute residual
//!
//! The dense order-2 variants (least squares / least absolute value against an
//! explicit, possibly corrupted target matrix) live in [`dense`].

mod dense;
mod region;
pub(crate) mod tuples;

pub use dense::{eval_dense, subgrad_dense, DenseTarget, Loss};
pub(crate) use dense::accumulate_terms;
pub use region::{closed_form_f1_on_s, in_region_s, max_ratio_product, REGION_TOL};
pub(crate) use region::max_product_of;

use crate::error::{Error, Result};
use tuples::{for_each_product, sign0};

/// Default cap on `nᵈ`, the number of index tuples an instance may have.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Ground truth `y` and tensor order `d` defining the target `y^⊗d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorProblem {
    y: Vec<f64>,
    order: usize,
}

impl TensorProblem {
    pub fn new(y: Vec<f64>, order: usize) -> Result<Self> {
        Self::with_budget(y, order, DEFAULT_BUDGET)
    }

    /// Like [`TensorProblem::new`] with a custom cap on `nᵈ`.
    pub fn with_budget(y: Vec<f64>, order: usize, budget: u64) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidProblem("ground truth must have n >= 1 entries".into()));
        }
        if order == 0 {
            return Err(Error::InvalidProblem("tensor order must be d >= 1".into()));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("ground truth entry {i} is not finite")));
        }
        let n = y.len();
        let over = u32::try_from(order)
            .ok()
            .and_then(|d| (n as u64).checked_pow(d))
            .map_or(true, |count| count > budget);
        if over {
            return Err(Error::BudgetExceeded { n, d: order, budget });
        }
        Ok(Self { y, order })
    }

    pub fn truth(&self) -> &[f64] {
        &self.y
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    /// Number of index tuples, `nᵈ`.
    pub fn tuple_count(&self) -> u64 {
        (self.y.len() as u64).pow(self.order as u32)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.y.len() {
            return Err(Error::DimensionMismatch { expected: self.y.len(), got: x.len() });
        }
        Ok(())
    }

    /// Calls `visit(x-product, y-product)` for every `d`-tuple.
    pub(crate) fn for_each_tuple(&self, x: &[f64], visit: impl FnMut(f64, f64)) {
        for_each_product(x, &self.y, self.order, visit);
    }

    /// Calls `visit(x-product, y-product)` for every `(d−1)`-tuple.
    pub(crate) fn for_each_cotuple(&self, x: &[f64], visit: impl FnMut(f64, f64)) {
        for_each_product(x, &self.y, self.order - 1, visit);
    }
}

/// Exponent selecting a member of the objective family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    /// `f₁`
    One,
    /// `f_p` with `p > 1`
    Finite(f64),
    /// `f_∞`
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self::Finite(p))
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 || p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Evaluates the family member selected by `exponent`.
pub fn eval(prob: &TensorProblem, x: &[f64], exponent: Exponent) -> Result<f64> {
    match exponent {
        Exponent::One => eval_f1(prob, x),
        Exponent::Finite(p) => eval_fp(prob, x, p),
        Exponent::Infinity => eval_finf(prob, x),
    }
}

pub fn eval_f1(prob: &TensorProblem, x: &[f64]) -> Result<f64> {
    prob.check_point(x)?;
    let mut sum = 0.0;
    prob.for_each_tuple(x, |a, b| sum += (a - b).abs());
    Ok(sum)
}

pub fn eval_fp(prob: &TensorProblem, x: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    prob.check_point(x)?;
    let mut sum = 0.0;
    if p == 2.0 {
        prob.for_each_tuple(x, |a, b| {
            let r = a - b;
            sum += r * r;
        });
    } else {
        prob.for_each_tuple(x, |a, b| sum += (a - b).abs().powf(p));
    }
    Ok(sum)
}

/// Gradient of [`eval_fp`].
///
/// Uses the symmetric form `∂f_p/∂x_i = d·p·Σ_τ X_τ·φ(X_τ x_i − Y_τ y_i)` over
/// `(d−1)`-tuples `τ`, with `φ(r) = |r|^{p−2} r` and `φ(0) = 0`. No division by
/// entries of `x` is involved.
pub fn grad_fp(prob: &TensorProblem, x: &[f64], p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    prob.check_point(x)?;
    let phi = |r: f64| sign0(r) * r.abs().powf(p - 1.0);
    let mut grad = vec![0.0; x.len()];
    let y = prob.truth();
    prob.for_each_cotuple(x, |cx, cy| {
        if cx == 0.0 {
            return;
        }
        for (i, g) in grad.iter_mut().enumerate() {
            *g += cx * phi(cx * x[i] - cy * y[i]);
        }
    });
    let scale = prob.order() as f64 * p;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(grad)
}

pub fn eval_finf(prob: &TensorProblem, x: &[f64]) -> Result<f64> {
    prob.check_point(x)?;
    let mut max = 0.0f64;
    prob.for_each_tuple(x, |a, b| max = max.max((a - b).abs()));
    Ok(max)
}

/// `h_p = f_p^{1/p}`, evaluated as `m·(Σ(|r|/m)^p)^{1/p}` with `m` the largest
/// residual so large `p` neither overflows nor underflows.
pub fn eval_hp(prob: &TensorProblem, x: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    let max = eval_finf(prob, x)?;
    if max == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    prob.for_each_tuple(x, |a, b| sum += ((a - b).abs() / max).powf(p));
    Ok(max * sum.powf(1.0 / p))
}

/// A Clarke subgradient of `f₁`: the gradient formula with `sign(0) = 0`.
pub fn subgrad_f1(prob: &TensorProblem, x: &[f64]) -> Result<Vec<f64>> {
    prob.check_point(x)?;
    let mut grad = vec![0.0; x.len()];
    let y = prob.truth();
    prob.for_each_cotuple(x, |cx, cy| {
        if cx == 0.0 {
            return;
        }
        for (i, g) in grad.iter_mut().enumerate() {
            *g += cx * sign0(cx * x[i] - cy * y[i]);
        }
    });
    let scale = prob.order() as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(grad)
}
