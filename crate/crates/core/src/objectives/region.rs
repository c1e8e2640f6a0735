use super::TensorProblem;
use crate::error::{Error, Result};

/// Slack on the `≤ 1` comparison so boundary points such as `x = ±y` test true.
pub const REGION_TOL: f64 = 1e-12;

/// Largest product of `order` factors, each drawn independently from `values`.
///
/// Tracks the achievable `[min, max]` product while adding one factor at a
/// time; both extremes of a product of two sets are attained at the extremes of
/// each set, so this is exact in `O(len + order)`. Returns `None` when `values`
/// is empty.
pub(crate) fn max_product_of(values: &[f64], order: usize) -> Option<f64> {
    let hi_f = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo_f = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        return None;
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    for _ in 0..order {
        let c = [lo * lo_f, lo * hi_f, hi * lo_f, hi * hi_f];
        lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    Some(hi)
}

fn ratios(prob: &TensorProblem, x: &[f64]) -> Result<Vec<f64>> {
    prob.check_point(x)?;
    if let Some(i) = prob.truth().iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroTruthEntry(i));
    }
    Ok(x.iter().zip(prob.truth()).map(|(a, b)| a / b).collect())
}

/// Largest ratio product `x_{i1}⋯x_{id} / (y_{i1}⋯y_{id})` over all tuples.
pub fn max_ratio_product(prob: &TensorProblem, x: &[f64]) -> Result<f64> {
    let r = ratios(prob, x)?;
    Ok(max_product_of(&r, prob.order()).expect("n >= 1"))
}

/// Membership in the region where every ratio product is at most one.
pub fn in_region_s(prob: &TensorProblem, x: &[f64]) -> Result<bool> {
    Ok(max_ratio_product(prob, x)? <= 1.0 + REGION_TOL)
}

/// `f₁` on the region, `(Σ|y_i|)ᵈ − (Σ|y_i| x_i/y_i)ᵈ`. Off the region the
/// identity does not hold, so such points are rejected.
pub fn closed_form_f1_on_s(prob: &TensorProblem, x: &[f64]) -> Result<f64> {
    if !in_region_s(prob, x)? {
        return Err(Error::OutsideRegion);
    }
    let y = prob.truth();
    let total: f64 = y.iter().map(|v| v.abs()).sum();
    let weighted: f64 = x.iter().zip(y).map(|(a, b)| b.abs() * (a / b)).sum();
    let d = prob.order() as i32;
    Ok(total.powi(d) - weighted.powi(d))
}
