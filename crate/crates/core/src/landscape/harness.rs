use serde::{Deserialize, Serialize};

use super::{evaluate_grid, verify_global, Domain, GridBox, GridReport, Objective, ARGMIN_RTOL};
use crate::error::{Error, Result};
use crate::objectives::{eval_f1, max_product_of, TensorProblem, REGION_TOL};

/// True when `f` and `phi ∘ f` get the same verdict and the same grid argmin
/// set. `phi` should be strictly increasing on the range of `f`.
pub fn check_composition<'a>(
    f: &Objective<'_>,
    phi: &(dyn Fn(f64) -> f64 + Sync + '_),
    domain: impl Into<Domain<'a>>,
    tol: f64,
) -> Result<bool> {
    let domain = domain.into();
    let composed = |x: &[f64]| phi(f(x));
    let a = verify_global(f, domain, tol)?;
    let b = verify_global(&composed, domain, tol)?;
    let argmin_a = evaluate_grid(f, domain)?.argmin_points(ARGMIN_RTOL);
    let argmin_b = evaluate_grid(&composed, domain)?.argmin_points(ARGMIN_RTOL);
    Ok(a.verdict == b.verdict && argmin_a == argmin_b)
}

/// Compares `f` on `source` with `f ∘ inverse` on `target`: verdicts must
/// agree and each argmin set must map into the other within one grid cell.
pub fn check_change_of_variables(
    f: &Objective<'_>,
    forward: &(dyn Fn(&[f64]) -> Vec<f64> + Sync + '_),
    inverse: &(dyn Fn(&[f64]) -> Vec<f64> + Sync + '_),
    source: Domain<'_>,
    target: Domain<'_>,
    tol: f64,
) -> Result<bool> {
    if source.grid.dim() != target.grid.dim() {
        return Err(Error::DimensionMismatch { expected: source.grid.dim(), got: target.grid.dim() });
    }
    let pulled = |u: &[f64]| f(&inverse(u));
    let a = verify_global(f, source, tol)?;
    let b = verify_global(&pulled, target, tol)?;
    let argmin_src = evaluate_grid(f, source)?.argmin_points(ARGMIN_RTOL);
    let argmin_tgt = evaluate_grid(&pulled, target)?.argmin_points(ARGMIN_RTOL);
    let covered = |pts: &[Vec<f64>], map: &dyn Fn(&[f64]) -> Vec<f64>, onto: &[Vec<f64>], grid: &GridBox| {
        pts.iter().all(|p| {
            let q = map(p);
            onto.iter().any(|r| (0..grid.dim()).all(|a| (q[a] - r[a]).abs() <= grid.step(a) * (1.0 + 1e-9)))
        })
    };
    Ok(a.verdict == b.verdict
        && covered(&argmin_src, forward, &argmin_tgt, target.grid)
        && covered(&argmin_tgt, inverse, &argmin_src, source.grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub p: f64,
    pub sup_distance: f64,
}

/// Grid sup-distance between `family(p, ·)` and `target` for each `p`.
pub fn check_compact_convergence<'a>(
    family: &(dyn Fn(f64, &[f64]) -> f64 + Sync + '_),
    target: &Objective<'_>,
    domain: impl Into<Domain<'a>>,
    schedule: &[f64],
) -> Result<Vec<ConvergencePoint>> {
    let domain = domain.into();
    let reference = evaluate_grid(target, domain)?;
    schedule
        .iter()
        .map(|&p| {
            let member = |x: &[f64]| family(p, x);
            let values = evaluate_grid(&member, domain)?;
            Ok(ConvergencePoint { p, sup_distance: values.sup_distance(&reference) })
        })
        .collect()
}

/// [`verify_global`] for `f₁` on the grid points of `grid` that lie in the
/// region where every ratio product is at most one.
pub fn verify_on_region_s(prob: &TensorProblem, grid: &GridBox, tol: f64) -> Result<GridReport> {
    if grid.dim() != prob.dim() {
        return Err(Error::DimensionMismatch { expected: prob.dim(), got: grid.dim() });
    }
    if let Some(i) = prob.truth().iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroTruthEntry(i));
    }
    let y = prob.truth();
    let order = prob.order();
    let mask = |x: &[f64]| {
        let r: Vec<f64> = x.iter().zip(y).map(|(a, b)| a / b).collect();
        max_product_of(&r, order).is_some_and(|m| m <= 1.0 + REGION_TOL)
    };
    let f = |x: &[f64]| eval_f1(prob, x).expect("dimension checked");
    verify_global(&f, Domain::masked(grid, &mask), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{Verdict, DEFAULT_TOL};

    #[test]
    fn exp_of_abs_keeps_argmin() {
        let grid = GridBox::new(vec![-1.0], vec![1.0], 101).unwrap();
        assert!(check_composition(&|x: &[f64]| x[0].abs(), &f64::exp, &grid, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn cube_map_on_abs() {
        let grid = GridBox::new(vec![-1.0], vec![1.0], 101).unwrap();
        let fwd = |x: &[f64]| vec![x[0].powi(3)];
        let inv = |u: &[f64]| vec![u[0].cbrt()];
        let ok = check_change_of_variables(
            &|x: &[f64]| x[0].abs(),
            &fwd,
            &inv,
            Domain::from(&grid),
            Domain::from(&grid),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn empty_region_is_an_error() {
        let prob = TensorProblem::new(vec![1.0, 1.0], 2).unwrap();
        let far = GridBox::cube(2, 5.0, 6.0, 11).unwrap();
        assert!(matches!(verify_on_region_s(&prob, &far, DEFAULT_TOL), Err(Error::EmptyDomain)));
    }

    #[test]
    fn region_verdict_for_ones() {
        let prob = TensorProblem::new(vec![1.0, 1.0], 2).unwrap();
        let grid = GridBox::cube(2, -2.0, 2.0, 41).unwrap();
        let report = verify_on_region_s(&prob, &grid, DEFAULT_TOL).unwrap();
        assert_eq!(report.verdict, Verdict::Global);
        assert_eq!(report.global_value, 0.0);
    }
}
