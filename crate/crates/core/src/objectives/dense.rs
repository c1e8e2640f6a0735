use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tuples::sign0;
use crate::error::{Error, Result};

/// Fitting loss for the dense order-2 problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    /// Least absolute value, `Σ|x_i x_j − b_ij|`.
    L1,
    /// Least squares, `Σ(x_i x_j − b_ij)²`.
    L2,
}

impl Loss {
    pub fn as_str(self) -> &'static str {
        match self {
            Loss::L1 => "l1",
            Loss::L2 => "l2",
        }
    }

    #[inline]
    fn value(self, r: f64) -> f64 {
        match self {
            Loss::L1 => r.abs(),
            Loss::L2 => r * r,
        }
    }

    #[inline]
    fn slope(self, r: f64) -> f64 {
        match self {
            Loss::L1 => sign0(r),
            Loss::L2 => 2.0 * r,
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" | "lav" => Ok(Loss::L1),
            "l2" | "ls" => Ok(Loss::L2),
            other => Err(Error::InvalidConfig(format!("unknown loss '{other}' (expected l1 or l2)"))),
        }
    }
}

/// Explicit `n × n` target `b_ij = y_i y_j + ε_ij`, stored row-major, with the
/// positions that carry noise.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTarget {
    n: usize,
    entries: Vec<f64>,
    noise_mask: Vec<(usize, usize)>,
}

impl DenseTarget {
    pub fn new(n: usize, entries: Vec<f64>, mut noise_mask: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProblem("dense target must be at least 1x1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("dense target has a non-finite entry".into()));
        }
        if let Some(&(i, j)) = noise_mask.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::InvalidProblem(format!("noise position ({i}, {j}) out of bounds")));
        }
        noise_mask.sort_unstable();
        noise_mask.dedup();
        Ok(Self { n, entries, noise_mask })
    }

    /// The noiseless target `y yᵀ`.
    pub fn rank_one(y: &[f64]) -> Result<Self> {
        let entries = y.iter().flat_map(|&a| y.iter().map(move |&b| a * b)).collect();
        Self::new(y.len(), entries, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Sorted, deduplicated noisy positions.
    pub fn noise_mask(&self) -> &[(usize, usize)] {
        &self.noise_mask
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(())
    }
}

pub fn eval_dense(target: &DenseTarget, x: &[f64], mode: Loss) -> Result<f64> {
    target.check_point(x)?;
    let n = target.n;
    let mut sum = 0.0;
    for i in 0..n {
        let row = &target.entries[i * n..(i + 1) * n];
        for (j, &b) in row.iter().enumerate() {
            sum += mode.value(x[i] * x[j] - b);
        }
    }
    Ok(sum)
}

/// Full (sub)gradient of [`eval_dense`]; the L1 branch uses `sign(0) = 0`.
pub fn subgrad_dense(target: &DenseTarget, x: &[f64], mode: Loss) -> Result<Vec<f64>> {
    target.check_point(x)?;
    let mut grad = vec![0.0; target.n];
    accumulate_terms(target, x, mode, 0..target.n * target.n, &mut grad);
    Ok(grad)
}

/// Adds the (sub)gradient of the selected terms (flat row-major indices) to
/// `grad`.
pub(crate) fn accumulate_terms(
    target: &DenseTarget,
    x: &[f64],
    mode: Loss,
    terms: impl IntoIterator<Item = usize>,
    grad: &mut [f64],
) {
    let n = target.n;
    for t in terms {
        let (i, j) = (t / n, t % n);
        let w = mode.slope(x[i] * x[j] - target.entries[t]);
        grad[i] += w * x[j];
        grad[j] += w * x[i];
    }
}
