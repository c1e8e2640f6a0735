//! Grid oracle for landscape claims.
//!
//! A function is sampled on a regular grid over a box, grid-local minima are
//! found with the full Moore neighbourhood, and the minima are grouped into
//! plateaus. Verdicts are desk-scale evidence about the continuous function,
//! never a proof.
//!
//! A raw grid-local minimum that lies above the global grid level is first
//! handed to a local descent walk on finer sub-grids. If the walk reaches the
//! global level the minimum was an artifact of the spacing and is reported as
//! such; only minima the walk cannot escape count as spurious.

mod grid;
mod harness;
mod refine;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use grid::GridValues;
pub use harness::{
    check_change_of_variables, check_compact_convergence, check_composition, verify_on_region_s,
    ConvergencePoint,
};

/// Scalar objective sampled by the oracle. Must be pure.
pub type Objective<'f> = dyn Fn(&[f64]) -> f64 + Sync + 'f;
/// Domain predicate; grid points where it is false are skipped.
pub type Mask<'f> = dyn Fn(&[f64]) -> bool + Sync + 'f;

pub const MAX_GRID_POINTS: u64 = 10_000_000;
/// Default plateau and verdict tolerance on values.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative tie tolerance for grid argmin sets.
pub const ARGMIN_RTOL: f64 = 1e-12;

/// How the edge of a [`GridBox`] is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// The box is the domain; edge points only see neighbours inside it.
    Closed,
    /// The box is a window onto a larger domain; a one-point halo outside
    /// the box is evaluated so edge points get full neighbourhoods.
    Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: usize,
    boundary: Boundary,
}

impl GridBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: usize) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidGrid(format!(
                "corner dimensions {} and {} must match and be positive",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("box corners must be finite".into()));
        }
        if let Some(a) = (0..lower.len()).find(|&a| lower[a] >= upper[a]) {
            return Err(Error::InvalidGrid(format!("lower[{a}] = {} is not below upper[{a}] = {}", lower[a], upper[a])));
        }
        if resolution < 3 {
            return Err(Error::InvalidGrid(format!("resolution {resolution} is below 3")));
        }
        let total = (resolution as f64).powi(lower.len() as i32);
        if total > MAX_GRID_POINTS as f64 {
            return Err(Error::InvalidGrid(format!("{total} grid points exceed the limit of {MAX_GRID_POINTS}")));
        }
        Ok(Self { lower, upper, resolution, boundary: Boundary::Closed })
    }

    /// `[lo, hi]ⁿ`.
    pub fn cube(dim: usize, lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], resolution)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Grid spacing along `axis`.
    pub fn step(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.resolution - 1) as f64
    }

    /// Number of grid points (halo excluded).
    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid point with multi-index `idx`, using the same coordinates the
    /// oracle evaluates.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        let denom = (self.resolution - 1) as f64;
        idx.iter()
            .enumerate()
            .map(|(a, &k)| {
                let t = k as f64 / denom;
                self.lower[a] * (1.0 - t) + self.upper[a] * t
            })
            .collect()
    }
}

/// A grid box, optionally restricted by a mask.
#[derive(Clone, Copy)]
pub struct Domain<'a> {
    pub grid: &'a GridBox,
    pub mask: Option<&'a Mask<'a>>,
}

impl<'a> Domain<'a> {
    pub fn masked(grid: &'a GridBox, mask: &'a Mask<'a>) -> Self {
        Self { grid, mask: Some(mask) }
    }
}

impl<'a> From<&'a GridBox> for Domain<'a> {
    fn from(grid: &'a GridBox) -> Self {
        Self { grid, mask: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Global,
    WeaklyGlobalOnly,
    SpuriousFound,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Global => "GLOBAL",
            Verdict::WeaklyGlobalOnly => "WEAKLY_GLOBAL_ONLY",
            Verdict::SpuriousFound => "SPURIOUS_FOUND",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Status of a plateau after refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateauKind {
    /// At the global grid level.
    Global,
    /// Above the global level on the grid, but a descent walk from it reaches
    /// the global level.
    Artifact,
    /// Above the global level and the walk stalls.
    NonGlobal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub points: Vec<Vec<f64>>,
    pub value: f64,
    /// Every neighbour outside the plateau is larger by more than the tolerance.
    pub strict: bool,
    pub kind: PlateauKind,
    /// Lowest value reached by the descent walk, for non-global plateaus.
    pub refined_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub grid_local_minima: Vec<GridMinimum>,
    pub plateaus: Vec<Plateau>,
    pub global_value: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

impl GridReport {
    /// Plateaus the walk could not escape.
    pub fn spurious(&self) -> impl Iterator<Item = &Plateau> {
        self.plateaus.iter().filter(|p| p.kind == PlateauKind::NonGlobal)
    }
}

/// Grid points with no strictly smaller Moore neighbour, in grid order.
pub fn grid_local_minima(f: &Objective<'_>, grid: &GridBox) -> Result<Vec<GridMinimum>> {
    grid_local_minima_in(f, Domain::from(grid))
}

pub fn grid_local_minima_in(f: &Objective<'_>, domain: Domain<'_>) -> Result<Vec<GridMinimum>> {
    let values = GridValues::evaluate(f, domain.grid, domain.mask)?;
    Ok(values
        .local_minima()
        .into_iter()
        .map(|i| GridMinimum { point: values.lattice.point(i), value: values.values[i] })
        .collect())
}

/// Samples `f` over the domain.
pub fn evaluate_grid<'a>(f: &Objective<'_>, domain: impl Into<Domain<'a>>) -> Result<GridValues> {
    let domain = domain.into();
    GridValues::evaluate(f, domain.grid, domain.mask)
}

/// `GLOBAL` unless some non-global plateau survives refinement.
pub fn verify_global<'a>(f: &Objective<'_>, domain: impl Into<Domain<'a>>, tol: f64) -> Result<GridReport> {
    analyze(f, domain.into(), tol, false)
}

/// Like [`verify_global`], but surviving plateaus that are all non-strict give
/// `WEAKLY_GLOBAL_ONLY`.
pub fn verify_weakly_global<'a>(f: &Objective<'_>, domain: impl Into<Domain<'a>>, tol: f64) -> Result<GridReport> {
    analyze(f, domain.into(), tol, true)
}

fn analyze(f: &Objective<'_>, domain: Domain<'_>, tol: f64, weak: bool) -> Result<GridReport> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidGrid(format!("tolerance {tol} must be finite and non-negative")));
    }
    let values = GridValues::evaluate(f, domain.grid, domain.mask)?;
    let (_, global_value) = values.global_min();
    let minima = values.local_minima();
    let groups = grid::cluster(&values, &minima, tol);

    let plateaus: Vec<Plateau> = groups
        .par_iter()
        .map(|members| {
            let value = members.iter().map(|&i| values.values[i]).fold(f64::INFINITY, f64::min);
            let strict = grid::is_strict(&values, members, value, tol);
            let points: Vec<Vec<f64>> = members.iter().map(|&i| values.lattice.point(i)).collect();
            if value <= global_value + tol {
                return Plateau { points, value, strict, kind: PlateauKind::Global, refined_value: None };
            }
            let start = central_member(&points);
            let walk = refine::descent_walk(f, &domain, &points[start], global_value + tol);
            let kind = if walk.value <= global_value + tol { PlateauKind::Artifact } else { PlateauKind::NonGlobal };
            Plateau { points, value, strict, kind, refined_value: Some(walk.value) }
        })
        .collect();

    let mut surviving = plateaus.iter().filter(|p| p.kind == PlateauKind::NonGlobal).peekable();
    let verdict = if surviving.peek().is_none() {
        Verdict::Global
    } else if weak && surviving.all(|p| !p.strict) {
        Verdict::WeaklyGlobalOnly
    } else {
        Verdict::SpuriousFound
    };
    let grid_local_minima = minima
        .iter()
        .map(|&i| GridMinimum { point: values.lattice.point(i), value: values.values[i] })
        .collect();
    Ok(GridReport { grid_local_minima, plateaus, global_value, verdict, tolerance: tol })
}

/// Member closest to the plateau's centroid (first on ties).
fn central_member(points: &[Vec<f64>]) -> usize {
    let dim = points[0].len();
    let c: Vec<f64> = (0..dim).map(|a| points.iter().map(|p| p[a]).sum::<f64>() / points.len() as f64).collect();
    let dist = |p: &Vec<f64>| p.iter().zip(&c).map(|(x, m)| (x - m) * (x - m)).sum::<f64>();
    let mut best = 0;
    for (k, p) in points.iter().enumerate() {
        if dist(p) < dist(&points[best]) {
            best = k;
        }
    }
    best
}
