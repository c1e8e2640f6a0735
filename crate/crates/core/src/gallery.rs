//! Named example functions with the landscape property each is known for.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{Boundary, GridBox};

pub const DEFAULT_TAKAGI_TERMS: u32 = 48;

/// `(x² + x⁴) / (1 + x⁴)`: global, with value tending to 1 at infinity.
pub fn rational_global(x: f64) -> f64 {
    let x2 = x * x;
    let x4 = x2 * x2;
    (x2 + x4) / (1.0 + x4)
}

/// Global on `[−1, 1]²` (minimum −1 along `x₂ = −1`) yet no strictly
/// decreasing path leads there from points near `x₁ = 0`.
pub fn nopath(x1: f64, x2: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x1) || !(-1.0..=1.0).contains(&x2) {
        return Err(Error::OutOfDomain(format!("nopath is defined on [-1, 1]^2, got ({x1}, {x2})")));
    }
    let a = x1.abs();
    let c = if a == 0.0 { 0.0 } else { 4.0 * a.powi(3) * ((-1.0 / a).sin() + 1.0) };
    Ok(if x2 >= 0.0 {
        -c * (1.0 - x2)
    } else {
        (3.0 * c - 2.0) * x2.powi(3) + (5.0 * c - 3.0) * x2 * x2 + c * x2 - c
    })
}

/// `(x₂ − x₁²)(x₂ − 4x₁²)`: the origin has no descent direction, but the
/// curve `(√10/4·t, t²)` descends from it.
pub fn hestenes(x1: f64, x2: f64) -> f64 {
    let s = x1 * x1;
    (x2 - s) * (x2 - 4.0 * s)
}

/// The descent curve for [`hestenes`].
pub fn hestenes_path(t: f64) -> (f64, f64) {
    (10f64.sqrt() / 4.0 * t, t * t)
}

/// Distance to the nearest integer.
fn saw(z: f64) -> f64 {
    (z - z.round()).abs()
}

/// `|2x₂ − 1| · Σ_{k<terms} s(2ᵏ x₁)/2ᵏ`; the truncation error is at most
/// `2^{−terms} |2x₂ − 1|`.
pub fn takagi_bivariate(x1: f64, x2: f64, terms: u32) -> Result<f64> {
    if terms < 1 {
        return Err(Error::InvalidConfig("takagi series needs at least one term".into()));
    }
    let mut sum = 0.0;
    let mut scale = 1.0;
    for _ in 0..terms {
        sum += saw(scale * x1) / scale;
        scale *= 2.0;
    }
    Ok((2.0 * x2 - 1.0).abs() * sum)
}

/// `|max(−1, |x| − 2)|`, i.e. `|x|` after `max(−1, |x| − 2)`. Both pieces are
/// global; the composition has a spurious plateau at value 1 on `[−1, 1]`.
pub fn composition_counterexample(x: f64) -> f64 {
    clipped_shift(x).abs()
}

/// `max(−1, |x| − 2)`.
pub fn clipped_shift(x: f64) -> f64 {
    (x.abs() - 2.0).max(-1.0)
}

const PLATEAU_KNOTS: [(f64, f64); 6] = [(-5.0, 10.0), (-2.6, 6.0), (-1.0, 6.0), (0.0, 9.0), (1.5, 1.0), (3.0, 5.0)];

/// Piecewise-linear function with a strict flat minimum at height 6 on
/// `[−2.6, −1]` and global minimum 1 at `x = 1.5`; linear beyond the end
/// knots. Not weakly global.
pub fn strict_plateau(x: f64) -> f64 {
    let k = &PLATEAU_KNOTS;
    let seg = k.windows(2).position(|w| x <= w[1].0).unwrap_or(k.len() - 2);
    let ((x0, y0), (x1, y1)) = (k[seg], k[seg + 1]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClaimedProperty {
    Global,
    GlobalNoDescentPath,
    GlobalNowhereDiff,
    NotGlobalComposition,
    GlobalNoDescentDirection,
    NotWeaklyGlobal,
}

impl ClaimedProperty {
    /// Whether the oracle should report `GLOBAL`.
    pub fn expects_global(self) -> bool {
        !matches!(self, ClaimedProperty::NotGlobalComposition | ClaimedProperty::NotWeaklyGlobal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalleryFunction {
    Rational,
    Nopath,
    Hestenes,
    Takagi,
    Composition,
    Plateau,
}

impl GalleryFunction {
    pub const ALL: [GalleryFunction; 6] = [
        GalleryFunction::Rational,
        GalleryFunction::Nopath,
        GalleryFunction::Hestenes,
        GalleryFunction::Takagi,
        GalleryFunction::Composition,
        GalleryFunction::Plateau,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GalleryFunction::Rational => "rational",
            GalleryFunction::Nopath => "nopath",
            GalleryFunction::Hestenes => "hestenes",
            GalleryFunction::Takagi => "takagi",
            GalleryFunction::Composition => "composition",
            GalleryFunction::Plateau => "plateau",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GalleryFunction::Rational | GalleryFunction::Composition | GalleryFunction::Plateau => 1,
            _ => 2,
        }
    }

    pub fn claimed_property(self) -> ClaimedProperty {
        match self {
            GalleryFunction::Rational => ClaimedProperty::Global,
            GalleryFunction::Nopath => ClaimedProperty::GlobalNoDescentPath,
            GalleryFunction::Hestenes => ClaimedProperty::GlobalNoDescentDirection,
            GalleryFunction::Takagi => ClaimedProperty::GlobalNowhereDiff,
            GalleryFunction::Composition => ClaimedProperty::NotGlobalComposition,
            GalleryFunction::Plateau => ClaimedProperty::NotWeaklyGlobal,
        }
    }

    /// Box used for verification. Functions defined on all of ℝ get a window
    /// box so the truncation edge does not create minima.
    pub fn domain_box(self) -> GridBox {
        let (lo, hi, res, boundary) = match self {
            GalleryFunction::Rational => (vec![-5.0], vec![5.0], 1001, Boundary::Window),
            GalleryFunction::Nopath => (vec![-1.0; 2], vec![1.0; 2], 201, Boundary::Closed),
            GalleryFunction::Hestenes => (vec![-1.0; 2], vec![1.0; 2], 201, Boundary::Closed),
            GalleryFunction::Takagi => (vec![0.01; 2], vec![0.99; 2], 99, Boundary::Closed),
            GalleryFunction::Composition => (vec![-4.0], vec![4.0], 1001, Boundary::Window),
            GalleryFunction::Plateau => (vec![-5.0], vec![3.0], 801, Boundary::Window),
        };
        GridBox::new(lo, hi, res).expect("static gallery boxes are valid").with_boundary(boundary)
    }

    pub fn eval(self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity() {
            return Err(Error::DimensionMismatch { expected: self.arity(), got: x.len() });
        }
        match self {
            GalleryFunction::Rational => Ok(rational_global(x[0])),
            GalleryFunction::Nopath => nopath(x[0], x[1]),
            GalleryFunction::Hestenes => Ok(hestenes(x[0], x[1])),
            GalleryFunction::Takagi => takagi_bivariate(x[0], x[1], DEFAULT_TAKAGI_TERMS),
            GalleryFunction::Composition => Ok(composition_counterexample(x[0])),
            GalleryFunction::Plateau => Ok(strict_plateau(x[0])),
        }
    }

    pub fn entry(self) -> GalleryEntry {
        GalleryEntry {
            name: self.name().to_string(),
            arity: self.arity(),
            domain_box: self.domain_box(),
            claimed_property: self.claimed_property(),
        }
    }
}

impl FromStr for GalleryFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GalleryFunction::ALL
            .into_iter()
            .find(|g| g.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                let names: Vec<&str> = GalleryFunction::ALL.iter().map(|g| g.name()).collect();
                Error::InvalidConfig(format!("unknown gallery function '{s}' (one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryEntry {
    pub name: String,
    pub arity: usize,
    pub domain_box: GridBox,
    pub claimed_property: ClaimedProperty,
}

pub fn gallery_entries() -> Vec<GalleryEntry> {
    GalleryFunction::ALL.iter().map(|g| g.entry()).collect()
}

/// Writes `grid` samples of `func` as CSV with columns `x1[,x2],value`.
pub fn export_surface(func: GalleryFunction, grid: &GridBox, out: impl Write) -> Result<()> {
    if grid.dim() != func.arity() {
        return Err(Error::DimensionMismatch { expected: func.arity(), got: grid.dim() });
    }
    let mut w = csv::Writer::from_writer(out);
    let header: &[&str] = if func.arity() == 1 { &["x1", "value"] } else { &["x1", "x2", "value"] };
    w.write_record(header)?;
    let res = grid.resolution();
    let mut idx = vec![0usize; func.arity()];
    for flat in 0..grid.len() {
        let mut rem = flat;
        for a in (0..idx.len()).rev() {
            idx[a] = rem % res;
            rem /= res;
        }
        let x = grid.point(&idx);
        let v = func.eval(&x)?;
        let row: Vec<String> = x.iter().chain(std::iter::once(&v)).map(|c| format!("{c:.16e}")).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
