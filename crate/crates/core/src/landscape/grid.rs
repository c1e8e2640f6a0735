use rayon::prelude::*;

use super::{Boundary, Domain, GridBox, Mask, Objective};
use crate::error::{Error, Result};

/// Evaluation lattice for a [`GridBox`]: the box's points plus, for
/// [`Boundary::Window`], a one-point halo on every side.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    pub dim: usize,
    pub res: usize,
    pub halo: usize,
    pub extent: usize,
    pub strides: Vec<usize>,
    pub axes: Vec<Vec<f64>>,
}

impl Lattice {
    pub fn new(grid: &GridBox) -> Self {
        let dim = grid.dim();
        let res = grid.resolution();
        let halo = usize::from(grid.boundary() == Boundary::Window);
        let extent = res + 2 * halo;
        let mut strides = vec![1; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * extent;
        }
        let denom = (res - 1) as f64;
        let axes = (0..dim)
            .map(|a| {
                let (lo, hi) = (grid.lower()[a], grid.upper()[a]);
                (0..extent)
                    .map(|k| {
                        let t = (k as f64 - halo as f64) / denom;
                        lo * (1.0 - t) + hi * t
                    })
                    .collect()
            })
            .collect();
        Self { dim, res, halo, extent, strides, axes }
    }

    pub fn len(&self) -> usize {
        self.extent.pow(self.dim as u32)
    }

    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim).rev() {
            out[a] = flat % self.extent;
            flat /= self.extent;
        }
    }

    pub fn coords(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            out[a] = self.axes[a][rem % self.extent];
            rem /= self.extent;
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        self.coords(flat, &mut p);
        p
    }

    pub fn is_interior(&self, flat: usize) -> bool {
        let mut rem = flat;
        for _ in 0..self.dim {
            let k = rem % self.extent;
            if k < self.halo || k >= self.halo + self.res {
                return false;
            }
            rem /= self.extent;
        }
        true
    }

    /// Flat indices of the interior points, in increasing order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }

    /// Moore offsets `{−1, 0, 1}ⁿ ∖ {0}`.
    pub fn offsets(&self) -> Vec<Vec<isize>> {
        let count = 3usize.pow(self.dim as u32);
        (0..count)
            .filter(|&c| c != count / 2)
            .map(|mut c| {
                let mut o = vec![0isize; self.dim];
                for a in (0..self.dim).rev() {
                    o[a] = (c % 3) as isize - 1;
                    c /= 3;
                }
                o
            })
            .collect()
    }

    /// Calls `visit` with every in-lattice Moore neighbour of `flat`.
    pub fn for_each_neighbor(&self, flat: usize, offsets: &[Vec<isize>], mut visit: impl FnMut(usize)) {
        let mut m = vec![0usize; self.dim];
        self.multi_index(flat, &mut m);
        'outer: for o in offsets {
            let mut idx = flat as isize;
            for a in 0..self.dim {
                let k = m[a] as isize + o[a];
                if k < 0 || k >= self.extent as isize {
                    continue 'outer;
                }
                idx += o[a] * self.strides[a] as isize;
            }
            visit(idx as usize);
        }
    }
}

/// Objective values on the lattice of a [`Domain`]. Points outside the mask
/// hold `+∞`.
#[derive(Debug, Clone)]
pub struct GridValues {
    pub(crate) lattice: Lattice,
    pub(crate) values: Vec<f64>,
    interior: Vec<usize>,
}

impl GridValues {
    pub(crate) fn evaluate(f: &Objective<'_>, grid: &GridBox, mask: Option<&Mask<'_>>) -> Result<Self> {
        let lattice = Lattice::new(grid);
        let values: Vec<f64> = (0..lattice.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; lattice.dim],
                |buf, idx| {
                    lattice.coords(idx, buf);
                    match mask {
                        Some(m) if !m(buf) => f64::INFINITY,
                        _ => f(buf),
                    }
                },
            )
            .collect();
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidGrid(format!("objective returned NaN at {:?}", lattice.point(i))));
        }
        let interior = lattice.interior();
        if interior.iter().all(|&i| values[i] == f64::INFINITY) {
            return Err(Error::EmptyDomain);
        }
        Ok(Self { lattice, values, interior })
    }

    /// Number of grid points inside the domain (halo excluded).
    pub fn len(&self) -> usize {
        self.interior.iter().filter(|&&i| self.values[i].is_finite()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest value over in-domain grid points and its location.
    pub fn global_min(&self) -> (Vec<f64>, f64) {
        let (idx, v) = self
            .interior
            .iter()
            .map(|&i| (i, self.values[i]))
            .fold((usize::MAX, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        (self.lattice.point(idx), v)
    }

    /// Grid points whose value is within `rtol · max(|min|, tiny)` of the minimum.
    pub fn argmin_points(&self, rtol: f64) -> Vec<Vec<f64>> {
        let (_, min) = self.global_min();
        let cut = min + rtol * min.abs().max(f64::MIN_POSITIVE);
        self.interior
            .iter()
            .filter(|&&i| self.values[i] <= cut)
            .map(|&i| self.lattice.point(i))
            .collect()
    }

    /// `max |self − other|` over points inside both domains.
    pub fn sup_distance(&self, other: &GridValues) -> f64 {
        self.interior
            .iter()
            .filter(|&&i| self.values[i].is_finite() && other.values[i].is_finite())
            .map(|&i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Interior points with no strictly smaller Moore neighbour.
    pub(crate) fn local_minima(&self) -> Vec<usize> {
        let offsets = self.lattice.offsets();
        self.interior
            .par_iter()
            .copied()
            .filter(|&p| {
                let v = self.values[p];
                if !v.is_finite() {
                    return false;
                }
                let mut minimal = true;
                self.lattice.for_each_neighbor(p, &offsets, |q| {
                    if self.values[q] < v {
                        minimal = false;
                    }
                });
                minimal
            })
            .collect()
    }
}

/// Connected components (Moore adjacency, value gap ≤ `tol`) of `minima`.
pub(crate) fn cluster(values: &GridValues, minima: &[usize], tol: f64) -> Vec<Vec<usize>> {
    let pos: std::collections::HashMap<usize, usize> =
        minima.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut parent: Vec<usize> = (0..minima.len()).collect();
    fn find(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    let offsets = values.lattice.offsets();
    for (k, &p) in minima.iter().enumerate() {
        values.lattice.for_each_neighbor(p, &offsets, |q| {
            if let Some(&j) = pos.get(&q) {
                if (values.values[p] - values.values[q]).abs() <= tol {
                    let (a, b) = (find(&mut parent, k), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        });
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in 0..minima.len() {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().push(minima[k]);
    }
    groups.into_values().collect()
}

/// A plateau is strict when every in-domain neighbour outside it is larger by
/// more than `tol`.
pub(crate) fn is_strict(values: &GridValues, members: &[usize], level: f64, tol: f64) -> bool {
    let set: std::collections::HashSet<usize> = members.iter().copied().collect();
    let offsets = values.lattice.offsets();
    let mut strict = true;
    for &p in members {
        values.lattice.for_each_neighbor(p, &offsets, |q| {
            let v = values.values[q];
            if !set.contains(&q) && v.is_finite() && v <= level + tol {
                strict = false;
            }
        });
        if !strict {
            break;
        }
    }
    strict
}

impl Domain<'_> {
    pub(crate) fn clip(&self) -> (Vec<f64>, Vec<f64>) {
        let g = self.grid;
        match g.boundary() {
            Boundary::Closed => (g.lower().to_vec(), g.upper().to_vec()),
            Boundary::Window => (
                (0..g.dim()).map(|a| g.lower()[a] - g.step(a)).collect(),
                (0..g.dim()).map(|a| g.upper()[a] + g.step(a)).collect(),
            ),
        }
    }
}
