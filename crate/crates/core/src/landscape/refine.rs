//! Descent walk used to tell discretization artifacts from genuine spurious
//! minima.
//!
//! A grid-local minimum of a continuous function can sit on a descent path
//! that bends more sharply than the grid spacing (the origin of the Hestenes
//! function is the standard example). Starting from such a point, the walk
//! repeatedly searches a dense sub-grid of the box `[p − h, p + h]` for a
//! strictly smaller value, moves there, and halves `h` when nothing smaller
//! is found. It ends when it reaches the global level (artifact), when `h`
//! collapses, or after a fixed number of steps.

use super::{Domain, Objective};

pub(crate) const MAX_WALK_STEPS: usize = 2000;
const MIN_SHRINK: f64 = 1e-6;

/// Sub-grid points per axis; roughly 10⁴ evaluations per step.
pub(crate) fn fine_resolution(dim: usize) -> usize {
    let m = (10_201f64).powf(1.0 / dim as f64).round() as usize;
    let m = m.clamp(5, 101);
    if m % 2 == 0 { m + 1 } else { m }
}

#[derive(Debug, Clone)]
pub(crate) struct WalkOutcome {
    pub value: f64,
}

pub(crate) fn descent_walk(f: &Objective<'_>, domain: &Domain<'_>, start: &[f64], target: f64) -> WalkOutcome {
    let dim = start.len();
    let m = fine_resolution(dim);
    let shrink = (4.0 / (m - 1) as f64).min(0.5);
    let (lo, hi) = domain.clip();
    let h0: Vec<f64> = (0..dim).map(|a| domain.grid.step(a)).collect();
    let mut h = h0.clone();
    let mut p = start.to_vec();
    let mut fp = f(&p);
    let total = m.pow(dim as u32);
    let mut q = vec![0.0; dim];
    let mut steps = 0;
    while steps < MAX_WALK_STEPS && fp > target {
        if (0..dim).all(|a| h[a] < h0[a] * MIN_SHRINK) {
            break;
        }
        steps += 1;
        let a_lo: Vec<f64> = (0..dim).map(|a| (p[a] - h[a]).max(lo[a])).collect();
        let a_hi: Vec<f64> = (0..dim).map(|a| (p[a] + h[a]).min(hi[a])).collect();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..total {
            let mut rem = k;
            for a in (0..dim).rev() {
                let t = (rem % m) as f64 / (m - 1) as f64;
                rem /= m;
                q[a] = a_lo[a] * (1.0 - t) + a_hi[a] * t;
            }
            if let Some(mask) = domain.mask {
                if !mask(&q) {
                    continue;
                }
            }
            let v = f(&q);
            if v < best.as_ref().map_or(fp, |b| b.0) {
                best = Some((v, q.clone()));
            }
        }
        match best {
            Some((v, point)) => {
                fp = v;
                p = point;
            }
            None => h.iter_mut().for_each(|x| *x *= shrink),
        }
    }
    WalkOutcome { value: fp }
}
