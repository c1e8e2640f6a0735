//! Sparse-noise recovery sweep: LS versus LAV on `y yᵀ` with some entries
//! replaced by large Gaussian noise.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::seq::index;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{DenseTarget, Loss};
use crate::rng::{derive_seed, stream, Stream};
use crate::solvers::{relative_error, sgd_momentum_until, SolverConfig};

pub const CSV_HEADER: [&str; 7] = ["mode", "n", "num_noisy", "trials", "successes", "rate", "mean_rel_err"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub noisy_counts: Vec<usize>,
    pub noise_std: f64,
    pub trials: usize,
    pub solver: SolverConfig,
    pub modes: Vec<Loss>,
    pub seed: u64,
    pub success_threshold: f64,
    /// Stop a solve once its relative error drops below this value. Off by
    /// default: stopping early on the truth can only help, and would do so
    /// unevenly across losses.
    pub early_stop: Option<f64>,
}

impl ExperimentConfig {
    /// Twenty trials and about ten noise levels spread over `[0, n²]`.
    pub fn desk(n: usize) -> Self {
        let sq = n * n;
        let mut counts: Vec<usize> = [0.0, 5.0, 10.0, 20.0, 40.0, 70.0, 100.0, 200.0, 300.0, 400.0]
            .iter()
            .map(|c| ((c / 400.0) * sq as f64).round() as usize)
            .collect();
        counts.dedup();
        Self {
            n,
            noisy_counts: counts,
            noise_std: 10.0,
            trials: 20,
            solver: SolverConfig::for_dimension(n),
            modes: vec![Loss::L1, Loss::L2],
            seed: 0,
            success_threshold: 0.1,
            early_stop: None,
        }
    }

    /// One hundred trials and 21 evenly spaced noise levels from 0 to `n²`.
    pub fn paper(n: usize) -> Self {
        let sq = n * n;
        let mut counts: Vec<usize> = (0..=20).map(|k| (k * sq + 10) / 20).collect();
        counts.dedup();
        Self { noisy_counts: counts, trials: 100, ..Self::desk(n) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.modes.is_empty() {
            return bad("at least one mode is required".into());
        }
        if self.noisy_counts.windows(2).any(|w| w[0] > w[1]) {
            return bad("noisy_counts must be sorted".into());
        }
        if let Some(&c) = self.noisy_counts.iter().find(|&&c| c > self.n * self.n) {
            return bad(format!("noisy count {c} exceeds n^2 = {}", self.n * self.n));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise_std must be finite and non-negative, got {}", self.noise_std));
        }
        if !(self.success_threshold > 0.0) {
            return bad(format!("success_threshold must be positive, got {}", self.success_threshold));
        }
        self.solver.validate()
    }

    /// Parses `key=value` lines (blank lines and `#` comments ignored). `n`
    /// and `scale` (`desk` or `paper`) select the preset; other keys then
    /// override single fields.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got '{l}'")))
            })
            .collect::<Result<_>>()?;
        let lookup = |key: &str| pairs.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let n = lookup("n").map(|v| parse_num("n", v)).transpose()?.unwrap_or(20);
        let mut cfg = Self::preset(lookup("scale").unwrap_or("desk"), n)?;
        for (k, v) in pairs.iter().filter(|(k, _)| *k != "n" && *k != "scale") {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn preset(scale: &str, n: usize) -> Result<Self> {
        match scale {
            "desk" => Ok(Self::desk(n)),
            "paper" => Ok(Self::paper(n)),
            other => Err(Error::InvalidConfig(format!("unknown scale '{other}' (expected desk or paper)"))),
        }
    }

    /// Sets one non-preset field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "noisy_counts" | "noisy" => self.noisy_counts = parse_list(key, value)?,
            "noise_std" => self.noise_std = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "modes" => {
                self.modes = value.split(',').map(|m| m.parse()).collect::<Result<_>>()?;
                self.modes.dedup();
            }
            "seed" => self.seed = parse_num(key, value)?,
            "success_threshold" => self.success_threshold = parse_num(key, value)?,
            "early_stop" => {
                self.early_stop = match value {
                    "none" | "off" | "" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "learning_rate" | "lr" => self.solver.learning_rate = parse_num(key, value)?,
            "momentum" => self.solver.momentum = parse_num(key, value)?,
            "max_iters" => self.solver.max_iters = parse_num(key, value)?,
            "batch_fraction" => self.solver.batch_fraction = parse_num(key, value)?,
            "init_std" => self.solver.init_std = parse_num(key, value)?,
            "log_every" => self.solver.log_every = parse_num(key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for {key}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(key, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub mode: Loss,
    pub num_noisy: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub mean_rel_err: f64,
    /// Relative error of each trial, in trial order.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub n: usize,
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn cell(&self, mode: Loss, num_noisy: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.mode == mode && c.num_noisy == num_noisy)
    }

    pub fn rows(&self) -> Vec<CsvRow> {
        self.cells
            .iter()
            .map(|c| CsvRow {
                mode: c.mode,
                n: self.n,
                num_noisy: c.num_noisy,
                trials: c.trials,
                successes: c.successes,
                rate: c.rate,
                mean_rel_err: c.mean_rel_err,
            })
            .collect()
    }
}

/// One CSV line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub mode: Loss,
    pub n: usize,
    pub num_noisy: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub mean_rel_err: f64,
}

/// Draws `y ~ N(0, I)` and replaces `num_noisy` distinct entries of `y yᵀ`,
/// chosen uniformly among all `n²`, with `N(0, noise_std²)` values.
pub fn generate_instance(n: usize, num_noisy: usize, noise_std: f64, rng: &mut Stream) -> Result<(Vec<f64>, DenseTarget)> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be positive".into()));
    }
    if num_noisy > n * n {
        return Err(Error::InvalidConfig(format!("num_noisy {num_noisy} outside [0, {}]", n * n)));
    }
    let noise = Normal::new(0.0, noise_std).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let mut entries: Vec<f64> = y.iter().flat_map(|&a| y.iter().map(move |&b| a * b)).collect();
    let mut picked = index::sample(rng, n * n, num_noisy).into_vec();
    picked.sort_unstable();
    for &t in &picked {
        entries[t] = noise.sample(rng);
    }
    let mask = picked.iter().map(|&t| (t / n, t % n)).collect();
    Ok((y, DenseTarget::new(n, entries, mask)?))
}

fn mode_tag(mode: Loss) -> u64 {
    match mode {
        Loss::L1 => 1,
        Loss::L2 => 2,
    }
}

/// Seed of the instance for `(noisy count, trial)`; shared by every mode so
/// the losses are compared on identical data.
pub fn instance_seed(seed: u64, num_noisy: usize, trial: usize) -> u64 {
    derive_seed(seed, &[0, num_noisy as u64, trial as u64])
}

/// Seed of the solver run for `(mode, noisy count, trial)`.
pub fn solver_seed(seed: u64, mode: Loss, num_noisy: usize, trial: usize) -> u64 {
    derive_seed(seed, &[mode_tag(mode), num_noisy as u64, trial as u64])
}

/// Runs one trial and returns its relative error.
pub fn run_trial(cfg: &ExperimentConfig, mode: Loss, num_noisy: usize, trial: usize) -> Result<f64> {
    let mut rng = stream(instance_seed(cfg.seed, num_noisy, trial));
    let (y, target) = generate_instance(cfg.n, num_noisy, cfg.noise_std, &mut rng)?;
    let solver = SolverConfig { seed: solver_seed(cfg.seed, mode, num_noisy, trial), ..cfg.solver };
    let trace = match cfg.early_stop {
        Some(tol) => sgd_momentum_until(&target, mode, &solver, |x| relative_error(x, &y, 2).is_ok_and(|e| e < tol))?,
        None => sgd_momentum_until(&target, mode, &solver, |_| false)?,
    };
    relative_error(&trace.final_point, &y, 2)
}

/// Every `(mode, noisy count)` cell, trials run in parallel.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let jobs: Vec<(Loss, usize, usize)> = cfg
        .modes
        .iter()
        .flat_map(|&m| cfg.noisy_counts.iter().flat_map(move |&c| (0..cfg.trials).map(move |t| (m, c, t))))
        .collect();
    let errors: Vec<f64> = jobs.par_iter().map(|&(m, c, t)| run_trial(cfg, m, c, t)).collect::<Result<_>>()?;
    let cells = errors
        .chunks(cfg.trials)
        .zip(jobs.chunks(cfg.trials))
        .map(|(errs, job)| {
            let successes = errs.iter().filter(|&&e| e < cfg.success_threshold).count();
            CellResult {
                mode: job[0].0,
                num_noisy: job[0].1,
                trials: cfg.trials,
                successes,
                rate: successes as f64 / cfg.trials as f64,
                mean_rel_err: errs.iter().sum::<f64>() / errs.len() as f64,
                errors: errs.to_vec(),
            }
        })
        .collect();
    Ok(ExperimentResult { n: cfg.n, cells })
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the summary table; floats carry 17 significant digits.
pub fn export_csv(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(CSV_HEADER)?;
    for r in result.rows() {
        w.write_record([
            r.mode.to_string(),
            r.n.to_string(),
            r.num_noisy.to_string(),
            r.trials.to_string(),
            r.successes.to_string(),
            fmt_float(r.rate),
            fmt_float(r.mean_rel_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn import_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidConfig(format!("unexpected CSV header {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn export_json(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, result)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

pub fn import_json(path: impl AsRef<Path>) -> Result<ExperimentResult> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_instance_is_rank_one() {
        let (y, t) = generate_instance(4, 0, 10.0, &mut stream(1)).unwrap();
        assert_eq!(t, DenseTarget::rank_one(&y).unwrap());
        assert!(t.noise_mask().is_empty());
    }

    #[test]
    fn full_noise_replaces_every_entry() {
        let (y, t) = generate_instance(3, 9, 10.0, &mut stream(2)).unwrap();
        assert_eq!(t.noise_mask().len(), 9);
        let clean = DenseTarget::rank_one(&y).unwrap();
        assert!(t.entries().iter().zip(clean.entries()).all(|(a, b)| a != b));
        assert!(generate_instance(3, 10, 10.0, &mut stream(2)).is_err());
    }

    #[test]
    fn instances_are_reproducible() {
        let a = generate_instance(5, 7, 10.0, &mut stream(9)).unwrap();
        let b = generate_instance(5, 7, 10.0, &mut stream(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kv_parsing() {
        let cfg = ExperimentConfig::from_kv_str("# sweep\nn = 6\nmodes=l1\nnoisy_counts=0,3\ntrials=2\nlr=0.01\n").unwrap();
        assert_eq!(cfg.n, 6);
        assert_eq!(cfg.modes, vec![Loss::L1]);
        assert_eq!(cfg.noisy_counts, vec![0, 3]);
        assert_eq!(cfg.solver.learning_rate, 0.01);
        assert!(ExperimentConfig::from_kv_str("bogus=1").is_err());
        assert!(ExperimentConfig::from_kv_str("n=2\nnoisy_counts=5").is_err());
        assert!(ExperimentConfig::from_kv_str("noisy_counts=3,1").is_err());
        let paper = ExperimentConfig::from_kv_str("n=50\nscale=paper").unwrap();
        assert_eq!(paper.trials, 100);
        assert_eq!(paper.noisy_counts.last(), Some(&2500));
        assert_eq!(paper.solver.max_iters, 500_000);
    }

    #[test]
    fn desk_counts_for_twenty() {
        assert_eq!(ExperimentConfig::desk(20).noisy_counts, vec![0, 5, 10, 20, 40, 70, 100, 200, 300, 400]);
    }

    #[test]
    fn tiny_sweep_shape_and_rates() {
        let mut cfg = ExperimentConfig::desk(4);
        cfg.noisy_counts = vec![0, 2];
        cfg.trials = 3;
        cfg.solver.max_iters = 500;
        cfg.solver.log_every = 100;
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.cells.len(), 4);
        for c in &r.cells {
            assert_eq!(c.errors.len(), 3);
            assert_eq!(c.rate, c.successes as f64 / 3.0);
        }
        assert_eq!(r, run_sweep(&cfg).unwrap());
    }
}
