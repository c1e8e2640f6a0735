//! `globfn` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "globfn", version, about = "Landscape checks and recovery experiments for nonsmooth rank-one objectives")]
struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; format chosen by extension (.csv or .json).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sparse-noise recovery sweep (LS vs LAV).
    Experiment(ExperimentArgs),
    /// Grid verification of a tensor objective.
    Landscape(LandscapeArgs),
    /// Clarke stationarity report for a point.
    Stationarity(StationarityArgs),
    /// Grid sup-distance of f_p to f_1 (or h_p to f_inf) over a p schedule.
    Converge(ConvergeArgs),
    /// Named example functions.
    #[command(subcommand)]
    Gallery(GalleryCommand),
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset: desk or paper.
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated losses, e.g. l1,l2.
    #[arg(long)]
    modes: Option<String>,
    /// Comma-separated noisy-entry counts.
    #[arg(long)]
    noisy: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    success_threshold: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    batch_fraction: Option<f64>,
    #[arg(long)]
    init_std: Option<f64>,
    /// Stop a solve once its relative error falls below this value.
    #[arg(long)]
    early_stop: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum ObjectiveKind {
    F1,
    Fp,
    Hp,
    Finf,
}

#[derive(Args, Debug)]
struct LandscapeArgs {
    #[arg(long, value_enum, default_value = "f1")]
    objective: ObjectiveKind,
    /// Ground truth, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Exponent for fp and hp.
    #[arg(long)]
    p: Option<f64>,
    /// `lo,hi` for every axis, or `lo1,hi1,lo2,hi2,...`.
    #[arg(long = "box", allow_hyphen_values = true, default_value = "-2,2")]
    bounds: String,
    #[arg(long, default_value_t = 201)]
    res: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Accept non-strict spurious plateaus (weakly global check).
    #[arg(long)]
    weak: bool,
    /// Restrict f1 to the region where every ratio product is at most one.
    #[arg(long)]
    region_s: bool,
    /// Treat the box as a window onto the whole space.
    #[arg(long)]
    window: bool,
}

#[derive(Args, Debug)]
struct StationarityArgs {
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Point to test, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "remark", required_unless_present = "remark")]
    x: Option<String>,
    /// Test a generated stationary non-minimum instead of --x.
    #[arg(long)]
    remark: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sphere radii searched for a smaller value, comma-separated.
    #[arg(long, default_value = "1e-3,1e-2")]
    probe_radii: String,
    /// Samples per sphere.
    #[arg(long, default_value_t = 10_000)]
    probe_samples: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum ConvergeTarget {
    F1,
    Finf,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_enum, default_value = "f1")]
    target: ConvergeTarget,
    /// Comma-separated exponent schedule.
    #[arg(long, default_value = "2,1.5,1.25,1.1,1.01")]
    p: String,
    #[arg(long = "box", allow_hyphen_values = true, default_value = "-2,2")]
    bounds: String,
    #[arg(long, default_value_t = 201)]
    res: usize,
    /// Fail unless the last sup-distance is below this value.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum GalleryCommand {
    /// List the functions and their claimed properties.
    List,
    /// Evaluate a function at one point.
    Eval {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Sample a function on its box as CSV (x1[,x2],value).
    Export {
        name: String,
        /// Points per axis; defaults to the verification box resolution.
        #[arg(long)]
        res: Option<usize>,
    },
    /// Grid-verify claimed properties (all functions when no name is given).
    Verify { name: Option<String> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().expect("thread pool is built once");
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
