use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use globfn::experiments::{export_csv, export_json, run_sweep, ExperimentConfig};
use globfn::gallery::{export_surface, GalleryFunction};
use globfn::landscape::{
    check_compact_convergence, verify_global, verify_on_region_s, verify_weakly_global, Boundary, GridBox, GridReport,
    Verdict,
};
use globfn::objectives::{eval_f1, eval_finf, eval_fp, eval_hp, Exponent, TensorProblem};
use globfn::stationarity::{
    ball_descent_witness, build_staircase, is_clarke_stationary, make_remark_point, verify_root_jump_separation,
};
use serde::Serialize;
use serde_json::json;

use crate::{Cli, Command, ConvergeArgs, ConvergeTarget, ExperimentArgs, GalleryCommand, LandscapeArgs, ObjectiveKind,
    StationarityArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(globfn::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(globfn::Error::Io(_) | globfn::Error::Csv(_) | globfn::Error::Json(_)) | CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<globfn::Error> for CliError {
    fn from(e: globfn::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type Outcome = Result<bool, CliError>;

/// Runs the parsed command; `Ok(false)` means a verification failed.
pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Experiment(a) => experiment(cli, a),
        Command::Landscape(a) => landscape(cli, a),
        Command::Stationarity(a) => stationarity(cli, a),
        Command::Converge(a) => converge(cli, a),
        Command::Gallery(g) => gallery(cli, g),
    }
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{flag}: cannot parse '{s}' as a number"))))
        .collect()
}

fn parse_box(text: &str, dim: usize, res: usize) -> Result<GridBox, CliError> {
    let v = parse_list("--box", text)?;
    let (lo, hi) = match v.len() {
        2 => (vec![v[0]; dim], vec![v[1]; dim]),
        k if k == 2 * dim => (v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect()),
        _ => return Err(CliError::Usage(format!("--box: expected 2 or {} values, got {}", 2 * dim, v.len()))),
    };
    GridBox::new(lo, hi, res).map_err(|e| CliError::Usage(format!("--box/--res: {e}")))
}

fn print_config(value: &impl Serialize) {
    println!("config: {}", serde_json::to_string(value).expect("config serializes"));
}

enum Format {
    Csv,
    Json,
}

fn out_format(path: &Path) -> Result<Format, CliError> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        _ => Err(CliError::Usage(format!("--out: unsupported extension in '{}' (use .csv or .json)", path.display()))),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(globfn::Error::from)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut text = header.join(",");
    text.push('\n');
    for r in rows {
        text.push_str(&r.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn experiment(cli: &Cli, a: &ExperimentArgs) -> Outcome {
    let mut lines = match &a.config {
        Some(p) => fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            lines.push_str(&format!("\n{k}={v}"));
        }
    };
    push("scale", a.scale.clone());
    push("n", a.n.map(|v| v.to_string()));
    push("modes", a.modes.clone());
    push("noisy_counts", a.noisy.clone());
    push("trials", a.trials.map(|v| v.to_string()));
    push("noise_std", a.noise_std.map(|v| v.to_string()));
    push("success_threshold", a.success_threshold.map(|v| v.to_string()));
    push("max_iters", a.max_iters.map(|v| v.to_string()));
    push("learning_rate", a.lr.map(|v| v.to_string()));
    push("momentum", a.momentum.map(|v| v.to_string()));
    push("batch_fraction", a.batch_fraction.map(|v| v.to_string()));
    push("init_std", a.init_std.map(|v| v.to_string()));
    push("early_stop", a.early_stop.map(|v| v.to_string()));
    push("seed", cli.seed.map(|v| v.to_string()));
    let cfg = ExperimentConfig::from_kv_str(&lines).map_err(|e| CliError::Usage(e.to_string()))?;
    let format = cli.out.as_deref().map(out_format).transpose()?;
    print_config(&cfg);

    let result = run_sweep(&cfg)?;
    println!("{:<5} {:>9} {:>9} {:>6} {:>14}", "mode", "num_noisy", "successes", "rate", "mean_rel_err");
    for c in &result.cells {
        println!("{:<5} {:>9} {:>5}/{:<3} {:>6.3} {:>14.6e}", c.mode, c.num_noisy, c.successes, c.trials, c.rate, c.mean_rel_err);
    }
    match (cli.out.as_deref(), format) {
        (Some(p), Some(Format::Csv)) => export_csv(&result, p)?,
        (Some(p), Some(Format::Json)) => export_json(&result, p)?,
        _ => {}
    }
    Ok(true)
}

fn problem(y: &str, d: usize) -> Result<TensorProblem, CliError> {
    TensorProblem::new(parse_list("--y", y)?, d).map_err(|e| CliError::Usage(format!("--y/--d: {e}")))
}

fn landscape(cli: &Cli, a: &LandscapeArgs) -> Outcome {
    let prob = problem(&a.y, a.d)?;
    let mut grid = parse_box(&a.bounds, prob.dim(), a.res)?;
    if a.window {
        grid = grid.with_boundary(Boundary::Window);
    }
    let exponent = match (a.objective, a.p) {
        (ObjectiveKind::F1, None) => Exponent::One,
        (ObjectiveKind::Finf, None) => Exponent::Infinity,
        (ObjectiveKind::Fp | ObjectiveKind::Hp, Some(p)) => {
            Exponent::finite(p).map_err(|e| CliError::Usage(format!("--p: {e}")))?
        }
        (ObjectiveKind::Fp | ObjectiveKind::Hp, None) => {
            return Err(CliError::Usage("--p is required for fp and hp".into()))
        }
        (_, Some(_)) => return Err(CliError::Usage("--p only applies to fp and hp".into())),
    };
    if a.region_s && a.objective != ObjectiveKind::F1 {
        return Err(CliError::Usage("--region-s only applies to f1".into()));
    }
    let format = cli.out.as_deref().map(out_format).transpose()?;
    print_config(&json!({
        "objective": a.objective, "y": prob.truth(), "d": a.d, "p": a.p,
        "box": { "lower": grid.lower(), "upper": grid.upper(), "boundary": grid.boundary() },
        "res": a.res, "tol": a.tol, "weak": a.weak, "region_s": a.region_s,
    }));

    let report: GridReport = if a.region_s {
        verify_on_region_s(&prob, &grid, a.tol)?
    } else {
        let f = |x: &[f64]| match (a.objective, exponent) {
            (ObjectiveKind::Hp, Exponent::Finite(p)) => eval_hp(&prob, x, p),
            (_, e) => globfn::objectives::eval(&prob, x, e),
        }
        .expect("grid points have the problem's dimension");
        if a.weak { verify_weakly_global(&f, &grid, a.tol)? } else { verify_global(&f, &grid, a.tol)? }
    };

    println!("verdict: {} (grid evidence, not proof)", report.verdict);
    println!("global_value: {:.17e}", report.global_value);
    println!("grid_local_minima: {}", report.grid_local_minima.len());
    println!("plateaus: {}", report.plateaus.len());
    for p in report.spurious() {
        println!("  unresolved plateau at {:?} value {:.6e} strict {}", p.points[0], p.value, p.strict);
    }
    match (cli.out.as_deref(), format) {
        (Some(path), Some(Format::Json)) => write_json(path, &report)?,
        (Some(path), Some(Format::Csv)) => {
            let rows: Vec<Vec<String>> = report
                .grid_local_minima
                .iter()
                .map(|m| m.point.iter().chain(std::iter::once(&m.value)).map(|&v| float(v)).collect())
                .collect();
            let mut header: Vec<String> = (1..=prob.dim()).map(|i| format!("x{i}")).collect();
            header.push("value".into());
            write_csv(path, &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;
        }
        _ => {}
    }
    Ok(match report.verdict {
        Verdict::Global => true,
        Verdict::WeaklyGlobalOnly => a.weak,
        Verdict::SpuriousFound => false,
    })
}

fn stationarity(cli: &Cli, a: &StationarityArgs) -> Outcome {
    let prob = problem(&a.y, a.d)?;
    let x = match &a.x {
        Some(text) => parse_list("--x", text)?,
        None => make_remark_point(&prob, cli.seed.unwrap_or(0)).map_err(|e| CliError::Usage(format!("--remark: {e}")))?,
    };
    if x.len() != prob.dim() {
        return Err(CliError::Usage(format!("--x: expected {} values, got {}", prob.dim(), x.len())));
    }
    let radii = parse_list("--probe-radii", &a.probe_radii)?;
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(CliError::Usage("--probe-radii: radii must be positive".into()));
    }
    let format = cli.out.as_deref().map(out_format).transpose()?;
    print_config(&json!({
        "y": prob.truth(), "d": a.d, "x": x, "tol": a.tol, "remark": a.remark,
        "probe_radii": radii, "probe_samples": a.probe_samples, "seed": cli.seed.unwrap_or(0),
    }));

    let report = is_clarke_stationary(&prob, &x, a.tol)?;
    let has_zero_truth = prob.truth().iter().any(|&v| v == 0.0);
    let x_zero = x.iter().all(|&v| v == 0.0);
    let (staircase_roots_ok, separation_ok) = if report.stationary && !has_zero_truth && !x_zero {
        let stairs = build_staircase(&prob, &x)?;
        let roots = x.iter().zip(prob.truth()).all(|(a_, b)| stairs.has_root_at(a_ / b, a.tol));
        (Some(roots), Some(verify_root_jump_separation(&prob, &x)?))
    } else {
        (None, None)
    };
    let witness = ball_descent_witness(&prob, &x, &radii, a.probe_samples, cli.seed.unwrap_or(0))?;
    let value = eval_f1(&prob, &x)?;

    println!("stationary: {}", report.stationary);
    println!("zero_pattern_ok: {}", report.lemma1_zero_pattern_ok);
    println!("ratio_bound_ok: {}", report.lemma1_ratio_bound_ok);
    println!("max_ratio_product: {:.17e}", report.max_ratio_product);
    for (i, iv) in report.per_coordinate_interval.iter().enumerate() {
        println!("  coordinate {i}: [{:.6e}, {:.6e}]", iv.lo, iv.hi);
    }
    if let Some(ok) = staircase_roots_ok {
        println!("staircase_roots_ok: {ok}");
    }
    if let Some(ok) = separation_ok {
        println!("root_jump_separation_ok: {ok}");
    }
    println!("f1: {value:.17e}");
    println!("smaller_value_nearby: {}", witness.is_some());

    if let (Some(path), Some(fmt)) = (cli.out.as_deref(), format) {
        let doc = json!({
            "x": x, "f1": value, "report": report, "staircase_roots_ok": staircase_roots_ok,
            "root_jump_separation_ok": separation_ok, "descent_witness": witness,
        });
        match fmt {
            Format::Json => write_json(path, &doc)?,
            Format::Csv => {
                let rows: Vec<Vec<String>> = report
                    .per_coordinate_interval
                    .iter()
                    .enumerate()
                    .map(|(i, iv)| vec![i.to_string(), float(x[i]), float(iv.lo), float(iv.hi)])
                    .collect();
                write_csv(path, &["coordinate", "x", "lo", "hi"], &rows)?;
            }
        }
    }
    // A stationary point that breaks the first-order consequences is a failed check.
    let consistent = !report.stationary
        || (report.lemma1_zero_pattern_ok
            && report.lemma1_ratio_bound_ok
            && staircase_roots_ok.unwrap_or(true)
            && separation_ok.unwrap_or(true));
    Ok(report.stationary && consistent)
}

fn converge(cli: &Cli, a: &ConvergeArgs) -> Outcome {
    let prob = problem(&a.y, a.d)?;
    let grid = parse_box(&a.bounds, prob.dim(), a.res)?;
    let schedule = parse_list("--p", &a.p)?;
    if let Some(&bad) = schedule.iter().find(|&&p| !(p > 1.0 && p.is_finite())) {
        return Err(CliError::Usage(format!("--p: every exponent must exceed 1, got {bad}")));
    }
    let format = cli.out.as_deref().map(out_format).transpose()?;
    print_config(&json!({
        "y": prob.truth(), "d": a.d, "target": a.target, "p": schedule,
        "box": { "lower": grid.lower(), "upper": grid.upper() }, "res": a.res, "threshold": a.threshold,
    }));

    let table = match a.target {
        ConvergeTarget::F1 => check_compact_convergence(
            &|p, x: &[f64]| eval_fp(&prob, x, p).expect("validated"),
            &|x: &[f64]| eval_f1(&prob, x).expect("validated"),
            &grid,
            &schedule,
        )?,
        ConvergeTarget::Finf => check_compact_convergence(
            &|p, x: &[f64]| eval_hp(&prob, x, p).expect("validated"),
            &|x: &[f64]| eval_finf(&prob, x).expect("validated"),
            &grid,
            &schedule,
        )?,
    };
    println!("{:>10} {:>24}", "p", "sup_distance");
    for row in &table {
        println!("{:>10} {:>24.17e}", row.p, row.sup_distance);
    }
    let decreasing = table.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance);
    let below = match (a.threshold, table.last()) {
        (Some(t), Some(last)) => last.sup_distance < t,
        _ => true,
    };
    println!("strictly_decreasing: {decreasing}");
    if let Some(t) = a.threshold {
        println!("final_below_{t}: {below}");
    }
    match (cli.out.as_deref(), format) {
        (Some(path), Some(Format::Json)) => write_json(path, &table)?,
        (Some(path), Some(Format::Csv)) => {
            let rows: Vec<Vec<String>> = table.iter().map(|r| vec![float(r.p), float(r.sup_distance)]).collect();
            write_csv(path, &["p", "sup_distance"], &rows)?;
        }
        _ => {}
    }
    Ok(decreasing && below)
}

fn lookup(name: &str) -> Result<GalleryFunction, CliError> {
    name.parse().map_err(|e: globfn::Error| CliError::Usage(e.to_string()))
}

fn gallery(cli: &Cli, g: &GalleryCommand) -> Outcome {
    match g {
        GalleryCommand::List => {
            print_config(&json!({ "command": "gallery list" }));
            for f in GalleryFunction::ALL {
                let b = f.domain_box();
                println!(
                    "{:<12} arity {} box {:?}..{:?} res {} {:?}",
                    f.name(),
                    f.arity(),
                    b.lower(),
                    b.upper(),
                    b.resolution(),
                    f.claimed_property()
                );
            }
            if let Some(path) = cli.out.as_deref() {
                write_json(path, &globfn::gallery::gallery_entries())?;
            }
            Ok(true)
        }
        GalleryCommand::Eval { name, at } => {
            let f = lookup(name)?;
            let x = parse_list("--at", at)?;
            print_config(&json!({ "function": f.name(), "at": x }));
            let v = f.eval(&x).map_err(|e| CliError::Usage(format!("--at: {e}")))?;
            println!("{v:.17e}");
            Ok(true)
        }
        GalleryCommand::Export { name, res } => {
            let f = lookup(name)?;
            let base = f.domain_box();
            let grid = match res {
                Some(r) => GridBox::new(base.lower().to_vec(), base.upper().to_vec(), *r)
                    .map_err(|e| CliError::Usage(format!("--res: {e}")))?,
                None => base,
            };
            print_config(&json!({ "function": f.name(), "box": grid }));
            match cli.out.as_deref() {
                Some(path) => {
                    if !matches!(out_format(path)?, Format::Csv) {
                        return Err(CliError::Usage("--out: gallery export writes CSV".into()));
                    }
                    export_surface(f, &grid, fs::File::create(path)?)?;
                    println!("wrote {} points to {}", grid.len(), path.display());
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    export_surface(f, &grid, &mut lock)?;
                    lock.flush()?;
                }
            }
            Ok(true)
        }
        GalleryCommand::Verify { name } => {
            let funcs: Vec<GalleryFunction> = match name {
                Some(n) => vec![lookup(n)?],
                None => GalleryFunction::ALL.to_vec(),
            };
            print_config(&json!({ "functions": funcs.iter().map(|f| f.name()).collect::<Vec<_>>() }));
            let mut all_ok = true;
            let mut docs = Vec::new();
            for f in funcs {
                let eval = move |x: &[f64]| f.eval(x).expect("gallery boxes lie in the domain");
                let report = verify_global(&eval, &f.domain_box(), globfn::landscape::DEFAULT_TOL)?;
                let ok = (report.verdict == Verdict::Global) == f.claimed_property().expects_global();
                all_ok &= ok;
                println!("{:<12} {:<28} verdict {:<15} {}", f.name(), format!("{:?}", f.claimed_property()), report.verdict.to_string(), if ok { "ok" } else { "MISMATCH" });
                docs.push(json!({ "name": f.name(), "claimed_property": f.claimed_property(), "report": report, "ok": ok }));
            }
            if let Some(path) = cli.out.as_deref() {
                write_json(path, &docs)?;
            }
            Ok(all_ok)
        }
    }
}
