use globfn::experiments::{
    export_csv, export_json, generate_instance, import_csv, import_json, run_sweep, ExperimentConfig, ExperimentResult,
};
use globfn::objectives::{eval_dense, subgrad_dense, DenseTarget, Loss};
use globfn::rng::stream;
use globfn::solvers::{relative_error, sgd_momentum, subgradient_descent, SolverConfig};
use rand_distr::{Distribution, StandardNormal};

fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

#[test]
fn noiseless_small_instance_l2_converges() {
    let y = gaussian(5, 1);
    let t = DenseTarget::rank_one(&y).unwrap();
    let cfg = SolverConfig { max_iters: 50_000, seed: 2, ..SolverConfig::default() };
    let trace = sgd_momentum(&t, Loss::L2, &cfg).unwrap();
    assert!(relative_error(&trace.final_point, &y, 2).unwrap() < 0.1);
}

#[test]
fn full_batch_subgradient_converges() {
    let y = gaussian(5, 3);
    let t = DenseTarget::rank_one(&y).unwrap();
    let f = |x: &[f64]| eval_dense(&t, x, Loss::L2).unwrap();
    let g = |x: &[f64]| subgrad_dense(&t, x, Loss::L2).unwrap();
    let cfg = SolverConfig { max_iters: 50_000, learning_rate: 1e-3, seed: 4, ..SolverConfig::default() };
    let a = subgradient_descent(&f, &g, 5, &cfg).unwrap();
    assert!(relative_error(&a.final_point, &y, 2).unwrap() < 0.1);
    assert_eq!(a, subgradient_descent(&f, &g, 5, &cfg).unwrap());
    let still = subgradient_descent(&f, &g, 5, &SolverConfig { learning_rate: 0.0, ..cfg }).unwrap();
    assert_eq!(still.final_point, still.initial_point);
}

#[test]
fn full_batch_small_steps_descend() {
    for k in 0..20 {
        let y = gaussian(5, 100 + k);
        let t = DenseTarget::rank_one(&y).unwrap();
        let cfg = SolverConfig {
            learning_rate: 1e-4,
            batch_fraction: 1.0,
            max_iters: 3000,
            log_every: 1,
            seed: 200 + k,
            ..SolverConfig::default()
        };
        let trace = sgd_momentum(&t, Loss::L2, &cfg).unwrap();
        let tail = &trace.objective_history[10..];
        for w in tail.windows(2) {
            assert!(w[1].1 <= w[0].1, "instance {k}: {:?} -> {:?}", w[0], w[1]);
        }
    }
}

#[test]
fn noiseless_twenty_dimensional_recovery() {
    for mode in [Loss::L1, Loss::L2] {
        let mut ok = 0;
        for k in 0..20 {
            let y = gaussian(20, 500 + k);
            let t = DenseTarget::rank_one(&y).unwrap();
            let cfg = SolverConfig { seed: 900 + k, ..SolverConfig::for_dimension(20) };
            let trace = sgd_momentum(&t, mode, &cfg).unwrap();
            ok += usize::from(relative_error(&trace.final_point, &y, 2).unwrap() < 0.1);
        }
        assert!(ok >= 19, "{mode}: {ok}/20");
    }
}

#[test]
fn relative_error_sign_invariance_for_even_order() {
    let y = gaussian(6, 8);
    let x = gaussian(6, 9);
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    assert_eq!(relative_error(&x, &y, 2).unwrap(), relative_error(&neg, &y, 2).unwrap());
}

#[test]
fn moderate_noise_separates_losses() {
    let mut cfg = ExperimentConfig::desk(20);
    cfg.noisy_counts = vec![40];
    cfg.seed = 7;
    let r = run_sweep(&cfg).unwrap();
    let l1 = r.cell(Loss::L1, 40).unwrap();
    let l2 = r.cell(Loss::L2, 40).unwrap();
    assert!(l1.rate >= 0.9, "{l1:?}");
    assert!(l2.rate <= 0.1, "{l2:?}");
}

#[test]
fn single_trial_is_reproducible() {
    let mut cfg = ExperimentConfig::desk(8);
    cfg.noisy_counts = vec![3];
    cfg.trials = 1;
    cfg.seed = 42;
    cfg.solver.max_iters = 5000;
    assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
}

#[test]
fn instance_mask_matches_changed_entries() {
    let (y, t) = generate_instance(6, 10, 10.0, &mut stream(5)).unwrap();
    let clean = DenseTarget::rank_one(&y).unwrap();
    assert_eq!(t.noise_mask().len(), 10);
    for i in 0..6 {
        for j in 0..6 {
            if !t.noise_mask().contains(&(i, j)) {
                assert_eq!(t.entry(i, j), clean.entry(i, j));
            }
        }
    }
}

#[test]
fn csv_and_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::desk(6);
    cfg.noisy_counts = vec![0, 4, 9];
    cfg.trials = 3;
    cfg.solver.max_iters = 3000;
    let r = run_sweep(&cfg).unwrap();

    let csv_path = dir.path().join("sweep.csv");
    export_csv(&r, &csv_path).unwrap();
    let rows = import_csv(&csv_path).unwrap();
    assert_eq!(rows, r.rows());
    let total: usize = rows.iter().map(|row| row.successes).sum();
    assert_eq!(total, r.cells.iter().map(|c| c.successes).sum::<usize>());
    let rate_sum: f64 = rows.iter().map(|row| row.rate).sum();
    assert_eq!(rate_sum, r.cells.iter().map(|c| c.rate).sum::<f64>());

    let json_path = dir.path().join("sweep.json");
    export_json(&r, &json_path).unwrap();
    assert_eq!(import_json(&json_path).unwrap(), r);

    let empty = ExperimentResult { n: 6, cells: vec![] };
    export_csv(&empty, &csv_path).unwrap();
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), "mode,n,num_noisy,trials,successes,rate,mean_rel_err\n");
    assert!(import_csv(&csv_path).unwrap().is_empty());
}
