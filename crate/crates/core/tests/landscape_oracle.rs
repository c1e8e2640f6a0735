use globfn::landscape::{
    check_change_of_variables, check_compact_convergence, check_composition, evaluate_grid, grid_local_minima,
    verify_global, verify_on_region_s, verify_weakly_global, Domain, GridBox, GridReport, PlateauKind, Verdict,
    ARGMIN_RTOL, DEFAULT_TOL,
};
use globfn::objectives::{eval_f1, eval_finf, eval_fp, eval_hp, in_region_s, TensorProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn within_cell(p: &[f64], target: &[f64], grid: &GridBox) -> bool {
    (0..p.len()).all(|a| (p[a] - target[a]).abs() <= grid.step(a) * (1.0 + 1e-9))
}

fn near_truth(p: &[f64], y: &[f64], d: usize, grid: &GridBox) -> bool {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    within_cell(p, y, grid) || (d % 2 == 0 && within_cell(p, &neg, grid))
}

fn f1_report(prob: &TensorProblem, grid: &GridBox) -> GridReport {
    let f = |x: &[f64]| eval_f1(prob, x).unwrap();
    verify_global(&f, grid, DEFAULT_TOL).unwrap()
}

#[test]
fn f1_minima_hug_plus_minus_truth() {
    let prob = TensorProblem::new(vec![1.0, -0.75], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let f = |x: &[f64]| eval_f1(&prob, x).unwrap();
    let mins = grid_local_minima(&f, &grid).unwrap();
    assert!(!mins.is_empty());
    for m in &mins {
        assert!(near_truth(&m.point, prob.truth(), 2, &grid), "{:?}", m.point);
    }
    assert_eq!(f1_report(&prob, &grid).verdict, Verdict::Global);
}

#[test]
fn odd_order_has_single_minimizer_near_truth() {
    let prob = TensorProblem::new(vec![1.0, 1.0], 3).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let report = f1_report(&prob, &grid);
    assert_eq!(report.verdict, Verdict::Global);
    assert_eq!(report.grid_local_minima.len(), 1);
    assert_eq!(report.grid_local_minima[0].point, vec![1.0, 1.0]);
}

#[test]
fn random_small_instances_are_global() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..6 {
        let n = rng.random_range(2..=3usize);
        let d = rng.random_range(2..=3usize);
        let y: Vec<f64> = (0..n)
            .map(|_| {
                let m: f64 = rng.random_range(0.5..=1.5);
                if rng.random_bool(0.5) { m } else { -m }
            })
            .collect();
        let prob = TensorProblem::new(y.clone(), d).unwrap();
        let grid = GridBox::cube(n, -2.0, 2.0, if n == 2 { 201 } else { 61 }).unwrap();
        let report = f1_report(&prob, &grid);
        assert_eq!(report.verdict, Verdict::Global, "y = {y:?}, d = {d}");
        for m in &report.grid_local_minima {
            assert!(near_truth(&m.point, &y, d, &grid), "y = {y:?}, d = {d}, min at {:?}", m.point);
        }
    }
}

#[test]
fn max_residual_has_no_strict_spurious_plateau() {
    let prob = TensorProblem::new(vec![1.0, 1.0], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let f = |x: &[f64]| eval_finf(&prob, x).unwrap();
    let report = verify_weakly_global(&f, &grid, DEFAULT_TOL).unwrap();
    assert_ne!(report.verdict, Verdict::SpuriousFound);
    assert!(report.spurious().all(|p| !p.strict));
}

#[test]
fn fp_converges_to_f1_on_the_grid() {
    let prob = TensorProblem::new(vec![1.0, -0.75], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 101).unwrap();
    let family = |p: f64, x: &[f64]| eval_fp(&prob, x, p).unwrap();
    let target = |x: &[f64]| eval_f1(&prob, x).unwrap();
    let table = check_compact_convergence(&family, &target, &grid, &[2.0, 1.5, 1.25, 1.1, 1.01]).unwrap();
    assert!(table.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance), "{table:?}");
}

#[test]
fn fp_near_one_is_uniformly_close_on_unit_box() {
    // residuals on [-1, 1]² with y = (0.5, 0.5) are bounded by 1.25
    let prob = TensorProblem::new(vec![0.5, 0.5], 2).unwrap();
    let grid = GridBox::cube(2, -1.0, 1.0, 101).unwrap();
    let family = |p: f64, x: &[f64]| eval_fp(&prob, x, p).unwrap();
    let target = |x: &[f64]| eval_f1(&prob, x).unwrap();
    let table = check_compact_convergence(&family, &target, &grid, &[1.0 + 1e-9]).unwrap();
    assert!(table[0].sup_distance < 1e-6, "{table:?}");
}

#[test]
fn hp_converges_to_max_residual() {
    let prob = TensorProblem::new(vec![1.0, -0.75], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 101).unwrap();
    let family = |p: f64, x: &[f64]| eval_hp(&prob, x, p).unwrap();
    let target = |x: &[f64]| eval_finf(&prob, x).unwrap();
    let table = check_compact_convergence(&family, &target, &grid, &[8.0, 32.0, 64.0, 128.0]).unwrap();
    assert!(table.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance), "{table:?}");
}

#[test]
fn root_of_fp_preserves_verdict_and_argmin() {
    let prob = TensorProblem::new(vec![1.0, -0.75], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 101).unwrap();
    for p in [1.5, 2.0, 3.0] {
        let f = |x: &[f64]| eval_fp(&prob, x, p).unwrap();
        let root = move |v: f64| v.powf(1.0 / p);
        assert!(check_composition(&f, &root, &grid, DEFAULT_TOL).unwrap(), "p = {p}");
    }
}

#[test]
fn ratio_map_pulls_back_to_unit_ratios() {
    let y = [1.0, -0.75];
    let prob = TensorProblem::new(y.to_vec(), 2).unwrap();
    let src = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let tgt = GridBox::new(vec![-2.0, -2.0 / 0.75], vec![2.0, 2.0 / 0.75], 201).unwrap();
    let in_s = |x: &[f64]| in_region_s(&prob, x).unwrap();
    let in_s_prime = |u: &[f64]| u.iter().all(|a| u.iter().all(|b| a * b <= 1.0 + 1e-12));
    let f = |x: &[f64]| eval_f1(&prob, x).unwrap();
    let fwd = |x: &[f64]| x.iter().zip(&y).map(|(a, b)| a / b).collect::<Vec<f64>>();
    let inv = |u: &[f64]| u.iter().zip(&y).map(|(a, b)| a * b).collect::<Vec<f64>>();
    let ok = check_change_of_variables(
        &f,
        &fwd,
        &inv,
        Domain::masked(&src, &in_s),
        Domain::masked(&tgt, &in_s_prime),
        DEFAULT_TOL,
    )
    .unwrap();
    assert!(ok);
}

#[test]
fn identity_change_of_variables() {
    let grid = GridBox::cube(2, -1.0, 1.0, 41).unwrap();
    let f = |x: &[f64]| (x[0] - 0.3).abs() + x[1] * x[1];
    let id = |x: &[f64]| x.to_vec();
    assert!(check_change_of_variables(&f, &id, &id, Domain::from(&grid), Domain::from(&grid), DEFAULT_TOL).unwrap());
}

#[test]
fn region_masked_verdicts() {
    let prob = TensorProblem::new(vec![1.0, 1.0], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let report = verify_on_region_s(&prob, &grid, DEFAULT_TOL).unwrap();
    assert_eq!(report.verdict, Verdict::Global);
    let global: Vec<_> = report.plateaus.iter().filter(|p| p.kind == PlateauKind::Global).flat_map(|p| &p.points).collect();
    assert_eq!(global, [&vec![-1.0, -1.0], &vec![1.0, 1.0]]);

    let prob = TensorProblem::new(vec![1.0, -0.75, 0.5], 3).unwrap();
    let grid = GridBox::cube(3, -2.0, 2.0, 81).unwrap();
    let report = verify_on_region_s(&prob, &grid, DEFAULT_TOL).unwrap();
    assert_eq!(report.verdict, Verdict::Global);
    assert_eq!(report.grid_local_minima.len(), 1);
    let p = &report.grid_local_minima[0].point;
    assert!(p.iter().zip(prob.truth()).all(|(a, b)| (a - b).abs() < 1e-12), "{p:?}");
}

#[test]
fn masked_minimum_matches_unmasked_when_truth_in_region() {
    let prob = TensorProblem::new(vec![1.0, -0.5], 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let masked = verify_on_region_s(&prob, &grid, DEFAULT_TOL).unwrap();
    assert_eq!(masked.verdict, Verdict::Global);
    let unmasked = f1_report(&prob, &grid);
    assert_eq!(masked.global_value, unmasked.global_value);
}

#[test]
fn half_space_masks_cover_unit_ratio_region_with_equal_minima() {
    let y = [1.0, -0.75];
    let prob = TensorProblem::new(y.to_vec(), 2).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 201).unwrap();
    let in_s_prime = |u: &[f64]| u.iter().all(|a| u.iter().all(|b| a * b <= 1.0 + 1e-12));
    let weight = |u: &[f64]| u.iter().zip(&y).map(|(a, b)| a * b.abs()).sum::<f64>();
    let upper = |u: &[f64]| in_s_prime(u) && weight(u) >= 0.0;
    let lower = |u: &[f64]| in_s_prime(u) && weight(u) <= 0.0;
    let g = |u: &[f64]| {
        let x: Vec<f64> = u.iter().zip(&y).map(|(a, b)| a * b).collect();
        eval_f1(&prob, &x).unwrap()
    };
    let whole = evaluate_grid(&g, Domain::masked(&grid, &in_s_prime)).unwrap();
    let up = evaluate_grid(&g, Domain::masked(&grid, &upper)).unwrap();
    let lo = evaluate_grid(&g, Domain::masked(&grid, &lower)).unwrap();
    assert!(up.len() + lo.len() >= whole.len());
    assert_eq!(up.global_min().1, lo.global_min().1);
    assert_eq!(up.global_min().1, whole.global_min().1);
    assert_eq!(whole.argmin_points(ARGMIN_RTOL), vec![vec![-1.0, -1.0], vec![1.0, 1.0]]);
}

#[test]
fn reports_are_deterministic() {
    let prob = TensorProblem::new(vec![0.8, -1.2], 3).unwrap();
    let grid = GridBox::cube(2, -2.0, 2.0, 101).unwrap();
    let a = serde_json::to_string(&f1_report(&prob, &grid)).unwrap();
    let b = serde_json::to_string(&f1_report(&prob, &grid)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn refinement_keeps_global_verdicts() {
    let problems = [
        TensorProblem::new(vec![1.0, -0.75], 2).unwrap(),
        TensorProblem::new(vec![1.3, 0.6], 3).unwrap(),
    ];
    for prob in &problems {
        let f1 = |x: &[f64]| eval_f1(prob, x).unwrap();
        let f2 = |x: &[f64]| eval_fp(prob, x, 2.0).unwrap();
        let finf = |x: &[f64]| eval_finf(prob, x).unwrap();
        let fns: [&(dyn Fn(&[f64]) -> f64 + Sync); 3] = [&f1, &f2, &finf];
        for f in fns {
            let coarse = verify_weakly_global(f, &GridBox::cube(2, -2.0, 2.0, 101).unwrap(), DEFAULT_TOL).unwrap();
            let fine = verify_weakly_global(f, &GridBox::cube(2, -2.0, 2.0, 201).unwrap(), DEFAULT_TOL).unwrap();
            if coarse.verdict == Verdict::Global {
                assert_ne!(fine.verdict, Verdict::SpuriousFound);
            }
        }
    }
}
