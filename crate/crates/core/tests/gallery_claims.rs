use globfn::gallery::{
    clipped_shift, composition_counterexample, hestenes, hestenes_path, nopath, GalleryFunction,
};
use globfn::landscape::{
    grid_local_minima, verify_global, verify_weakly_global, Boundary, GridBox, PlateauKind, Verdict, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict_of(g: GalleryFunction) -> globfn::landscape::GridReport {
    let f = move |x: &[f64]| g.eval(x).unwrap();
    verify_global(&f, &g.domain_box(), DEFAULT_TOL).unwrap()
}

#[test]
fn global_claims_hold_on_their_boxes() {
    for g in [GalleryFunction::Rational, GalleryFunction::Nopath, GalleryFunction::Hestenes, GalleryFunction::Takagi] {
        let report = verdict_of(g);
        assert_eq!(report.verdict, Verdict::Global, "{}: {:?}", g.name(), report.spurious().next());
    }
}

#[test]
fn composition_is_spurious_at_origin() {
    let report = verdict_of(GalleryFunction::Composition);
    assert_eq!(report.verdict, Verdict::SpuriousFound);
    let bad: Vec<_> = report.spurious().collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].value, 1.0);
    assert!(bad[0].points.iter().any(|p| p[0] == 0.0));
    assert_eq!(report.global_value, 0.0);
}

#[test]
fn composition_pieces_are_global() {
    let grid = GalleryFunction::Composition.domain_box();
    let abs = |x: &[f64]| x[0].abs();
    let shift = |x: &[f64]| clipped_shift(x[0]);
    assert_eq!(verify_global(&abs, &grid, DEFAULT_TOL).unwrap().verdict, Verdict::Global);
    assert_eq!(verify_global(&shift, &grid, DEFAULT_TOL).unwrap().verdict, Verdict::Global);
    assert_eq!(composition_counterexample(0.0), 1.0);
}

#[test]
fn strict_plateau_is_not_weakly_global() {
    let g = GalleryFunction::Plateau;
    let f = move |x: &[f64]| g.eval(x).unwrap();
    let report = verify_weakly_global(&f, &g.domain_box(), DEFAULT_TOL).unwrap();
    assert_eq!(report.verdict, Verdict::SpuriousFound);
    let shelf = report.spurious().next().unwrap();
    assert!(shelf.strict);
    assert!((shelf.value - 6.0).abs() < 1e-12);
    assert!((report.global_value - 1.0).abs() < 1e-12);
}

#[test]
fn hestenes_origin_is_a_grid_artifact() {
    let g = GalleryFunction::Hestenes;
    let f = move |x: &[f64]| g.eval(x).unwrap();
    let grid = g.domain_box();
    // The Moore stencil cannot see the curved descent path out of the origin.
    let raw = grid_local_minima(&f, &grid).unwrap();
    assert!(raw.iter().any(|m| m.point == vec![0.0, 0.0]));
    let report = verify_global(&f, &grid, DEFAULT_TOL).unwrap();
    let origin = report.plateaus.iter().find(|p| p.points.contains(&vec![0.0, 0.0])).unwrap();
    assert_eq!(origin.kind, PlateauKind::Artifact);
    assert!(origin.refined_value.unwrap() <= report.global_value + DEFAULT_TOL);
}

#[test]
fn hestenes_path_identity_on_fine_grid() {
    let worst = (0..100)
        .map(|k| {
            let t = k as f64 / 99.0;
            let (a, b) = hestenes_path(t);
            (hestenes(a, b) + 9.0 / 16.0 * t.powi(4)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn rational_window_avoids_edge_minima() {
    let f = |x: &[f64]| globfn::gallery::rational_global(x[0]);
    let closed = GridBox::new(vec![-5.0], vec![5.0], 1001).unwrap();
    let window = closed.clone().with_boundary(Boundary::Window);
    assert!(grid_local_minima(&f, &closed).unwrap().len() > 1);
    let mins = grid_local_minima(&f, &window).unwrap();
    assert_eq!(mins.len(), 1);
    assert_eq!(mins[0].point, vec![0.0]);
}

#[test]
fn nopath_extension_is_continuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut prev = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let worst = (0..1000)
            .map(|_| {
                let x2: f64 = rng.random_range(-1.0..=1.0);
                (nopath(eps, x2).unwrap() - nopath(0.0, x2).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < prev);
        prev = worst;
    }
    assert!(prev < 1e-10);
}

#[test]
fn nopath_minimum_row() {
    let g = GalleryFunction::Nopath;
    let f = move |x: &[f64]| g.eval(x).unwrap();
    let report = verify_global(&f, &g.domain_box(), DEFAULT_TOL).unwrap();
    assert!((report.global_value + 1.0).abs() < 1e-12);
    // the row x₂ = −1 is flat up to rounding, so it may split into several plateaus
    for p in report.plateaus.iter().filter(|p| p.kind == PlateauKind::Global) {
        assert!(p.points.iter().all(|x| x[1] == -1.0));
    }
}

#[test]
fn nopath_branches_meet_at_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let x1: f64 = rng.random_range(-1.0..=1.0);
        let mid = nopath(x1, 0.0).unwrap();
        for h in [1e-9, -1e-9] {
            assert!((nopath(x1, h).unwrap() - mid).abs() < 1e-7, "x1 = {x1}");
        }
    }
}
