use super::*;
use crate::geometry::{DriftSpec, Potential};
use crate::numerics::{adaptive_simpson, SQRT_2_OVER_PI};
use std::f64::consts::PI;

fn cfg(dt: f64, t: f64, paths: usize, seed: u64) -> SimConfig {
    SimConfig::new(dt, t, paths, seed)
}

#[test]
fn config_validation() {
    assert!(cfg(0.1, 1.0, 10, 1).validate().is_ok());
    assert!(cfg(0.0, 1.0, 10, 1).validate().is_err());
    assert!(cfg(0.1, 1.0, 0, 1).validate().is_err());
    assert!(cfg(0.3, 1.0, 10, 1).validate().is_err());
    assert!(cfg(0.1, -1.0, 10, 1).validate().is_err());
    let c = SimConfig { substeps: 4, ..cfg(0.25, 1.0, 1, 1) };
    assert_eq!(c.total_steps(), 16);
    assert!((c.step() - 1.0 / 16.0).abs() < 1e-15);
}

#[test]
fn weight_derivative_integrates_to_minus_one() {
    for &k in &[-3.0, -1e-9, 0.0, 1e-9, 0.7, 40.0] {
        let w = BismutWeight { k, t: 2.0 };
        let total = adaptive_simpson(|s| w.derivative(s), 0.0, 2.0, 1e-12);
        assert!((total + 1.0).abs() < 1e-8, "k = {k}: {total}");
    }
    assert!((BismutWeight { k: 0.0, t: 4.0 }.derivative(1.0) + 0.25).abs() < 1e-15);
}

#[test]
fn step_free_rejects_wrong_increment() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let mut s = PathState::new(&m, &[0.0, 0.0, 1.0]);
    let err = step_free(&m, &mut s, 0.1, &[0.1], None).unwrap_err();
    assert_eq!(err, SimError::IncrementDimension { expected: 2, got: 1 });
    step_free(&m, &mut s, 0.1, &[0.1, 0.2], None).unwrap();
    assert!(m.is_valid_point(&s.position));
    assert!((s.time - 0.1).abs() < 1e-15);
}

#[test]
fn euclidean_step_is_exact_translation() {
    let m = ManifoldModel::euclidean(2).unwrap();
    let mut s = PathState::new(&m, &[1.0, -1.0]);
    step_free(&m, &mut s, 0.5, &[0.25, 0.5], None).unwrap();
    assert_eq!(s.position, vec![1.25, -0.5]);
    assert_eq!(s.q, DMatrix::identity(2, 2));
}

#[test]
fn unsupported_combinations() {
    let e = ManifoldModel::euclidean(1).unwrap();
    assert!(matches!(
        run_killed(&e, &cfg(0.1, 1.0, 10, 1), &[0.0], |_| 1.0),
        Err(SimError::UnsupportedBoundary { .. })
    ));
    let b = ManifoldModel::ball(2, 1.0).unwrap();
    assert!(matches!(
        bismut_gradient(&b, &cfg(0.1, 1.0, 10, 1), &[0.0, 0.0], 0.0, |_| 1.0),
        Err(SimError::UnsupportedGradient(_))
    ));
    assert!(matches!(
        run_free(&b, &cfg(0.1, 1.0, 10, 1), &[0.0, 0.0], |_| 1.0),
        Err(SimError::UnsupportedBoundary { .. })
    ));
    let h = ManifoldModel::half_space(1).unwrap();
    assert!(matches!(run_killed(&h, &cfg(0.1, 1.0, 10, 1), &[-0.1], |_| 1.0), Err(SimError::InvalidStart(_))));
}

#[test]
fn killed_half_space_survival() {
    let m = ManifoldModel::half_space(1).unwrap();
    let est = run_killed(&m, &cfg(0.1, 1.0, 40_000, 7), &[0.5], |_| 1.0).unwrap();
    let exact = 0.382_924_922_548;
    assert!(est.survival.z_score(exact) < 3.0, "{:?}", est.survival);
    assert_eq!(est.semigroup.mean, est.survival.mean);
}

#[test]
fn start_on_boundary_is_killed_at_once() {
    let m = ManifoldModel::half_space(2).unwrap();
    let c = cfg(0.1, 1.0, 1, 3);
    let plan = PathPlan::new(&m, &c, Boundary::Killed);
    let s = plan.simulate(&[0.0, 0.3], 0, |_| {});
    assert_eq!(s.status, PathStatus::Killed { exit_time: 0.0 });
    let est = run_killed(&m, &cfg(0.1, 1.0, 100, 3), &[0.0, 0.3], |_| 1.0).unwrap();
    assert_eq!(est.survival.mean, 0.0);
}

#[test]
fn killed_exit_times_lie_in_horizon() {
    let m = ManifoldModel::ball(2, 1.0).unwrap();
    let c = cfg(0.05, 1.0, 200, 11);
    let plan = PathPlan::new(&m, &c, Boundary::Killed);
    for i in 0..200 {
        let s = plan.simulate(&[0.5, 0.0], i, |_| {});
        match s.status {
            PathStatus::Killed { exit_time } => assert!(exit_time > 0.0 && exit_time <= 1.0),
            PathStatus::Finished => assert!(m.contains(&s.position)),
            PathStatus::Alive => panic!("path did not finish"),
        }
    }
}

#[test]
fn interval_dirichlet_eigenfunction() {
    let m = ManifoldModel::interval(PI).unwrap();
    let est = run_killed(&m, &cfg(0.01, 1.0, 20_000, 5), &[1.0], |x| x[0].sin()).unwrap();
    let exact = (-0.5f64).exp() * 1.0f64.sin();
    assert!(est.semigroup.z_score(exact) < 4.0, "{:?} vs {exact}", est.semigroup);
}

#[test]
fn interval_neumann_eigenfunction() {
    let m = ManifoldModel::interval(PI).unwrap();
    let est = run_reflected(&m, &cfg(0.25, 1.0, 40_000, 5), &[1.0], |x| x[0].cos()).unwrap();
    let exact = (-0.5f64).exp() * 1.0f64.cos();
    assert!(est.semigroup.z_score(exact) < 4.0, "{:?} vs {exact}", est.semigroup);
}

#[test]
fn reflection_conserves_constants_and_stays_inside() {
    for m in [ManifoldModel::half_space(2).unwrap(), ManifoldModel::ball(3, 1.0).unwrap(), ManifoldModel::interval(1.0).unwrap()] {
        let x0 = vec![0.1; m.coord_dim()];
        let c = cfg(0.05, 1.0, 500, 2);
        let est = run_reflected(&m, &c, &x0, |_| 1.0).unwrap();
        assert_eq!(est.semigroup.mean, 1.0);
        assert_eq!(est.semigroup.se, 0.0);
        let plan = PathPlan::new(&m, &c, Boundary::Reflected);
        for i in 0..50 {
            plan.simulate(&x0, i, |s| assert!(m.contains(&s.position), "{:?}", s.position));
        }
    }
}

#[test]
fn interval_fold_matches_repeated_mirrors() {
    let kind = ModelKind::Interval { length: 1.0 };
    for &(y, expect) in &[(1.3, 0.7), (-0.2, 0.2), (2.5, 0.5), (-1.25, 0.75)] {
        let mut x = [y];
        let push = reflect(&kind, &mut x);
        assert!((x[0] - expect).abs() < 1e-12, "{y}");
        assert!(push > 0.0);
    }
    let mut x = [0.4];
    assert_eq!(reflect(&kind, &mut x), 0.0);
}

#[test]
fn local_time_mean_from_boundary() {
    let m = ManifoldModel::half_space(1).unwrap();
    let est = run_reflected(&m, &cfg(0.05, 1.0, 40_000, 9), &[0.0], |_| 1.0).unwrap();
    assert!(est.local_time.z_score(SQRT_2_OVER_PI) < 3.0, "{:?}", est.local_time);
}

#[test]
fn bismut_indicator_on_the_line() {
    let m = ManifoldModel::euclidean(1).unwrap();
    let g = bismut_gradient(&m, &cfg(1.0, 1.0, 100_000, 21), &[0.0], 0.0, |x| (x[0] > 0.0) as u8 as f64).unwrap();
    let exact = 1.0 / (2.0 * PI).sqrt();
    assert!((g.mean[0] - exact).abs() < 3.0 * g.se[0], "{g:?}");
    assert_eq!(g.scheme, "bismut");
}

#[test]
fn bismut_sphere_eigenfunction() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let t = 0.5;
    let g = bismut_gradient(&m, &cfg(0.01, t, 20_000, 4), &[1.0, 0.0, 0.0], 1.0, |x| x[2]).unwrap();
    let exact = (-t).exp();
    assert!((g.norm - exact).abs() < 4.0 * g.norm_se + 0.01, "{g:?} vs {exact}");
    // The gradient of the height function at the equator points along e_z.
    assert!(g.mean[0].abs() < 1e-12);
    assert!(g.mean[2] > 0.0);
}

#[test]
fn bismut_reflected_interval() {
    let m = ManifoldModel::interval(PI).unwrap();
    let g = bismut_gradient(&m, &cfg(0.01, 1.0, 20_000, 8), &[1.0], 0.0, |x| x[0].cos()).unwrap();
    let exact = -(-0.5f64).exp() * 1.0f64.sin();
    assert!((g.mean[0] - exact).abs() < 4.0 * g.se[0], "{g:?} vs {exact}");
}

#[test]
fn q_norm_respects_curvature_bound() {
    let models = [
        ManifoldModel::euclidean(2).unwrap(),
        ManifoldModel::sphere(2, 1.0).unwrap(),
        ManifoldModel::hyperbolic(2, 1.0).unwrap(),
        ManifoldModel::sphere(2, 1.0)
            .unwrap()
            .with_drift(DriftSpec::Gradient { potential: Potential::Height { coefficient: 0.5 } })
            .unwrap(),
        ManifoldModel::euclidean(2)
            .unwrap()
            .with_drift(DriftSpec::Gradient { potential: Potential::Quadratic { strength: -1.0, center: vec![0.0, 0.0] } })
            .unwrap(),
    ];
    for m in &models {
        let km = crate::numerics::neg_part(m.curvature_bounds().unwrap().k_z);
        let x0 = match m.kind() {
            ModelKind::Sphere { .. } => vec![0.0, 0.0, 1.0],
            ModelKind::Hyperbolic { .. } => vec![0.0, 1.0],
            _ => vec![0.0, 0.0],
        };
        let c = cfg(0.02, 1.0, 50, 17);
        let plan = PathPlan::new(m, &c, Boundary::Free).with_weight(BismutWeight { k: 0.0, t: 1.0 });
        for i in 0..50 {
            plan.simulate(&x0, i, |s| {
                let norm = s.q.norm() / (m.dim() as f64).sqrt();
                let bound = (0.5 * km * s.time).exp() * (1.0 + 10.0 * c.dt);
                assert!(norm <= bound, "{}: {norm} > {bound}", m.name());
            });
        }
    }
}

#[test]
fn runs_are_bit_identical_across_thread_counts() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let c = cfg(0.05, 1.0, 300, 99);
    let run = || bismut_gradient(&m, &c, &[0.0, 0.0, 1.0], 1.0, |x| x[0] + x[2]).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(run);
    assert_eq!(one.mean.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), three.mean.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    assert_eq!(one.norm_se.to_bits(), three.norm_se.to_bits());
    let other = bismut_gradient(&m, &SimConfig { seed: 100, ..c.clone() }, &[0.0, 0.0, 1.0], 1.0, |x| x[0] + x[2]).unwrap();
    assert_ne!(one.mean, other.mean);
}

#[test]
fn fd_gradient_with_common_random_numbers() {
    let m = ManifoldModel::euclidean(2).unwrap();
    let sampler = ModelSampler::new(m, cfg(0.5, 1.0, 20_000, 1), Boundary::Free, |x| x[0] * x[0] + 3.0 * x[1]);
    // P_t(x²) = x² + t, so the gradient at (1, 0) is (2, 3).
    let g = fd_gradient(&sampler, &[1.0, 0.0], 0.5, FdScheme::Central, true, 5).unwrap();
    assert!((g.mean[0] - 2.0).abs() < 4.0 * g.se[0], "{g:?}");
    assert!((g.mean[1] - 3.0).abs() < 1e-9, "{g:?}");
    let f = fd_gradient(&sampler, &[1.0, 0.0], 0.5, FdScheme::Forward, true, 5).unwrap();
    // Forward differences of x² carry the bias ε.
    assert!((f.mean[0] - 2.5).abs() < 4.0 * f.se[0], "{f:?}");
    assert!(matches!(
        fd_gradient(&sampler, &[1.0, 0.0], 1e-4, FdScheme::Central, true, 5),
        Err(SimError::StepTooSmall { .. })
    ));
    let ind = fd_gradient(&sampler, &[1.0, 0.0], 0.5, FdScheme::Central, false, 5).unwrap();
    assert!(ind.se[0] > g.se[0]);
}

#[test]
fn weak_error_is_first_order_for_ou() {
    let m = ManifoldModel::euclidean(1)
        .unwrap()
        .with_drift(DriftSpec::Gradient { potential: Potential::Quadratic { strength: 1.0, center: vec![0.0] } })
        .unwrap();
    // With a linear payoff the Euler mean is deterministic: x0(1 − h/2)^n.
    let mut s = PathState::new(&m, &[10.0]);
    for _ in 0..4 {
        step_free(&m, &mut s, 0.25, &[0.0], None).unwrap();
    }
    assert!((s.position[0] - 10.0 * 0.875f64.powi(4)).abs() < 1e-12);
}
