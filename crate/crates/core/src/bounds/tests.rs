use super::*;
use crate::geometry::CurvatureBounds;
use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::{E, PI};

// High-precision reference values (50-digit arithmetic).
const GRAD_K1_T1: f64 = 0.608_685_369_177;
const GRAD_KM1_T1: f64 = 1.003_552_515_326;
const EIGEN_L2_K0: f64 = 1.860_382_734_205;
const C_1_HALF: f64 = 1.397_620_130_903;
const THM2_FLAT: f64 = 1.111_213_095_132;
const EIGEN_D_L1: f64 = 1.832_080_666_224;

fn pack(k_z: f64) -> CurvatureBounds {
    CurvatureBounds {
        k_z,
        k_0: 0.0,
        theta_h: 0.0,
        sigma: 0.0,
        theta_ii: 0.0,
        k: 0.0,
        r0: 1.0,
        z_sup: 0.0,
        z_collar: 0.0,
    }
}

#[test]
fn grad_bound_examples() {
    assert_relative_eq!(grad_bound_closed(0.0, 1.0).unwrap().value, SQRT_2_OVER_PI, epsilon = 1e-15);
    assert_relative_eq!(grad_bound_closed(1.0, 1.0).unwrap().value, GRAD_K1_T1, epsilon = 1e-12);
    assert_relative_eq!(grad_bound_closed(-1.0, 1.0).unwrap().value, GRAD_KM1_T1, epsilon = 1e-12);
    assert_eq!(grad_bound_closed(1.0, 0.0), Err(BoundsError::NonPositiveTime(0.0)));
}

#[test]
fn kappa_is_continuous_at_zero() {
    // kappa(ε, t) = t^{-1/2}(1 − εt/4 + O(ε²t²)), so the gap to 1/√t is
    // |ε|√t/4 up to rounding; it exceeds 1e-9 once √t > 0.4.
    for i in 0..=60 {
        let t = 1e-3 * 10f64.powf(i as f64 / 10.0);
        for eps in [1e-8, -1e-8, 3e-9, -7e-10, 0.0] {
            let gap = (kappa(eps, t) - 1.0 / t.sqrt()).abs();
            let first_order = eps.abs() * t.sqrt() / 4.0;
            assert!((gap - first_order).abs() <= 1e-3 * first_order + 1e-15 / t.sqrt(), "t={t}, eps={eps}");
            if t <= 0.16 {
                assert!(gap <= 1e-9);
            }
        }
    }
    // No jump where the series hands over to the direct formula.
    for t in [1e-3, 1.0, 1e3] {
        let k = 1e-6 / t;
        let below = kappa(k * (1.0 - 1e-9), t);
        let above = kappa(k * (1.0 + 1e-9), t);
        assert!(((below - above) / above).abs() < 1e-12);
    }
}

#[test]
fn eigen_bound_examples() {
    let b = eigen_grad_bound(2.0, 0.0).unwrap();
    assert_relative_eq!(b.value, EIGEN_L2_K0, max_relative = 1e-10);
    assert_relative_eq!(b.minimizer.unwrap(), 0.5, max_relative = 1e-4);
    let b = eigen_grad_bound(1.0, 1.0).unwrap();
    assert_relative_eq!(b.value, 2.0 * SQRT_2_OVER_PI, max_relative = 1e-10);
    assert_relative_eq!(b.minimizer.unwrap(), 2f64.ln(), max_relative = 1e-4);
    // The bound at the minimizer is the grad bound times e^{λt/2}.
    let t = b.minimizer.unwrap();
    let g = grad_bound_closed(-1.0, t).unwrap().value * (0.5 * t).exp();
    assert_relative_eq!(b.value, g, max_relative = 1e-12);
    assert!(eigen_grad_bound(0.0, 1.0).is_err());
}

#[test]
fn eigen_printed_base_is_reciprocal_of_stationary() {
    assert_relative_eq!(eigen_grad_bound_stationary(3.0, 2.0), 2.617_047_624_204, max_relative = 1e-11);
    assert_relative_eq!(eigen_grad_bound_printed(3.0, 2.0), 1.216_293_823_773, max_relative = 1e-11);
    for (l, k) in [(0.5, 0.1), (1.0, 3.0), (10.0, 0.5), (2.0, 1e-12)] {
        let num = eigen_grad_bound(l, k).unwrap();
        assert_relative_eq!(num.value, eigen_grad_bound_stationary(l, k), max_relative = 1e-8);
        assert!(eigen_grad_bound_printed(l, k) <= num.value);
    }
}

#[test]
fn alpha0_and_c_examples() {
    assert_eq!(alpha0(0.0, 0.0, 1, 0.0), 0.0);
    assert_eq!(alpha0(-1.0, -1.0, 2, 0.0), 0.5);
    assert_eq!(alpha0(1.0, -4.0, 5, 2.0), 3.0);
    assert_eq!(c_of_s(7.0, 0.0), SQRT_2_OVER_PI);
    assert_relative_eq!(c_of_s(1.0, 0.5), C_1_HALF, epsilon = 1e-12);
    // Saturated regime: α0√(s/2π) ≥ 1.
    let s = 100.0;
    assert_relative_eq!(c_of_s(s, 2.0), SQRT_2_OVER_PI + 2.0 * s.sqrt() * 2.0);
}

#[test]
fn dirichlet_bound_examples() {
    let b = dirichlet_grad_bound(0.0, 0.0, 1.0).unwrap();
    assert_relative_eq!(b.value, THM2_FLAT, epsilon = 1e-12);
    assert_eq!(b.minimizer, Some(1.0));
    for t in [0.25, 4.0, 9.0] {
        let b = dirichlet_grad_bound(0.5, 0.0, t).unwrap();
        assert_relative_eq!(b.value, THM2_FLAT / t.sqrt(), max_relative = 1e-12);
    }
    let b = dirichlet_grad_bound(-3.0, 1.2, 5.0).unwrap();
    let s = b.minimizer.unwrap();
    assert!(s > 0.0 && s <= 5.0 && b.value > 0.0);
}

#[test]
fn dirichlet_eigen_examples() {
    let b = dirichlet_eigen_bound(1.0, 0.0, 0.0).unwrap();
    assert_relative_eq!(b.value, EIGEN_D_L1, max_relative = 1e-10);
    assert_relative_eq!(b.minimizer.unwrap(), 1.0, max_relative = 1e-4);
    assert_relative_eq!(b.detail("at_reference_time").unwrap(), EIGEN_D_L1, max_relative = 1e-12);
    let mut prev = 0.0;
    for l in [0.5, 1.0, 2.0, 4.0] {
        let v = dirichlet_eigen_bound(l, 0.3, 0.2).unwrap().value;
        assert!(v > prev);
        prev = v;
    }
    let lo = dirichlet_eigen_bound(1.0, 0.0, 0.1).unwrap().value;
    let hi = dirichlet_eigen_bound(1.0, 0.0, 0.5).unwrap().value;
    assert!(hi > lo);
}

#[test]
fn neumann_bound_examples() {
    for t in [0.3, 1.0, 2.0] {
        assert_eq!(
            neumann_grad_bound(0.7, 1.0, t).unwrap().value,
            grad_bound_closed(0.7, t).unwrap().value
        );
    }
    assert_relative_eq!(neumann_grad_bound(-1.0, 2.0, 1.0).unwrap().value, 2.0 * GRAD_KM1_T1, epsilon = 1e-11);
    assert_relative_eq!(neumann_grad_bound(0.0, 3.0, 4.0).unwrap().value, SQRT_2_OVER_PI * 3.0 / 2.0);
    assert_eq!(neumann_grad_bound(0.0, 0.9, 1.0), Err(BoundsError::PhiBelowOne(0.9)));
}

#[test]
fn ell_and_r1_examples() {
    assert_relative_eq!(r1(10.0, 1.0, 1.0), PI / 4.0, epsilon = 1e-15);
    assert_relative_eq!(r1(10.0, 1e-14, 2.0), 0.5, epsilon = 1e-12);
    assert_eq!(r1(10.0, 0.0, 2.0), 0.5);
    for k in [0.25, 1.0, 9.0] {
        assert_relative_eq!(r1(100.0, k, 0.0), PI / (2.0 * k.sqrt()), epsilon = 1e-14);
    }
    assert_eq!(r1(3.0, 0.0, 0.0), 3.0);
    assert_eq!(ell(5.0, 0.0, 0.0), 1.0);
    for (k, th) in [(1.0, 1.0), (0.3, 2.0), (1e-9, 0.5), (4.0, 0.1)] {
        let r = r1(1e6, k, th);
        assert!(ell(r, k, th).abs() < 1e-10, "ℓ(r1) = {}", ell(r, k, th));
    }
}

#[test]
fn neumann_explicit_convex_case() {
    let p = pack(-2.0);
    for (s, t) in [(0.1, 0.5), (1.0, 1.0), (0.5, 3.0)] {
        let n = neumann_explicit_bound(&p, 2, s, t).unwrap();
        let convex = (2.0 / (PI * s)).sqrt() * (0.5 * 2.0 * s).exp();
        assert!((n.a.value - convex).abs() <= 1e-10 * convex);
        assert_eq!(n.phi_sup_estimate, 1.0);
    }
    let flat = neumann_explicit_bound(&pack(0.0), 1, 1.0, 2.0).unwrap();
    assert_relative_eq!(flat.b.value, 1.315_489_246_959, epsilon = 1e-11);
    assert_eq!(flat.b_printed, flat.b.value);
    assert!(neumann_explicit_bound(&pack(0.0), 1, 2.0, 1.0).is_err());
}

#[test]
fn neumann_explicit_with_concave_boundary() {
    let mut p = pack(0.5);
    p.sigma = 0.3;
    p.theta_ii = 1.0;
    p.k = 0.5;
    p.z_collar = 0.2;
    let n = neumann_explicit_bound(&p, 2, 0.2, 1.0).unwrap();
    let r = r1(p.r0, p.k, p.theta_ii);
    let kp = 0.5 - 2.0 * 0.3 * 0.2 - 2.0 * 0.3 * 2.0 / r - 2.0 * 0.09;
    assert_relative_eq!(n.k_phi, kp, epsilon = 1e-14);
    assert_relative_eq!(n.phi_sup_estimate, (0.5 * 0.3 * 2.0 * r).exp(), epsilon = 1e-14);
    // The printed time-only form uses a larger curvature constant, so it is smaller.
    assert!(n.b_printed < n.b.value);
    p.r0 = 0.0;
    assert_eq!(neumann_explicit_bound(&p, 2, 0.2, 1.0), Err(BoundsError::ZeroCollar));
}

#[test]
fn log_phi_quadrature() {
    // d = 1, k = 0: log φ(r1) = σ r1 / 2 exactly.
    let (sigma, theta) = (0.8, 2.0);
    let r = r1(10.0, 0.0, theta);
    assert_relative_eq!(log_phi(r, sigma, 1, 0.0, theta, r), 0.5 * sigma * r, epsilon = 1e-10);
    assert_eq!(log_phi(0.0, sigma, 3, 1.0, 1.0, PI / 4.0), 0.0);
    let r = r1(10.0, 1.0, 1.0);
    let mut prev = 0.0;
    for i in 1..=20 {
        let rho = r * i as f64 / 20.0;
        let v = log_phi(rho, sigma, 3, 1.0, 1.0, r);
        assert!(v > prev);
        prev = v;
    }
    assert!(prev <= 0.5 * sigma * 3.0 * r + 1e-12);
    assert_eq!(log_phi(2.0 * r, sigma, 3, 1.0, 1.0, r), prev);
}

#[test]
fn c2_examples() {
    let b = c2_bound(0.0, 1.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(b.value, 2.0 * SQRT_2_OVER_PI, epsilon = 1e-14);
    let far = c2_bound(1.0, 60.0, 1.0, 0.0).unwrap().value;
    assert!(far < 1e-12);
    let at0 = c2_bound(0.0, 2.0, 1.0, 3.0).unwrap().value;
    for k in [1e-8, -1e-8] {
        assert!((c2_bound(k, 2.0, 1.0, 3.0).unwrap().value - at0).abs() < 1e-6);
    }
}

#[test]
fn c2_closed_forms_match_quadrature_on_grid() {
    for ki in -10..=10 {
        let k = ki as f64 * 0.5;
        for ti in 0..=40 {
            let t = 1e-3 * 1e4f64.powf(ti as f64 / 40.0);
            let b = c2_bound(k, t, 0.0, 1.0).unwrap();
            let q = b.detail("quadrature").unwrap();
            assert!((b.value - q).abs() <= 1e-8, "K={k} t={t}: {} vs {q}", b.value);
        }
    }
}

#[test]
fn cor_min_examples() {
    let b = c2_bound_minimized(0.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(b.detail("squared").unwrap(), 8.0 / PI, epsilon = 1e-14);
    assert_relative_eq!(b.value, b.detail("numeric").unwrap(), max_relative = 1e-8);
    let b = c2_bound_minimized(1.0, 2.0, 1.0).unwrap();
    assert_relative_eq!(b.value, (PI / 2.0).sqrt(), epsilon = 1e-14);
    assert_eq!(b.detail("case"), Some(4.0));
    for sign in [1.0, -1.0] {
        let near = c2_bound_minimized(sign * 1e-10, 1.0, 1.0).unwrap();
        assert!((near.value - (8.0 / PI).sqrt()).abs() < 1e-8);
    }
    assert_eq!(c2_bound_minimized(1.0, 1.0, 0.0), Err(BoundsError::ZeroLaplacian));
}

#[test]
fn cor_min_matches_numeric_minimization() {
    let mut rng = crate::rng::PathRng::new(11, 0);
    for _ in 0..100 {
        let k = -5.0 + 10.0 * rng.uniform();
        let u = 0.05 + 5.0 * rng.uniform();
        let lu = 0.05 + 5.0 * rng.uniform();
        let b = c2_bound_minimized(k, u, lu).unwrap();
        let num = b.detail("numeric").unwrap();
        assert!(b.value >= num - 1e-8 * num);
        assert!(((b.value - num) / num).abs() < 1e-6, "K={k} u={u} Lu={lu}: {} vs {num}", b.value);
    }
}

#[test]
fn simple_c2_examples() {
    assert_relative_eq!(c2_bound_simple(0.0, 1.0, 1.0, 1.0).unwrap().value, 2.0 * SQRT_2_OVER_PI);
    for d in [0.3, 1.0, 2.5] {
        let simple = c2_bound_simple(0.0, d, 1.3, 0.4).unwrap().value;
        let thm = c2_bound(0.0, 1.0 / (d * d), 1.3, 0.4).unwrap().value;
        assert_relative_eq!(simple, thm, max_relative = 1e-12);
        let neg = c2_bound(-2.0, 1.0 / (d * d), 1.3, 0.4).unwrap().value;
        assert!(c2_bound_simple(2.0, d, 1.3, 0.4).unwrap().value >= neg);
    }
    assert!(c2_bound_simple(0.0, 0.0, 1.0, 1.0).is_err());
}

#[test]
fn dirichlet_and_neumann_c2_examples() {
    let d = c2_dirichlet_bound(0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(d.value, 2.222_426_190_263, epsilon = 1e-11);
    let c = SQRT_2_OVER_PI;
    assert_relative_eq!(d.value / 2.0, c + 1.0 / (4.0 * c), epsilon = 1e-14);
    assert!(c2_dirichlet_bound(0.0, 0.3, 1.0, 1.0, 1.0).unwrap().value > d.value);
    assert_relative_eq!(
        c2_neumann_bound(0.4, 1.0, 0.7, 1.0, 2.0).unwrap().value,
        c2_bound_simple(0.4, 0.7, 1.0, 2.0).unwrap().value
    );
    assert_relative_eq!(c2_neumann_bound(1.0, 2.0, 1.0, 1.0, 1.0).unwrap().value, 5.261_956_987_836, epsilon = 1e-11);
    let explicit = c2_neumann_explicit(&pack(-1.5), 2, 0.8, 1.0, 1.0).unwrap();
    assert_relative_eq!(explicit.value, c2_bound_simple(1.5, 0.8, 1.0, 1.0).unwrap().value, epsilon = 1e-14);
}

#[test]
fn iso_examples() {
    let p = pack(0.0);
    let iso = iso_explicit(&p, 1, 1.0, 0.0, 1.0).unwrap();
    assert_relative_eq!(iso.kappa_d, 0.295_953_227_552, epsilon = 1e-11);
    assert_relative_eq!(iso.kappa_n, 0.086_149_122_151, epsilon = 1e-11);
    assert!(iso.kappa_d <= 2.0 / PI);
    let zero = iso_explicit(&p, 1, 1.0, 0.0, 0.0).unwrap();
    assert_eq!((zero.kappa_d, zero.kappa_n), (0.0, 0.0));
    let g = iso_lower_bounds(1.0, 1.0, 4.0, 0.25).unwrap();
    assert_relative_eq!(g.kappa_d, (1.0 - 1.0 / E) * 2.0);
    assert_relative_eq!(g.kappa_n, (1.0 - 2.0 / E) * 0.25 / 2.0);
    assert!(iso_lower_bounds(0.0, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn useest_examples() {
    assert!(useest_check(1.0, 4.0));
    assert!(useest_check(0.25, 9.0));
    for t in [0.1, 1.0, 5.0] {
        assert!(useest_check(t, 0.0));
    }
}

#[test]
fn bounds_are_monotone_in_curvature() {
    let ks: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
    for w in ks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for t in [0.01, 0.5, 2.0, 10.0] {
            assert!(grad_bound_closed(hi, t).unwrap().value <= grad_bound_closed(lo, t).unwrap().value);
            assert!(c2_bound(hi, t, 1.0, 1.0).unwrap().value <= c2_bound(lo, t, 1.0, 1.0).unwrap().value + 1e-15);
            assert!(dirichlet_grad_bound(hi, 0.3, t).unwrap().value <= dirichlet_grad_bound(lo, 0.3, t).unwrap().value + 1e-12);
            assert!(neumann_grad_bound(hi, 1.5, t).unwrap().value <= neumann_grad_bound(lo, 1.5, t).unwrap().value);
        }
        assert!(c2_bound_minimized(hi, 1.0, 1.0).unwrap().value <= c2_bound_minimized(lo, 1.0, 1.0).unwrap().value + 1e-12);
        let (a, b) = (pack(hi), pack(lo));
        assert!(iso_explicit(&a, 2, 1.0, hi, 1.0).unwrap().kappa_d >= iso_explicit(&b, 2, 1.0, lo, 1.0).unwrap().kappa_d);
    }
}

#[test]
fn theorem_ids_round_trip() {
    for id in TheoremId::ALL {
        assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
    }
    assert!("thm9".parse::<TheoremId>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn kappa_is_dominated(k in -20.0f64..20.0, t in 1e-4f64..10.0) {
        let rhs = (0.5 * neg_part(k) * t).exp() / t.sqrt();
        prop_assert!(kappa(k, t) <= rhs * (1.0 + 1e-12));
    }
}

proptest! {
    #[test]
    fn useest_holds(t in 1e-6f64..100.0, c in 0.0f64..1e4) {
        prop_assert!(useest_check(t, c));
    }

    #[test]
    fn dirichlet_minimizer_in_window(k in -5.0f64..5.0, a in 0.0f64..3.0, t in 1e-3f64..20.0) {
        let b = dirichlet_grad_bound(k, a, t).unwrap();
        let s = b.minimizer.unwrap();
        prop_assert!(b.value > 0.0 && s > 0.0 && s <= t);
    }
}
