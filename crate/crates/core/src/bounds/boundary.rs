//! Dirichlet and Neumann gradient bounds.

use super::{check_nonneg, check_positive, check_time, k_minus, kappa, BoundResult, BoundsError, TheoremId, MIN_TOL};
use crate::geometry::CurvatureBounds;
use crate::numerics::{
    adaptive_simpson, minimize_log_scale_multimodal, neg_part, SQRT_2_OVER_PI,
};
use std::f64::consts::PI;

/// `½(max{θ_H⁻, √((d−1)K_0⁻)} + sup|Z|)`.
pub fn alpha0(theta_h: f64, k_0: f64, d: usize, z_sup: f64) -> f64 {
    let ricci_part = ((d as f64 - 1.0).max(0.0) * neg_part(k_0)).sqrt();
    0.5 * (neg_part(theta_h).max(ricci_part) + z_sup)
}

/// `√(2/π) + √s·α0·min{2, 1 + α0√(s/(2π))}`.
pub fn c_of_s(s: f64, alpha0: f64) -> f64 {
    let rs = s.sqrt();
    SQRT_2_OVER_PI + rs * alpha0 * (1.0 + alpha0 * (s / (2.0 * PI)).sqrt()).min(2.0)
}

fn dirichlet_profile(s: f64, k_minus: f64, alpha0: f64) -> f64 {
    let c = c_of_s(s, alpha0);
    (0.5 * k_minus * s).exp() / s.sqrt() * (c + 0.25 / c)
}

/// Dirichlet gradient bound at time `t`, minimized over `s ∈ (0, t]`.
pub fn dirichlet_grad_bound(k_z: f64, alpha0: f64, t: f64) -> Result<BoundResult, BoundsError> {
    check_time(t)?;
    check_nonneg("α0", alpha0)?;
    let km = k_minus(k_z);
    // The saturation of min{2, ·} in C(s) can create a second local minimum.
    let m = minimize_log_scale_multimodal(|s| dirichlet_profile(s, km, alpha0), 1e-8 * t, t, MIN_TOL);
    Ok(BoundResult::new(TheoremId::Thm2, m.value).at(m.x))
}

/// `‖du‖∞/‖u‖∞` bound for a Dirichlet eigenfunction, as the infimum over
/// `t` of `e^{(λ+K⁻)t/2}/√t·(C(t) + 1/(4C(t)))`.
///
/// Details: `at_reference_time` evaluates the same expression at
/// `t = 1/(λ+K⁻)`; `printed` is `√(e(λ+K⁻))(C + (λ+K⁻)/(4C))` with `C` at
/// that time.
pub fn dirichlet_eigen_bound(lambda: f64, k_minus: f64, alpha0: f64) -> Result<BoundResult, BoundsError> {
    check_positive("λ", lambda)?;
    check_nonneg("K⁻", k_minus)?;
    check_nonneg("α0", alpha0)?;
    let mu = lambda + k_minus;
    let f = |t: f64| {
        let c = c_of_s(t, alpha0);
        (0.5 * mu * t).exp() / t.sqrt() * (c + 0.25 / c)
    };
    let m = minimize_log_scale_multimodal(f, 1e-6 / mu, 1e3 / mu, MIN_TOL);
    let t_ref = 1.0 / mu;
    let c_ref = c_of_s(t_ref, alpha0);
    Ok(BoundResult::new(TheoremId::EigenD, m.value)
        .at(m.x)
        .with("at_reference_time", f(t_ref))
        .with("printed", (std::f64::consts::E * mu).sqrt() * (c_ref + mu / (4.0 * c_ref))))
}

/// `√(2/π)·kappa(K_φ, t)·sup φ`.
pub fn neumann_grad_bound(k_phi: f64, phi_sup: f64, t: f64) -> Result<BoundResult, BoundsError> {
    check_time(t)?;
    if !(phi_sup >= 1.0) {
        return Err(BoundsError::PhiBelowOne(phi_sup));
    }
    Ok(BoundResult::new(TheoremId::Thm3, SQRT_2_OVER_PI * kappa(k_phi, t) * phi_sup))
}

/// `ℓ(t) = cos(√k t) − (θ/√k) sin(√k t)`, with the `k → 0` limit `1 − θt`.
pub fn ell(t: f64, k: f64, theta: f64) -> f64 {
    let rk = k.sqrt();
    let x = rk * t;
    if x.abs() < 1e-6 {
        // sin(x)/√k = t(1 − x²/6 + …)
        (1.0 - 0.5 * x * x) - theta * t * (1.0 - x * x / 6.0)
    } else {
        x.cos() - theta / rk * x.sin()
    }
}

/// `r0 ∧ ℓ⁻¹(0)`; equals `r0` when `k = θ = 0` (then `ℓ ≡ 1`).
pub fn r1(r0: f64, k: f64, theta: f64) -> f64 {
    let zero = if k == 0.0 {
        if theta == 0.0 {
            return r0;
        }
        1.0 / theta
    } else {
        let rk = k.sqrt();
        let y = if theta > 0.0 { rk / theta } else { f64::INFINITY };
        if y < 1e-4 {
            // atan(y)/√k = (1/θ)(1 − y²/3 + y⁴/5 − …)
            (1.0 - y * y / 3.0 + y.powi(4) / 5.0) / theta
        } else {
            rk.atan2(theta) / rk
        }
    };
    r0.min(zero)
}

/// `K_Z − 2σ sup_{collar}|Z| − 2σd/r1 − 2σ²` for the explicit conformal factor.
pub fn k_phi(pack: &CurvatureBounds, d: usize) -> Result<f64, BoundsError> {
    let sigma = pack.sigma;
    if sigma == 0.0 {
        return Ok(pack.k_z);
    }
    let r = r1(pack.r0, pack.k, pack.theta_ii);
    if r <= 0.0 {
        return Err(BoundsError::ZeroCollar);
    }
    Ok(pack.k_z - 2.0 * sigma * pack.z_collar - 2.0 * sigma * d as f64 / r - 2.0 * sigma * sigma)
}

/// Explicit-φ Neumann bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct NeumannExplicit {
    /// `s`-parameterized bound.
    pub a: BoundResult,
    /// Time-only bound with the `max{·, 1}` form.
    pub b: BoundResult,
    /// The time-only form with `K_Z − σ sup|Z| − σd/r1 − 2σ²` inside the max.
    pub b_printed: f64,
    /// `e^{σ d r1/2}`.
    pub phi_sup_estimate: f64,
    pub k_phi: f64,
    pub r1: f64,
}

pub fn neumann_explicit_bound(
    pack: &CurvatureBounds,
    d: usize,
    s: f64,
    t: f64,
) -> Result<NeumannExplicit, BoundsError> {
    check_time(s)?;
    check_time(t)?;
    if s > t {
        return Err(BoundsError::InvalidParameter { name: "s", requirement: "at most t", value: s });
    }
    let sigma = pack.sigma;
    let r = r1(pack.r0, pack.k, pack.theta_ii);
    let kp = k_phi(pack, d)?;
    let df = d as f64;
    let collar = if sigma == 0.0 { 0.0 } else { sigma * df * r };
    let a = (2.0 / (PI * s)).sqrt() * (0.5 * collar + 0.5 * neg_part(kp) * s).exp();
    let tt = t.min(1.0);
    let b = (2.0 * (collar + 1.0).exp() / (PI * tt)).sqrt() * neg_part(kp).max(1.0).sqrt();
    let kp_printed = if sigma == 0.0 {
        pack.k_z
    } else {
        pack.k_z - sigma * pack.z_collar - sigma * df / r - 2.0 * sigma * sigma
    };
    let b_printed = (2.0 * (collar + 1.0).exp() / (PI * tt)).sqrt() * neg_part(kp_printed).max(1.0).sqrt();
    Ok(NeumannExplicit {
        a: BoundResult::new(TheoremId::CorEst, a).at(s),
        b: BoundResult::new(TheoremId::CorEst, b).with("printed", b_printed),
        b_printed,
        phi_sup_estimate: (0.5 * collar).exp(),
        k_phi: kp,
        r1: r,
    })
}

/// `log φ` of the explicit conformal factor at boundary distance `rho`, by
/// nested adaptive quadrature. Constant for `rho ≥ r1`.
pub fn log_phi(rho: f64, sigma: f64, d: usize, k: f64, theta: f64, r1: f64) -> f64 {
    if sigma == 0.0 || rho <= 0.0 || r1 <= 0.0 {
        return 0.0;
    }
    let l1 = ell(r1, k, theta);
    let scale = 1.0 - l1;
    // (ℓ(s) − ℓ(r1)) / (1 − ℓ(r1)); the normalization cancels in the ratio
    // and keeps the k = θ = 0 limit finite.
    let g = |s: f64| {
        if scale.abs() < 1e-300 {
            (r1 - s) / r1
        } else {
            (ell(s, k, theta) - l1) / scale
        }
    };
    let p = d as f64 - 1.0;
    let tol = 1e-10;
    let alpha = adaptive_simpson(|u| g(u).max(0.0).powf(p), 0.0, r1, tol);
    let inner = |s: f64| {
        let gs = g(s).max(0.0);
        if gs == 0.0 {
            return 0.0;
        }
        let tail = adaptive_simpson(|u| g(u).max(0.0).powf(p), s, r1, tol);
        tail / gs.powf(p)
    };
    let upper = rho.min(r1);
    sigma / alpha * adaptive_simpson(inner, 0.0, upper, tol)
}
