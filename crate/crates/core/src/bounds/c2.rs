//! Uniform estimates for `|du|` of `C²_b` functions.

use super::{
    boundary::{k_phi, r1},
    check_nonneg, check_positive, check_time, kappa, x_over_expm1, BoundResult, BoundsError,
    TheoremId, MIN_TOL, SERIES_CUTOFF,
};
use crate::geometry::CurvatureBounds;
use crate::numerics::{adaptive_simpson, minimize_log_scale, neg_part, SQRT_2_OVER_PI};
use std::f64::consts::PI;

/// `½∫_0^t kappa(K, s) ds` in closed form (log case for `K < 0`, `√t` for
/// `K = 0`, arctan case for `K > 0`).
pub fn c2_integral_term(k: f64, t: f64) -> f64 {
    let x = k * t;
    if x.abs() < SERIES_CUTOFF {
        let poly = 1.0 - x / 12.0 + x * x / 480.0 + x.powi(3) / 2688.0 - x.powi(4) / 92160.0;
        return t.sqrt() * poly;
    }
    if k < 0.0 {
        let a = -k;
        let y = -x;
        // log(√(e^y − 1) + e^{y/2}) = asinh(√(e^y − 1))
        let v = if y > 700.0 { 0.5 * y + std::f64::consts::LN_2 } else { y.exp_m1().sqrt().asinh() };
        v / a.sqrt()
    } else {
        let v = if x > 700.0 { 0.5 * PI } else { x.exp_m1().sqrt().atan() };
        v / k.sqrt()
    }
}

// Same integral by quadrature after s = v², which removes the 1/√s singularity.
fn c2_integral_quadrature(k: f64, t: f64) -> f64 {
    0.5 * adaptive_simpson(|v| 2.0 * x_over_expm1(k * v * v).sqrt(), 0.0, t.sqrt(), 1e-13)
}

/// `√(2/π)(kappa(K,t)‖u‖∞ + ½∫_0^t kappa(K,s)ds ‖Lu‖∞)`.
///
/// Detail `quadrature` is the same expression with the integral evaluated
/// numerically.
pub fn c2_bound(k_z: f64, t: f64, u_sup: f64, lu_sup: f64) -> Result<BoundResult, BoundsError> {
    check_time(t)?;
    check_nonneg("‖u‖∞", u_sup)?;
    check_nonneg("‖Lu‖∞", lu_sup)?;
    let head = kappa(k_z, t) * u_sup;
    let closed = SQRT_2_OVER_PI * (head + c2_integral_term(k_z, t) * lu_sup);
    let quad = SQRT_2_OVER_PI * (head + c2_integral_quadrature(k_z, t) * lu_sup);
    debug_assert!(
        (closed - quad).abs() <= 1e-8 * closed.abs().max(1.0),
        "closed form {closed} disagrees with quadrature {quad}"
    );
    Ok(BoundResult::new(TheoremId::ThmC2, closed).at(t).with("quadrature", quad))
}

/// Which closed form of the minimized estimate applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorMinCase {
    NegativeCurvature = 1,
    Flat = 2,
    ModeratePositive = 3,
    StrongPositive = 4,
}

// asinh(√β)/√β for β > 0, continuous at 0.
fn asinh_ratio(beta: f64) -> f64 {
    if beta < 1e-8 {
        1.0 - beta / 6.0 + 3.0 * beta * beta / 40.0
    } else {
        beta.sqrt().asinh() / beta.sqrt()
    }
}

// atan(√(b/(1−b)))/√b = asin(√b)/√b for 0 < b < 1, continuous at 0.
fn asin_ratio(b: f64) -> f64 {
    if b < 1e-8 {
        1.0 + b / 6.0 + 3.0 * b * b / 40.0
    } else {
        b.sqrt().asin() / b.sqrt()
    }
}

/// The C² estimate minimized over `t`, from the four closed-form cases with
/// `β = −K_Z‖u‖∞/‖Lu‖∞`.
///
/// `value` bounds `|du|`. In the first three cases the closed forms bound
/// `|du|²` and `value` is their square root; detail `squared` is always
/// `value²`. The strong-curvature case `K_Z ≥ ‖Lu‖∞/‖u‖∞` is the `t → ∞`
/// limit `√(π/(2K_Z))‖Lu‖∞` of the time-dependent bound. Details `numeric`
/// and `numeric_t` give an independent golden-section minimization.
pub fn c2_bound_minimized(k_z: f64, u_sup: f64, lu_sup: f64) -> Result<BoundResult, BoundsError> {
    check_nonneg("‖u‖∞", u_sup)?;
    if !(lu_sup > 0.0) {
        return Err(BoundsError::ZeroLaplacian);
    }
    let beta = -k_z * u_sup / lu_sup;
    let base = 2.0 / PI * u_sup * lu_sup;
    let (case, value) = if k_z < 0.0 {
        let f = (1.0 + beta).sqrt() + asinh_ratio(beta);
        (CorMinCase::NegativeCurvature, (base * f * f).sqrt())
    } else if k_z == 0.0 {
        (CorMinCase::Flat, (8.0 / PI * u_sup * lu_sup).sqrt())
    } else if k_z * u_sup < lu_sup {
        let b = -beta;
        let f = (1.0 - b).sqrt() + asin_ratio(b);
        (CorMinCase::ModeratePositive, (base * f * f).sqrt())
    } else {
        (CorMinCase::StrongPositive, (PI / (2.0 * k_z)).sqrt() * lu_sup)
    };
    let mut out = BoundResult::new(TheoremId::CorMin, value)
        .with("squared", value * value)
        .with("case", case as i32 as f64);
    if u_sup > 0.0 {
        let scale = u_sup / lu_sup;
        let m = minimize_log_scale(
            |t| c2_bound(k_z, t, u_sup, lu_sup).map(|b| b.value).unwrap_or(f64::INFINITY),
            1e-8 * scale,
            1e4 * scale,
            MIN_TOL,
        );
        out = out.with("numeric", m.value).with("numeric_t", m.x);
        if case != CorMinCase::StrongPositive {
            out.minimizer = Some(m.x);
        }
    }
    Ok(out)
}

/// `√(2/π)e^{K⁻/(2δ²)}(δ‖u‖∞ + ‖Lu‖∞/δ)`.
pub fn c2_bound_simple(k_minus: f64, delta: f64, u_sup: f64, lu_sup: f64) -> Result<BoundResult, BoundsError> {
    check_positive("δ", delta)?;
    check_nonneg("K⁻", k_minus)?;
    let v = SQRT_2_OVER_PI * (k_minus / (2.0 * delta * delta)).exp() * (delta * u_sup + lu_sup / delta);
    Ok(BoundResult::new(TheoremId::Cor1, v))
}

/// `e^{K⁻/(2δ²)}(√(2/π) + ¼√(π/2) + 2α0/δ)(δ‖u‖∞ + ‖Lu‖∞/δ)` for `u|∂M = 0`.
pub fn c2_dirichlet_bound(
    k_minus: f64,
    alpha0: f64,
    delta: f64,
    u_sup: f64,
    lu_sup: f64,
) -> Result<BoundResult, BoundsError> {
    check_positive("δ", delta)?;
    check_nonneg("K⁻", k_minus)?;
    check_nonneg("α0", alpha0)?;
    let constant = SQRT_2_OVER_PI + 0.25 * (PI / 2.0).sqrt() + 2.0 * alpha0 / delta;
    let v = (k_minus / (2.0 * delta * delta)).exp() * constant * (delta * u_sup + lu_sup / delta);
    Ok(BoundResult::new(TheoremId::C1D, v))
}

/// `√(2/π)e^{K_φ⁻/(2δ²)} sup φ (δ‖u‖∞ + ‖Lu‖∞/δ)` for `Nu|∂M = 0`.
pub fn c2_neumann_bound(
    k_phi_minus: f64,
    phi_sup: f64,
    delta: f64,
    u_sup: f64,
    lu_sup: f64,
) -> Result<BoundResult, BoundsError> {
    if !(phi_sup >= 1.0) {
        return Err(BoundsError::PhiBelowOne(phi_sup));
    }
    let simple = c2_bound_simple(k_phi_minus, delta, u_sup, lu_sup)?;
    Ok(BoundResult::new(TheoremId::C1N, simple.value * phi_sup))
}

/// Neumann C² estimate with `sup φ = e^{σdr1/2}` and the explicit `K_φ`.
pub fn c2_neumann_explicit(
    pack: &CurvatureBounds,
    d: usize,
    delta: f64,
    u_sup: f64,
    lu_sup: f64,
) -> Result<BoundResult, BoundsError> {
    let kp = k_phi(pack, d)?;
    let collar = if pack.sigma == 0.0 { 0.0 } else { pack.sigma * d as f64 * r1(pack.r0, pack.k, pack.theta_ii) };
    let phi_sup = (0.5 * collar).exp();
    let inner = c2_neumann_bound(neg_part(kp), phi_sup, delta, u_sup, lu_sup)?;
    Ok(BoundResult::new(TheoremId::CorC1D, inner.value).with("k_phi", kp).with("phi_sup", phi_sup))
}
