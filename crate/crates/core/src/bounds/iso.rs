//! Isoperimetric lower bounds from uniform gradient estimates.

use super::{boundary::alpha0, check_nonneg, check_positive, BoundsError};
use crate::geometry::CurvatureBounds;
use crate::numerics::neg_part;
use serde::Serialize;
use std::f64::consts::{E, PI};

/// Lower bounds for the Dirichlet and Neumann isoperimetric constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsoBounds {
    pub kappa_d: f64,
    pub kappa_n: f64,
}

fn spectral_factor(lambda1: f64) -> f64 {
    lambda1.sqrt().min(lambda1)
}

/// Lower bounds from gradient constants `c` with
/// `‖dP_{2t}f‖∞ ≤ c/√(t ∧ 1)·‖f‖∞`.
pub fn iso_lower_bounds(c_d: f64, c_n: f64, lambda1_d: f64, lambda1_n: f64) -> Result<IsoBounds, BoundsError> {
    check_positive("c_D", c_d)?;
    check_positive("c_N", c_n)?;
    check_nonneg("λ1^D", lambda1_d)?;
    check_nonneg("λ1^N", lambda1_n)?;
    Ok(IsoBounds {
        kappa_d: (1.0 - 1.0 / E) * spectral_factor(lambda1_d) / c_d,
        kappa_n: (1.0 - 2.0 / E) * spectral_factor(lambda1_n) / (2.0 * c_n),
    })
}

/// Explicit bounds from the curvature pack: the Dirichlet one uses `K_Z` and
/// `α0`, the Neumann one uses `K_φ` and `sup φ`. The same `λ1` is used for
/// both.
pub fn iso_explicit(
    pack: &CurvatureBounds,
    d: usize,
    phi_sup: f64,
    k_phi: f64,
    lambda1: f64,
) -> Result<IsoBounds, BoundsError> {
    check_nonneg("λ1", lambda1)?;
    if !(phi_sup >= 1.0) {
        return Err(BoundsError::PhiBelowOne(phi_sup));
    }
    let a0 = alpha0(pack.theta_h, pack.k_0, d, pack.z_sup);
    let sf = spectral_factor(lambda1);
    let rp = PI.sqrt();
    let denom_d = neg_part(pack.k_z).sqrt().max(1.0) * (1.0 + PI / 8.0) + 2.0 * a0 * rp;
    let kappa_d = rp * (1.0 / E - 1.0 / (E * E)) * sf / denom_d;
    let kappa_n = rp * (1.0 / E - 2.0 / (E * E)) * sf / (2.0 * neg_part(k_phi).sqrt().max(1.0) * phi_sup);
    Ok(IsoBounds { kappa_d, kappa_n })
}

/// `(t ∧ 1/(c ∨ 1))^{−1/2} ≤ max{√c, 1}/√(t ∧ 1)`.
pub fn useest_check(t: f64, c: f64) -> bool {
    let lhs = t.min(1.0 / c.max(1.0)).powf(-0.5);
    let rhs = c.sqrt().max(1.0) / t.min(1.0).sqrt();
    lhs <= rhs * (1.0 + 1e-12)
}
