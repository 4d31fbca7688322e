//! Closed-form gradient, isoperimetric and eigenfunction bounds.
//!
//! Every function here is pure. Curvature arguments follow one rule: a
//! parameter called `k_*` is a signed lower bound, a parameter called
//! `*_minus` is already its negative part and must be nonnegative.
//! Singular `K → 0` expressions switch to series below `|K|t < 1e-6`.

mod boundary;
mod c2;
mod iso;

pub use boundary::{
    alpha0, c_of_s, dirichlet_eigen_bound, dirichlet_grad_bound, ell, k_phi, log_phi,
    neumann_explicit_bound, neumann_grad_bound, r1, NeumannExplicit,
};
pub use c2::{
    c2_bound, c2_bound_minimized, c2_bound_simple, c2_dirichlet_bound, c2_integral_term,
    c2_neumann_bound, c2_neumann_explicit, CorMinCase,
};
pub use iso::{iso_explicit, iso_lower_bounds, useest_check, IsoBounds};

use crate::numerics::{minimize_log_scale, neg_part, SQRT_2_OVER_PI};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub(crate) const SERIES_CUTOFF: f64 = 1e-6;
pub(crate) const MIN_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter { name: &'static str, requirement: &'static str, value: f64 },
    #[error("sup φ = {0} violates inf φ = 1")]
    PhiBelowOne(f64),
    #[error("‖Lu‖∞ must be positive for the minimized estimate")]
    ZeroLaplacian,
    #[error("collar radius r1 is zero while σ > 0")]
    ZeroCollar,
    #[error("unknown bound '{0}'")]
    UnknownTheorem(String),
}

/// Identifies which result a bound value came from. The string forms double
/// as the CLI bound names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "&'static str")]
pub enum TheoremId {
    /// Uniform gradient bound without boundary.
    Thm1,
    /// Dirichlet gradient bound.
    Thm2,
    /// Neumann gradient bound for a conformal factor φ.
    Thm3,
    /// Neumann bound with the explicit φ construction.
    CorEst,
    /// C² estimate, three curvature cases.
    ThmC2,
    /// C² estimate minimized over time.
    CorMin,
    /// Time-free C² estimate.
    Cor1,
    /// Dirichlet C² estimate.
    C1D,
    /// Neumann C² estimate.
    C1N,
    /// Neumann C² estimate with the explicit φ.
    CorC1D,
    IsoD,
    IsoN,
    /// Eigenfunction ratio bound without boundary.
    Eigen,
    /// Dirichlet eigenfunction ratio bound.
    EigenD,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        Self::Thm1,
        Self::Thm2,
        Self::Thm3,
        Self::CorEst,
        Self::ThmC2,
        Self::CorMin,
        Self::Cor1,
        Self::C1D,
        Self::C1N,
        Self::CorC1D,
        Self::IsoD,
        Self::IsoN,
        Self::Eigen,
        Self::EigenD,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Thm1 => "thm1",
            Self::Thm2 => "thm2",
            Self::Thm3 => "thm3",
            Self::CorEst => "cor-est",
            Self::ThmC2 => "thm-c2",
            Self::CorMin => "cor-min",
            Self::Cor1 => "cor-1",
            Self::C1D => "c1-d",
            Self::C1N => "c1-n",
            Self::CorC1D => "cor-c1-d",
            Self::IsoD => "iso-d",
            Self::IsoN => "iso-n",
            Self::Eigen => "eigen",
            Self::EigenD => "eigen-d",
        }
    }
}

impl From<TheoremId> for &'static str {
    fn from(id: TheoremId) -> Self {
        id.as_str()
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| BoundsError::UnknownTheorem(s.to_string()))
    }
}

/// An evaluated bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    /// Time parameter at which the value was attained, for optimized bounds.
    pub minimizer: Option<f64>,
    pub theorem: TheoremId,
    /// Secondary values (alternative forms, quadrature cross-checks).
    pub details: BTreeMap<&'static str, f64>,
}

impl BoundResult {
    pub(crate) fn new(theorem: TheoremId, value: f64) -> Self {
        Self { value, minimizer: None, theorem, details: BTreeMap::new() }
    }

    pub(crate) fn at(mut self, minimizer: f64) -> Self {
        self.minimizer = Some(minimizer);
        self
    }

    pub(crate) fn with(mut self, key: &'static str, value: f64) -> Self {
        self.details.insert(key, value);
        self
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }
}

pub(crate) fn check_time(t: f64) -> Result<(), BoundsError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::NonPositiveTime(t))
    }
}

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter { name, requirement: "nonnegative", value })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter { name, requirement: "positive", value })
    }
}

/// `x / (e^x − 1)`, continuous through `x = 0`.
pub fn x_over_expm1(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        1.0 - x / 2.0 + x * x / 12.0 - x.powi(4) / 720.0
    } else {
        x / x.exp_m1()
    }
}

/// `(K / (e^{Kt} − 1))^{1/2}`, with the `K → 0` limit `1/√t`.
pub fn kappa(k: f64, t: f64) -> f64 {
    (x_over_expm1(k * t) / t).sqrt()
}

/// `√(2/π)·kappa(K_Z, t)`.
pub fn grad_bound_closed(k_z: f64, t: f64) -> Result<BoundResult, BoundsError> {
    check_time(t)?;
    Ok(BoundResult::new(TheoremId::Thm1, SQRT_2_OVER_PI * kappa(k_z, t)))
}

/// `‖du‖∞/‖u‖∞` bound for an eigenfunction `−Lu = λu`, as the numerical
/// infimum over `t` of the uniform gradient bound times `e^{λt/2}`.
///
/// The details carry the stationary-point closed form and the alternative
/// closed form with the reciprocal base.
pub fn eigen_grad_bound(lambda: f64, k_minus: f64) -> Result<BoundResult, BoundsError> {
    check_positive("λ", lambda)?;
    check_nonneg("K⁻", k_minus)?;
    // K e^{λt} / (1 − e^{−Kt}) = e^{λt} · x/(1 − e^{−x}) / t with x = Kt.
    let objective = |t: f64| ((lambda * t).exp() * x_over_expm1(-k_minus * t) / t).sqrt();
    let m = minimize_log_scale(objective, 1e-6 / lambda, 1e3 / lambda, MIN_TOL);
    Ok(BoundResult::new(TheoremId::Eigen, SQRT_2_OVER_PI * m.value)
        .at(m.x)
        .with("stationary", eigen_grad_bound_stationary(lambda, k_minus))
        .with("printed", eigen_grad_bound_printed(lambda, k_minus)))
}

// (1 + r)^{1/(2r)}, with the r → 0 limit √e.
fn half_power_base(r: f64) -> f64 {
    let exponent = if r < 1e-8 { 0.5 - 0.25 * r } else { r.ln_1p() / (2.0 * r) };
    exponent.exp()
}

/// `√(2/π)(λ+K⁻)^{1/2}((λ+K⁻)/λ)^{λ/(2K⁻)}`: value of the objective at its
/// stationary point.
pub fn eigen_grad_bound_stationary(lambda: f64, k_minus: f64) -> f64 {
    SQRT_2_OVER_PI * (lambda + k_minus).sqrt() * half_power_base(k_minus / lambda)
}

/// `√(2/π)(λ+K⁻)^{1/2}(λ/(λ+K⁻))^{λ/(2K⁻)}`. Smaller than the infimum it is
/// meant to equal whenever `K⁻ > 0`; kept for comparison.
pub fn eigen_grad_bound_printed(lambda: f64, k_minus: f64) -> f64 {
    SQRT_2_OVER_PI * (lambda + k_minus).sqrt() / half_power_base(k_minus / lambda)
}

pub(crate) fn k_minus(k: f64) -> f64 {
    neg_part(k)
}

#[cfg(test)]
mod tests;
