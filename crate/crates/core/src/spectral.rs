//! Exact Laplacian eigenbases on model domains and unit band projections.
//!
//! Bands select eigenfunctions by frequency `μ_j = √(eigenvalue of −Δ)` by
//! default: `χ_λ f = Σ_{μ_j ∈ [λ, λ+1)} ⟨f, e_j⟩ e_j`. The eigenvalue
//! reading `μ_j² ∈ [λ, λ+1)` is available for comparison.

use crate::bounds::{c2_bound_simple, c2_dirichlet_bound, c2_neumann_bound, BoundsError};
use crate::numerics::{adaptive_simpson, log_log_slope, SQRT_2_OVER_PI};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("band [{lambda}, {lambda}+1) reaches past the basis cutoff {cutoff}")]
    BandBeyondBasis { lambda: f64, cutoff: f64 },
    #[error("band parameter must be at least 1 for the scan, got {0}")]
    LambdaTooSmall(f64),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { length: f64, bc: BoundaryCondition },
    Circle { length: f64 },
    Rectangle { lx: f64, ly: f64, bc: BoundaryCondition },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Rectangle { .. } => 2,
            _ => 1,
        }
    }

    fn extents(&self) -> Vec<f64> {
        match *self {
            Domain::Interval { length, .. } | Domain::Circle { length } => vec![length],
            Domain::Rectangle { lx, ly, .. } => vec![lx, ly],
        }
    }

    fn validate(&self) -> Result<(), SpectralError> {
        if self.extents().iter().all(|l| *l > 0.0 && l.is_finite()) {
            Ok(())
        } else {
            Err(SpectralError::InvalidDomain(format!("{self:?}")))
        }
    }
}

/// `c·sin(ωx)` or `c·cos(ωx)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Factor {
    pub sine: bool,
    pub omega: f64,
    pub norm: f64,
}

impl Factor {
    fn value(&self, x: f64) -> f64 {
        let a = self.omega * x;
        self.norm * if self.sine { a.sin() } else { a.cos() }
    }

    fn derivative(&self, x: f64) -> f64 {
        let a = self.omega * x;
        self.norm * self.omega * if self.sine { a.cos() } else { -a.sin() }
    }

    fn sine(omega: f64, length: f64) -> Self {
        Self { sine: true, omega, norm: (2.0 / length).sqrt() }
    }

    fn cosine(omega: f64, length: f64) -> Self {
        let norm = if omega == 0.0 { 1.0 / length.sqrt() } else { (2.0 / length).sqrt() };
        Self { sine: false, omega, norm }
    }

    fn family(bc: BoundaryCondition, length: f64, max_omega: f64) -> Vec<Self> {
        let step = PI / length;
        let top = (max_omega / step).floor() as usize;
        match bc {
            BoundaryCondition::Dirichlet => (1..=top).map(|j| Self::sine(j as f64 * step, length)).collect(),
            BoundaryCondition::Neumann => (0..=top).map(|j| Self::cosine(j as f64 * step, length)).collect(),
        }
    }
}

/// Tensor-product eigenfunction with `−Δe = μ²e`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenpair {
    pub frequency: f64,
    pub factors: Vec<Factor>,
}

impl Eigenpair {
    pub fn eigenvalue(&self) -> f64 {
        self.frequency * self.frequency
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, xi)| f.value(*xi)).product()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.factors.len())
            .map(|k| {
                self.factors
                    .iter()
                    .zip(x)
                    .enumerate()
                    .map(|(i, (f, xi))| if i == k { f.derivative(*xi) } else { f.value(*xi) })
                    .product()
            })
            .collect()
    }

    /// `Δe(x)`, from the second derivatives of the factors.
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        let total: f64 = self.factors.iter().map(|f| f.omega * f.omega).sum();
        -total * self.value(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralBasis {
    pub domain: Domain,
    /// All eigenpairs with frequency at most `cutoff`, sorted by frequency.
    pub eigenpairs: Vec<Eigenpair>,
    pub cutoff: f64,
}

impl SpectralBasis {
    pub fn new(domain: Domain, cutoff: f64) -> Result<Self, SpectralError> {
        domain.validate()?;
        let mut eigenpairs = match domain {
            Domain::Interval { length, bc } => Factor::family(bc, length, cutoff)
                .into_iter()
                .map(|f| Eigenpair { frequency: f.omega, factors: vec![f] })
                .collect(),
            Domain::Circle { length } => {
                let step = 2.0 * PI / length;
                let top = (cutoff / step).floor() as usize;
                let mut v = vec![Eigenpair { frequency: 0.0, factors: vec![Factor::cosine(0.0, length)] }];
                for k in 1..=top {
                    let w = k as f64 * step;
                    v.push(Eigenpair { frequency: w, factors: vec![Factor::cosine(w, length)] });
                    v.push(Eigenpair { frequency: w, factors: vec![Factor::sine(w, length)] });
                }
                v
            }
            Domain::Rectangle { lx, ly, bc } => {
                let mut v = Vec::new();
                for fx in Factor::family(bc, lx, cutoff) {
                    for fy in Factor::family(bc, ly, cutoff) {
                        let mu = fx.omega.hypot(fy.omega);
                        if mu <= cutoff {
                            v.push(Eigenpair { frequency: mu, factors: vec![fx, fy] });
                        }
                    }
                }
                v
            }
        };
        eigenpairs.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Ok(Self { domain, eigenpairs, cutoff })
    }

    /// Indices of the band starting at `lambda`.
    pub fn band(&self, lambda: f64, convention: BandConvention) -> Result<Vec<usize>, SpectralError> {
        let reach = match convention {
            BandConvention::Frequency => lambda + 1.0,
            BandConvention::Eigenvalue => (lambda + 1.0).max(0.0).sqrt(),
        };
        if reach > self.cutoff {
            return Err(SpectralError::BandBeyondBasis { lambda, cutoff: self.cutoff });
        }
        Ok(self
            .eigenpairs
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let s = match convention {
                    BandConvention::Frequency => e.frequency,
                    BandConvention::Eigenvalue => e.eigenvalue(),
                };
                s >= lambda && s < lambda + 1.0
            })
            .map(|(i, _)| i)
            .collect())
    }

    /// `∫ f e_j` by adaptive quadrature (nested in 2-D).
    pub fn coefficient(&self, f: &dyn Fn(&[f64]) -> f64, j: usize) -> f64 {
        let e = &self.eigenpairs[j];
        integrate(&self.domain, &|x| f(x) * e.value(x), e.frequency, 1e-10)
    }
}

// Adaptive Simpson on panels of about a quarter wavelength at `frequency`,
// so oscillatory integrands cannot hide between the initial samples.
fn integrate(domain: &Domain, g: &dyn Fn(&[f64]) -> f64, frequency: f64, tol: f64) -> f64 {
    let ext = domain.extents();
    let panels = |l: f64| (8.0 * (1.0 + frequency * l / PI)).ceil() as usize;
    let split = |l: f64, h: &dyn Fn(f64) -> f64| {
        let n = panels(l);
        let w = l / n as f64;
        (0..n).map(|k| adaptive_simpson(h, k as f64 * w, (k + 1) as f64 * w, tol / n as f64)).sum::<f64>()
    };
    match ext.len() {
        1 => split(ext[0], &|x| g(&[x])),
        _ => split(ext[0], &|x| split(ext[1], &|y| g(&[x, y]))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandConvention {
    Frequency,
    Eigenvalue,
}

/// A function to project, either pointwise or by its coefficients.
#[derive(Clone)]
pub enum Signal {
    Function(crate::ScalarField),
    Coefficients(Arc<dyn Fn(&Eigenpair) -> f64 + Send + Sync>),
}

impl Signal {
    pub fn function(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Signal::Function(Arc::new(f))
    }

    /// Unit coefficient on every eigenfunction.
    pub fn flat() -> Self {
        Signal::Coefficients(Arc::new(|_| 1.0))
    }

    /// `‖f‖₂`; for coefficient signals this is over the basis truncation.
    pub fn l2_norm(&self, basis: &SpectralBasis) -> f64 {
        match self {
            Signal::Function(f) => integrate(&basis.domain, &|x| f(x).powi(2), basis.cutoff, 1e-12).sqrt(),
            Signal::Coefficients(c) => basis.eigenpairs.iter().map(|e| c(e).powi(2)).sum::<f64>().sqrt(),
        }
    }
}

/// `χ_λ f` on one band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandProjection {
    pub lambda: f64,
    pub indices: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub terms: Vec<Eigenpair>,
    pub domain: Domain,
}

impl BandProjection {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().zip(&self.coefficients).map(|(e, c)| c * e.value(x)).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.domain.dim()];
        for (e, c) in self.terms.iter().zip(&self.coefficients) {
            for (gi, di) in g.iter_mut().zip(e.gradient(x)) {
                *gi += c * di;
            }
        }
        g
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        self.terms.iter().zip(&self.coefficients).map(|(e, c)| c * e.laplacian(x)).sum()
    }

    /// `‖χ_λ f‖₂` from the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Grid sup-norms of the value, gradient length and Laplacian.
    pub fn sup_norms(&self, resolution: usize) -> SupNorms {
        let mut out = SupNorms::default();
        if self.is_empty() {
            return out;
        }
        let ext = self.domain.extents();
        let n = resolution.max(2);
        let coord = |k: usize, l: f64| l * k as f64 / (n - 1) as f64;
        let mut visit = |x: &[f64]| {
            out.value = out.value.max(self.value(x).abs());
            out.gradient = out.gradient.max(self.gradient(x).iter().map(|g| g * g).sum::<f64>().sqrt());
            out.laplacian = out.laplacian.max(self.laplacian(x).abs());
        };
        if ext.len() == 1 {
            for k in 0..n {
                visit(&[coord(k, ext[0])]);
            }
        } else {
            for a in 0..n {
                for b in 0..n {
                    visit(&[coord(a, ext[0]), coord(b, ext[1])]);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SupNorms {
    pub value: f64,
    pub gradient: f64,
    pub laplacian: f64,
}

/// Default grid: 10⁴ points in 1-D, 512² in 2-D.
pub fn default_resolution(domain: &Domain) -> usize {
    if domain.dim() == 1 {
        10_001
    } else {
        512
    }
}

pub fn project(
    basis: &SpectralBasis,
    f: &Signal,
    lambda: f64,
    convention: BandConvention,
) -> Result<BandProjection, SpectralError> {
    let indices = basis.band(lambda, convention)?;
    let coefficients = indices
        .iter()
        .map(|&j| match f {
            Signal::Function(g) => basis.coefficient(g.as_ref(), j),
            Signal::Coefficients(c) => c(&basis.eigenpairs[j]),
        })
        .collect();
    let terms = indices.iter().map(|&j| basis.eigenpairs[j].clone()).collect();
    Ok(BandProjection { lambda, indices, coefficients, terms, domain: basis.domain })
}

/// Grid sup of `|dχ_λ f|`.
pub fn sup_gradient(projection: &BandProjection, resolution: usize) -> f64 {
    projection.sup_norms(resolution).gradient
}

/// Sup of `|dχ_λ f|` at `resolution` and on the grid refined by bisection,
/// with the relative change between them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Refined {
    pub value: f64,
    pub coarse: f64,
    pub relative_change: f64,
}

pub fn sup_gradient_refined(projection: &BandProjection, resolution: usize) -> Refined {
    let coarse = sup_gradient(projection, resolution);
    let value = sup_gradient(projection, 2 * resolution.max(2) - 1);
    let relative_change = if value > 0.0 { (value - coarse).abs() / value } else { 0.0 };
    Refined { value, coarse, relative_change }
}

/// Right-hand side of the gradient chain for one band, from the
/// `δ = λ` C² estimates on a flat convex domain (`K⁻ = 0`, `α0 = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainBound {
    pub bound: f64,
    /// The constant as it appears in the spectral-projection display.
    pub display: f64,
}

pub fn chain_bound(domain: &Domain, lambda: f64, sup: f64, lap_sup: f64) -> Result<ChainBound, SpectralError> {
    let bc = match *domain {
        Domain::Interval { bc, .. } | Domain::Rectangle { bc, .. } => Some(bc),
        Domain::Circle { .. } => None,
    };
    Ok(match bc {
        None => {
            let b = c2_bound_simple(0.0, lambda, sup, lap_sup)?.value;
            ChainBound { bound: b, display: b }
        }
        Some(BoundaryCondition::Dirichlet) => {
            let b = c2_dirichlet_bound(0.0, 0.0, lambda, sup, lap_sup)?.value;
            ChainBound { bound: b, display: SQRT_2_OVER_PI * b }
        }
        Some(BoundaryCondition::Neumann) => {
            let b = c2_neumann_bound(0.0, 1.0, lambda, sup, lap_sup)?.value;
            ChainBound { bound: b, display: b }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub band_size: usize,
    pub sup: f64,
    pub gradient_sup: f64,
    pub laplacian_sup: f64,
    pub f_l2: f64,
    pub band_l2: f64,
    pub chain: ChainBound,
    pub chain_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingScan {
    pub convention: BandConvention,
    pub rows: Vec<ScanRow>,
    pub slope_sup: f64,
    pub slope_gradient: f64,
    pub slope_laplacian: f64,
    pub chain_holds: bool,
}

/// Sup-norm table over `lambdas` with log-log slopes of each column; empty
/// bands are listed but left out of the fits.
pub fn scaling_scan(
    basis: &SpectralBasis,
    f: &Signal,
    lambdas: &[f64],
    convention: BandConvention,
    resolution: usize,
) -> Result<ScalingScan, SpectralError> {
    let f_l2 = f.l2_norm(basis);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda < 1.0 {
            return Err(SpectralError::LambdaTooSmall(lambda));
        }
        let p = project(basis, f, lambda, convention)?;
        let s = p.sup_norms(resolution);
        let chain = chain_bound(&basis.domain, lambda, s.value, s.laplacian)?;
        rows.push(ScanRow {
            lambda,
            band_size: p.indices.len(),
            sup: s.value,
            gradient_sup: s.gradient,
            laplacian_sup: s.laplacian,
            f_l2,
            band_l2: p.l2_norm(),
            chain,
            chain_holds: s.gradient <= chain.bound * (1.0 + 1e-12),
        });
    }
    let used: Vec<&ScanRow> = rows.iter().filter(|r| r.band_size > 0 && r.sup > 0.0).collect();
    let xs: Vec<f64> = used.iter().map(|r| r.lambda).collect();
    let slope = |col: fn(&ScanRow) -> f64| {
        if xs.len() < 2 {
            f64::NAN
        } else {
            log_log_slope(&xs, &used.iter().map(|r| col(r)).collect::<Vec<_>>())
        }
    };
    Ok(ScalingScan {
        convention,
        slope_sup: slope(|r| r.sup),
        slope_gradient: slope(|r| r.gradient_sup),
        slope_laplacian: slope(|r| r.laplacian_sup),
        chain_holds: rows.iter().all(|r| r.chain_holds),
        rows,
    })
}

/// `L^p` exponent of the band projection bound on a `d`-dimensional
/// manifold, `max{(d−1)/2 − d/p, (d−1)/2·(1/2 − 1/p)}`; `p = ∞` allowed.
pub fn sogge_exponent(d: usize, p: f64) -> f64 {
    let h = (d as f64 - 1.0) / 2.0;
    let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
    (h - d as f64 * inv).max(h * (0.5 - inv))
}
