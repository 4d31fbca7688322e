//! Exact geometry of the model catalogue.
//!
//! Six families are supported: Euclidean space, round spheres (embedded in
//! `R^{d+1}`), hyperbolic space (upper-half-space chart), the half-space
//! `{x_1 ≥ 0}`, closed balls and the interval `[0, L]`. Points and tangent
//! vectors are plain coordinate slices in the model's working chart.
//!
//! Sign conventions: `N` is the inward unit normal, `II(X, Y) = −⟨∇_X N, Y⟩`
//! and `H_∂M = tr II`. `Ric^Z = Ric − ∇Z`. For every drift in the catalogue
//! `Ric^Z` is a scalar multiple of the identity at each point.

mod hyperbolic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for tangency and point validity.
pub const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("drift {drift} is not supported on {model}")]
    UnsupportedDrift { model: String, drift: String },
    #[error("{0} has no boundary")]
    Boundaryless(String),
    #[error("points are antipodal or coincide degenerately; no unique short geodesic")]
    DegeneratePair,
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelKind {
    Euclidean { dim: usize },
    Sphere { dim: usize, radius: f64 },
    /// Constant curvature `−a²`.
    Hyperbolic { dim: usize, a: f64 },
    /// `{x ∈ R^d : x_1 ≥ 0}`.
    HalfSpace { dim: usize },
    Ball { dim: usize, radius: f64 },
    /// `[0, length]`.
    Interval { length: f64 },
}

/// Closed-form potentials `V` with `Z = ∇V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "potential", rename_all = "snake_case")]
pub enum Potential {
    /// `V(x) = −(strength/2)|x − center|²` on flat models; `Hess V = −strength·id`.
    Quadratic { strength: f64, center: Vec<f64> },
    /// `V(x) = coefficient · x_{d+1}` on an embedded sphere.
    Height { coefficient: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "drift", rename_all = "snake_case")]
pub enum DriftSpec {
    #[default]
    Zero,
    /// Constant vector field (Euclidean models only).
    Constant { vector: Vec<f64> },
    Gradient { potential: Potential },
}

/// Inward normal geometry at the nearest boundary point.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    /// Signed distance to the boundary (negative outside).
    pub distance: f64,
    pub normal: Vec<f64>,
    pub inside: bool,
}

/// The constant pack consumed by the bound engine.
///
/// `r0` is infinite for the half-space (the boundary distance is smooth
/// everywhere); `z_sup` and `z_collar` are infinite for unbounded drifts.
/// Boundary fields are zero on boundaryless models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    /// Lower bound on `Ric^Z`.
    pub k_z: f64,
    /// Lower bound on `Ric`.
    pub k_0: f64,
    /// Lower bound on the mean curvature `H_∂M`.
    pub theta_h: f64,
    /// `II ≥ −σ`.
    pub sigma: f64,
    /// `II ≤ θ_II`.
    pub theta_ii: f64,
    /// Upper sectional-curvature bound on the boundary collar.
    pub k: f64,
    /// Collar radius on which `ρ_∂` is smooth.
    pub r0: f64,
    /// `sup |Z|` over the model.
    pub z_sup: f64,
    /// `sup |Z|` over the collar `{ρ_∂ ≤ r0}`.
    pub z_collar: f64,
}

/// A model manifold together with its drift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldModel {
    kind: ModelKind,
    #[serde(default)]
    drift: DriftSpec,
}

impl ManifoldModel {
    pub fn new(kind: ModelKind, drift: DriftSpec) -> Result<Self, GeometryError> {
        validate_kind(&kind)?;
        let model = Self { kind, drift };
        model.validate_drift()?;
        Ok(model)
    }

    pub fn euclidean(dim: usize) -> Result<Self, GeometryError> {
        Self::new(ModelKind::Euclidean { dim }, DriftSpec::Zero)
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self, GeometryError> {
        Self::new(ModelKind::Sphere { dim, radius }, DriftSpec::Zero)
    }

    pub fn hyperbolic(dim: usize, a: f64) -> Result<Self, GeometryError> {
        Self::new(ModelKind::Hyperbolic { dim, a }, DriftSpec::Zero)
    }

    pub fn half_space(dim: usize) -> Result<Self, GeometryError> {
        Self::new(ModelKind::HalfSpace { dim }, DriftSpec::Zero)
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self, GeometryError> {
        Self::new(ModelKind::Ball { dim, radius }, DriftSpec::Zero)
    }

    pub fn interval(length: f64) -> Result<Self, GeometryError> {
        Self::new(ModelKind::Interval { length }, DriftSpec::Zero)
    }

    pub fn with_drift(self, drift: DriftSpec) -> Result<Self, GeometryError> {
        Self::new(self.kind, drift)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn drift(&self) -> &DriftSpec {
        &self.drift
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ModelKind::Euclidean { dim } => format!("Euclidean({dim})"),
            ModelKind::Sphere { dim, radius } => format!("Sphere({dim}, r={radius})"),
            ModelKind::Hyperbolic { dim, a } => format!("Hyperbolic({dim}, a={a})"),
            ModelKind::HalfSpace { dim } => format!("HalfSpace({dim})"),
            ModelKind::Ball { dim, radius } => format!("Ball({dim}, r={radius})"),
            ModelKind::Interval { length } => format!("Interval({length})"),
        }
    }

    /// Intrinsic dimension `d`.
    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Euclidean { dim }
            | ModelKind::Sphere { dim, .. }
            | ModelKind::Hyperbolic { dim, .. }
            | ModelKind::HalfSpace { dim }
            | ModelKind::Ball { dim, .. } => dim,
            ModelKind::Interval { .. } => 1,
        }
    }

    /// Number of working coordinates (`d + 1` for embedded spheres).
    pub fn coord_dim(&self) -> usize {
        match self.kind {
            ModelKind::Sphere { dim, .. } => dim + 1,
            _ => self.dim(),
        }
    }

    pub fn has_boundary(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::HalfSpace { .. } | ModelKind::Ball { .. } | ModelKind::Interval { .. }
        )
    }

    /// Flat models use the identity chart with the Euclidean metric.
    pub fn is_flat(&self) -> bool {
        !matches!(self.kind, ModelKind::Sphere { .. } | ModelKind::Hyperbolic { .. })
    }

    /// Constant sectional curvature of the model.
    pub fn sectional_curvature(&self) -> f64 {
        match self.kind {
            ModelKind::Sphere { radius, .. } => 1.0 / (radius * radius),
            ModelKind::Hyperbolic { a, .. } => -a * a,
            _ => 0.0,
        }
    }

    fn check_len(&self, v: &[f64]) -> Result<(), GeometryError> {
        let expected = self.coord_dim();
        if v.len() == expected {
            Ok(())
        } else {
            Err(GeometryError::DimensionMismatch { expected, got: v.len() })
        }
    }

    /// Chart validity: finite coordinates, on the sphere, or above the
    /// hyperbolic horizon. Boundary models accept any point of the ambient chart;
    /// see [`ManifoldModel::contains`] for domain membership.
    pub fn is_valid_point(&self, x: &[f64]) -> bool {
        if x.len() != self.coord_dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            ModelKind::Sphere { radius, .. } => (norm(x) - radius).abs() <= TANGENCY_TOL * radius.max(1.0),
            ModelKind::Hyperbolic { .. } => x[x.len() - 1] > 0.0,
            _ => true,
        }
    }

    /// Membership in the closed domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        if !self.is_valid_point(x) {
            return false;
        }
        match self.kind {
            ModelKind::HalfSpace { .. } => x[0] >= 0.0,
            ModelKind::Ball { radius, .. } => norm(x) <= radius,
            ModelKind::Interval { length } => (0.0..=length).contains(&x[0]),
            _ => true,
        }
    }

    /// Riemannian inner product of tangent vectors at `x`.
    pub fn inner(&self, x: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let e = dot(v, w);
        match self.kind {
            ModelKind::Hyperbolic { a, .. } => {
                let y = x[x.len() - 1];
                e / (a * a * y * y)
            }
            _ => e,
        }
    }

    pub fn norm(&self, x: &[f64], v: &[f64]) -> f64 {
        self.inner(x, v, v).max(0.0).sqrt()
    }

    /// Orthogonal projection of an ambient vector onto `T_xM`.
    pub fn project_tangent(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self.kind {
            ModelKind::Sphere { radius, .. } => {
                let k = dot(v, x) / (radius * radius);
                v.iter().zip(x).map(|(vi, xi)| vi - k * xi).collect()
            }
            _ => v.to_vec(),
        }
    }

    pub fn is_tangent(&self, x: &[f64], v: &[f64]) -> bool {
        match self.kind {
            ModelKind::Sphere { radius, .. } => {
                dot(v, x).abs() <= TANGENCY_TOL * radius * norm(v).max(1.0)
            }
            _ => v.len() == self.coord_dim(),
        }
    }

    /// An orthonormal frame of `T_xM`.
    pub fn orthonormal_frame(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.coord_dim();
        match self.kind {
            ModelKind::Sphere { .. } => {
                let mut frame: Vec<Vec<f64>> = Vec::with_capacity(self.dim());
                for i in 0..n {
                    if frame.len() == self.dim() {
                        break;
                    }
                    let mut e = self.project_tangent(x, &unit(n, i));
                    for f in &frame {
                        let k = dot(&e, f);
                        for (ei, fi) in e.iter_mut().zip(f) {
                            *ei -= k * fi;
                        }
                    }
                    let len = norm(&e);
                    if len > 1e-8 {
                        frame.push(e.iter().map(|v| v / len).collect());
                    }
                }
                frame
            }
            ModelKind::Hyperbolic { a, .. } => {
                let scale = a * x[n - 1];
                (0..n).map(|i| unit(n, i).iter().map(|v| v * scale).collect()).collect()
            }
            _ => (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    /// Exponential map `exp_x(v)`.
    pub fn exp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        self.exp_with_transport(x, v, &mut [])
    }

    /// `exp_x(√dt · v)`.
    pub fn geodesic_step(&self, x: &[f64], v: &[f64], dt: f64) -> Vec<f64> {
        let scaled: Vec<f64> = v.iter().map(|c| c * dt.sqrt()).collect();
        self.exp(x, &scaled)
    }

    /// Follows the geodesic `s ↦ exp_x(s v)` to `s = 1`, parallel-transporting
    /// every vector in `carry` along it.
    pub fn exp_with_transport(&self, x: &[f64], v: &[f64], carry: &mut [Vec<f64>]) -> Vec<f64> {
        match self.kind {
            ModelKind::Sphere { radius, .. } => {
                let n = norm(v);
                if n == 0.0 {
                    return x.to_vec();
                }
                let theta = n / radius;
                let (s, c) = theta.sin_cos();
                let e: Vec<f64> = v.iter().map(|vi| vi / n).collect();
                let mut y: Vec<f64> =
                    x.iter().zip(&e).map(|(xi, ei)| c * xi + radius * s * ei).collect();
                rescale_to(&mut y, radius);
                for w in carry.iter_mut() {
                    let k = dot(&e, w);
                    for ((wi, ei), xi) in w.iter_mut().zip(&e).zip(x) {
                        *wi += k * ((c - 1.0) * ei - s * xi / radius);
                    }
                    let fixed = self.project_tangent(&y, w);
                    *w = fixed;
                }
                y
            }
            ModelKind::Hyperbolic { .. } => {
                // Move x to (0, …, 0, 1) by a horizontal translation and a dilation
                // (both isometries) so the hyperboloid arithmetic stays well scaled.
                let n = x.len();
                let y0 = x[n - 1];
                let base = hyperbolic::to_hyperboloid(&unit(n, n - 1));
                let scaled = |w: &[f64]| -> Vec<f64> { w.iter().map(|c| c / y0).collect() };
                let w = hyperbolic::push_tangent(&unit(n, n - 1), &scaled(v));
                let mut lifted: Vec<Vec<f64>> = carry
                    .iter()
                    .map(|c| hyperbolic::push_tangent(&unit(n, n - 1), &scaled(c)))
                    .collect();
                let q = hyperbolic::exp_and_transport(&base, &w, &mut lifted);
                for (c, l) in carry.iter_mut().zip(&lifted) {
                    *c = hyperbolic::pull_tangent(&q, l).iter().map(|v| v * y0).collect();
                }
                let mut out = hyperbolic::from_hyperboloid(&q);
                for (o, xi) in out.iter_mut().zip(x).take(n - 1) {
                    *o = *o * y0 + xi;
                }
                out[n - 1] *= y0;
                out
            }
            _ => x.iter().zip(v).map(|(a, b)| a + b).collect(),
        }
    }

    /// Geodesic distance between two points of the model.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            ModelKind::Sphere { radius, .. } => {
                let c = dot(x, y) / (radius * radius);
                let perp: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(xi, yi)| {
                        let p = yi / radius - c * xi / radius;
                        p * p
                    })
                    .sum();
                radius * perp.sqrt().atan2(c)
            }
            ModelKind::Hyperbolic { a, .. } => hyperbolic::unit_distance(x, y) / a,
            _ => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
        }
    }

    /// Parallel transport of `w ∈ T_xM` to `T_yM` along the unique short geodesic.
    pub fn parallel_transport_step(
        &self,
        x: &[f64],
        y: &[f64],
        w: &[f64],
    ) -> Result<Vec<f64>, GeometryError> {
        self.check_len(x)?;
        self.check_len(y)?;
        self.check_len(w)?;
        match self.kind {
            ModelKind::Sphere { radius, .. } => {
                let c = dot(x, y) / (radius * radius);
                let perp: Vec<f64> =
                    y.iter().zip(x).map(|(yi, xi)| (yi - c * xi) / radius).collect();
                let s = norm(&perp);
                if s <= 1e-14 {
                    return if c > 0.0 { Ok(w.to_vec()) } else { Err(GeometryError::DegeneratePair) };
                }
                let theta = s.atan2(c);
                let v: Vec<f64> = perp.iter().map(|p| p * radius * theta / s).collect();
                let mut carry = vec![w.to_vec()];
                self.exp_with_transport(x, &v, &mut carry);
                Ok(carry.pop().unwrap_or_default())
            }
            ModelKind::Hyperbolic { .. } => {
                let p = hyperbolic::to_hyperboloid(x);
                let q = hyperbolic::to_hyperboloid(y);
                let vel = hyperbolic::log(&p, &q);
                let mut lifted = vec![hyperbolic::push_tangent(x, w)];
                let q2 = hyperbolic::exp_and_transport(&p, &vel, &mut lifted);
                Ok(hyperbolic::pull_tangent(&q2, &lifted[0]))
            }
            _ => Ok(w.to_vec()),
        }
    }

    /// Distance to the boundary, inward normal at the nearest boundary point,
    /// and membership.
    pub fn boundary_data(&self, x: &[f64]) -> Result<BoundaryData, GeometryError> {
        self.check_len(x)?;
        match self.kind {
            ModelKind::HalfSpace { dim } => Ok(BoundaryData {
                distance: x[0],
                normal: unit(dim, 0),
                inside: x[0] >= 0.0,
            }),
            ModelKind::Ball { dim, radius } => {
                let r = norm(x);
                let normal = if r > 0.0 {
                    x.iter().map(|v| -v / r).collect()
                } else {
                    unit(dim, 0).iter().map(|v| -v).collect()
                };
                Ok(BoundaryData { distance: radius - r, normal, inside: r <= radius })
            }
            ModelKind::Interval { length } => {
                let (distance, normal) = if x[0] <= 0.5 * length {
                    (x[0], 1.0)
                } else {
                    (length - x[0], -1.0)
                };
                Ok(BoundaryData {
                    distance,
                    normal: vec![normal],
                    inside: (0.0..=length).contains(&x[0]),
                })
            }
            _ => Err(GeometryError::Boundaryless(self.name())),
        }
    }

    /// The drift vector field `Z(x)`.
    pub fn drift_at(&self, x: &[f64]) -> Vec<f64> {
        match (&self.drift, &self.kind) {
            (DriftSpec::Zero, _) => vec![0.0; x.len()],
            (DriftSpec::Constant { vector }, _) => vector.clone(),
            (DriftSpec::Gradient { potential: Potential::Quadratic { strength, center } }, _) => {
                x.iter().zip(center).map(|(xi, ci)| -strength * (xi - ci)).collect()
            }
            (
                DriftSpec::Gradient { potential: Potential::Height { coefficient } },
                ModelKind::Sphere { radius, .. },
            ) => {
                let n = x.len();
                let top = x[n - 1] / (radius * radius);
                let mut z: Vec<f64> = x.iter().map(|xi| -coefficient * top * xi).collect();
                z[n - 1] += coefficient;
                z
            }
            _ => unreachable!("drift validated at construction"),
        }
    }

    /// The scalar `c(x)` with `Ric^Z_x = c(x)·id`.
    pub fn ricci_z_scalar(&self, x: &[f64]) -> f64 {
        let ric = (self.dim() as f64 - 1.0) * self.sectional_curvature();
        match (&self.drift, &self.kind) {
            (DriftSpec::Gradient { potential: Potential::Quadratic { strength, .. } }, _) => {
                ric + strength
            }
            (
                DriftSpec::Gradient { potential: Potential::Height { coefficient } },
                ModelKind::Sphere { radius, .. },
            ) => ric + coefficient * x[x.len() - 1] / (radius * radius),
            _ => ric,
        }
    }

    /// Applies the `Ric^Z` endomorphism to `w ∈ T_xM`.
    pub fn ricci_z_action(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let c = self.ricci_z_scalar(x);
        w.iter().map(|v| c * v).collect()
    }

    /// Exact theorem hypotheses for this model.
    pub fn curvature_bounds(&self) -> Result<CurvatureBounds, GeometryError> {
        let d = self.dim() as f64;
        let k_0 = (d - 1.0) * self.sectional_curvature();
        let (theta_h, sigma, theta_ii, r0) = match self.kind {
            ModelKind::HalfSpace { .. } => (0.0, 0.0, 0.0, f64::INFINITY),
            // II = |X|²/r under the inward-normal convention.
            ModelKind::Ball { radius, dim } => {
                let ii = if dim >= 2 { 1.0 / radius } else { 0.0 };
                (ii * (dim as f64 - 1.0), 0.0, ii, 0.5 * radius)
            }
            ModelKind::Interval { length } => (0.0, 0.0, 0.0, 0.25 * length),
            _ => (0.0, 0.0, 0.0, 0.0),
        };
        let (k_z, z_sup, z_collar) = match (&self.drift, &self.kind) {
            (DriftSpec::Zero, _) => (k_0, 0.0, 0.0),
            (DriftSpec::Constant { vector }, _) => (k_0, norm(vector), 0.0),
            (DriftSpec::Gradient { potential: Potential::Quadratic { strength, center } }, kind) => {
                let c = strength.abs();
                let (sup, collar) = match kind {
                    ModelKind::Ball { radius, .. } => {
                        let s = c * (radius + norm(center));
                        (s, s)
                    }
                    ModelKind::Interval { length } => {
                        let s = c * center[0].abs().max((length - center[0]).abs());
                        (s, s)
                    }
                    ModelKind::Euclidean { .. } if c > 0.0 => (f64::INFINITY, 0.0),
                    ModelKind::HalfSpace { .. } if c > 0.0 => (f64::INFINITY, f64::INFINITY),
                    _ => (0.0, 0.0),
                };
                (k_0 + strength, sup, collar)
            }
            (
                DriftSpec::Gradient { potential: Potential::Height { coefficient } },
                ModelKind::Sphere { radius, .. },
            ) => (k_0 - coefficient.abs() / radius, coefficient.abs(), 0.0),
            _ => {
                return Err(GeometryError::UnsupportedDrift {
                    model: self.name(),
                    drift: format!("{:?}", self.drift),
                })
            }
        };
        Ok(CurvatureBounds {
            k_z,
            k_0,
            theta_h,
            sigma,
            theta_ii,
            k: 0.0,
            r0,
            z_sup,
            z_collar,
        })
    }

    fn validate_drift(&self) -> Result<(), GeometryError> {
        let unsupported = || GeometryError::UnsupportedDrift {
            model: self.name(),
            drift: format!("{:?}", self.drift),
        };
        match (&self.drift, &self.kind) {
            (DriftSpec::Zero, _) => Ok(()),
            (DriftSpec::Constant { vector }, ModelKind::Euclidean { dim }) => {
                if vector.len() != *dim || vector.iter().any(|v| !v.is_finite()) {
                    Err(unsupported())
                } else {
                    Ok(())
                }
            }
            (
                DriftSpec::Gradient { potential: Potential::Quadratic { strength, center } },
                kind,
            ) if self.is_flat() => {
                let _ = kind;
                if center.len() != self.coord_dim() || !strength.is_finite() {
                    Err(unsupported())
                } else {
                    Ok(())
                }
            }
            (
                DriftSpec::Gradient { potential: Potential::Height { coefficient } },
                ModelKind::Sphere { .. },
            ) if coefficient.is_finite() => Ok(()),
            _ => Err(unsupported()),
        }
    }
}

fn validate_kind(kind: &ModelKind) -> Result<(), GeometryError> {
    let bad = |m: &str| Err(GeometryError::InvalidModel(m.to_string()));
    match *kind {
        ModelKind::Euclidean { dim } | ModelKind::HalfSpace { dim } if dim == 0 => bad("d must be ≥ 1"),
        ModelKind::Sphere { dim, radius } | ModelKind::Ball { dim, radius } => {
            if dim == 0 {
                bad("d must be ≥ 1")
            } else if !(radius > 0.0 && radius.is_finite()) {
                bad("radius must be positive")
            } else {
                Ok(())
            }
        }
        ModelKind::Hyperbolic { dim, a } => {
            if dim < 2 {
                bad("hyperbolic space needs d ≥ 2")
            } else if !(a > 0.0 && a.is_finite()) {
                bad("curvature scale a must be positive")
            } else {
                Ok(())
            }
        }
        ModelKind::Interval { length } if !(length > 0.0 && length.is_finite()) => {
            bad("interval length must be positive")
        }
        _ => Ok(()),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn rescale_to(y: &mut [f64], radius: f64) {
    let r = norm(y);
    for v in y.iter_mut() {
        *v *= radius / r;
    }
}
