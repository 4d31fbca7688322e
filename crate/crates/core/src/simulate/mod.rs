//! Monte Carlo engine for `½L`-diffusions on the model catalogue.
//!
//! The generator `½L = ½Δ + ½Z` is realized as a geodesic Euler scheme: each
//! step moves along `exp_x(//·ΔB + ½Z(x)·h)` with unit-variance Gaussian
//! increments in the transported orthonormal frame. Boundary behaviour is
//! free, killed (absorbed at the first crossing) or reflected (mirror map).
//!
//! Path `i` of a run draws only from its own stream `(seed, i)` and per-path
//! results are reduced in index order, so estimates are bit-identical for any
//! thread count.

mod estimate;

pub use estimate::{fd_gradient, Estimate, FdScheme, GradientEstimate, ModelSampler, SemigroupSampler};

use crate::bounds::x_over_expm1;
use crate::geometry::{GeometryError, ManifoldModel, ModelKind};
use crate::rng::PathRng;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("start point is not in the closed domain of {0}")]
    InvalidStart(String),
    #[error("{boundary:?} runs are not supported on {model}")]
    UnsupportedBoundary { model: String, boundary: Boundary },
    #[error("Bismut estimation needs a boundaryless model or a reflected half-space/interval; got {0}")]
    UnsupportedGradient(String),
    #[error("increment has {got} components, frame has {expected}")]
    IncrementDimension { expected: usize, got: usize },
    #[error("finite-difference step {eps} is below 10 standard errors ({se}) of the semigroup estimate")]
    StepTooSmall { eps: f64, se: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Run parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    /// Brownian-bridge crossing correction on flat boundaries.
    #[serde(default = "default_true")]
    pub bridge_correction: bool,
    /// Each step of size `dt` is split into this many substeps, each with its
    /// own increment and boundary check.
    #[serde(default = "default_one")]
    pub substeps: usize,
}

fn default_true() -> bool {
    true
}

fn default_one() -> usize {
    1
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, paths: usize, seed: u64) -> Self {
        Self { dt, horizon, paths, seed, bridge_correction: true, substeps: 1 }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.paths == 0 {
            return bad("paths must be at least 1".into());
        }
        if self.substeps == 0 {
            return bad("substeps must be at least 1".into());
        }
        let ratio = self.horizon / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return bad(format!("horizon {} is not a multiple of dt {}", self.horizon, self.dt));
        }
        Ok(())
    }

    /// Number of substeps over the horizon.
    pub fn total_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize * self.substeps
    }

    /// Substep length.
    pub fn step(&self) -> f64 {
        self.horizon / self.total_steps() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Free,
    Killed,
    Reflected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PathStatus {
    Alive,
    Killed { exit_time: f64 },
    Finished,
}

/// One simulated path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathState {
    pub position: Vec<f64>,
    /// Orthonormal frame transported along the path (chart components).
    pub frame: Vec<Vec<f64>>,
    /// Damped transport in frame coordinates.
    pub q: DMatrix<f64>,
    /// `∫⟨Q_r h′(r), dB_r⟩` as a vector in frame coordinates at the start.
    pub ito_acc: Vec<f64>,
    pub local_time: f64,
    pub status: PathStatus,
    pub time: f64,
}

impl PathState {
    pub fn new(model: &ManifoldModel, x0: &[f64]) -> Self {
        let d = model.dim();
        Self {
            position: x0.to_vec(),
            frame: model.orthonormal_frame(x0),
            q: DMatrix::identity(d, d),
            ito_acc: vec![0.0; d],
            local_time: 0.0,
            status: PathStatus::Alive,
            time: 0.0,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.status == PathStatus::Alive
    }
}

/// Bismut weight `h(s) = (e^{Kt} − e^{Ks})/(e^{Kt} − 1)` on `[0, t]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BismutWeight {
    pub k: f64,
    pub t: f64,
}

impl BismutWeight {
    /// `h′(s)`; equals `−1/t` when `K = 0`.
    pub fn derivative(&self, s: f64) -> f64 {
        let (k, t) = (self.k, self.t);
        if k > 0.0 {
            -(k * (s - t)).exp() * x_over_expm1(-k * t) / t
        } else {
            -(k * s).exp() * x_over_expm1(k * t) / t
        }
    }
}

/// One geodesic Euler step of size `dt` with frame increment `increment`.
///
/// Updates the transported frame, the damped transport by the midpoint rule
/// for `dQ/ds = −½Ric^Z Q`, and (when `weight` is given) the Itô accumulator
/// with the left-point `Q`.
pub fn step_free(
    model: &ManifoldModel,
    state: &mut PathState,
    dt: f64,
    increment: &[f64],
    weight: Option<&BismutWeight>,
) -> Result<(), SimError> {
    let d = model.dim();
    if increment.len() != d {
        return Err(SimError::IncrementDimension { expected: d, got: increment.len() });
    }
    advance(model, state, dt, increment, weight);
    Ok(())
}

fn advance(model: &ManifoldModel, state: &mut PathState, dt: f64, db: &[f64], weight: Option<&BismutWeight>) {
    let n = model.coord_dim();
    let r_now = model.ricci_z_scalar(&state.position);
    if let Some(w) = weight {
        let hp = w.derivative(state.time);
        for (j, acc) in state.ito_acc.iter_mut().enumerate() {
            let mut s = 0.0;
            for (i, b) in db.iter().enumerate() {
                s += state.q[(i, j)] * b;
            }
            *acc += hp * s;
        }
    }

    let z = model.drift_at(&state.position);
    let mut v: Vec<f64> = z.iter().map(|zi| 0.5 * dt * zi).collect();
    for (f, b) in state.frame.iter().zip(db) {
        for k in 0..n {
            v[k] += f[k] * b;
        }
    }
    if model.is_flat() {
        for (x, vi) in state.position.iter_mut().zip(&v) {
            *x += vi;
        }
    } else {
        state.position = model.exp_with_transport(&state.position, &v, &mut state.frame);
    }

    // Ric^Z is a multiple of the identity on every catalogue model, so the
    // midpoint update Q ← Q − ½dt·R_mid(Q − ¼dt·R_n Q) is a scalar factor.
    let r_next = model.ricci_z_scalar(&state.position);
    let r_mid = 0.5 * (r_now + r_next);
    let factor = 1.0 - 0.5 * dt * r_mid * (1.0 - 0.25 * dt * r_now);
    state.q *= factor;
    state.time += dt;
}

/// Distances to the boundary pieces that bridge correction knows about:
/// `[x_1]` on the half-space, `[x, L − x]` on the interval.
fn flat_distances(kind: &ModelKind, x: &[f64]) -> Option<[f64; 2]> {
    match *kind {
        ModelKind::HalfSpace { .. } => Some([x[0], f64::INFINITY]),
        ModelKind::Interval { length } => Some([x[0], length - x[0]]),
        _ => None,
    }
}

// Probability that a Brownian bridge of variance h between two interior
// points touches the flat boundary.
fn bridge_touch_probability(kind: &ModelKind, a: &[f64], b: &[f64], h: f64) -> f64 {
    match (flat_distances(kind, a), flat_distances(kind, b)) {
        (Some(da), Some(db)) => {
            let mut survive = 1.0;
            for (x, y) in da.iter().zip(&db) {
                if x.is_finite() && y.is_finite() {
                    survive *= 1.0 - (-2.0 * x * y / h).exp();
                }
            }
            1.0 - survive
        }
        _ => 0.0,
    }
}

/// First contact with a flat boundary during one step: the inward normal and
/// the distance from the step's start point to that boundary piece. Contact
/// is a crossing of the unreflected step or, with bridge correction, a
/// bridge touch between the two interior endpoints.
fn first_contact(
    kind: &ModelKind,
    prev: &[f64],
    unreflected: &[f64],
    next: &[f64],
    h: f64,
    bridge: bool,
    rng: &mut PathRng,
) -> Option<(Vec<f64>, f64)> {
    let axis = |sign: f64| {
        let mut n = vec![0.0; prev.len()];
        n[0] = sign;
        n
    };
    match *kind {
        ModelKind::HalfSpace { .. } => {
            let hit = unreflected[0] < 0.0 || (bridge && rng.uniform() < (-2.0 * prev[0] * next[0] / h).exp());
            hit.then(|| (axis(1.0), prev[0]))
        }
        ModelKind::Interval { length } => {
            let left = (axis(1.0), prev[0]);
            let right = (axis(-1.0), length - prev[0]);
            if unreflected[0] < 0.0 {
                return Some(left);
            }
            if unreflected[0] > length {
                return Some(right);
            }
            if !bridge {
                return None;
            }
            let p0 = (-2.0 * prev[0] * next[0] / h).exp();
            let pl = (-2.0 * (length - prev[0]) * (length - next[0]) / h).exp();
            if rng.uniform() >= 1.0 - (1.0 - p0) * (1.0 - pl) {
                return None;
            }
            Some(if rng.uniform() * (p0 + pl) < p0 { left } else { right })
        }
        _ => None,
    }
}

/// Mirror reflection into the domain; returns the size of the push.
fn reflect(kind: &ModelKind, x: &mut [f64]) -> f64 {
    match *kind {
        ModelKind::HalfSpace { .. } => {
            if x[0] < 0.0 {
                let push = -2.0 * x[0];
                x[0] = -x[0];
                push
            } else {
                0.0
            }
        }
        ModelKind::Interval { length } => {
            let y = x[0];
            if (0.0..=length).contains(&y) {
                return 0.0;
            }
            let period = 2.0 * length;
            let mut m = y.rem_euclid(period);
            if m > length {
                m = period - m;
            }
            x[0] = m;
            // Each crossing of an endpoint pushes by twice the overshoot there.
            let mut push = 0.0;
            let mut v = y;
            while !(0.0..=length).contains(&v) {
                if v < 0.0 {
                    push += -2.0 * v;
                    v = -v;
                } else {
                    push += 2.0 * (v - length);
                    v = 2.0 * length - v;
                }
            }
            push
        }
        ModelKind::Ball { radius, .. } => {
            let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r <= radius {
                return 0.0;
            }
            let target = (2.0 * radius - r).max(0.0);
            for v in x.iter_mut() {
                *v *= target / r;
            }
            2.0 * (r - radius)
        }
        _ => 0.0,
    }
}

// Removes the normal component from the image of Q: Q ← (I − NNᵀ)Q in frame
// coordinates (flat models use the identity frame).
fn project_normal(q: &mut DMatrix<f64>, normal: &[f64]) {
    let d = q.nrows();
    for j in 0..d {
        let mut s = 0.0;
        for i in 0..d {
            s += normal[i] * q[(i, j)];
        }
        for i in 0..d {
            q[(i, j)] -= s * normal[i];
        }
    }
}

/// What to track along a path.
#[derive(Clone, Copy, Debug)]
pub struct PathPlan<'a> {
    pub model: &'a ManifoldModel,
    pub config: &'a SimConfig,
    pub boundary: Boundary,
    pub weight: Option<BismutWeight>,
}

impl<'a> PathPlan<'a> {
    pub fn new(model: &'a ManifoldModel, config: &'a SimConfig, boundary: Boundary) -> Self {
        Self { model, config, boundary, weight: None }
    }

    pub fn with_weight(mut self, weight: BismutWeight) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn check(&self, x0: &[f64]) -> Result<(), SimError> {
        self.config.validate()?;
        let m = self.model;
        if x0.len() != m.coord_dim() {
            return Err(GeometryError::DimensionMismatch { expected: m.coord_dim(), got: x0.len() }.into());
        }
        if !m.contains(x0) {
            return Err(SimError::InvalidStart(m.name()));
        }
        let ok = match self.boundary {
            Boundary::Free => !m.has_boundary(),
            Boundary::Killed | Boundary::Reflected => m.has_boundary(),
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::UnsupportedBoundary { model: m.name(), boundary: self.boundary })
        }
    }

    /// Simulates path `index` from `x0`, calling `observer` after every substep.
    pub fn simulate(&self, x0: &[f64], index: u64, mut observer: impl FnMut(&PathState)) -> PathState {
        let model = self.model;
        let kind = model.kind();
        let h = self.config.step();
        let steps = self.config.total_steps();
        let d = model.dim();
        let mut rng = PathRng::new(self.config.seed, index);
        let mut state = PathState::new(model, x0);
        let mut db = vec![0.0; d];
        let mut touched = false;
        let sqrt_h = h.sqrt();

        if self.boundary != Boundary::Free {
            let start = model.boundary_data(x0).expect("boundary model");
            if start.distance <= 0.0 {
                match self.boundary {
                    Boundary::Killed => {
                        state.status = PathStatus::Killed { exit_time: 0.0 };
                        return state;
                    }
                    _ => {
                        project_normal(&mut state.q, &start.normal);
                        touched = true;
                    }
                }
            }
        }

        for n in 0..steps {
            rng.fill_normal(&mut db);
            db.iter_mut().for_each(|b| *b *= sqrt_h);
            let prev = state.position.clone();
            let track = self.weight.is_some() && self.boundary == Boundary::Reflected && !touched;
            let q_prev = track.then(|| state.q.clone());
            advance(model, &mut state, h, &db, self.weight.as_ref());
            if n + 1 == steps {
                // Avoid accumulated rounding in the final time stamp.
                state.time = self.config.horizon;
            }
            match self.boundary {
                Boundary::Free => {}
                Boundary::Killed => {
                    let inside = model.boundary_data(&state.position).map(|b| b.distance > 0.0).unwrap_or(true);
                    let crossed = !inside
                        || (self.config.bridge_correction
                            && rng.uniform() < bridge_touch_probability(kind, &prev, &state.position, h));
                    if crossed {
                        state.status = PathStatus::Killed { exit_time: state.time - 0.5 * h };
                        observer(&state);
                        return state;
                    }
                }
                Boundary::Reflected => {
                    let unreflected = state.position.clone();
                    let push = reflect(kind, &mut state.position);
                    state.local_time += push;
                    if let (Some(w), false, Some(q_prev)) = (self.weight.as_ref(), touched, q_prev.as_ref()) {
                        let contact = first_contact(
                            kind,
                            &prev,
                            &unreflected,
                            &state.position,
                            h,
                            self.config.bridge_correction,
                            &mut rng,
                        );
                        if let Some((normal, dist)) = contact {
                            // Up to the hit the normal increment is exactly −dist;
                            // replace the full-step normal increment by it.
                            let along: f64 = normal.iter().zip(&db).map(|(a, b)| a * b).sum();
                            let delta = -dist - along;
                            let hp = w.derivative(state.time - h);
                            for (j, acc) in state.ito_acc.iter_mut().enumerate() {
                                let s: f64 = (0..d).map(|i| q_prev[(i, j)] * normal[i]).sum();
                                *acc += hp * s * delta;
                            }
                            // Derivative flow of a reflected diffusion loses its
                            // normal component at the boundary.
                            project_normal(&mut state.q, &normal);
                            touched = true;
                        }
                    }
                }
            }
            observer(&state);
        }
        state.status = PathStatus::Finished;
        state
    }
}

/// Runs `paths` independent paths and maps each final state to a sample, in
/// path-index order.
pub fn collect_samples<T: Send>(
    plan: &PathPlan<'_>,
    x0: &[f64],
    sample: impl Fn(&PathState) -> T + Sync,
) -> Result<Vec<T>, SimError> {
    plan.check(x0)?;
    Ok((0..plan.config.paths as u64)
        .into_par_iter()
        .map(|i| sample(&plan.simulate(x0, i, |_| {})))
        .collect())
}

/// `E[u(X_t)]` for a boundaryless model.
pub fn run_free(
    model: &ManifoldModel,
    config: &SimConfig,
    x0: &[f64],
    u: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<Estimate, SimError> {
    let plan = PathPlan::new(model, config, Boundary::Free);
    let samples = collect_samples(&plan, x0, |s| u(&s.position))?;
    Ok(Estimate::from_samples(&samples))
}

/// Killed-run estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KilledEstimate {
    /// `P_t^D u(x)`.
    pub semigroup: Estimate,
    /// `ψ(t, x) = P(τ > t)`.
    pub survival: Estimate,
}

/// Diffusion absorbed at the boundary.
pub fn run_killed(
    model: &ManifoldModel,
    config: &SimConfig,
    x0: &[f64],
    u: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<KilledEstimate, SimError> {
    let plan = PathPlan::new(model, config, Boundary::Killed);
    let pairs = collect_samples(&plan, x0, |s| {
        if s.is_alive() || s.status == PathStatus::Finished {
            (u(&s.position), 1.0)
        } else {
            (0.0, 0.0)
        }
    })?;
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let alive: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(KilledEstimate { semigroup: Estimate::from_samples(&values), survival: Estimate::from_samples(&alive) })
}

/// Reflected-run estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReflectedEstimate {
    /// `P_t^N u(x)`.
    pub semigroup: Estimate,
    /// `E[l_t]`.
    pub local_time: Estimate,
}

/// Diffusion reflected at the boundary, with boundary local time.
pub fn run_reflected(
    model: &ManifoldModel,
    config: &SimConfig,
    x0: &[f64],
    u: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<ReflectedEstimate, SimError> {
    let plan = PathPlan::new(model, config, Boundary::Reflected);
    let pairs = collect_samples(&plan, x0, |s| (u(&s.position), s.local_time))?;
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let lt: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(ReflectedEstimate { semigroup: Estimate::from_samples(&values), local_time: Estimate::from_samples(&lt) })
}

/// Bismut estimate of `dP_t u(x)` (or `dP_t^N u(x)` on a reflected
/// half-space or interval) with `h` built from curvature `k`.
///
/// The result is expressed in chart/ambient components: `Σ_i g_i f_i(x)`
/// where `f_i` is the initial frame.
pub fn bismut_gradient(
    model: &ManifoldModel,
    config: &SimConfig,
    x0: &[f64],
    k: f64,
    u: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<GradientEstimate, SimError> {
    let boundary = match model.kind() {
        ModelKind::HalfSpace { .. } | ModelKind::Interval { .. } => Boundary::Reflected,
        ModelKind::Ball { .. } => return Err(SimError::UnsupportedGradient(model.name())),
        _ => Boundary::Free,
    };
    let t = config.horizon;
    let plan = PathPlan::new(model, config, boundary).with_weight(BismutWeight { k, t });
    let samples = collect_samples(&plan, x0, |s| {
        let value = u(&s.position);
        s.ito_acc.iter().map(|a| -value * a).collect::<Vec<f64>>()
    })?;
    Ok(GradientEstimate::from_frame_samples(&samples, &model.orthonormal_frame(x0), "bismut"))
}

#[cfg(test)]
mod tests;
