use super::{collect_samples, Boundary, PathPlan, PathStatus, SimConfig, SimError};
use crate::geometry::ManifoldModel;
use crate::numerics::mean_and_se;
use serde::Serialize;
use std::sync::Arc;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let (mean, se) = mean_and_se(samples);
        Self { mean, se, n: samples.len() }
    }

    /// `|mean − target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = (self.mean - target).abs();
        if self.se > 0.0 {
            gap / self.se
        } else if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Gradient estimate in chart (ambient) components.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientEstimate {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub n: usize,
    /// Riemannian length of the mean gradient.
    pub norm: f64,
    /// Standard error of the projection on the mean direction.
    pub norm_se: f64,
    pub scheme: String,
}

impl GradientEstimate {
    /// From per-path vectors `g` in an orthonormal frame `frame`; the mean is
    /// reported as `Σ g_i f_i`.
    pub fn from_frame_samples(samples: &[Vec<f64>], frame: &[Vec<f64>], scheme: &str) -> Self {
        let d = frame.len();
        let columns: Vec<Vec<f64>> = (0..d).map(|i| samples.iter().map(|g| g[i]).collect()).collect();
        let stats: Vec<(f64, f64)> = columns.iter().map(|c| mean_and_se(c)).collect();
        let g: Vec<f64> = stats.iter().map(|s| s.0).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_se = if norm > 0.0 {
            let proj: Vec<f64> =
                samples.iter().map(|s| s.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / norm).collect();
            mean_and_se(&proj).1
        } else {
            stats.iter().map(|s| s.1).fold(0.0, f64::max)
        };
        let n_coord = frame.first().map_or(0, |f| f.len());
        let mut mean = vec![0.0; n_coord];
        let mut se = vec![0.0; n_coord];
        for (i, f) in frame.iter().enumerate() {
            for k in 0..n_coord {
                mean[k] += g[i] * f[k];
                se[k] += (stats[i].1 * f[k]).powi(2);
            }
        }
        se.iter_mut().for_each(|v| *v = v.sqrt());
        Self { mean, se, n: samples.len(), norm, norm_se, scheme: scheme.to_string() }
    }
}

/// Per-path semigroup samples at a point, reproducible from `seed`.
pub trait SemigroupSampler: Sync {
    fn coord_dim(&self) -> usize;
    fn samples(&self, x: &[f64], seed: u64) -> Result<Vec<f64>, SimError>;
}

/// `u(X_t)` for a model and boundary behaviour; killed paths contribute 0.
#[derive(Clone)]
pub struct ModelSampler {
    pub model: ManifoldModel,
    pub config: SimConfig,
    pub boundary: Boundary,
    pub payoff: crate::ScalarField,
}

impl ModelSampler {
    pub fn new(
        model: ManifoldModel,
        config: SimConfig,
        boundary: Boundary,
        payoff: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { model, config, boundary, payoff: Arc::new(payoff) }
    }
}

impl SemigroupSampler for ModelSampler {
    fn coord_dim(&self) -> usize {
        self.model.coord_dim()
    }

    fn samples(&self, x: &[f64], seed: u64) -> Result<Vec<f64>, SimError> {
        let config = SimConfig { seed, ..self.config.clone() };
        let plan = PathPlan::new(&self.model, &config, self.boundary);
        collect_samples(&plan, x, |s| match s.status {
            PathStatus::Killed { .. } => 0.0,
            _ => (self.payoff)(&s.position),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdScheme {
    Central,
    Forward,
}

/// Finite-difference gradient along the chart axes.
///
/// With common random numbers every evaluation reuses `seed`, and the
/// standard error comes from per-path differences. Fails when `eps` is
/// smaller than 10 standard errors of any semigroup estimate involved.
pub fn fd_gradient(
    sampler: &dyn SemigroupSampler,
    x: &[f64],
    eps: f64,
    scheme: FdScheme,
    crn: bool,
    seed: u64,
) -> Result<GradientEstimate, SimError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(SimError::InvalidConfig(format!("finite-difference step must be positive, got {eps}")));
    }
    let d = sampler.coord_dim();
    let mut stream = 0u64;
    let mut next_seed = || {
        let s = if crn { seed } else { crate::rng::derive_seed(seed, &format!("fd-{stream}")) };
        stream += 1;
        s
    };
    let base = match scheme {
        FdScheme::Forward => Some(sampler.samples(x, next_seed())?),
        FdScheme::Central => None,
    };
    let mut worst_se = base.as_deref().map_or(0.0, |b| mean_and_se(b).1);
    let mut mean = Vec::with_capacity(d);
    let mut se = Vec::with_capacity(d);
    let mut n = 0;
    for i in 0..d {
        let shifted = |sign: f64| {
            let mut y = x.to_vec();
            y[i] += sign * eps;
            y
        };
        let plus = sampler.samples(&shifted(1.0), next_seed())?;
        let (minus, width) = match &base {
            Some(b) => (b.clone(), eps),
            None => (sampler.samples(&shifted(-1.0), next_seed())?, 2.0 * eps),
        };
        worst_se = worst_se.max(mean_and_se(&plus).1).max(mean_and_se(&minus).1);
        if crn {
            let diff: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / width).collect();
            let (m, s) = mean_and_se(&diff);
            mean.push(m);
            se.push(s);
        } else {
            let (mp, sp) = mean_and_se(&plus);
            let (mm, sm) = mean_and_se(&minus);
            mean.push((mp - mm) / width);
            se.push(sp.hypot(sm) / width);
        }
        n = plus.len();
    }
    if eps < 10.0 * worst_se {
        return Err(SimError::StepTooSmall { eps, se: worst_se });
    }
    let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_se = if norm > 0.0 {
        (mean.iter().zip(&se).map(|(m, s)| (m * s).powi(2)).sum::<f64>()).sqrt() / norm
    } else {
        se.iter().copied().fold(0.0, f64::max)
    };
    let name = match scheme {
        FdScheme::Central => "fd-central",
        FdScheme::Forward => "fd-forward",
    };
    Ok(GradientEstimate { mean, se, n, norm, norm_se, scheme: name.into() })
}
