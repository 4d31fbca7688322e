//! `heatbounds mc`: one Monte Carlo estimate with its bound comparison.

use crate::config::{usage, Format, Output, Provenance};
use anyhow::Result;
use clap::Args;
use heatbounds::bounds;
use heatbounds::simulate::{self, fd_gradient, ModelSampler};
use heatbounds::{Boundary, FdScheme, ManifoldModel, ModelKind, SimConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct McArgs {
    /// euclid<d>, sphere<d>, hyperbolic<d>, halfspace<d>, ball<d> or interval.
    #[arg(long)]
    pub model: Option<String>,
    /// Sphere or ball radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Hyperbolic curvature is −a².
    #[arg(long)]
    pub a: Option<f64>,
    /// Interval length, π by default.
    #[arg(long)]
    pub length: Option<f64>,
    /// dirichlet (killed) or neumann (reflected), for models with boundary.
    #[arg(long)]
    pub bc: Option<String>,
    /// semigroup, bismut or fd.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Payoff: one, indicator (x₁ > 0), sin (of x₁), cos (of x₁), height (last coordinate), linear (x₁).
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Starting point, comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Time step; must divide t. Defaults to the largest step ≤ 0.01 that does.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Finite-difference step.
    #[arg(long)]
    pub eps: Option<f64>,
    /// central or forward.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Curvature used in the Bismut weight. Defaults to the model's K_Z.
    #[arg(long = "k-weight", allow_hyphen_values = true)]
    pub k_weight: Option<f64>,
}

fn parse_model(args: &McArgs) -> Result<ManifoldModel> {
    let Some(name) = args.model.as_deref() else { return usage("missing parameter --model") };
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (family, digits) = name.split_at(split);
    let dim: usize = if digits.is_empty() {
        1
    } else {
        match digits.parse() {
            Ok(d) if d > 0 => d,
            _ => return usage(format!("bad dimension in model `{name}`")),
        }
    };
    let radius = args.radius.unwrap_or(1.0);
    let model = match family {
        "euclid" | "euclidean" => ManifoldModel::euclidean(dim),
        "sphere" => ManifoldModel::sphere(dim, radius),
        "hyperbolic" => ManifoldModel::hyperbolic(dim, args.a.unwrap_or(1.0)),
        "halfspace" | "halfline" => ManifoldModel::half_space(dim),
        "ball" => ManifoldModel::ball(dim, radius),
        "interval" if digits.is_empty() => ManifoldModel::interval(args.length.unwrap_or(PI)),
        _ => return usage(format!("unknown model `{name}`; use euclid<d>, sphere<d>, hyperbolic<d>, halfspace<d>, ball<d> or interval")),
    };
    model.map_err(|e| crate::config::UsageError(e.to_string()).into())
}

type Payoff = fn(&[f64]) -> f64;

// Payoff and its sup norm over the model (infinite when unbounded).
fn parse_payoff(name: &str, model: &ManifoldModel) -> Result<(Payoff, f64)> {
    Ok(match name {
        "one" => (|_| 1.0, 1.0),
        "indicator" => (|x| (x[0] > 0.0) as u8 as f64, 1.0),
        "sin" => (|x| x[0].sin(), 1.0),
        "cos" => (|x| x[0].cos(), 1.0),
        "height" => {
            let sup = match model.kind() {
                ModelKind::Sphere { radius, .. } | ModelKind::Ball { radius, .. } => *radius,
                ModelKind::Interval { length } => *length,
                _ => f64::INFINITY,
            };
            (|x| x[x.len() - 1], sup)
        }
        "linear" => {
            let sup = match model.kind() {
                ModelKind::Interval { length } => *length,
                ModelKind::Ball { radius, .. } | ModelKind::Sphere { radius, .. } => *radius,
                _ => f64::INFINITY,
            };
            (|x| x[0], sup)
        }
        _ => return usage(format!("unknown payoff `{name}`; use one, indicator, sin, cos, height or linear")),
    })
}

fn default_dt(t: f64) -> f64 {
    t / (t / 0.01).ceil().max(1.0)
}

enum Estimator {
    Semigroup,
    Bismut,
    Fd(FdScheme),
}

pub fn run(args: &McArgs, out: &Output, prov: &Provenance) -> Result<i32> {
    let model = parse_model(args)?;
    let estimator = match args.estimator.as_deref().unwrap_or("semigroup") {
        "semigroup" => Estimator::Semigroup,
        "bismut" => Estimator::Bismut,
        "fd" => Estimator::Fd(match args.scheme.as_deref().unwrap_or("central") {
            "central" => FdScheme::Central,
            "forward" => FdScheme::Forward,
            s => return usage(format!("unknown finite-difference scheme `{s}`; use central or forward")),
        }),
        e => return usage(format!("unknown estimator `{e}`; use semigroup, bismut or fd")),
    };
    let boundary = match (model.has_boundary(), args.bc.as_deref()) {
        (false, None) => Boundary::Free,
        (false, Some(_)) => return usage(format!("{} has no boundary; drop --bc", model.name())),
        (true, Some("dirichlet")) => Boundary::Killed,
        (true, Some("neumann")) => Boundary::Reflected,
        (true, None) => return usage(format!("{} has a boundary; pass --bc dirichlet or --bc neumann", model.name())),
        (true, Some(b)) => return usage(format!("unknown boundary condition `{b}`; use dirichlet or neumann")),
    };
    let Some(t) = args.t else { return usage("missing parameter --t") };
    let Some(x) = args.x.clone() else { return usage("missing parameter --x") };
    let paths = args.paths.unwrap_or(100_000);
    if paths == 0 {
        return usage("--paths must be at least 1");
    }
    let seed = args.seed.unwrap_or(0);
    let (u, u_sup) = parse_payoff(args.u.as_deref().unwrap_or("indicator"), &model)?;
    let config = SimConfig::new(args.dt.unwrap_or_else(|| default_dt(t)), t, paths, seed);
    let pack = model.curvature_bounds()?;
    let sim_usage = |e: heatbounds::SimError| crate::config::UsageError(e.to_string());

    let start = Instant::now();
    let mut report = json!({
        "command": "mc",
        "model": model.name(),
        "seed": seed,
        "provenance": prov,
    });
    let mut code = 0;
    match estimator {
        Estimator::Semigroup => {
            let (est, extra) = match boundary {
                Boundary::Free => (simulate::run_free(&model, &config, &x, u).map_err(sim_usage)?, json!({})),
                Boundary::Killed => {
                    let k = simulate::run_killed(&model, &config, &x, u).map_err(sim_usage)?;
                    (k.semigroup, json!({ "survival": k.survival }))
                }
                Boundary::Reflected => {
                    let r = simulate::run_reflected(&model, &config, &x, u).map_err(sim_usage)?;
                    (r.semigroup, json!({ "local_time": r.local_time }))
                }
            };
            println!("P_t u(x) = {:.6} ± {:.6} (n = {})", est.mean, est.se, est.n);
            if let Some(s) = extra.get("survival") {
                println!("survival = {:.6} ± {:.6}", s["mean"].as_f64().unwrap_or(f64::NAN), s["se"].as_f64().unwrap_or(f64::NAN));
            }
            if let Some(l) = extra.get("local_time") {
                println!("local time = {:.6} ± {:.6}", l["mean"].as_f64().unwrap_or(f64::NAN), l["se"].as_f64().unwrap_or(f64::NAN));
            }
            report["estimator"] = json!("semigroup");
            report["estimate"] = json!(est);
            report["extra"] = extra;
        }
        Estimator::Bismut | Estimator::Fd(_) => {
            let g = match estimator {
                Estimator::Bismut => {
                    if boundary == Boundary::Killed {
                        return usage("Bismut weights are implemented for reflected and boundaryless runs; use --estimator fd with --bc dirichlet");
                    }
                    let k = args.k_weight.unwrap_or(pack.k_z);
                    simulate::bismut_gradient(&model, &config, &x, k, u).map_err(sim_usage)?
                }
                Estimator::Fd(scheme) => {
                    let sampler = ModelSampler::new(model.clone(), config.clone(), boundary, u);
                    fd_gradient(&sampler, &x, args.eps.unwrap_or(0.05), scheme, true, seed).map_err(sim_usage)?
                }
                Estimator::Semigroup => unreachable!(),
            };
            // Flat convex boundaries: α0 = 0 for Dirichlet, φ ≡ 1 for Neumann.
            let bound = match boundary {
                Boundary::Free => bounds::grad_bound_closed(pack.k_z, t)?,
                Boundary::Killed => {
                    let a0 = bounds::alpha0(pack.theta_h, pack.k_0, model.dim(), pack.z_sup);
                    bounds::dirichlet_grad_bound(pack.k_z, a0, t)?
                }
                Boundary::Reflected => bounds::neumann_grad_bound(pack.k_z, 1.0, t)?,
            };
            let scaled = bound.value * u_sup;
            let coords: Vec<String> = g.mean.iter().zip(&g.se).map(|(m, s)| format!("{m:.6} ± {s:.6}")).collect();
            println!("dP_t u(x) = [{}] ({}, n = {})", coords.join(", "), g.scheme, g.n);
            println!("|dP_t u|(x) = {:.6} ± {:.6}", g.norm, g.norm_se);
            let passed = if scaled.is_finite() {
                let ok = g.norm <= scaled + 3.0 * g.norm_se;
                println!("bound {} · ‖u‖∞ = {:.6} ({})", bound.theorem, scaled, if ok { "holds within 3 SE" } else { "VIOLATED" });
                ok
            } else {
                println!("bound: payoff is unbounded, no comparison");
                true
            };
            if !passed {
                code = 1;
            }
            report["estimator"] = json!(g.scheme);
            report["gradient"] = json!(g);
            report["bound"] = json!({ "name": bound.theorem, "value": bound.value, "u_sup": u_sup, "scaled": scaled });
            report["passed"] = json!(passed);
        }
    }
    let runtime = start.elapsed().as_secs_f64();
    println!("runtime {:.3} s", runtime);
    report["runtime_s"] = json!(runtime);
    report["config"] = json!(config);
    out.write(Format::Json, "mc.json", &serde_json::to_string_pretty(&report)?)?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(model: &str) -> McArgs {
        McArgs { model: Some(model.into()), ..Default::default() }
    }

    #[test]
    fn model_names() {
        assert_eq!(parse_model(&args("euclid1")).unwrap().dim(), 1);
        assert_eq!(parse_model(&args("sphere2")).unwrap().coord_dim(), 3);
        assert!(parse_model(&args("interval")).unwrap().has_boundary());
        assert!(parse_model(&args("torus2")).is_err());
        assert!(parse_model(&args("euclid0")).is_err());
        assert!(parse_model(&args("interval3")).is_err());
    }

    #[test]
    fn default_step_divides_horizon() {
        for t in [0.25, 1.0, 0.3, 2.0, 0.005] {
            let dt = default_dt(t);
            assert!(dt <= 0.01 + 1e-15);
            assert!(SimConfig::new(dt, t, 1, 0).validate().is_ok(), "t = {t}");
        }
    }
}
