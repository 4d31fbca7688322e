use super::oracles::{self, IntervalHeat, IntervalPayoff};
use super::{Check, Context, Experiment, OracleKind, Outcome, Tolerance};
use crate::bounds::{
    alpha0, c2_bound, c2_bound_minimized, c2_bound_simple, c2_neumann_bound, c2_neumann_explicit,
    dirichlet_eigen_bound, dirichlet_grad_bound, eigen_grad_bound, eigen_grad_bound_stationary, grad_bound_closed,
    iso_explicit, k_phi, neumann_explicit_bound, neumann_grad_bound,
};
use crate::geometry::{CurvatureBounds, DriftSpec, ManifoldModel, ModelKind, Potential};
use crate::numerics::{log_log_slope, minimize_log_scale_multimodal, neg_part, SQRT_2_OVER_PI};
use crate::rng::PathRng;
use crate::simulate::{
    bismut_gradient, fd_gradient, run_killed, run_reflected, Boundary, BismutWeight, FdScheme, GradientEstimate,
    ModelSampler, PathPlan, SimConfig,
};
use crate::spectral::{
    scaling_scan, sup_gradient_refined, project, BandConvention, BoundaryCondition, Domain, Signal, SpectralBasis,
};
use std::f64::consts::PI;

macro_rules! try_or_fail {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Outcome::failed(err.to_string()),
        }
    };
}

pub static REGISTRY: &[Experiment] = &[
    Experiment {
        id: "c2-closed-vs-quadrature",
        description: "closed forms of the C² time integral against quadrature on a K × t grid",
        criterion: Some(1),
        oracle: OracleKind::BruteForce,
        tolerance: Tolerance::Absolute(1e-8),
        run: c2_closed_vs_quadrature,
    },
    Experiment {
        id: "cor-min-consistency",
        description: "minimized C² constants against numerical minimization over t on 100 random instances",
        criterion: Some(2),
        oracle: OracleKind::BruteForce,
        tolerance: Tolerance::Relative(1e-6),
        run: cor_min_consistency,
    },
    Experiment {
        id: "thm1-euclid-indicator",
        description: "Bismut estimate of |dP_1 1_{x>0}|(0) on the line against the Gaussian value and the curvature bound",
        criterion: Some(3),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: thm1_euclid_indicator,
    },
    Experiment {
        id: "thm2-halfspace-fd",
        description: "finite-difference Dirichlet gradients on the half-line against the boundary bound",
        criterion: Some(4),
        oracle: OracleKind::McCrossCheck,
        tolerance: Tolerance::StandardErrors(3.0),
        run: thm2_halfspace_fd,
    },
    Experiment {
        id: "thm2-interval-fd",
        description: "finite-difference Dirichlet gradients on [0, π] against the boundary bound",
        criterion: Some(4),
        oracle: OracleKind::McCrossCheck,
        tolerance: Tolerance::StandardErrors(3.0),
        run: thm2_interval_fd,
    },
    Experiment {
        id: "psi-halfspace-equality",
        description: "|dψ(t,·)|(0) = √(2/(πt)) on the half-line by one-sided differences",
        criterion: Some(4),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(2.0),
        run: psi_halfspace_equality,
    },
    Experiment {
        id: "thm3-interval-neumann",
        description: "reflected Bismut gradient of cos on [0, π] against the Neumann bound",
        criterion: Some(5),
        oracle: OracleKind::McCrossCheck,
        tolerance: Tolerance::StandardErrors(3.0),
        run: thm3_interval_neumann,
    },
    Experiment {
        id: "cor-est-convex-reduction",
        description: "explicit conformal-factor bounds with σ = 0 reduce to the convex-boundary formula",
        criterion: Some(5),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Relative(1e-10),
        run: cor_est_convex_reduction,
    },
    Experiment {
        id: "eigen-interval-dirichlet",
        description: "‖du‖∞/‖u‖∞ = 1 for sin on [0, π] against the Dirichlet eigenfunction bound",
        criterion: Some(6),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: eigen_interval_dirichlet,
    },
    Experiment {
        id: "eigen-interval-neumann",
        description: "‖du‖∞/‖u‖∞ = 1 for cos on [0, π] against the minimized C² constant",
        criterion: Some(6),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: eigen_interval_neumann,
    },
    Experiment {
        id: "eigen-sphere",
        description: "‖du‖∞/‖u‖∞ = 1 for the height function on S² against the eigenfunction bound",
        criterion: Some(6),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: eigen_sphere,
    },
    Experiment {
        id: "eigen-printed-discrepancy",
        description: "numerical infimum of the eigenfunction envelope against its stationary-point and printed closed forms",
        criterion: Some(6),
        oracle: OracleKind::BruteForce,
        tolerance: Tolerance::Relative(1e-8),
        run: eigen_printed_discrepancy,
    },
    Experiment {
        id: "iso-interval",
        description: "explicit isoperimetric lower bounds on [0, π] against the exact Cheeger constants",
        criterion: Some(7),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: iso_interval,
    },
    Experiment {
        id: "spectral-interval-dirichlet",
        description: "band sup-norm scaling on [0, π] Dirichlet for λ = 1..64 and the gradient chain",
        criterion: Some(8),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Absolute(0.1),
        run: spectral_interval_dirichlet,
    },
    Experiment {
        id: "q-norm-pathwise",
        description: "‖Q_s‖ ≤ e^{K⁻s/2}(1 + 10dt) along 10³ paths per model",
        criterion: Some(9),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: q_norm_pathwise,
    },
    Experiment {
        id: "reflected-conservation",
        description: "reflected runs keep P_t 1 ≡ 1 exactly",
        criterion: Some(9),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: reflected_conservation,
    },
    Experiment {
        id: "weak-order-euclid",
        description: "weak error of the Euler scheme for an Ornstein-Uhlenbeck mean halves with dt",
        criterion: Some(9),
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Absolute(0.3),
        run: weak_order_euclid,
    },
    Experiment {
        id: "deterministic-replay",
        description: "same seed and config reproduce estimates bit-exactly across thread counts",
        criterion: Some(9),
        oracle: OracleKind::BruteForce,
        tolerance: Tolerance::Exact,
        run: deterministic_replay,
    },
    Experiment {
        id: "oracle-cross-checks",
        description: "every closed-form oracle against an independent second evaluation",
        criterion: None,
        oracle: OracleKind::BruteForce,
        tolerance: Tolerance::Absolute(1e-7),
        run: oracle_cross_checks,
    },
    Experiment {
        id: "killed-survival-halfspace",
        description: "killed half-line survival ψ(1, 0.5) against 2Φ(0.5) − 1",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: killed_survival_halfspace,
    },
    Experiment {
        id: "local-time-halfspace",
        description: "mean boundary local time from 0 against √(2t/π)",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: local_time_halfspace,
    },
    Experiment {
        id: "interval-eigen-evolution",
        description: "killed and reflected semigroups of sin and cos on [0, π] against e^{−t/2}",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: interval_eigen_evolution,
    },
    Experiment {
        id: "bismut-thm1-models",
        description: "Bismut gradients of indicators on flat, spherical and hyperbolic models against the curvature bound",
        criterion: None,
        oracle: OracleKind::McCrossCheck,
        tolerance: Tolerance::StandardErrors(3.0),
        run: bismut_thm1_models,
    },
    Experiment {
        id: "bismut-constant-payoff",
        description: "the Bismut weight has mean zero",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: bismut_constant_payoff,
    },
    Experiment {
        id: "bismut-sphere-eigen",
        description: "|dP_t z| = e^{−t} at the equator of S²",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: bismut_sphere_eigen,
    },
    Experiment {
        id: "bismut-fd-euclid",
        description: "Bismut and finite-difference gradients of sin on the line agree with each other and the oracle",
        criterion: None,
        oracle: OracleKind::McCrossCheck,
        tolerance: Tolerance::StandardErrors(3.0),
        run: bismut_fd_euclid,
    },
    Experiment {
        id: "bismut-neumann-oracle",
        description: "reflected Bismut gradient of cos on [0, π] against −e^{−t/2} sin x",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::StandardErrors(3.0),
        run: bismut_neumann_oracle,
    },
    Experiment {
        id: "c2-eigen-chain",
        description: "first eigenfunctions of the circle and of [0, π] against the δ = 1 C² estimates",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Exact,
        run: c2_eigen_chain,
    },
    Experiment {
        id: "spectral-neumann-and-circle",
        description: "gradient chain and scaling on [0, π] Neumann and on the circle",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Absolute(0.1),
        run: spectral_neumann_and_circle,
    },
    Experiment {
        id: "spectral-eigenvalue-convention",
        description: "scaling slopes when bands are taken in eigenvalue rather than frequency",
        criterion: None,
        oracle: OracleKind::ClosedForm,
        tolerance: Tolerance::Absolute(0.1),
        run: spectral_eigenvalue_convention,
    },
];

fn interval_pi() -> ManifoldModel {
    ManifoldModel::interval(PI).expect("valid interval")
}

fn pack_alpha0(m: &ManifoldModel) -> f64 {
    let p = m.curvature_bounds().expect("catalogue pack");
    alpha0(p.theta_h, p.k_0, m.dim(), p.z_sup)
}

fn c2_closed_vs_quadrature(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for ki in -10..=10 {
        let k = ki as f64 * 0.5;
        for ti in 0..=40 {
            let t = 1e-3 * 1e4f64.powf(ti as f64 / 40.0);
            for (u, lu) in [(0.0, 1.0), (1.0, 1.0)] {
                let b = try_or_fail!(c2_bound(k, t, u, lu));
                let q = b.detail("quadrature").unwrap_or(f64::NAN);
                worst = worst.max((b.value - q).abs() / q.abs().max(1.0));
                count += 1;
            }
        }
    }
    let mut o = Outcome::default();
    o.push(Check::at_most("max discrepancy", worst, 1e-8, None, 0.0)).note("evaluations", count as f64);
    o
}

fn cor_min_consistency(ctx: &Context) -> Outcome {
    let mut rng = PathRng::new(ctx.seed, 0);
    let mut worst: f64 = 0.0;
    let mut cases = [0usize; 4];
    for _ in 0..100 {
        let k = -5.0 + 10.0 * rng.uniform();
        let u = 0.05 + 5.0 * rng.uniform();
        let lu = 0.05 + 5.0 * rng.uniform();
        let b = try_or_fail!(c2_bound_minimized(k, u, lu));
        let scale = u / lu;
        let m = minimize_log_scale_multimodal(
            |t| c2_bound(k, t, u, lu).map(|r| r.value).unwrap_or(f64::INFINITY),
            1e-9 * scale,
            1e6 * scale,
            1e-12,
        );
        worst = worst.max(((b.value - m.value) / m.value).abs());
        if let Some(c) = b.detail("case") {
            cases[c as usize - 1] += 1;
        }
    }
    let mut o = Outcome::default();
    o.push(Check::at_most("max relative error", worst, 1e-6, None, 0.0));
    for (i, n) in cases.iter().enumerate() {
        o.note(format!("case {}", i + 1), *n as f64);
    }
    o
}

fn thm1_euclid_indicator(ctx: &Context) -> Outcome {
    let m = ManifoldModel::euclidean(1).expect("valid model");
    let cfg = SimConfig::new(1.0, 1.0, ctx.paths(100_000), ctx.seed);
    let g = try_or_fail!(bismut_gradient(&m, &cfg, &[0.0], 0.0, |x| (x[0] > 0.0) as u8 as f64));
    let exact = oracles::gaussian_indicator_gradient(0.0, 1.0);
    let bound = try_or_fail!(grad_bound_closed(0.0, 1.0)).value;
    let mut o = Outcome::default();
    o.push(Check::within_se("oracle", g.mean[0], exact, g.se[0], 3.0))
        .push(Check::at_most("curvature bound", g.mean[0].abs(), bound, Some(g.se[0]), 3.0))
        .note("slack factor", bound / g.mean[0].abs())
        .note("paths", g.n as f64);
    o
}

fn dirichlet_fd_checks(
    o: &mut Outcome,
    ctx: &Context,
    model: &ManifoldModel,
    dt: Option<f64>,
    paths: usize,
    oracle: &dyn Fn(&str, f64) -> f64,
) {
    let a0 = pack_alpha0(model);
    let x = 0.1;
    let eps = 0.05;
    for &t in &[0.25, 1.0, 4.0] {
        let bound = match dirichlet_grad_bound(0.0, a0, t) {
            Ok(b) => b.value,
            Err(e) => {
                o.error = Some(e.to_string());
                return;
            }
        };
        for (name, payoff) in [("1", (|_: &[f64]| 1.0) as fn(&[f64]) -> f64), ("sin", |x: &[f64]| x[0].sin())] {
            let cfg = SimConfig::new(dt.unwrap_or(t), t, paths, ctx.seed);
            let sampler = ModelSampler::new(model.clone(), cfg, Boundary::Killed, payoff);
            let label = format!("u={name} t={t}");
            match fd_gradient(&sampler, &[x], eps, FdScheme::Central, true, ctx.sub_seed(&label)) {
                Ok(g) => {
                    o.push(Check::at_most(label.clone(), g.norm, bound, Some(g.norm_se), 3.0));
                    let exact = oracle(name, t);
                    o.note(format!("{label} exact"), exact).note(format!("{label} z"), (g.mean[0] - exact).abs() / g.se[0]);
                }
                Err(e) => {
                    o.error = Some(e.to_string());
                    return;
                }
            }
        }
    }
}

fn thm2_halfspace_fd(ctx: &Context) -> Outcome {
    let m = ManifoldModel::half_space(1).expect("valid model");
    let mut o = Outcome::default();
    // Bridge-corrected killing is exact on the half-line, so one step per run.
    dirichlet_fd_checks(&mut o, ctx, &m, None, ctx.paths(200_000), &|u, t| match u {
        "1" => oracles::half_line_survival_gradient(0.1, t),
        // sin is odd, so killing at 0 leaves the free evolution unchanged.
        _ => (-0.5 * t).exp() * 0.1f64.cos(),
    });
    o
}

fn thm2_interval_fd(ctx: &Context) -> Outcome {
    let m = interval_pi();
    let heat = IntervalHeat::new(PI, true);
    let mut o = Outcome::default();
    dirichlet_fd_checks(&mut o, ctx, &m, Some(1.0 / 64.0), ctx.paths(50_000), &|u, t| match u {
        "1" => heat.gradient(IntervalPayoff::One, 0.1, t),
        _ => heat.gradient(IntervalPayoff::Mode(1), 0.1, t),
    });
    o
}

fn psi_halfspace_equality(ctx: &Context) -> Outcome {
    let m = ManifoldModel::half_space(1).expect("valid model");
    let eps = 0.02;
    let mut o = Outcome::default();
    for &t in &[0.25, 1.0, 4.0] {
        let cfg = SimConfig::new(t, t, ctx.paths(1_000_000), ctx.seed);
        let sampler = ModelSampler::new(m.clone(), cfg, Boundary::Killed, |_| 1.0);
        let g = try_or_fail!(fd_gradient(&sampler, &[0.0], eps, FdScheme::Forward, true, ctx.sub_seed(&format!("t={t}"))));
        let exact = (2.0 / (PI * t)).sqrt();
        let bound = try_or_fail!(dirichlet_grad_bound(0.0, 0.0, t)).value;
        o.push(Check::within_se(format!("t={t}"), g.mean[0], exact, g.se[0], 2.0))
            .note(format!("t={t} relative se"), g.se[0] / exact)
            .note(format!("t={t} difference-quotient bias"), (oracles::half_line_survival(eps, t) / eps - exact) / exact)
            .note(format!("t={t} boundary bound"), bound);
    }
    o
}

fn thm3_interval_neumann(ctx: &Context) -> Outcome {
    let m = interval_pi();
    let pack = m.curvature_bounds().expect("catalogue pack");
    let mut o = Outcome::default();
    let x = PI / 2.0;
    for &t in &[0.5, 1.0, 2.0] {
        let cfg = SimConfig::new(0.01, t, ctx.paths(50_000), ctx.sub_seed(&format!("t={t}")));
        let g = try_or_fail!(bismut_gradient(&m, &cfg, &[x], pack.k_z, |y| y[0].cos()));
        let bound = try_or_fail!(neumann_grad_bound(pack.k_z, 1.0, t)).value;
        let exact = (-0.5 * t).exp();
        o.push(Check::at_most(format!("t={t}"), g.norm, bound, Some(g.norm_se), 3.0))
            .note(format!("t={t} exact"), exact)
            .note(format!("t={t} z"), (g.norm - exact).abs() / g.norm_se);
    }
    o
}

fn cor_est_convex_reduction(_: &Context) -> Outcome {
    let base = interval_pi().curvature_bounds().expect("catalogue pack");
    let mut worst: f64 = 0.0;
    let mut printed_gap: f64 = 0.0;
    for k_z in [-2.0, -0.5, 0.0, 1.0] {
        let pack = CurvatureBounds { k_z, sigma: 0.0, ..base };
        for (s, t) in [(0.1, 0.5), (0.5, 0.5), (1.0, 2.0), (2.0, 3.0)] {
            let n = try_or_fail!(neumann_explicit_bound(&pack, 1, s, t));
            let convex = (2.0 / (PI * s)).sqrt() * (0.5 * neg_part(k_z) * s).exp();
            worst = worst.max((n.a.value - convex).abs() / convex);
            worst = worst.max((n.k_phi - k_z).abs());
            worst = worst.max((n.phi_sup_estimate - 1.0).abs());
            let tt: f64 = t.min(1.0);
            let convex_b = (2.0 * 1f64.exp() / (PI * tt)).sqrt() * neg_part(k_z).max(1.0).sqrt();
            worst = worst.max((n.b.value - convex_b).abs() / convex_b);
            printed_gap = printed_gap.max((n.b.value - n.b_printed).abs());
        }
    }
    let mut o = Outcome::default();
    o.push(Check::at_most("max relative deviation", worst, 1e-10, None, 0.0))
        .push(Check::at_most("printed variant gap", printed_gap, 1e-12, None, 0.0));
    o
}

fn eigen_interval_dirichlet(_: &Context) -> Outcome {
    let m = interval_pi();
    let b = try_or_fail!(dirichlet_eigen_bound(1.0, 0.0, pack_alpha0(&m)));
    let mut o = Outcome::default();
    o.push(Check::at_most("sin", 1.0, b.value, None, 0.0))
        .note("at reference time", b.detail("at_reference_time").unwrap_or(f64::NAN))
        .note("printed", b.detail("printed").unwrap_or(f64::NAN));
    o
}

fn eigen_interval_neumann(_: &Context) -> Outcome {
    // cos on [0, π]: ‖u‖∞ = ‖Δu‖∞ = 1.
    let b = try_or_fail!(c2_bound_minimized(0.0, 1.0, 1.0));
    let mut o = Outcome::default();
    o.push(Check::at_most("cos", 1.0, b.value, None, 0.0))
        .note("squared", b.detail("squared").unwrap_or(f64::NAN));
    o
}

fn eigen_sphere(_: &Context) -> Outcome {
    let m = ManifoldModel::sphere(2, 1.0).expect("valid model");
    let km = neg_part(m.curvature_bounds().expect("catalogue pack").k_z);
    let b = try_or_fail!(eigen_grad_bound(2.0, km));
    let mut o = Outcome::default();
    o.push(Check::at_most("height function", oracles::sphere_height_ratio(), b.value, None, 0.0));
    o
}

fn eigen_printed_discrepancy(_: &Context) -> Outcome {
    let mut o = Outcome::default();
    for (lambda, k) in [(3.0, 2.0), (1.0, 1.0), (2.0, 0.5)] {
        let b = try_or_fail!(eigen_grad_bound(lambda, k));
        let stationary = eigen_grad_bound_stationary(lambda, k);
        let printed = b.detail("printed").unwrap_or(f64::NAN);
        let label = format!("λ={lambda} K={k}");
        o.push(Check::close(label.clone(), b.value, stationary, 1e-8 * stationary, None))
            .note(format!("{label} printed"), printed)
            .note(format!("{label} printed/infimum"), printed / b.value);
    }
    o
}

fn iso_interval(_: &Context) -> Outcome {
    let m = interval_pi();
    let pack = m.curvature_bounds().expect("catalogue pack");
    let kp = try_or_fail!(k_phi(&pack, 1));
    let iso = try_or_fail!(iso_explicit(&pack, 1, 1.0, kp, 1.0));
    let (kd, kn) = oracles::interval_cheeger(PI);
    let mut o = Outcome::default();
    o.push(Check::at_most("Dirichlet", iso.kappa_d, kd, None, 0.0))
        .push(Check::at_most("Neumann", iso.kappa_n, kn, None, 0.0));
    o
}

fn slope_checks(o: &mut Outcome, label: &str, s: &crate::spectral::ScalingScan, expect: [f64; 3]) {
    o.push(Check::close(format!("{label} sup slope"), s.slope_sup, expect[0], 0.1, None))
        .push(Check::close(format!("{label} gradient slope"), s.slope_gradient, expect[1], 0.1, None))
        .push(Check::close(format!("{label} Laplacian slope"), s.slope_laplacian, expect[2], 0.1, None))
        .push(Check::flag(format!("{label} chain"), s.chain_holds));
}

fn spectral_interval_dirichlet(_: &Context) -> Outcome {
    let domain = Domain::Interval { length: PI, bc: BoundaryCondition::Dirichlet };
    let basis = try_or_fail!(SpectralBasis::new(domain, 66.0));
    let lambdas: Vec<f64> = (1..=64).map(|l| l as f64).collect();
    let s = try_or_fail!(scaling_scan(&basis, &Signal::flat(), &lambdas, BandConvention::Frequency, 10_001));
    let mut o = Outcome::default();
    slope_checks(&mut o, "Dirichlet", &s, [0.0, 1.0, 2.0]);
    let top = try_or_fail!(project(&basis, &Signal::flat(), 64.0, BandConvention::Frequency));
    let r = sup_gradient_refined(&top, 10_001);
    o.push(Check::at_most("grid refinement", r.relative_change, 1e-3, None, 0.0))
        .note("display chain holds", s.rows.iter().all(|r| r.gradient_sup <= r.chain.display) as u8 as f64)
        .note("max gradient/chain ratio", s.rows.iter().map(|r| r.gradient_sup / r.chain.bound).fold(0.0, f64::max));
    o
}

fn q_norm_pathwise(ctx: &Context) -> Outcome {
    let models = [
        ManifoldModel::euclidean(2),
        ManifoldModel::sphere(2, 1.0),
        ManifoldModel::hyperbolic(2, 1.0),
        ManifoldModel::sphere(2, 1.0)
            .and_then(|m| m.with_drift(DriftSpec::Gradient { potential: Potential::Height { coefficient: 0.5 } })),
        ManifoldModel::euclidean(2).and_then(|m| {
            m.with_drift(DriftSpec::Gradient { potential: Potential::Quadratic { strength: -1.0, center: vec![0.0, 0.0] } })
        }),
    ];
    let mut o = Outcome::default();
    for m in models {
        let m = try_or_fail!(m);
        let km = neg_part(try_or_fail!(m.curvature_bounds()).k_z);
        let x0 = match m.kind() {
            ModelKind::Sphere { .. } => vec![0.0, 0.0, 1.0],
            ModelKind::Hyperbolic { .. } => vec![0.0, 1.0],
            _ => vec![0.0, 0.0],
        };
        let cfg = SimConfig::new(0.01, 1.0, 1000, ctx.seed);
        let plan = PathPlan::new(&m, &cfg, Boundary::Free).with_weight(BismutWeight { k: 0.0, t: 1.0 });
        let mut worst: f64 = 0.0;
        for i in 0..cfg.paths as u64 {
            plan.simulate(&x0, i, |s| {
                let op = s.q.clone().svd(false, false).singular_values.max();
                worst = worst.max(op / ((0.5 * km * s.time).exp() * (1.0 + 10.0 * cfg.dt)));
            });
        }
        o.push(Check::at_most(m.name(), worst, 1.0, None, 0.0));
    }
    o
}

fn reflected_conservation(ctx: &Context) -> Outcome {
    let mut o = Outcome::default();
    for m in [ManifoldModel::half_space(2), ManifoldModel::ball(3, 1.0), ManifoldModel::interval(1.0)] {
        let m = try_or_fail!(m);
        let x0 = vec![0.2; m.coord_dim()];
        let cfg = SimConfig::new(0.01, 1.0, ctx.paths(5_000), ctx.seed);
        let r = try_or_fail!(run_reflected(&m, &cfg, &x0, |_| 1.0));
        o.push(Check::at_most(m.name(), (r.semigroup.mean - 1.0).abs() + r.semigroup.se, 0.0, None, 0.0));
    }
    o
}

fn weak_order_euclid(ctx: &Context) -> Outcome {
    let m = try_or_fail!(ManifoldModel::euclidean(1).and_then(|m| {
        m.with_drift(DriftSpec::Gradient { potential: Potential::Quadratic { strength: 1.0, center: vec![0.0] } })
    }));
    let x0 = 10.0;
    let exact = x0 * (-0.5f64).exp();
    let dts = [0.25, 0.125, 0.0625, 0.03125];
    let mut errors = Vec::new();
    let mut o = Outcome::default();
    for &dt in &dts {
        let cfg = SimConfig::new(dt, 1.0, ctx.paths(200_000), ctx.sub_seed(&format!("dt={dt}")));
        let e = try_or_fail!(crate::simulate::run_free(&m, &cfg, &[x0], |x| x[0]));
        errors.push((e.mean - exact).abs());
        o.note(format!("dt={dt} error"), e.mean - exact).note(format!("dt={dt} se"), e.se);
    }
    let slope = log_log_slope(&dts, &errors);
    o.push(Check::close("log-log slope", slope, 1.0, 0.3, None));
    o
}

fn deterministic_replay(ctx: &Context) -> Outcome {
    let sphere = try_or_fail!(ManifoldModel::sphere(2, 1.0));
    let interval = interval_pi();
    let cfg = SimConfig::new(0.02, 1.0, 2000, ctx.seed);
    let run = || {
        let g = bismut_gradient(&sphere, &cfg, &[1.0, 0.0, 0.0], 1.0, |x| x[2]).map(|g| bits(&g));
        let k = run_killed(&interval, &cfg, &[1.0], |x| x[0].sin())
            .map(|k| vec![k.semigroup.mean.to_bits(), k.semigroup.se.to_bits(), k.survival.mean.to_bits()]);
        (g, k)
    };
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| e.to_string());
    let one = try_or_fail!(pool(1)).install(run);
    let four = try_or_fail!(pool(4)).install(run);
    let again = run();
    let mut o = Outcome::default();
    o.push(Check::flag("one vs four threads", one == four)).push(Check::flag("replay", one == again));
    o
}

fn bits(g: &GradientEstimate) -> Vec<u64> {
    g.mean.iter().chain(&g.se).chain([&g.norm, &g.norm_se]).map(|v| v.to_bits()).collect()
}

fn oracle_cross_checks(_: &Context) -> Outcome {
    let mut o = Outcome::default();
    for c in oracles::cross_checks() {
        let tol = if c.name.ends_with("gradient") { 1e-7 } else { 1e-9 };
        o.push(Check::close(c.name, c.second_method, c.closed_form, tol, None));
    }
    o
}

fn killed_survival_halfspace(ctx: &Context) -> Outcome {
    let m = try_or_fail!(ManifoldModel::half_space(1));
    let cfg = SimConfig::new(0.1, 1.0, ctx.paths(100_000), ctx.seed);
    let k = try_or_fail!(run_killed(&m, &cfg, &[0.5], |_| 1.0));
    let mut o = Outcome::default();
    o.push(Check::within_se("ψ(1, 0.5)", k.survival.mean, oracles::half_line_survival(0.5, 1.0), k.survival.se, 3.0));
    let edge = try_or_fail!(run_killed(&m, &SimConfig::new(0.1, 1.0, 1000, ctx.seed), &[0.0], |_| 1.0));
    o.push(Check::close("ψ(1, 0)", edge.survival.mean, 0.0, 0.0, None));
    o
}

fn local_time_halfspace(ctx: &Context) -> Outcome {
    let m = try_or_fail!(ManifoldModel::half_space(1));
    let mut o = Outcome::default();
    for &t in &[0.5, 2.0] {
        let cfg = SimConfig::new(0.05, t, ctx.paths(100_000), ctx.sub_seed(&format!("t={t}")));
        let r = try_or_fail!(run_reflected(&m, &cfg, &[0.0], |_| 1.0));
        o.push(Check::within_se(format!("t={t}"), r.local_time.mean, (2.0 * t / PI).sqrt(), r.local_time.se, 3.0));
    }
    o
}

fn interval_eigen_evolution(ctx: &Context) -> Outcome {
    let m = interval_pi();
    let mut o = Outcome::default();
    for &x in &[0.4, 1.0, 2.5] {
        let cfg = SimConfig::new(0.01, 1.0, ctx.paths(50_000), ctx.sub_seed(&format!("x={x}")));
        let k = try_or_fail!(run_killed(&m, &cfg, &[x], |y| y[0].sin()));
        o.push(Check::within_se(format!("Dirichlet x={x}"), k.semigroup.mean, (-0.5f64).exp() * x.sin(), k.semigroup.se, 3.0));
        let r = try_or_fail!(run_reflected(&m, &cfg, &[x], |y| y[0].cos()));
        o.push(Check::within_se(format!("Neumann x={x}"), r.semigroup.mean, (-0.5f64).exp() * x.cos(), r.semigroup.se, 3.0));
    }
    o
}

fn bismut_thm1_models(ctx: &Context) -> Outcome {
    let t = 1.0;
    type Case = (ManifoldModel, Vec<f64>, fn(&[f64]) -> f64);
    let cases: Vec<Case> = vec![
        (ManifoldModel::euclidean(2).expect("valid"), vec![0.0, 0.0], |x| (x[0] > 0.0) as u8 as f64),
        (ManifoldModel::sphere(2, 1.0).expect("valid"), vec![1.0, 0.0, 0.0], |x| (x[2] > 0.0) as u8 as f64),
        (ManifoldModel::hyperbolic(2, 1.0).expect("valid"), vec![0.0, 1.0], |x| (x[0] > 0.0) as u8 as f64),
    ];
    let mut o = Outcome::default();
    for (m, x0, u) in cases {
        let k = try_or_fail!(m.curvature_bounds()).k_z;
        let dt = if m.is_flat() { 1.0 } else { 0.02 };
        let cfg = SimConfig::new(dt, t, ctx.paths(20_000), ctx.sub_seed(&m.name()));
        let g = try_or_fail!(bismut_gradient(&m, &cfg, &x0, k, u));
        let bound = try_or_fail!(grad_bound_closed(k, t)).value;
        o.push(Check::at_most(m.name(), g.norm, bound, Some(g.norm_se), 3.0));
    }
    o
}

fn bismut_constant_payoff(ctx: &Context) -> Outcome {
    let m = try_or_fail!(ManifoldModel::sphere(2, 1.0));
    let cfg = SimConfig::new(0.02, 1.0, ctx.paths(20_000), ctx.seed);
    let g = try_or_fail!(bismut_gradient(&m, &cfg, &[0.0, 0.0, 1.0], 1.0, |_| 1.0));
    let mut o = Outcome::default();
    for (i, (mean, se)) in g.mean.iter().zip(&g.se).enumerate() {
        if *se > 0.0 {
            o.push(Check::within_se(format!("component {i}"), *mean, 0.0, *se, 3.0));
        }
    }
    o
}

fn bismut_sphere_eigen(ctx: &Context) -> Outcome {
    let m = try_or_fail!(ManifoldModel::sphere(2, 1.0));
    let mut o = Outcome::default();
    for &t in &[0.5, 1.0] {
        let cfg = SimConfig::new(0.005, t, ctx.paths(20_000), ctx.sub_seed(&format!("t={t}")));
        let g = try_or_fail!(bismut_gradient(&m, &cfg, &[1.0, 0.0, 0.0], 1.0, |x| x[2]));
        o.push(Check::within_se(format!("t={t}"), g.norm, (-t).exp(), g.norm_se, 3.0));
    }
    o
}

fn bismut_fd_euclid(ctx: &Context) -> Outcome {
    let m = try_or_fail!(ManifoldModel::euclidean(1));
    let (x, t) = (0.3, 1.0);
    let cfg = SimConfig::new(1.0, t, ctx.paths(100_000), ctx.seed);
    let b = try_or_fail!(bismut_gradient(&m, &cfg, &[x], 0.0, |y| y[0].sin()));
    let sampler = ModelSampler::new(m, cfg.clone(), Boundary::Free, |y: &[f64]| y[0].sin());
    let eps = 0.05;
    let f = try_or_fail!(fd_gradient(&sampler, &[x], eps, FdScheme::Central, true, ctx.sub_seed("fd")));
    let exact = (-0.5 * t).exp() * x.cos();
    // Central differences of sin carry the factor sin(ε)/ε.
    let fd_exact = exact * eps.sin() / eps;
    let joint = b.se[0].hypot(f.se[0]);
    let mut o = Outcome::default();
    o.push(Check::within_se("bismut vs oracle", b.mean[0], exact, b.se[0], 3.0))
        .push(Check::within_se("fd vs oracle", f.mean[0], fd_exact, f.se[0], 3.0))
        .push(Check::within_se("bismut vs fd", b.mean[0], f.mean[0], joint, 3.0 + (exact - fd_exact).abs() / joint));
    o
}

fn bismut_neumann_oracle(ctx: &Context) -> Outcome {
    let m = interval_pi();
    let mut o = Outcome::default();
    for &(x, t) in &[(1.0, 1.0), (0.3, 0.5)] {
        let cfg = SimConfig::new(0.01, t, ctx.paths(50_000), ctx.sub_seed(&format!("x={x} t={t}")));
        let g = try_or_fail!(bismut_gradient(&m, &cfg, &[x], 0.0, |y| y[0].cos()));
        o.push(Check::within_se(format!("x={x} t={t}"), g.mean[0], -(-0.5 * t).exp() * x.sin(), g.se[0], 3.0));
    }
    o
}

fn c2_eigen_chain(_: &Context) -> Outcome {
    let pack = interval_pi().curvature_bounds().expect("catalogue pack");
    let simple = try_or_fail!(c2_bound_simple(0.0, 1.0, 1.0, 1.0));
    let neumann = try_or_fail!(c2_neumann_bound(0.0, 1.0, 1.0, 1.0, 1.0));
    let explicit = try_or_fail!(c2_neumann_explicit(&pack, 1, 1.0, 1.0, 1.0));
    let mut o = Outcome::default();
    o.push(Check::at_most("circle cos", 1.0, simple.value, None, 0.0))
        .push(Check::at_most("interval cos, Neumann", 1.0, neumann.value, None, 0.0))
        .push(Check::at_most("interval cos, explicit φ", 1.0, explicit.value, None, 0.0))
        .note("2√(2/π)", 2.0 * SQRT_2_OVER_PI);
    o
}

fn spectral_neumann_and_circle(_: &Context) -> Outcome {
    let lambdas: Vec<f64> = (1..=32).map(|l| l as f64).collect();
    let mut o = Outcome::default();
    for (label, domain) in [
        ("Neumann", Domain::Interval { length: PI, bc: BoundaryCondition::Neumann }),
        ("circle", Domain::Circle { length: 2.0 * PI }),
    ] {
        let basis = try_or_fail!(SpectralBasis::new(domain, 34.0));
        let s = try_or_fail!(scaling_scan(&basis, &Signal::flat(), &lambdas, BandConvention::Frequency, 10_001));
        slope_checks(&mut o, label, &s, [0.0, 1.0, 2.0]);
    }
    o
}

fn spectral_eigenvalue_convention(_: &Context) -> Outcome {
    let domain = Domain::Interval { length: PI, bc: BoundaryCondition::Dirichlet };
    let basis = try_or_fail!(SpectralBasis::new(domain, 66.0));
    let lambdas: Vec<f64> = (1..=64).map(|l| l as f64).collect();
    let s = try_or_fail!(scaling_scan(&basis, &Signal::flat(), &lambdas, BandConvention::Eigenvalue, 10_001));
    let mut o = Outcome::default();
    // With μ² ∈ [λ, λ+1) only perfect squares give bands and ‖dχ‖ ~ √λ.
    slope_checks(&mut o, "eigenvalue bands", &s, [0.0, 0.5, 1.0]);
    o.note("nonempty bands", s.rows.iter().filter(|r| r.band_size > 0).count() as f64);
    o
}
