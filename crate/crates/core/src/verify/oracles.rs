//! Closed-form ground truth, each with an independent second evaluation.
//!
//! All semigroups are generated by `½Δ`.

use crate::numerics::{adaptive_simpson, normal_cdf, normal_pdf};
use std::f64::consts::PI;

/// `P_t 1_{x>0}(x) = Φ(x/√t)` on the line.
pub fn gaussian_indicator(x: f64, t: f64) -> f64 {
    normal_cdf(x / t.sqrt())
}

/// `d/dx Φ(x/√t)`.
pub fn gaussian_indicator_gradient(x: f64, t: f64) -> f64 {
    normal_pdf(x / t.sqrt()) / t.sqrt()
}

/// `P_t sin(x) = e^{−t/2} sin x` on the line.
pub fn gaussian_sine(x: f64, t: f64) -> f64 {
    (-0.5 * t).exp() * x.sin()
}

/// Survival probability `ψ(t, x) = 2Φ(x/√t) − 1` on the half-line.
pub fn half_line_survival(x: f64, t: f64) -> f64 {
    2.0 * normal_cdf(x / t.sqrt()) - 1.0
}

pub fn half_line_survival_gradient(x: f64, t: f64) -> f64 {
    2.0 * normal_pdf(x / t.sqrt()) / t.sqrt()
}

// Adaptive Simpson on equal panels, so narrow peaks are always sampled.
fn paneled(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels).map(|k| adaptive_simpson(&f, a + k as f64 * w, a + (k + 1) as f64 * w, tol / panels as f64)).sum()
}

fn heat_kernel(z: f64, t: f64) -> f64 {
    normal_pdf(z / t.sqrt()) / t.sqrt()
}

/// Sine and cosine series on `[0, L]` with `e^{−μ_j² t/2}` damping, summed
/// until an explicit geometric bound on the remainder drops below `1e−12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalHeat {
    pub length: f64,
    pub dirichlet: bool,
}

/// Coefficients of a payoff in the normalized eigenbasis, plus a bound on
/// their size used for the remainder estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntervalPayoff {
    One,
    /// `sin(kπx/L)` or `cos(kπx/L)` matching the boundary condition.
    Mode(usize),
}

impl IntervalHeat {
    pub fn new(length: f64, dirichlet: bool) -> Self {
        Self { length, dirichlet }
    }

    fn mu(&self, j: usize) -> f64 {
        j as f64 * PI / self.length
    }

    // Unnormalized series coefficient a_j with u = Σ a_j sin/cos(μ_j x).
    fn amplitude(&self, u: IntervalPayoff, j: usize) -> f64 {
        match (u, self.dirichlet) {
            (IntervalPayoff::One, true) => {
                if j % 2 == 1 {
                    4.0 / (j as f64 * PI)
                } else {
                    0.0
                }
            }
            (IntervalPayoff::One, false) => (j == 0) as u8 as f64,
            (IntervalPayoff::Mode(k), _) => (j == k) as u8 as f64,
        }
    }

    fn series(&self, u: IntervalPayoff, x: f64, t: f64, derivative: bool) -> f64 {
        let start = if self.dirichlet { 1 } else { 0 };
        let mut sum = 0.0;
        let mut j = start;
        loop {
            let mu = self.mu(j);
            let a = self.amplitude(u, j);
            if a != 0.0 {
                let damp = (-0.5 * mu * mu * t).exp();
                let (s, c) = (mu * x).sin_cos();
                sum += a
                    * damp
                    * match (self.dirichlet, derivative) {
                        (true, false) => s,
                        (true, true) => mu * c,
                        (false, false) => c,
                        (false, true) => -mu * s,
                    };
            }
            // Remainder after j: |a| ≤ 4/π, factor μ for derivatives, and
            // μ_i² ≥ μ_{j+1}μ_i for i > j gives a geometric majorant.
            let next = self.mu(j + 1);
            let ratio = (-0.5 * next * (PI / self.length) * t).exp();
            let first = (-0.5 * next * next * t).exp() * if derivative { next + 1.0 } else { 1.0 };
            let tail = 4.0 / PI * first / (1.0 - ratio) * if derivative { 2.0 } else { 1.0 };
            if matches!(u, IntervalPayoff::Mode(k) if j >= k) || tail < 1e-12 {
                break;
            }
            j += 1;
        }
        sum
    }

    pub fn semigroup(&self, u: IntervalPayoff, x: f64, t: f64) -> f64 {
        self.series(u, x, t, false)
    }

    pub fn gradient(&self, u: IntervalPayoff, x: f64, t: f64) -> f64 {
        self.series(u, x, t, true)
    }

    pub fn payoff(&self, u: IntervalPayoff, x: f64) -> f64 {
        match u {
            IntervalPayoff::One => 1.0,
            IntervalPayoff::Mode(k) if self.dirichlet => (self.mu(k) * x).sin(),
            IntervalPayoff::Mode(k) => (self.mu(k) * x).cos(),
        }
    }

    /// The same semigroup from the method-of-images kernel and quadrature.
    pub fn semigroup_by_images(&self, u: IntervalPayoff, x: f64, t: f64) -> f64 {
        let l = self.length;
        let sign = if self.dirichlet { -1.0 } else { 1.0 };
        let reach = (12.0 * t.sqrt() / (2.0 * l)).ceil() as i64 + 1;
        let kernel = |y: f64| {
            (-reach..=reach)
                .map(|k| {
                    let shift = 2.0 * k as f64 * l;
                    heat_kernel(x - y + shift, t) + sign * heat_kernel(x + y + shift, t)
                })
                .sum::<f64>()
        };
        paneled(|y| kernel(y) * self.payoff(u, y), 0.0, l, 64, 1e-11)
    }
}

/// Cheeger-type constants of `[0, L]`: `κ^D = 2/L` (an interval inside
/// `[0, L]` has two boundary points) and `κ^N = 2/L` (a cut at `L/2`).
pub fn interval_cheeger(length: f64) -> (f64, f64) {
    (2.0 / length, 2.0 / length)
}

/// Brute-force Cheeger constants over unions of at most two subintervals with
/// endpoints on a grid of `n` cells.
pub fn interval_cheeger_brute(length: f64, n: usize) -> (f64, f64) {
    let h = length / n as f64;
    let mut best_d = f64::INFINITY;
    let mut best_n = f64::INFINITY;
    // Each set is given by its endpoint indices a < b (< c < d).
    let mut consider = |pieces: &[(usize, usize)]| {
        let vol: f64 = pieces.iter().map(|(a, b)| (b - a) as f64 * h).sum();
        if vol <= 0.0 {
            return;
        }
        let mut interior = 0usize;
        let mut all = 0usize;
        for &(a, b) in pieces {
            all += 2;
            interior += (a > 0) as usize + (b < n) as usize;
        }
        best_d = best_d.min(all as f64 / vol);
        let rest = length - vol;
        if rest > 0.0 && interior > 0 {
            best_n = best_n.min(interior as f64 / vol.min(rest));
        }
    };
    for a in 0..n {
        for b in a + 1..=n {
            consider(&[(a, b)]);
            for c in b + 1..n {
                for d in (c + 1..=n).step_by(4) {
                    consider(&[(a, b), (c, d)]);
                }
            }
        }
    }
    (best_d, best_n)
}

/// `‖du‖∞/‖u‖∞` for `u = x_{d+1}` on the unit sphere `S^d`: `|du|² = 1 − z²`.
pub fn sphere_height_ratio() -> f64 {
    1.0
}

/// The same ratio from a latitude scan of `√(1 − z²)`.
pub fn sphere_height_ratio_scan(samples: usize) -> f64 {
    (0..=samples)
        .map(|k| {
            let z = -1.0 + 2.0 * k as f64 / samples as f64;
            (1.0 - z * z).max(0.0).sqrt()
        })
        .fold(0.0, f64::max)
}

/// One row of the oracle self-check.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub closed_form: f64,
    pub second_method: f64,
}

impl OracleCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.closed_form - self.second_method).abs()
    }
}

/// Every oracle against its independent evaluation.
pub fn cross_checks() -> Vec<OracleCheck> {
    let mut out = Vec::new();
    for &(x, t) in &[(0.0, 1.0), (0.3, 0.25), (-1.2, 4.0)] {
        out.push(OracleCheck {
            name: "gaussian-indicator",
            closed_form: gaussian_indicator(x, t),
            second_method: 0.5 + paneled(|y| heat_kernel(y, t), 0.0, x, 16, 1e-14),
        });
        let h = 1e-4;
        out.push(OracleCheck {
            name: "gaussian-indicator-gradient",
            closed_form: gaussian_indicator_gradient(x, t),
            second_method: (gaussian_indicator(x + h, t) - gaussian_indicator(x - h, t)) / (2.0 * h),
        });
        out.push(OracleCheck {
            name: "gaussian-sine",
            closed_form: gaussian_sine(x, t),
            second_method: paneled(|z| heat_kernel(z, t) * (x + z).sin(), -12.0 * t.sqrt(), 12.0 * t.sqrt(), 64, 1e-13),
        });
    }
    for &(x, t) in &[(0.5, 1.0), (0.05, 0.25), (2.0, 4.0)] {
        out.push(OracleCheck {
            name: "half-line-survival",
            closed_form: half_line_survival(x, t),
            second_method: paneled(
                |y| heat_kernel(x - y, t) - heat_kernel(x + y, t),
                0.0,
                x + 12.0 * t.sqrt(),
                64,
                1e-13,
            ),
        });
    }
    for dirichlet in [true, false] {
        let heat = IntervalHeat::new(PI, dirichlet);
        for u in [IntervalPayoff::One, IntervalPayoff::Mode(1), IntervalPayoff::Mode(2)] {
            for &(x, t) in &[(0.1, 0.25), (1.0, 1.0), (2.5, 4.0)] {
                out.push(OracleCheck {
                    name: if dirichlet { "interval-dirichlet-heat" } else { "interval-neumann-heat" },
                    closed_form: heat.semigroup(u, x, t),
                    second_method: heat.semigroup_by_images(u, x, t),
                });
                let h = 1e-4;
                out.push(OracleCheck {
                    name: if dirichlet { "interval-dirichlet-gradient" } else { "interval-neumann-gradient" },
                    closed_form: heat.gradient(u, x, t),
                    second_method: (heat.semigroup_by_images(u, x + h, t) - heat.semigroup_by_images(u, x - h, t))
                        / (2.0 * h),
                });
            }
        }
    }
    let (kd, kn) = interval_cheeger(PI);
    let (bd, bn) = interval_cheeger_brute(PI, 40);
    out.push(OracleCheck { name: "interval-cheeger-dirichlet", closed_form: kd, second_method: bd });
    out.push(OracleCheck { name: "interval-cheeger-neumann", closed_form: kn, second_method: bn });
    out.push(OracleCheck {
        name: "sphere-height-ratio",
        closed_form: sphere_height_ratio(),
        second_method: sphere_height_ratio_scan(2000),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles_agree_with_second_methods() {
        for c in cross_checks() {
            let tol = if c.name.ends_with("gradient") { 1e-7 } else { 1e-9 };
            assert!(c.discrepancy() < tol, "{}: {} vs {}", c.name, c.closed_form, c.second_method);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert!((half_line_survival(0.5, 1.0) - 0.382_924_922_548).abs() < 1e-12);
        assert!((gaussian_indicator_gradient(0.0, 1.0) - 0.398_942_280_401).abs() < 1e-12);
        assert!((half_line_survival_gradient(0.0, 4.0) - (2.0 / (PI * 4.0)).sqrt()).abs() < 1e-15);
        let heat = IntervalHeat::new(PI, true);
        assert!((heat.semigroup(IntervalPayoff::Mode(1), 1.0, 1.0) - (-0.5f64).exp() * 1.0f64.sin()).abs() < 1e-15);
        // At t → 0 the series reproduces u ≡ 1 inside the interval.
        assert!((heat.semigroup(IntervalPayoff::One, 1.5, 1e-4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cheeger_brute_force_finds_two_over_length() {
        let (d, n) = interval_cheeger_brute(2.0, 40);
        assert!((d - 1.0).abs() < 1e-12);
        assert!((n - 1.0).abs() < 1e-12);
    }
}
