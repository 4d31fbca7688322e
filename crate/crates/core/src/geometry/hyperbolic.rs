//! Upper-half-space chart of hyperbolic space, computed through the hyperboloid.
//!
//! The chart point `(u_1, …, u_{d-1}, y)` with `y > 0` maps to the hyperboloid
//! `{P : ⟨P,P⟩_M = −1, P_0 > 0}` in Minkowski space `R^{1,d}`. Geodesics and
//! parallel transport have closed forms there. Scaling the metric by `1/a²`
//! leaves the Levi-Civita connection unchanged, so `exp` and transport do not
//! depend on `a`; only lengths do.

pub(crate) fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

pub(crate) fn to_hyperboloid(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let y = x[d - 1];
    let u = &x[..d - 1];
    let u2: f64 = u.iter().map(|v| v * v).sum();
    let mut p = Vec::with_capacity(d + 1);
    p.push((1.0 + u2 + y * y) / (2.0 * y));
    p.extend(u.iter().map(|ui| ui / y));
    p.push((1.0 - u2 - y * y) / (2.0 * y));
    p
}

pub(crate) fn from_hyperboloid(p: &[f64]) -> Vec<f64> {
    let d = p.len() - 1;
    let y = 1.0 / (p[0] + p[d]);
    let mut x: Vec<f64> = p[1..d].iter().map(|pi| pi * y).collect();
    x.push(y);
    x
}

/// Pushes a chart tangent vector at `x` forward to the hyperboloid.
pub(crate) fn push_tangent(x: &[f64], v: &[f64]) -> Vec<f64> {
    let d = x.len();
    let y = x[d - 1];
    let u = &x[..d - 1];
    let u2: f64 = u.iter().map(|t| t * t).sum();
    let vy = v[d - 1];
    let udotv: f64 = u.iter().zip(&v[..d - 1]).map(|(a, b)| a * b).sum();
    let y2 = y * y;
    let mut w = Vec::with_capacity(d + 1);
    w.push(udotv / y + vy * (y2 - 1.0 - u2) / (2.0 * y2));
    for i in 0..d - 1 {
        w.push(v[i] / y - u[i] * vy / y2);
    }
    w.push(-udotv / y + vy * (u2 - 1.0 - y2) / (2.0 * y2));
    w
}

/// Pulls a hyperboloid tangent vector at `p` back to chart components.
pub(crate) fn pull_tangent(p: &[f64], w: &[f64]) -> Vec<f64> {
    let d = p.len() - 1;
    let s = p[0] + p[d];
    let y = 1.0 / s;
    let dy = -y * y * (w[0] + w[d]);
    let mut v: Vec<f64> = (1..d).map(|i| w[i] * y + p[i] * dy).collect();
    v.push(dy);
    v
}

/// Geodesic from `p` with initial hyperboloid velocity `w` at unit time.
/// Returns the endpoint and the transported images of `carry`.
pub(crate) fn exp_and_transport(p: &[f64], w: &[f64], carry: &mut [Vec<f64>]) -> Vec<f64> {
    let n2 = minkowski(w, w).max(0.0);
    let n = n2.sqrt();
    if n == 0.0 {
        return p.to_vec();
    }
    let (ch, sh) = (n.cosh(), n.sinh());
    let e: Vec<f64> = w.iter().map(|c| c / n).collect();
    for c in carry.iter_mut() {
        let k = minkowski(&e, c);
        for ((ci, ei), pi) in c.iter_mut().zip(&e).zip(p) {
            *ci += k * ((ch - 1.0) * ei + sh * pi);
        }
    }
    let mut q: Vec<f64> = p.iter().zip(&e).map(|(pi, ei)| ch * pi + sh * ei).collect();
    renormalize(&mut q);
    q
}

/// Hyperboloid logarithm: velocity at `p` of the unit-time geodesic to `q`.
pub(crate) fn log(p: &[f64], q: &[f64]) -> Vec<f64> {
    let c = (-minkowski(p, q)).max(1.0);
    let perp: Vec<f64> = q.iter().zip(p).map(|(qi, pi)| qi - c * pi).collect();
    let s = minkowski(&perp, &perp).max(0.0).sqrt();
    if s == 0.0 {
        return vec![0.0; p.len()];
    }
    let theta = s.asinh();
    perp.iter().map(|v| v * theta / s).collect()
}

fn renormalize(q: &mut [f64]) {
    let spatial: f64 = q[1..].iter().map(|v| v * v).sum();
    q[0] = (1.0 + spatial).sqrt();
}

/// Geodesic distance for curvature −1 in the half-space chart.
pub(crate) fn unit_distance(x: &[f64], y: &[f64]) -> f64 {
    let d = x.len();
    let diff2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let z = diff2 / (2.0 * x[d - 1] * y[d - 1]);
    2.0 * (0.5 * z).sqrt().asinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chart_round_trip() {
        let x = vec![0.3, -1.2, 0.7];
        let p = to_hyperboloid(&x);
        assert_relative_eq!(minkowski(&p, &p), -1.0, epsilon = 1e-12);
        let back = from_hyperboloid(&p);
        for (a, b) in x.iter().zip(&back) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn tangent_push_pull_round_trip() {
        let x = vec![0.4, 1.5];
        let v = vec![-0.2, 0.9];
        let p = to_hyperboloid(&x);
        let w = push_tangent(&x, &v);
        assert_relative_eq!(minkowski(&p, &w), 0.0, epsilon = 1e-12);
        // Minkowski norm of the pushforward equals the curvature −1 chart norm |v|/y.
        let chart_norm2 = (v[0] * v[0] + v[1] * v[1]) / (x[1] * x[1]);
        assert_relative_eq!(minkowski(&w, &w), chart_norm2, epsilon = 1e-12);
        let back = pull_tangent(&p, &w);
        for (a, b) in v.iter().zip(&back) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }
}
