//! Shared fixtures for the benchmarks.

use heatbounds::spectral::Signal;
use heatbounds::{BoundaryCondition, Domain, ManifoldModel, SimConfig, SpectralBasis};
use std::f64::consts::PI;

/// 100 (K, ‖u‖∞, ‖Lu‖∞) triples covering all four minimization cases.
pub fn c2_instances() -> Vec<(f64, f64, f64)> {
    (0..100)
        .map(|i| {
            let f = i as f64 / 99.0;
            (-5.0 + 10.0 * f, 0.5 + f, 1.0 + 2.0 * (1.0 - f))
        })
        .collect()
}

pub fn sphere() -> ManifoldModel {
    ManifoldModel::sphere(2, 1.0).expect("valid model")
}

pub fn interval() -> ManifoldModel {
    ManifoldModel::interval(PI).expect("valid model")
}

pub fn config(paths: usize) -> SimConfig {
    SimConfig::new(0.01, 1.0, paths, 1)
}

pub fn dirichlet_basis(cutoff: f64) -> (SpectralBasis, Signal) {
    let domain = Domain::Interval { length: PI, bc: BoundaryCondition::Dirichlet };
    (SpectralBasis::new(domain, cutoff).expect("valid domain"), Signal::flat())
}
