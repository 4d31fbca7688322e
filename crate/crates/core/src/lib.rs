//! Heat-semigroup gradient bounds on model manifolds, with the stochastic
//! machinery to test them.

// Negated comparisons such as `!(x > 0.0)` reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod geometry;
pub mod numerics;
pub mod rng;
pub mod simulate;
pub mod spectral;
pub mod verify;

pub use geometry::{
    BoundaryData, CurvatureBounds, DriftSpec, GeometryError, ManifoldModel, ModelKind, Potential,
};
/// A shareable real-valued function of coordinates.
pub type ScalarField = std::sync::Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub use bounds::{BoundResult, BoundsError, TheoremId};
pub use simulate::{
    Boundary, Estimate, FdScheme, GradientEstimate, PathPlan, PathState, PathStatus, SimConfig, SimError,
};
pub use spectral::{BandConvention, BoundaryCondition, Domain, SpectralBasis, SpectralError};
pub use verify::{Report, RunOptions, Status, VerifyError};
