//! Numerical solver and verification harness for prescribed Gauss curvature
//! flows of convex radial graphs in hyperbolic space `H^{n+1}`, `n ∈ {1, 2}`.
//!
//! A hypersurface is the graph `{(ρ(θ), θ) : θ ∈ Sⁿ}` in geodesic polar
//! coordinates. [`flow::run`] evolves it under
//! `∂ρ/∂t = −φ^α f w K + η̃ φ` and reports convergence, monitors and the
//! time series of the Klein-model functionals.

pub mod error;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod problem;
pub mod quadrature;
pub mod scenario;
pub mod trace;

pub use error::{FlowError, FunctionalError, GeometryError, GridError};
pub use flow::{run, FlowResult, Verdict};
pub use geometry::{geometry_fields, RadialState};
pub use grid::{Dim, SphereGrid};
pub use problem::{DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig, Regime};
