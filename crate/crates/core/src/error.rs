use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("unsupported sphere dimension n = {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("grid needs at least {min} nodes, got {nodes}")]
    TooFewNodes { nodes: usize, min: usize },
    #[error("axisymmetric S² grid needs an odd node count, got {0}")]
    EvenPolarNodes(usize),
    #[error("grids differ (dimension or node count)")]
    Incompatible,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("radial function must be positive and finite, node {node} has rho = {value}")]
    InvalidRadius { node: usize, value: f64 },
    #[error("support function u = {value} <= 0 at node {node}: state is not star-shaped")]
    NotStarShaped { node: usize, value: f64 },
    #[error("field has {got} entries, grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Gauss curvature K = {value} <= 0 at node {node}")]
    CurvatureBreakdown { node: usize, value: f64 },
    #[error("no admissible step after {halvings} dt halvings (last dt = {dt:e})")]
    StepFailure { halvings: u32, dt: f64 },
    #[error("normalizing integral degenerate: denominator = {0:e}")]
    DegenerateDenominator(f64),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("adaptive quadrature on [{lo}, {hi}] did not reach tolerance {tol:e}")]
    QuadratureFailure { lo: f64, hi: f64, tol: f64 },
    #[error("invalid functional configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("prescribed f_tilde is not positive: min {min} at theta = {theta}")]
    Positivity { min: f64, theta: f64 },
    #[error("{0}")]
    Invalid(String),
}

impl ScenarioError {
    /// Short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Io { .. } => "io",
            ScenarioError::Schema { .. } => "schema-error",
            ScenarioError::Positivity { .. } => "positivity-violation",
            ScenarioError::Invalid(_) => "invalid-scenario",
        }
    }
}
