use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point is off the conic section: <p,p> = {norm:e}, <p,q> + 1 = {affine:e}")]
    OffConic { norm: f64, affine: f64 },

    #[error("chart point has <x0,x0> = {got}, expected 1/K = {expected}")]
    MalformedChartPoint { got: f64, expected: f64 },

    #[error("chart point is not orthogonal to q: <x0,q> = {0:e}")]
    ChartPointNotInComplement(f64),

    #[error("operation requires curvature {expected}, space form has K = {got}")]
    WrongCurvature { expected: &'static str, got: f64 },

    #[error("degenerate metric (det I = {0:e}): not an immersion")]
    DegenerateMetric(f64),

    #[error("invalid surface parameters: {0}")]
    InvalidParameters(String),

    #[error("family lives in K = {family}, space form has K = {spaceform}")]
    CurvatureMismatch { family: f64, spaceform: f64 },

    #[error("umbilic point: |A0| = {0:e}")]
    Umbilic(f64),

    #[error("no parallel CMC surface: H^2 + K = {0} <= 0")]
    NoParallelSurface(f64),

    #[error("quadrature not converged: doubling panels changed the result by {change:e} (tolerance {tolerance:e})")]
    NotConverged { change: f64, tolerance: f64 },

    #[error("holonomy drifted off SO(4,1) by {0:e}; refine the step")]
    GroupDrift(f64),

    #[error("cap boundary misses the cycle by {0:e}")]
    CapMismatch(f64),

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
