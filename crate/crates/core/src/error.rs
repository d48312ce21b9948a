use thiserror::Error;

/// Errors raised while building balls and curves or running the flow.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("grid must have an even number of nodes >= 16, got {0}")]
    InvalidGrid(usize),

    #[error("harmonic of order {order} is odd; the unit ball must be origin-symmetric")]
    OddHarmonic { order: usize },

    #[error("support function has non-finite coefficient at order {order}")]
    NonFiniteCoefficient { order: usize },

    #[error("support function is not positive at nodes {nodes:?}")]
    NonPositiveSupport { nodes: Vec<usize> },

    #[error("unit ball is not strictly convex (a + a'' <= 0) at nodes {nodes:?}")]
    NotStrictlyConvex { nodes: Vec<usize> },

    #[error("curvature samples do not match grid: expected {expected}, got {got}")]
    SampleCount { expected: usize, got: usize },

    #[error("curvature is not positive at nodes {nodes:?}")]
    NonPositiveCurvature { nodes: Vec<usize> },

    #[error("closure condition violated: R_sin = {r_sin:e}, R_cos = {r_cos:e} (allowed {allowed:e})")]
    ClosureViolation { r_sin: f64, r_cos: f64, allowed: f64 },

    #[error("degenerate chord: tangent angles coincide")]
    DegenerateChord,

    #[error("tangent directions are antipodal (angle gap must lie in (0, pi))")]
    AntipodalTangents,

    #[error("offset radius {r} is not below the minimum curvature radius {mu0}")]
    RadiusTooLarge { r: f64, mu0: f64 },

    #[error("offset radius {r} must be non-negative")]
    NegativeRadius { r: f64 },

    #[error("in/circumradius optimizer did not converge; best bounds r_in = {r_in}, r_out = {r_out}")]
    OptimizerNotConverged { r_in: f64, r_out: f64 },

    #[error("curve is not centrally symmetric (deviation {deviation:e} > {allowed:e})")]
    NotSymmetric { deviation: f64, allowed: f64 },

    #[error("no area-bisecting chord found")]
    NoBisectingChord,

    #[error("step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
