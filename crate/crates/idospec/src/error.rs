//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be a positive even integer, got {0}")]
    InvalidGridSize(usize),

    #[error("sample vector has {got} values, expected {expected} for this grid")]
    SampleLength { got: usize, expected: usize },

    #[error("sample value at node {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("evaluation point x = {x} lies outside [0, pi]")]
    OutOfDomain { x: f64 },

    #[error("operands live on different grids ({left} vs {right} subintervals)")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid endpoint data: {0}")]
    InvalidEndpoints(String),

    #[error("endpoint exponents are required for this operation but the problem carries none")]
    MissingEndpoints,

    #[error("derivative chain order {got} exceeds the supported maximum {max}")]
    ChainOrderTooLarge { got: usize, max: usize },

    #[error("state magnitude overflow while integrating at lambda = {lambda}")]
    MagnitudeOverflow { lambda: Complex64 },

    #[error("Im(lambda) = {im} exceeds the overflow guard limit {limit}")]
    OverflowGuard { im: f64, limit: f64 },

    #[error("invalid search box: {0}")]
    InvalidBox(String),

    #[error(
        "boundary zero suspected: the characteristic function stayed below {floor:e} \
         on the contour after {retries} inflation retries"
    )]
    BoundaryZeroSuspected { floor: f64, retries: usize },

    #[error("phase resolution exceeded: contour sampling budget of {max} evaluations exhausted")]
    PhaseResolutionExceeded { max: usize },

    #[error("contour phase sum {total:.6} rad is not consistent with an integer winding")]
    PhaseSumInconsistent { total: f64 },

    #[error("Newton stagnation near lambda = {lambda} after {iters} iterations")]
    NewtonStagnation { lambda: Complex64, iters: usize },

    #[error(
        "multiplicity ambiguous at lambda = {lambda}: circle winding {winding} is not \
         confirmed by the derivative magnitudes {magnitudes:?}"
    )]
    MultiplicityAmbiguous {
        lambda: Complex64,
        winding: usize,
        magnitudes: Vec<f64>,
    },

    #[error("completeness mismatch: root multiplicities sum to {found} but the box winding is {expected}")]
    CompletenessMismatch { found: usize, expected: usize },

    #[error("degenerate chain: the leading chain member has norm below {floor:e}")]
    DegenerateChain { floor: f64 },

    #[error("weight relation violated at chain level {level}: relative residual {residual:e}")]
    RelationViolated { level: usize, residual: f64 },

    #[error("chain lengths differ: {left} vs {right} members")]
    ChainLengthMismatch { left: usize, right: usize },

    #[error("chains evaluated at different spectral points: {left} vs {right}")]
    ChainLambdaMismatch { left: Complex64, right: Complex64 },

    #[error("count mismatch: {available} spectral entries available, {needed} requested")]
    CountMismatch { available: usize, needed: usize },

    #[error("root collision while tracking eigenvalues: two roots merged near lambda = {lambda}")]
    RootCollision { lambda: Complex64 },

    #[error("invalid recovery setup: {0}")]
    InvalidRecovery(String),

    #[error("geometry precondition violated: {0}")]
    GeometryViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed data at line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
