use thiserror::Error;

/// Errors raised by group construction, enumeration and domain integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("intervals {first} and {second} overlap or touch: configuration is not Schottky")]
    OverlappingIntervals { first: String, second: String },
    #[error("generator {index} is not hyperbolic: |tr| = {trace_abs} <= 2")]
    NonHyperbolicGenerator { index: usize, trace_abs: f64 },
    #[error("generator {index} does not pair its intervals: {detail}")]
    GeneratorMismatch { index: usize, detail: String },
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("point {re} + {im}i is not in the upper half-plane")]
    NonInteriorPoint { re: f64, im: f64 },
    #[error("letter {letter} is not valid for a rank-{rank} group")]
    InvalidLetter { letter: i32, rank: usize },
    #[error(
        "projected {projected} class records exceed the budget of {budget} \
         (projection: {formula})"
    )]
    CapacityExceeded {
        projected: f64,
        budget: usize,
        formula: String,
    },
    #[error("pruned subtree at {word:?} contains an element at distance {distance} < bound {bound}")]
    PruneBoundViolated {
        word: Vec<i32>,
        bound: f64,
        distance: f64,
    },
    #[error("funnel tail estimate {tail:e} exceeds tolerance {tolerance:e} (value {value:e}): raise the truncation radius")]
    TailDominates {
        tail: f64,
        value: f64,
        tolerance: f64,
    },
}

/// Errors raised by the zeta-function engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("Re(s) = {re_s} is not beyond the convergence abscissa {delta} + margin {margin}")]
    OutsideConvergence { re_s: f64, delta: f64, margin: f64 },
    #[error("tail bound {tail:e} exceeds tolerance {tolerance:e}")]
    TailTooLarge { tail: f64, tolerance: f64 },
    #[error("determinant coefficients not decaying at s = {s_re} + {s_im}i: |c_N| = {last:e}, |c_N-3| = {earlier:e}")]
    NonDecaying {
        s_re: f64,
        s_im: f64,
        last: f64,
        earlier: f64,
    },
    #[error("no zero of the determinant found on [{lo}, {hi}]")]
    NoZeroInBracket { lo: f64, hi: f64 },
    #[error("|Re λ| = {re_abs} is outside the product strip of half-width {half_width}")]
    StripViolation { re_abs: f64, half_width: f64 },
    #[error("λ = {re} + {im}i lies within {distance:e} of a zero of Z")]
    NearZeroOfZ { re: f64, im: f64, distance: f64 },
    #[error("contour passes within reach of a zero (|d| = {modulus:e} at {re} + {im}i)")]
    ContourThroughZero { re: f64, im: f64, modulus: f64 },
    #[error("argument-principle count is not near an integer: {winding}")]
    WindingUnreliable { winding: f64 },
    #[error("trace order {order} exceeds class table length {n_max}")]
    TableTooShort { order: usize, n_max: usize },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Errors raised by the trace-identity laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("quadrature stalled at {value:e} with error {error:e}")]
    QuadratureStall { value: f64, error: f64 },
    #[error("class-sum tail {tail:e} exceeds tolerance {tolerance:e}")]
    TailTooLarge { tail: f64, tolerance: f64 },
    #[error("regime violated: {0}")]
    RegimeViolation(String),
    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Any error produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}
