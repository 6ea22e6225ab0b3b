//! Construction errors.
//!
//! Failed *checks* (a map that is not bornologous, a cover that is not
//! separated) are ordinary report values, not errors. `CoarseError` is
//! reserved for inputs that do not denote a valid object at all.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoarseError {
    #[error("ground-set mismatch: operands live on different point sets ({left} vs {right} points)")]
    GroundMismatch { left: usize, right: usize },

    #[error("unknown point label {0:?}")]
    UnknownPoint(String),

    #[error("point index {index} out of range for ground set of {size} points")]
    PointOutOfRange { index: usize, size: usize },

    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),

    #[error("chain must have at least one relation")]
    EmptyChain,

    #[error("chain invariant violated: {0}")]
    ChainInvariant(String),

    #[error("distance matrix is {rows}x{cols}, expected {size}x{size}")]
    MetricShape { rows: usize, cols: usize, size: usize },

    #[error("distance matrix not symmetric at ({a}, {b}): {ab} vs {ba}")]
    MetricAsymmetric { a: usize, b: usize, ab: f64, ba: f64 },

    #[error("distance matrix has nonzero diagonal at {a}: {value}")]
    MetricDiagonal { a: usize, value: f64 },

    #[error("negative distance at ({a}, {b}): {value}")]
    MetricNegative { a: usize, b: usize, value: f64 },

    #[error("triangle inequality fails at ({a}, {b}, {c}): d(a,b) = {ab} > {ac} + {cb}")]
    MetricTriangle { a: usize, b: usize, c: usize, ab: f64, ac: f64, cb: f64 },

    #[error("scale list must be strictly ascending and positive")]
    BadScales,

    #[error("operation table is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },

    #[error("operation table has no two-sided identity")]
    NoIdentity,

    #[error("element {a} has no inverse")]
    NoInverse { a: usize },

    #[error("operation table is {rows}x{cols}, expected {size}x{size}")]
    TableShape { rows: usize, cols: usize, size: usize },

    #[error("table entry {value} at ({a}, {b}) is outside the element range")]
    TableRange { a: usize, b: usize, value: usize },

    #[error("ideal chain must have at least one level")]
    EmptyIdeal,

    #[error("set-valued operation returns an empty set at ({a}, {b})")]
    EmptyOpValue { a: usize, b: usize },

    #[error("set-valued operation drops the unit law: {side} identity product at {g} misses {g}")]
    OpUnitLaw { side: &'static str, g: usize },

    #[error("evolution must assign one map per group element: got {got}, expected {expected}")]
    EvolutionShape { got: usize, expected: usize },

    #[error("map assignment covers {got} points, expected {expected}")]
    MapShape { got: usize, expected: usize },

    #[error("map is not invertible")]
    NotInvertible,

    #[error("subset is not a subgroup: {reason} (witness element {witness})")]
    NotSubgroup { reason: &'static str, witness: usize },

    #[error("subset not invariant: evolution at group element {g} moves point {m} outside")]
    NotInvariant { g: usize, m: usize },

    #[error("conjugacy composition needs matching middle systems")]
    MiddleMismatch,

    #[error("{what} must be positive")]
    NonPositive { what: &'static str },

    #[error("step {step} does not divide half-width {half_width} into whole cells")]
    StepMismatch { step: f64, half_width: f64 },

    #[error("integer windows use step 1, got {0}")]
    IntegerStep(f64),

    #[error("grid with step {step} does not contain the integer points of the window")]
    WindowMismatch { step: f64 },

    #[error("ground set of {size} points exceeds the hyperspace cap of {cap}")]
    HyperCapExceeded { size: usize, cap: usize },

    #[error("ground set of {size} points exceeds the exhaustive-search cap of {cap}")]
    ExactCapExceeded { size: usize, cap: usize },

    #[error("cover contains an empty set (family {family}, set {set})")]
    EmptyCoverSet { family: usize, set: usize },

    #[error("cover does not cover the ground set: point {0} missing")]
    NotACover(usize),
}

pub type Result<T> = std::result::Result<T, CoarseError>;
