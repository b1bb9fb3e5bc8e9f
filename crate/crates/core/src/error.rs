use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("map is not volume preserving (det L = {det_linear}, nilpotency residual {residual:e})")]
    NotVolumePreserving { det_linear: f64, residual: f64 },

    #[error("map has no quadratic inverse (residual of M(x)²x: {residual:e})")]
    NoQuadraticInverse { residual: f64 },

    #[error("quadratic part is not a shear: {0}")]
    NotAShear(String),

    #[error("quadratic part vanishes: the map is affine")]
    Affine,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("non-generic parameters: {0}")]
    NonGeneric(String),

    #[error("parameters are not normalized (a + b + c = {0}, expected 1)")]
    NotNormalized(f64),

    #[error("quadratic form is not positive definite (a = {a}, c = {c}, d = {d})")]
    NotPositiveDefinite { a: f64, c: f64, d: f64 },

    #[error("fixed point is not hyperbolic (eigenvalue modulus {modulus})")]
    NotHyperbolic { modulus: f64 },

    #[error("map is not symplectic (residual {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("symplectic maps need an even dimension, got {0}")]
    OddDimension(usize),

    #[error("orbit has not escaped")]
    NotEscaped,

    #[error("map is not reversible: {0}")]
    NotReversible(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),
}
