use thiserror::Error;

/// Errors raised by the coefficient engine, the oracles and the serializers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid half-integer {0:?}: expected k, k/2, k.0 or k.5")]
    InvalidHalfInteger(String),

    #[error("negative angular momentum {0:?} is not allowed")]
    NegativeMomentum(String),

    #[error("parity mismatch: M = {m} is not compatible with J = {j} (J - M must be an integer)")]
    ParityMismatch { j: String, m: String },

    #[error("projection out of range: |M| = |{m}| exceeds J = {j}")]
    ProjectionOutOfRange { j: String, m: String },

    #[error("triangle rule violated: J = {j} is not in |J1 - J2| .. J1 + J2 for J1 = {j1}, J2 = {j2}")]
    Triangle { j1: String, j2: String, j: String },

    #[error("spin-0 pair count n = {n} out of range 0..={max}")]
    PairCountOutOfRange { n: u32, max: u32 },

    #[error("matrix dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("sign mismatch at (u1={u1}, u2={u2}) in signed componentwise product")]
    SignMismatch { u1: u32, u2: u32 },

    #[error("cell (u1={u1}, u2={u2}) is outside a {rows}x{cols} matrix")]
    IndexOutOfBounds { u1: u32, u2: u32, rows: usize, cols: usize },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("radicals sqrt({0}) and sqrt({1}) are not rational multiples of each other")]
    IncompatibleRadicals(String, String),

    #[error("precision exhausted: orthogonalization residual {residual} exceeds 1e-{limit_exp}")]
    PrecisionExhausted { residual: String, limit_exp: u32 },

    #[error("precision must be at least {min} digits, got {got}")]
    PrecisionTooLow { min: u32, got: u32 },

    #[error("unknown format {0:?}")]
    UnknownFormat(String),

    #[error("unknown route {0:?}: expected product, tilde-squared or lv-squared")]
    UnknownRoute(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
