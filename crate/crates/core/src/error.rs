use thiserror::Error;

use crate::distribution::Side;

/// Errors raised by constructors and analyses in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid policy scale: {0}")]
    InvalidScale(String),

    #[error("negative share {share} at position {position}")]
    NegativeShare { position: f64, share: f64 },

    #[error("non-finite share at position {position}")]
    InvalidShare { position: f64 },

    #[error("distribution has no positive mass")]
    EmptyDistribution,

    #[error("position {0} is not a point of the scale grid")]
    PositionOffGrid(f64),

    #[error("{x} lies outside the scale [{min}, {max}]")]
    OutOfScale { x: f64, min: f64, max: f64 },

    #[error("inverted interval [{lo}, {hi}]")]
    InvertedInterval { lo: f64, hi: f64 },

    #[error("no mass {side} cutoff {cutoff}")]
    EmptyGroup { side: Side, cutoff: f64 },

    #[error("center {center} is not strictly inside ({min}, {max})")]
    CenterOnBoundary { center: f64, min: f64, max: f64 },

    #[error("distributions live on different scales: [{0}, {1}] vs [{2}, {3}]")]
    ScaleMismatch(f64, f64, f64, f64),

    #[error("baseline polarization is zero at center {center}")]
    ZeroBaseline { center: f64 },

    #[error("no centers given")]
    NoCenters,

    #[error("indices refer to different centers: {0} vs {1}")]
    CenterMismatch(f64, f64),

    #[error("animosity function decreases between {lo} and {hi}")]
    NonMonotoneG { lo: f64, hi: f64 },

    #[error("invalid animosity function: {0}")]
    InvalidAnimosity(String),

    #[error("cannot move {requested} of mass outward, only {available} is movable")]
    InsufficientInteriorMass { requested: f64, available: f64 },

    #[error("salience weights must satisfy 0 < lo < hi <= 1, got {lo} and {hi}")]
    DegenerateAlpha { lo: f64, hi: f64 },

    #[error("salience weight {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("common-value support [{lo}, {hi}] is not inside the policy scale")]
    CommonSupportOutsideScale { lo: f64, hi: f64 },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("non-numeric cell {value:?} at line {line}, column {column}")]
    NonNumericCell {
        line: u64,
        column: String,
        value: String,
    },

    #[error("shares for wave {wave} total {total}, which is close to neither 1 nor 100")]
    AmbiguousTotal { wave: String, total: f64 },

    #[error("unknown selector {0:?}")]
    UnknownSelector(String),

    #[error("positions {0:?} match no known instrument scale")]
    UnknownAxis(Vec<f64>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
