use thiserror::Error;

/// Everything that can go wrong inside the engines.
///
/// Variants fall into three families that the command line maps onto exit
/// codes: invalid input, guard limits, and numerical-invariant breaches.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("coin histories differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("coin history of length {0} exceeds the 64-step packing limit")]
    HistoryTooLong(usize),

    #[error("inadmissible path pair: {0}")]
    InadmissiblePair(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration limit exceeded: t = {requested} > {limit}")]
    EnumerationLimit { requested: usize, limit: usize },

    #[error("crossing guard exceeded: {crossings} crossings > {limit}")]
    CrossingLimit { crossings: usize, limit: usize },

    #[error("island guard exceeded: {islands} islands > {limit}")]
    IslandLimit { islands: usize, limit: usize },

    #[error("imaginary residue {residue:e} at site {site} exceeds {tolerance:e}")]
    ImaginaryResidue { site: i64, residue: f64, tolerance: f64 },

    #[error("triple-invariant residue {re:+.3e}{im:+.3e}i is not +-1")]
    TauResidue { re: f64, im: f64 },

    #[error("tau matrix inconsistent with linking parities at islands ({0}, {1})")]
    InconsistentTau(usize, usize),

    #[error("bracket convention failed calibration: {0}")]
    Calibration(String),

    #[error("distribution not normalised: total probability {0}")]
    Unnormalized(f64),

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),

    #[error("non-positive value {value} at abscissa {at} in log fit")]
    NonPositive { at: f64, value: f64 },

    #[error("poor fit: relative residual {ratio:.4} above threshold {threshold}")]
    PoorFit { ratio: f64, threshold: f64 },

    #[error("degenerate normalisation (denominator {0:e})")]
    DegenerateNormalization(f64),

    #[error("geometric series diverges: |r r'| = {0}")]
    Divergent(f64),
}

impl Error {
    /// Guard-limit errors: the request is valid but too expensive.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::EnumerationLimit { .. }
                | Error::CrossingLimit { .. }
                | Error::IslandLimit { .. }
                | Error::HistoryTooLong(_)
        )
    }

    /// Numerical-invariant breaches: these indicate a convention bug, not bad input.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(
            self,
            Error::ImaginaryResidue { .. }
                | Error::TauResidue { .. }
                | Error::Calibration(_)
                | Error::Unnormalized(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
