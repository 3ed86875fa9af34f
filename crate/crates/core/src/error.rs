use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a single optimizer restart, carried by [`Error::OptimizationFailure`].
pub type RestartSummary = (usize, f64);

#[derive(Debug, Error)]
pub enum Error {
    #[error("JSA vanishes identically: r = {r} and s = {s} coincide")]
    DegenerateGroupVelocities { r: f64, s: f64 },

    #[error("invalid spectral function: {0}")]
    InvalidSpectralFn(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("phase-matching angle is undefined for r = 0")]
    UndefinedAngle,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("oscillator mapping requires r*s < 0 (got r = {r}, s = {s})")]
    MappingDomain { r: f64, s: f64 },

    #[error("Fock truncation too coarse: tail weight {tail:.3e} exceeds {limit:.1e}")]
    Truncation { tail: f64, limit: f64 },

    #[error("ket is displaced: |<b>| = {0:.3e}")]
    Displacement(f64),

    #[error("optimal pump photon number is degenerate for these moments")]
    DegenerateOptimum,

    #[error("no optimizer restart converged ({} restarts)", trace.len())]
    OptimizationFailure { trace: Vec<RestartSummary> },

    #[error("wavelength {lambda_um:.4} um outside model validity window [{lo}, {hi}] um")]
    ModelRange { lambda_um: f64, lo: f64, hi: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable variant name, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateGroupVelocities { .. } => "DegenerateGroupVelocities",
            Error::InvalidSpectralFn(_) => "InvalidSpectralFn",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::UndefinedAngle => "UndefinedAngle",
            Error::Domain(_) => "DomainError",
            Error::MappingDomain { .. } => "MappingDomainError",
            Error::Truncation { .. } => "TruncationError",
            Error::Displacement(_) => "DisplacementError",
            Error::DegenerateOptimum => "DegenerateOptimum",
            Error::OptimizationFailure { .. } => "OptimizationFailure",
            Error::ModelRange { .. } => "ModelRangeError",
            Error::Format(_) => "FormatError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
            Error::Csv(_) => "CsvError",
        }
    }

    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NumericalFailure(_)
                | Error::Truncation { .. }
                | Error::DegenerateOptimum
                | Error::OptimizationFailure { .. }
        )
    }
}
