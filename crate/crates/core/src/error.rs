use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid basis label: {0}")]
    InvalidLabel(String),

    #[error("invalid targets: {0}")]
    InvalidTargets(String),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown gate name: {0}")]
    UnknownGate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("matrix is singular or ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("channel is not CPTP: {0}")]
    NotCptp(String),

    #[error("integration error: {0}")]
    Integration(String),

    #[error("no positive-definite normal form: {0}")]
    NormalForm(String),

    #[error("ambiguous state labeling: {0}")]
    Labeling(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidLabel(_) => "invalid_label",
            Error::InvalidTargets(_) => "invalid_targets",
            Error::NotNormalized(_) => "not_normalized",
            Error::InvalidState(_) => "invalid_state",
            Error::UnknownGate(_) => "unknown_gate",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::FitFailure(_) => "fit_failure",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::Infeasible(_) => "infeasible",
            Error::NotCptp(_) => "not_cptp",
            Error::Integration(_) => "integration",
            Error::NormalForm(_) => "normal_form",
            Error::Labeling(_) => "labeling",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
