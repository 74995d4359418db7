use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("singular {0}")]
    Singular(String),

    #[error("drift matrix is not stable (max Re λ = {max_real:e})")]
    Unstable { max_real: f64 },

    #[error("nonphysical state: {0}")]
    Nonphysical(String),

    #[error("lyapunov: relative residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("schur: QR iteration did not converge")]
    NoConvergence,

    #[error("mean-field: no convergence after {iterations} iterations (last change {residual:e})")]
    MeanFieldDiverged { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Failure tagged with the pipeline stage that produced it.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    /// Short machine-readable code used in result tables.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Error::Unstable { .. } => "unstable",
            Error::Singular(_) | Error::Residual { .. } | Error::NoConvergence => "singular",
            Error::Nonphysical(_) => "nonphysical",
            Error::MeanFieldDiverged { .. } => "diverged",
            Error::Domain(_) | Error::Config(_) | Error::Io(_) => "invalid",
            Error::Stage { source, .. } => source.reason_code(),
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_config(),
            e => matches!(e, Error::Domain(_) | Error::Config(_) | Error::Io(_)),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}
