use thiserror::Error;

/// Which end of the radial axis an improper integral blows up at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergentEnd {
    Origin,
    Infinity,
}

impl std::fmt::Display for DivergentEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergentEnd::Origin => write!(f, "origin"),
            DivergentEnd::Infinity => write!(f, "infinity"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {what} (achieved tolerance {achieved:.3e})")]
    Numerical { what: String, achieved: f64 },

    #[error("kernel is not a Lévy kernel: moment integral diverges at the {0}")]
    Admissibility(DivergentEnd),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("fundamental solution not resolvable on this grid: exp(-m(xi_max) t) = {residual:.3e}")]
    Unresolvable { residual: f64 },

    #[error("explicit step unstable at dt = {dt:.6e} (sup norm grew from {before:.6e} to {after:.6e})")]
    Stability { dt: f64, before: f64, after: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("domain-escape guard failed at t = {t}: boundary/sup ratio {ratio:.3e}")]
    DomainEscape { t: f64, ratio: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl Error {
    pub fn in_stage(self, stage: &str) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}
