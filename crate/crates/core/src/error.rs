use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("packet must start left of the wall (x0 < 0), got x0 = {x0}")]
    PacketBehindWall { x0: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid spectrum table: {0}")]
    InvalidTable(String),

    #[error("wall fields live on x <= 0, but the grid extends to x = {max}")]
    GridCrossesWall { max: f64 },

    #[error("expected a {expected} field, got a {found} field")]
    WrongSpace {
        expected: &'static str,
        found: &'static str,
    },

    /// A discretization is too coarse for the requested evaluation.
    #[error("resolution violated: {invariant} (have {actual:.6e}, need <= {limit:.6e})")]
    Resolution {
        invariant: &'static str,
        actual: f64,
        limit: f64,
    },

    #[error("symmetrized momentum has imaginary residue {residue:.3e} (limit {limit:.1e}); field does not vanish at the grid ends")]
    ImaginaryResidue { residue: f64, limit: f64 },

    #[error("times must be strictly increasing")]
    UnorderedTimes,

    #[error("time series needs at least {needed} rows, got {found}")]
    TooFewRows { needed: usize, found: usize },

    #[error("time series rows are not uniformly spaced in t")]
    NonUniformTimes,

    #[error("packet never reaches the wall (p0 = {p0})")]
    NoArrival { p0: f64 },

    #[error("{what} requires a Gaussian packet")]
    NotGaussian { what: &'static str },

    #[error("{what} requires a Lorentzian packet")]
    NotLorentzian { what: &'static str },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resolution { .. } => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
