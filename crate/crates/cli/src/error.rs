use dirac_moire::dynamics::DynamicsError;
use dirac_moire::fourier::FourierError;
use dirac_moire::invariants::InvariantError;
use dirac_moire::model::ModelError;
use dirac_moire::scatter1d::ScatterError;
use dirac_moire::transport::TransportError;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("tolerance: {0}")]
    Tolerance(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("io: {0}")]
    Io(String),
}

/// Machine-readable error record printed on stderr.
#[derive(Serialize)]
pub struct ErrorRecord<'a> {
    pub status: &'a str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Tolerance(_) => 1,
            Self::Config(_) => 2,
            Self::Solver(_) | Self::Io(_) => 3,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Self::Tolerance(_) => "tolerance_failure",
            Self::Config(_) => "config_error",
            Self::Solver(_) => "solver_failure",
            Self::Io(_) => "io_error",
        }
    }

    pub fn record(&self) -> ErrorRecord<'_> {
        ErrorRecord {
            status: self.status(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<FourierError> for CliError {
    fn from(e: FourierError) -> Self {
        match e {
            FourierError::Solver { .. } | FourierError::Coverage(_) => Self::Solver(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Fourier(f) => f.into(),
            TransportError::Coverage(_) => Self::Solver(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Fourier(f) => f.into(),
            DynamicsError::Transport(t) => t.into(),
            _ => Self::Solver(e.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Degenerate(..) => Self::Solver(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<ScatterError> for CliError {
    fn from(e: ScatterError) -> Self {
        match e {
            ScatterError::Degenerate => Self::Solver(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
