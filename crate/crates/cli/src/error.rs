use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),

    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] chainmarket::Error),

    #[error("{0} probed propert{1} violated")]
    ProbeViolation(usize, &'static str),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => CliError::Output(e),
            other => CliError::Usage(format!("csv: {other:?}")),
        }
    }
}

impl CliError {
    /// Process exit status: 2 for malformed requests or input, 3 for
    /// markets the mechanism cannot run on, 4 when exhaustive search is too
    /// large, 5 when a probe finds a violation.
    pub fn exit_code(&self) -> u8 {
        use chainmarket::Error as E;
        match self {
            CliError::Output(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::TooLarge { .. } => 4,
                E::InvalidConfig(_)
                | E::NotConstantDemand { .. }
                | E::Singularity { .. }
                | E::NegativePayment { .. }
                | E::Domain { .. } => 3,
                E::InvalidMiner { .. }
                | E::DuplicateMiner(_)
                | E::UnknownMiner(_)
                | E::AlreadyInSet(_)
                | E::NotWinner(_)
                | E::UnknownMechanism(_)
                | E::InvalidSweep(_) => 2,
            },
            CliError::ProbeViolation(..) => 5,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
