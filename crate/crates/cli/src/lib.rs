//! Campaign runner behind the `ude3` binary: seeded multi-run experiments,
//! table-style aggregation, machine-readable output, and the subprocess
//! evaluator for external problems.

pub mod campaign;
pub mod external;
pub mod output;

/// Errors mapped to the binary's exit codes: 2 for configuration problems,
/// 3 for evaluator failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Evaluator(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Evaluator(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ude3::Error> for CliError {
    fn from(err: ude3::Error) -> Self {
        if err.is_config() {
            CliError::Config(err.to_string())
        } else {
            CliError::Evaluator(err.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Evaluator(_) => 3,
        }
    }
}
