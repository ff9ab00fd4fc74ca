use std::fmt;
use std::process::ExitCode;

/// Why a command did not succeed, with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// A check ran and failed (exit 1).
    Check(String),
    /// Invalid or ill-posed configuration (exit 2).
    Config(String),
    /// The computation hit a singularity or domain boundary (exit 3).
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    /// Errors raised while building the run from the settings.
    pub fn setup(e: sfdyn::Error) -> Self {
        Failure::Config(e.to_string())
    }

    /// Errors raised while running.
    pub fn runtime(e: sfdyn::Error) -> Self {
        match e {
            sfdyn::Error::Io(_) | sfdyn::Error::Json(_) | sfdyn::Error::Csv(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }

    pub fn io(e: std::io::Error, what: &str) -> Self {
        Failure::Config(format!("{what}: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}
