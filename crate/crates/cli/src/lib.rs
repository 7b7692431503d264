//! Batch driver for the identity checks: manifest parsing, the check suite,
//! and report emission.

pub mod config;
pub mod emit;
pub mod suite;

pub use config::{Check, Config};
pub use emit::Format;
pub use lefschetz_core::report::VerificationReport;
pub use suite::{run_check, run_suite};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown format `{0}` (expected json or csv)")]
    Format(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}
