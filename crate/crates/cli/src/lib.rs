//! Command implementations behind the `trp` binary.
//!
//! Every command is a plain function from parsed arguments to rendered
//! output, so the binary only handles argument parsing, files and exit codes.

#![allow(clippy::result_large_err)]

mod adversary;
mod certify;
mod generate;
mod oracle;
mod simulate;
mod sweep;

use thiserror::Error;
use trp::adversary::GameError;
use trp::format::FormatError;
use trp::generate::GenerateError;
use trp::offline::OfflineError;
use trp::online::StrategyError;
use trp::simulator::SimError;
use trp::QuadraticScalar;

pub use adversary::{adversary, AdversaryArgs, AdversaryOutput};
pub use certify::{certified_bound, Basis, Certificate};
pub use generate::{generate, GenerateArgs, GeneratorKind};
pub use oracle::oracle;
pub use simulate::{simulate, SimulateArgs, SimulateOutput};
pub use sweep::{run_sweep, SweepOutcome, SweepRow, SweepSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("{0}")]
    Certification(String),
    #[error("internal mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for bad input, 2 for a failed certification, 3 for an internal
    /// inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certification(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Game(GameError::Mismatch { .. } | GameError::NotAWitness { .. } | GameError::Nondeterministic { .. }) => 3,
            _ => 1,
        }
    }
}

/// Six-decimal rendering next to an exact value.
pub fn approx(value: &QuadraticScalar) -> String {
    format!("{:.6}", value.to_f64())
}

fn csv_to_string<F>(write: F) -> Result<String, CliError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), CliError>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    write(&mut writer)?;
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
