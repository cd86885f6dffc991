//! File formats, experiment sweeps, bound suites and the command line for
//! [`spaprec_core`].

pub mod bounds_suite;
pub mod config;
mod error;
pub mod instance_io;
pub mod matrix_io;
pub mod sweep;
pub mod unmix;

pub use config::{Algorithm, DeltaGrid, ExperimentConfig, Family};
pub use error::{CliError, Result};
pub use sweep::{run_sweep, ExperimentReport};
