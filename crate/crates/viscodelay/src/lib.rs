//! File formats, reports, plots, sweeps and the command implementations
//! behind the `viscodelay` binary. The numerics live in `viscodelay-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod pipeline;
pub mod plot;
pub mod sweep;

pub use error::{Error, Result};

/// Environment variable that supplies the output directory when `--out` is
/// not given.
pub const OUT_DIR_ENV: &str = "VISCODELAY_OUT_DIR";

/// Default output directory, relative to the working directory.
pub const DEFAULT_OUT_DIR: &str = "viscodelay-out";
