//! Driver layer for `scilu-core`: Matrix Market files, the flat key/value
//! solver configuration, and the experiment commands behind the `scilu`
//! binary.

pub mod commands;
pub mod config;
mod error;
pub mod mm;

pub use error::{CliError, ExitCode};

use scilu_core::gallery::Problem;
use scilu_core::CsrMatrix;

/// Loads a matrix from a generator spec (`poisson2d:32,32`) or a Matrix
/// Market path.
pub fn load_matrix(source: &str) -> Result<CsrMatrix, CliError> {
    if let Ok(p) = source.parse::<Problem>() {
        return Ok(p.matrix()?);
    }
    if !source.contains(':') || std::path::Path::new(source).exists() {
        return mm::read_path(source);
    }
    Err(CliError::Usage(format!(
        "`{source}` is neither a generator spec nor an existing file"
    )))
}
