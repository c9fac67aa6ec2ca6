use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub mod estimate;
pub mod evaluate;
pub mod gen;
pub mod track;

/// File name of `path`, used to identify recordings independent of where
/// they were read from.
pub(crate) fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(thermal_vitals::Error::from)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub(crate) fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}
