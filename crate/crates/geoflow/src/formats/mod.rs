//! On-disk formats: chart, genre, missing-week and population inputs, plus
//! every exported artifact.

pub mod inputs;
pub mod graph;
pub mod json;
pub mod newick;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{GeoflowError, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| GeoflowError::io(path, e))
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| GeoflowError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| GeoflowError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(contents)
        .and_then(|_| w.flush())
        .map_err(|e| GeoflowError::io(path, e))
}
