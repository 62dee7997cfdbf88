//! Pretty-printed JSON for reports, caches and manifests.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{GeoflowError, Result};

/// Serializes with two-space indentation and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|source| GeoflowError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&super::read_to_string(path)?, path)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    super::write_file(path, to_json(value).as_bytes())
}
