//! Deterministic JSON I/O.
//!
//! Output goes through `serde_json::Value`, whose maps are ordered by key, and
//! floats are written in shortest round-trip form, so identical values always
//! produce identical bytes. Parse failures carry the line and column.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{PhiError, Result};

/// Canonical pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| PhiError::InvalidInput(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| PhiError::InvalidInput(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Parses `text`, reporting `origin:line:column` on failure.
pub fn parse_str<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        PhiError::Parse { origin: origin.to_string(), line: e.line(), column: e.column(), message }
    })
}

pub fn read_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| PhiError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text, &path.display().to_string())
}

pub fn write_file<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let s = to_canonical_string(value)?;
    std::fs::write(path, s).map_err(|e| PhiError::Io(format!("{}: {e}", path.display())))
}
