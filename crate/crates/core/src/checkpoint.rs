//! Self-describing JSON checkpoint files for long scans.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("checkpoint {path} is not valid: {source}")]
    Format { path: String, source: serde_json::Error },
    #[error("checkpoint {path} has format version {found}, expected {expected}")]
    Version { path: String, found: u32, expected: u32 },
    #[error("checkpoint {path} was written for a different {what}")]
    Mismatch { path: String, what: &'static str },
}

/// On-disk envelope: which scan, with which parameters, how far it got.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Checkpoint<S, T> {
    pub format_version: u32,
    pub kind: String,
    pub spec: S,
    /// Index of the first enumeration group not yet folded into `state`.
    pub next_group: u64,
    /// Bytes of the per-instance CSV stream that belong to completed groups.
    #[serde(default)]
    pub csv_bytes: u64,
    pub state: T,
}

impl<S: PartialEq, T> Checkpoint<S, T> {
    pub fn new(kind: &str, spec: S, next_group: u64, csv_bytes: u64, state: T) -> Self {
        Checkpoint {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            spec,
            next_group,
            csv_bytes,
            state,
        }
    }

    /// Errors unless this checkpoint belongs to the given scan.
    pub fn ensure_matches(&self, path: &Path, kind: &str, spec: &S) -> Result<(), CheckpointError> {
        if self.kind != kind {
            return Err(CheckpointError::Mismatch {
                path: path.display().to_string(),
                what: "scan kind",
            });
        }
        if &self.spec != spec {
            return Err(CheckpointError::Mismatch {
                path: path.display().to_string(),
                what: "scan specification",
            });
        }
        Ok(())
    }
}

/// Writes `value` to a sibling temp file, then renames it over `path`.
pub fn write_atomic<V: Serialize>(path: &Path, value: &V) -> Result<(), CheckpointError> {
    let io_err = |source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    let mut f = fs::File::create(tmp).map_err(io_err)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|source| CheckpointError::Format {
        path: path.display().to_string(),
        source,
    })?;
    f.write_all(b"\n").map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    fs::rename(tmp, path).map_err(io_err)
}

/// Loads a checkpoint, or `None` if the file does not exist.
pub fn load<S: DeserializeOwned, T: DeserializeOwned>(path: &Path) -> Result<Option<Checkpoint<S, T>>, CheckpointError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(source) => {
            return Err(CheckpointError::Io {
                path: path.display().to_string(),
                source,
            })
        }
    };
    let probe: serde_json::Value = serde_json::from_str(&text).map_err(|source| CheckpointError::Format {
        path: path.display().to_string(),
        source,
    })?;
    let found = probe.get("format_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if found != FORMAT_VERSION {
        return Err(CheckpointError::Version {
            path: path.display().to_string(),
            found,
            expected: FORMAT_VERSION,
        });
    }
    serde_json::from_value(probe)
        .map(Some)
        .map_err(|source| CheckpointError::Format {
            path: path.display().to_string(),
            source,
        })
}
