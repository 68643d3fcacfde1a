//! Scan checkpoints: a JSON document rewritten atomically at order-contiguous
//! frontiers of the scan.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lucasian::Sign;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::record::ResultRecord;

pub const SCHEMA_VERSION: u32 = 1;

/// Names the directory used for checkpoints when no explicit path is given,
/// and against which relative checkpoint paths are resolved.
pub const CHECKPOINT_DIR_ENV: &str = "LUCASIAN_CHECKPOINT_DIR";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("cannot read checkpoint {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write checkpoint {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("checkpoint {path} is not valid JSON: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("checkpoint {path} has schema_version {found}, expected {SCHEMA_VERSION}")]
    Schema { path: PathBuf, found: u64 },
    #[error("checkpoint {path} was written for a different scan range")]
    RangeMismatch { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ScanMode {
    Class,
    Generic { b_max: u32, c_max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRange {
    pub k_min: u64,
    pub k_max: u64,
    pub m_min: u64,
    pub m_max: u64,
    /// Sorted, minus before plus.
    pub signs: Vec<Sign>,
    pub mode: ScanMode,
}

/// A position in the canonical scan order: `m`, then `k`, then sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cursor {
    pub m: u64,
    pub k: u64,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCheckpoint {
    pub schema_version: u32,
    pub range: ScanRange,
    /// Last fully processed position; `None` before any progress.
    pub cursor: Option<Cursor>,
    pub complete: bool,
    pub found: Vec<ResultRecord>,
}

impl ScanCheckpoint {
    pub fn new(range: ScanRange) -> Self {
        ScanCheckpoint {
            schema_version: SCHEMA_VERSION,
            range,
            cursor: None,
            complete: false,
            found: Vec::new(),
        }
    }

    /// Writes to a sibling temp file, syncs it, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let write_err = |source| CheckpointError::Write {
            path: path.to_path_buf(),
            source,
        };
        let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(".tmp");
        let tmp = path.with_file_name(tmp_name);
        let body = serde_json::to_vec_pretty(self).expect("checkpoint serializes");
        {
            let mut f = fs::File::create(&tmp).map_err(write_err)?;
            f.write_all(&body).map_err(write_err)?;
            f.write_all(b"\n").map_err(write_err)?;
            f.sync_all().map_err(write_err)?;
        }
        fs::rename(&tmp, path).map_err(write_err)
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let bytes = fs::read(path).map_err(|source| CheckpointError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |source| CheckpointError::Parse {
            path: path.to_path_buf(),
            source,
        };
        let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(parse_err)?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .unwrap_or(0);
        if found != u64::from(SCHEMA_VERSION) {
            return Err(CheckpointError::Schema {
                path: path.to_path_buf(),
                found,
            });
        }
        serde_json::from_value(value).map_err(parse_err)
    }
}

/// Resolves the checkpoint location from an explicit path and the
/// environment. Relative paths land under the environment directory when it
/// is set; with no path, a range-derived name in that directory is used.
pub fn resolve_path(explicit: Option<&Path>, env_dir: Option<&Path>, range: &ScanRange) -> Option<PathBuf> {
    match (explicit, env_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(dir)) => {
            let signs: String = range.signs.iter().map(|s| if *s == Sign::Minus { 'm' } else { 'p' }).collect();
            let mode = match range.mode {
                ScanMode::Class => "class".to_string(),
                ScanMode::Generic { b_max, c_max } => format!("generic-b{b_max}-c{c_max}"),
            };
            Some(dir.join(format!(
                "scan-k{}-{}-m{}-{}-{signs}-{mode}.json",
                range.k_min, range.k_max, range.m_min, range.m_max
            )))
        }
        (None, None) => None,
    }
}
