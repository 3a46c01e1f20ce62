//! Checkpoint persistence for long-running scans.
//!
//! A checkpoint is a single self-describing JSON blob tagged with a hash of
//! the originating configuration; a hash mismatch refuses to resume rather
//! than silently mixing configs. Writes go through a temp file + rename so
//! a crash never leaves a truncated checkpoint behind.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::running::RunningScan;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub last_processed_n: u64,
    pub scan: RunningScan,
}

/// Hash of the canonical config string identifying a run.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save(path: &Path, ck: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(ck)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path, command: &str, expected_hash: &str) -> Result<Checkpoint> {
    let ck: Checkpoint = serde_json::from_slice(&fs::read(path)?)?;
    if ck.schema_version != SCHEMA_VERSION {
        return Err(Error::CheckpointMismatch(format!(
            "schema version {} (expected {SCHEMA_VERSION})",
            ck.schema_version
        )));
    }
    if ck.command != command {
        return Err(Error::CheckpointMismatch(format!(
            "checkpoint is for command '{}', not '{command}'",
            ck.command
        )));
    }
    if ck.config_hash != expected_hash {
        return Err(Error::CheckpointMismatch(
            "config hash differs from the checkpointed run".into(),
        ));
    }
    Ok(ck)
}
