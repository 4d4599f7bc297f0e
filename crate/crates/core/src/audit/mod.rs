//! Provenance: the append-only audit trail and hashed execution manifests.
//!
//! The audit log is newline-delimited JSON, one record per line — greppable,
//! append-safe, schema-evolvable. A single writer per log file is enforced
//! with an advisory file lock; concurrent workers funnel records through one
//! shared handle. Manifests capture exactly what inputs and parameters
//! produced which outputs, with SHA-256 digests on both ends.

mod log;
mod manifest;

pub use log::{read_log, AuditLog, AuditRecord, AuditStatus, SharedAuditLog};
pub use manifest::{
    build_manifest, hash_file, verify_manifest, ExecutionManifest, FileDigest, VerifyOutcome,
    VerifyReport,
};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("audit log {path} is locked by another writer")]
    LockHeld { path: PathBuf },
    #[error("missing input file {0}")]
    MissingInput(PathBuf),
    #[error("serialization: {0}")]
    Serialize(String),
}
