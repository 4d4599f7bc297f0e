//! Execution manifests: input and output digests plus the resolved
//! parameters that connected them.

use super::AuditError;
use crate::bridge::ExecutionPlan;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    /// 64 hex characters of SHA-256.
    pub sha256: String,
}

/// Answers "what exact inputs and parameters produced this output?" for one
/// run. Field order is fixed for deterministic serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionManifest {
    pub execution_id: String,
    pub entry_id: String,
    pub inputs: Vec<FileDigest>,
    pub resolved_params: BTreeMap<String, String>,
    pub component_versions: BTreeMap<String, String>,
    pub session_meta: BTreeMap<String, String>,
    pub outputs: Vec<FileDigest>,
}

impl ExecutionManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(doc: &str) -> Result<Self, AuditError> {
        serde_json::from_str(doc).map_err(|e| AuditError::Serialize(e.to_string()))
    }
}

/// SHA-256 over raw file bytes, streamed.
pub fn hash_file(path: &Path) -> Result<String, AuditError> {
    let mut file = std::fs::File::open(path).map_err(|source| AuditError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn digest_all(paths: &[PathBuf]) -> Result<Vec<FileDigest>, AuditError> {
    let mut digests = Vec::with_capacity(paths.len());
    let mut sorted: Vec<&PathBuf> = paths.iter().collect();
    sorted.sort();
    for path in sorted {
        if !path.is_file() {
            return Err(AuditError::MissingInput(path.clone()));
        }
        digests.push(FileDigest {
            path: path.clone(),
            sha256: hash_file(path)?,
        });
    }
    Ok(digests)
}

/// Build a manifest for one executed plan. The execution id is freshly
/// generated; everything else is a pure function of the plan and the files.
pub fn build_manifest(
    plan: &ExecutionPlan,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Result<ExecutionManifest, AuditError> {
    let mut component_versions = BTreeMap::new();
    component_versions.insert(
        "tflparity-core".to_string(),
        env!("CARGO_PKG_VERSION").to_string(),
    );
    // legacy macro sources carry no version scheme; their content hash is
    // the version
    for input in inputs {
        if input.extension().and_then(|e| e.to_str()) == Some("sas") {
            component_versions.insert(
                format!("macro:{}", input.display()),
                format!("sha256:{}", hash_file(input)?),
            );
        }
    }
    let mut session_meta = BTreeMap::new();
    session_meta.insert("os".to_string(), std::env::consts::OS.to_string());
    session_meta.insert("arch".to_string(), std::env::consts::ARCH.to_string());

    Ok(ExecutionManifest {
        execution_id: uuid::Uuid::new_v4().to_string(),
        entry_id: plan.entry_id.clone(),
        inputs: digest_all(inputs)?,
        resolved_params: plan.resolved_params.clone(),
        component_versions,
        session_meta,
        outputs: digest_all(outputs)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VerifyOutcome {
    Match,
    Mismatch,
    Missing,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub entries: Vec<(PathBuf, VerifyOutcome)>,
}

impl VerifyReport {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|(_, o)| *o == VerifyOutcome::Match)
    }

    pub fn mismatches(&self) -> Vec<&Path> {
        self.entries
            .iter()
            .filter(|(_, o)| *o != VerifyOutcome::Match)
            .map(|(p, _)| p.as_path())
            .collect()
    }
}

/// Re-hash every file named by the manifest and report per-file outcomes.
/// All outcomes are report entries; nothing here is an error.
pub fn verify_manifest(manifest: &ExecutionManifest) -> VerifyReport {
    let mut entries = Vec::new();
    for digest in manifest.inputs.iter().chain(manifest.outputs.iter()) {
        let outcome = if !digest.path.is_file() {
            VerifyOutcome::Missing
        } else {
            match hash_file(&digest.path) {
                Ok(actual) if actual == digest.sha256 => VerifyOutcome::Match,
                Ok(_) => VerifyOutcome::Mismatch,
                Err(_) => VerifyOutcome::Missing,
            }
        };
        entries.push((digest.path.clone(), outcome));
    }
    VerifyReport { entries }
}
