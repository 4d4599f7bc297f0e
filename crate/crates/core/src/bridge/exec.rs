//! Execution adapters.
//!
//! Running a plan is a pluggable concern: the default adapter materializes
//! pre-generated artifacts from a fixtures directory (keyed by entry id and
//! side), which stands in for a statistical runtime and keeps the whole
//! harness testable at desk scale. A shell adapter is provided for sites
//! with a real execution environment. Plans for distinct entries write to
//! disjoint per-entry directories, so adapters may run them concurrently.

use super::plan::{ArtifactKind, ExecutionPlan};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to spawn command {command:?}: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
}

/// What actually happened when a plan ran.
#[derive(Debug, Clone)]
pub struct ExecutionOutcome {
    pub exit_ok: bool,
    pub produced: Vec<PathBuf>,
    pub missing: Vec<PathBuf>,
    pub log: String,
}

impl ExecutionOutcome {
    pub fn succeeded(&self) -> bool {
        self.exit_ok && self.missing.is_empty()
    }
}

/// Anything that can run an [`ExecutionPlan`] and account for its artifacts.
pub trait ExecutionAdapter: Sync {
    fn run(&self, plan: &ExecutionPlan) -> Result<ExecutionOutcome, ExecError>;
}

/// Copies pre-generated artifacts from `fixtures_dir/<entry>/<side>/` into
/// the plan's expected locations. Logs are synthesized when the fixture set
/// does not carry them; data artifacts must exist.
#[derive(Debug, Clone)]
pub struct FixtureExecutor {
    pub fixtures_dir: PathBuf,
}

impl FixtureExecutor {
    pub fn new(fixtures_dir: impl Into<PathBuf>) -> Self {
        FixtureExecutor {
            fixtures_dir: fixtures_dir.into(),
        }
    }
}

impl ExecutionAdapter for FixtureExecutor {
    fn run(&self, plan: &ExecutionPlan) -> Result<ExecutionOutcome, ExecError> {
        let mut produced = Vec::new();
        let mut missing = Vec::new();
        let mut log = format!(
            "fixture executor: entry {} side {:?}\n",
            plan.entry_id, plan.side
        );
        for (kind, dest) in &plan.expected_artifacts {
            if let Some(parent) = dest.parent() {
                std::fs::create_dir_all(parent).map_err(|source| ExecError::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            let file_name = dest
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default();
            let source_path = self
                .fixtures_dir
                .join(&plan.entry_id)
                .join(plan.side.as_dir())
                .join(&file_name);
            if source_path.is_file() {
                std::fs::copy(&source_path, dest).map_err(|source| ExecError::Io {
                    path: source_path.clone(),
                    source,
                })?;
                produced.push(dest.clone());
            } else if *kind == ArtifactKind::Log {
                let body = format!(
                    "NOTE: fixture log for {} ({:?})\n{}",
                    plan.entry_id, plan.side, plan.program_text
                );
                std::fs::write(dest, body).map_err(|source| ExecError::Io {
                    path: dest.clone(),
                    source,
                })?;
                produced.push(dest.clone());
            } else {
                log.push_str(&format!("missing fixture: {}\n", source_path.display()));
                missing.push(source_path);
            }
        }
        Ok(ExecutionOutcome {
            exit_ok: missing.is_empty(),
            produced,
            missing,
            log,
        })
    }
}

/// Runs `<command> <program-file>` through the shell, for sites with a real
/// execution runtime. The program text is written next to the artifacts.
#[derive(Debug, Clone)]
pub struct ShellExecutor {
    pub command: String,
}

impl ExecutionAdapter for ShellExecutor {
    fn run(&self, plan: &ExecutionPlan) -> Result<ExecutionOutcome, ExecError> {
        let program_dir = plan
            .expected_artifacts
            .first()
            .and_then(|(_, p)| p.parent())
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&program_dir).map_err(|source| ExecError::Io {
            path: program_dir.clone(),
            source,
        })?;
        let program_path = program_dir.join("program.sas");
        std::fs::write(&program_path, &plan.program_text).map_err(|source| ExecError::Io {
            path: program_path.clone(),
            source,
        })?;

        let command = format!("{} {}", self.command, program_path.display());
        let output = std::process::Command::new("sh")
            .arg("-c")
            .arg(&command)
            .output()
            .map_err(|source| ExecError::Spawn {
                command: command.clone(),
                source,
            })?;

        let mut produced = Vec::new();
        let mut missing = Vec::new();
        for (_, artifact) in &plan.expected_artifacts {
            if artifact.is_file() {
                produced.push(artifact.clone());
            } else {
                missing.push(artifact.clone());
            }
        }
        Ok(ExecutionOutcome {
            exit_ok: output.status.success(),
            produced,
            missing,
            log: String::from_utf8_lossy(&output.stdout).into_owned()
                + &String::from_utf8_lossy(&output.stderr),
        })
    }
}
