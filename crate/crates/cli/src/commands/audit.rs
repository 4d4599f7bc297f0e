use super::{EXIT_FAIL, EXIT_PASS};
use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use std::path::PathBuf;
use tflparity_core::audit::{verify_manifest, ExecutionManifest};

#[derive(Subcommand)]
pub enum AuditCommand {
    /// Re-hash every file an execution manifest names.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct VerifyArgs {
    manifest: PathBuf,
}

pub fn run(cmd: AuditCommand, json: bool) -> Result<i32> {
    match cmd {
        AuditCommand::Verify(args) => {
            let manifest = ExecutionManifest::from_json(
                &std::fs::read_to_string(&args.manifest)
                    .with_context(|| format!("cannot read {}", args.manifest.display()))?,
            )?;
            let report = verify_manifest(&manifest);
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for (path, outcome) in &report.entries {
                    println!("{outcome:?}  {}", path.display());
                }
                println!(
                    "{}: {}",
                    manifest.entry_id,
                    if report.all_match() {
                        "all MATCH"
                    } else {
                        "verification FAILED"
                    }
                );
            }
            Ok(if report.all_match() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
    }
}
