use super::apply_output_override;
use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use std::path::PathBuf;
use tflparity_core::gates::{run_gates, GateId, GateRunOptions, HarnessConfig};

#[derive(Subcommand)]
pub enum GatesCommand {
    /// Run the verification gates in order.
    Run(RunArgs),
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Last gate to execute (A through G).
    #[arg(long, default_value = "G")]
    through: String,
    /// Run the full matrix even when triage reported open items.
    #[arg(long)]
    force: bool,
    /// Write the machine-readable gate report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn run(cmd: GatesCommand, json: bool) -> Result<i32> {
    match cmd {
        GatesCommand::Run(args) => {
            let through: GateId = args
                .through
                .parse()
                .map_err(|e: String| anyhow::anyhow!(e))?;
            let mut config = HarnessConfig::load(&args.config)?;
            apply_output_override(&mut config);
            let run = run_gates(
                &config,
                &GateRunOptions {
                    through,
                    force: args.force,
                },
            )?;
            if json {
                println!("{}", run.to_json());
            } else {
                for result in &run.results {
                    println!(
                        "gate {} ({}) ... {:?} [{} ms]",
                        result.gate,
                        result.gate.describe(),
                        result.status,
                        result.duration_ms
                    );
                    for finding in &result.findings {
                        println!("    {finding}");
                    }
                }
                if !run.triage.is_empty() {
                    println!("triage:");
                    for item in &run.triage {
                        println!(
                            "    {} -> {:?}: {}",
                            item.entry_id, item.class, item.rationale
                        );
                    }
                }
            }
            if let Some(path) = args.report {
                std::fs::write(&path, run.to_json())
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(run.exit_code())
        }
    }
}
