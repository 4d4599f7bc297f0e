//! Command-line front end: one binary wiring the IR, renderers, RTF parser,
//! bridge registry, comparison engine, gates, analyzer, provenance, and
//! fixture generator.
//!
//! Exit codes: 0 success / all PASS, 1 FAIL findings, 2 usage or execution
//! error. SKIP never changes the exit code.

mod commands;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "tflparity",
    version,
    about = "Typed cell-grid IR and dual-pipeline parity harness for clinical report tables"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout where applicable.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for batch comparison (default: logical CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, render, reconcile, or lint IR grids.
    #[command(subcommand)]
    Ir(commands::ir::IrCommand),
    /// Parse legacy RTF tables.
    #[command(subcommand)]
    Rtf(commands::rtf::RtfCommand),
    /// Audit the bridge map or resolve entry parameters.
    #[command(subcommand)]
    Bridge(commands::bridge::BridgeCommand),
    /// Compare legacy output against native IR.
    #[command(subcommand)]
    Compare(commands::compare::CompareCommand),
    /// Run the gate-based verification workflow.
    #[command(subcommand)]
    Gates(commands::gates::GatesCommand),
    /// Static analysis of a SAS macro library.
    #[command(subcommand)]
    Analyze(commands::analyze::AnalyzeCommand),
    /// Verify execution manifests.
    #[command(subcommand)]
    Audit(commands::audit::AuditCommand),
    /// Generate fixture pairs.
    #[command(subcommand)]
    Synth(commands::synth::SynthCommand),
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Ir(cmd) => commands::ir::run(cmd, cli.json),
        Command::Rtf(cmd) => commands::rtf::run(cmd, cli.json),
        Command::Bridge(cmd) => commands::bridge::run(cmd, cli.json),
        Command::Compare(cmd) => commands::compare::run(cmd, cli.json),
        Command::Gates(cmd) => commands::gates::run(cmd, cli.json),
        Command::Analyze(cmd) => commands::analyze::run(cmd, cli.json),
        Command::Audit(cmd) => commands::audit::run(cmd, cli.json),
        Command::Synth(cmd) => commands::synth::run(cmd, cli.json),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
