use super::EXIT_PASS;
use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use tflparity_core::analyzer::{
    analyze_library, coverage_matrix, TaxonomyRules, DEFAULT_HUB_THRESHOLD,
};

#[derive(Subcommand)]
pub enum AnalyzeCommand {
    /// Inventory a SAS macro library: taxonomy, metrics, call graph,
    /// diagnostics, coverage.
    Library(LibraryArgs),
}

#[derive(Args)]
pub struct LibraryArgs {
    /// Directory of `.sas` sources.
    dir: PathBuf,
    /// YAML mapping macro names to the report types they serve.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Override the bundled classification keyword table (same YAML shape).
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HUB_THRESHOLD)]
    hub_threshold: usize,
    /// Report types the coverage matrix should check for gaps, repeatable.
    #[arg(long = "report-type")]
    report_types: Vec<String>,
    /// Output directory for inventory.json, inventory.csv, callgraph.dot,
    /// coverage.json.
    #[arg(long, default_value = "analysis")]
    out: PathBuf,
}

pub fn run(cmd: AnalyzeCommand, json: bool) -> Result<i32> {
    match cmd {
        AnalyzeCommand::Library(args) => {
            let rules = match &args.rules {
                Some(path) => TaxonomyRules::from_yaml(
                    &std::fs::read_to_string(path)
                        .with_context(|| format!("cannot read {}", path.display()))?,
                )?,
                None => TaxonomyRules::default(),
            };
            let annotations: BTreeMap<String, Vec<String>> = match &args.annotations {
                Some(path) => serde_yaml::from_str(
                    &std::fs::read_to_string(path)
                        .with_context(|| format!("cannot read {}", path.display()))?,
                )?,
                None => BTreeMap::new(),
            };
            let (inventory, graph) =
                analyze_library(&args.dir, &rules, &annotations, args.hub_threshold);
            let coverage = coverage_matrix(&inventory.records, &args.report_types);

            std::fs::create_dir_all(&args.out)?;
            std::fs::write(args.out.join("inventory.json"), inventory.to_json())?;
            std::fs::write(args.out.join("inventory.csv"), inventory.to_csv())?;
            std::fs::write(args.out.join("callgraph.dot"), graph.to_dot())?;
            std::fs::write(
                args.out.join("coverage.json"),
                serde_json::to_string_pretty(&coverage)?,
            )?;

            if json {
                println!("{}", inventory.to_json());
            } else {
                println!(
                    "{} macros, {} edges, {} orphan(s), {} cycle(s), {} hub(s); outputs in {}",
                    inventory.records.len(),
                    graph.edges.len(),
                    inventory.diagnostics.orphans.len(),
                    inventory.diagnostics.cycles.len(),
                    inventory.diagnostics.hubs.len(),
                    args.out.display()
                );
                for warning in &inventory.warnings {
                    println!("warning: {warning}");
                }
                for io_error in &inventory.io_errors {
                    println!("io error: {io_error}");
                }
            }
            Ok(EXIT_PASS)
        }
    }
}
