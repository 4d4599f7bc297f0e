use super::{read_grid, write_or_print, EXIT_FAIL, EXIT_PASS};
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use std::path::PathBuf;
use tflparity_core::ir::{
    check_hierarchy_consistency, reconcile, validate_grid_with, HierarchySpec, IrMappingConfig,
    StatRecord, ValidateOptions, DEFAULT_RECONCILE_TOLERANCE,
};
use tflparity_core::render::{to_html, to_json, to_rtf, FootnotePolicy, RenderConfig};

#[derive(Subcommand)]
pub enum IrCommand {
    /// Check the structural validity rules.
    Validate(ValidateArgs),
    /// Render a grid to JSON, HTML, or RTF.
    Render(RenderArgs),
    /// Trace numeric cells back to source statistics.
    Reconcile(ReconcileArgs),
    /// Run the count-hierarchy consistency lint.
    Lint(LintArgs),
}

#[derive(Args)]
pub struct ValidateArgs {
    grid: PathBuf,
    /// Permit cells on SEPARATOR rows.
    #[arg(long)]
    allow_separator_cells: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Html,
    Rtf,
}

#[derive(Args)]
pub struct RenderArgs {
    grid: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    title: Option<String>,
    /// Drop FOOTNOTE-typed cell text.
    #[arg(long)]
    omit_footnotes: bool,
    /// RTF column widths in twips, comma-separated.
    #[arg(long)]
    widths: Option<String>,
}

#[derive(Args)]
pub struct ReconcileArgs {
    grid: PathBuf,
    /// JSON array of stat records.
    #[arg(long)]
    source: PathBuf,
    /// IR mapping config (YAML).
    #[arg(long)]
    mapping: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RECONCILE_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
pub struct LintArgs {
    grid: PathBuf,
    /// Hierarchy spec (YAML); derived from row indentation when omitted.
    #[arg(long)]
    hierarchy: Option<PathBuf>,
}

pub fn run(cmd: IrCommand, json: bool) -> Result<i32> {
    match cmd {
        IrCommand::Validate(args) => {
            let grid = read_grid(&args.grid)?;
            let report = validate_grid_with(
                &grid,
                &ValidateOptions {
                    allow_separator_cells: args.allow_separator_cells,
                },
            );
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else if report.valid {
                println!(
                    "valid: {} cells, {} structure entries",
                    grid.cells.len(),
                    grid.structure.len()
                );
            } else {
                for violation in &report.violations {
                    println!(
                        "{} {} {}",
                        violation.rule,
                        violation
                            .location
                            .map(|(r, c)| format!("({r},{c})"))
                            .unwrap_or_default(),
                        violation.detail
                    );
                }
            }
            Ok(if report.valid { EXIT_PASS } else { EXIT_FAIL })
        }
        IrCommand::Render(args) => {
            let grid = read_grid(&args.grid)?;
            let cfg = RenderConfig {
                title: args.title,
                footnote_policy: if args.omit_footnotes {
                    FootnotePolicy::Omit
                } else {
                    FootnotePolicy::Inline
                },
                column_widths_twips: match args.widths {
                    Some(spec) => Some(
                        spec.split(',')
                            .map(|w| w.trim().parse::<u32>().context("widths must be integers"))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    None => None,
                },
            };
            let bytes = match args.format {
                Format::Json => to_json(&grid)?.into_bytes(),
                Format::Html => {
                    let fragment = to_html(&grid, &cfg)?;
                    match &args.out {
                        // standalone files get a document envelope
                        Some(_) => format!(
                            "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"></head><body>\n{fragment}</body></html>\n"
                        )
                        .into_bytes(),
                        None => fragment.into_bytes(),
                    }
                }
                Format::Rtf => to_rtf(&grid, &cfg)?,
            };
            write_or_print(args.out.as_deref(), &bytes)?;
            Ok(EXIT_PASS)
        }
        IrCommand::Reconcile(args) => {
            let grid = read_grid(&args.grid)?;
            let source: Vec<StatRecord> = serde_json::from_str(
                &std::fs::read_to_string(&args.source)
                    .with_context(|| format!("cannot read {}", args.source.display()))?,
            )
            .context("source must be a JSON array of stat records")?;
            let mapping = IrMappingConfig::from_yaml(
                &std::fs::read_to_string(&args.mapping)
                    .with_context(|| format!("cannot read {}", args.mapping.display()))?,
            )?;
            let report = reconcile(&grid, &source, &mapping, args.tolerance)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "checked {} cells at tolerance {}: {}",
                    report.checked,
                    report.tolerance,
                    if report.passed { "PASS" } else { "FAIL" }
                );
                for m in &report.mismatches {
                    println!(
                        "  ({},{}) ir {} vs source {} (|diff| {:.3e})",
                        m.row_id, m.col_id, m.ir_value, m.source_value, m.abs_diff
                    );
                }
            }
            Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
        }
        IrCommand::Lint(args) => {
            let grid = read_grid(&args.grid)?;
            let spec = match args.hierarchy {
                Some(path) => serde_yaml::from_str(
                    &std::fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?,
                )?,
                None => HierarchySpec::from_grid_indents(&grid),
            };
            if spec.parents.is_empty() {
                bail!("no hierarchy to lint: supply --hierarchy or indent child rows");
            }
            let report = check_hierarchy_consistency(&grid, &spec)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "{} pairs checked ({}): {}",
                    report.checked_pairs,
                    report.semantics,
                    if report.passed() { "PASS" } else { "FAIL" }
                );
                for v in &report.violations {
                    println!(
                        "  row {} col {}: parent {} < child {} (row {})",
                        v.parent_row, v.col_id, v.parent_value, v.child_value, v.child_row
                    );
                }
            }
            Ok(if report.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
    }
}
