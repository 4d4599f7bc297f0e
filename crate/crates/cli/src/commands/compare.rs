use super::{apply_output_override, read_grid, EXIT_FAIL, EXIT_PASS};
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use std::path::PathBuf;
use tflparity_core::compare::{
    compare_figure, compare_listing, compare_table, summarize, CompareOptions, ComparisonReport,
    SynonymTable, Verdict,
};
use tflparity_core::gates::{compare_batch, HarnessConfig};
use tflparity_core::rtf::parse_rtf;

#[derive(Subcommand)]
pub enum CompareCommand {
    /// Aligned cell-level table comparison.
    Table(TableArgs),
    /// Positional, order-significant listing comparison.
    Listing(PairArgs),
    /// Coarse file-size figure comparison.
    Figure(FigureArgs),
    /// Execute and compare every bridge map entry.
    Batch(BatchArgs),
}

#[derive(Args)]
pub struct TableArgs {
    legacy_rtf: PathBuf,
    native_json: PathBuf,
    /// Display-level numeric tolerance.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Extra synonym classes (YAML list of lists).
    #[arg(long)]
    synonyms: Option<PathBuf>,
    /// Apply treatment-name synonyms before comparing (fix mode) instead of
    /// reporting them as divergences.
    #[arg(long)]
    harmonize: bool,
    /// Count only data cells in the parity percentage.
    #[arg(long)]
    data_cells_only: bool,
    /// Also append the summary line (entry_id, verdict, parity, top
    /// category) to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct PairArgs {
    legacy_rtf: PathBuf,
    native_json: PathBuf,
}

#[derive(Args)]
pub struct FigureArgs {
    legacy: PathBuf,
    native: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    tolerance_pct: f64,
}

#[derive(Args)]
pub struct BatchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Compare only these entries (repeatable); default all.
    #[arg(long = "only")]
    only: Vec<String>,
    /// Also write the summary as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn load_legacy_table(path: &PathBuf) -> Result<tflparity_core::rtf::RawTable> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut tables = parse_rtf(&bytes)?;
    if tables.is_empty() {
        bail!("{} contains no tables", path.display());
    }
    let mut table = tables.remove(0);
    table.source_path = Some(path.display().to_string());
    Ok(table)
}

fn append_csv_row(path: &PathBuf, report: &ComparisonReport) -> Result<()> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    if fresh {
        writeln!(file, "entry_id,verdict,parity_pct,top_category")?;
    }
    writeln!(file, "{}", report.csv_row())?;
    Ok(())
}

fn emit(report: &ComparisonReport, json: bool) -> Result<i32> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        println!(
            "{}: {} ({}/{} cells, parity {:.1}%)",
            report.entry_id,
            report.verdict,
            report.matched_cells,
            report.total_cells,
            report.parity_pct
        );
        for note in &report.alignment_notes {
            println!("  note: {note}");
        }
        for diff in report.diffs.iter().take(25) {
            println!(
                "  {} legacy {:?} vs native {:?}",
                diff.category, diff.legacy_text, diff.native_text
            );
        }
        if report.diffs.len() > 25 {
            println!("  ... and {} more diffs", report.diffs.len() - 25);
        }
    }
    Ok(match report.verdict {
        Verdict::Pass | Verdict::Skip => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Error => 2,
    })
}

pub fn run(cmd: CompareCommand, json: bool) -> Result<i32> {
    match cmd {
        CompareCommand::Table(args) => {
            let legacy = load_legacy_table(&args.legacy_rtf)?;
            let native = read_grid(&args.native_json)?;
            let mut opts = CompareOptions {
                epsilon: args.epsilon,
                apply_synonyms: args.harmonize,
                data_cells_only: args.data_cells_only,
                ..Default::default()
            };
            if let Some(path) = args.synonyms {
                let doc = std::fs::read_to_string(&path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                opts.align.synonyms = SynonymTable::from_yaml(&doc)?;
            }
            let report = compare_table(&legacy, &native, &opts);
            if let Some(csv) = &args.csv {
                append_csv_row(csv, &report)?;
            }
            emit(&report, json)
        }
        CompareCommand::Listing(args) => {
            let legacy = load_legacy_table(&args.legacy_rtf)?;
            let native = read_grid(&args.native_json)?;
            emit(&compare_listing(&legacy, &native), json)
        }
        CompareCommand::Figure(args) => emit(
            &compare_figure(&args.legacy, &args.native, args.tolerance_pct),
            json,
        ),
        CompareCommand::Batch(args) => {
            let mut config = HarnessConfig::load(&args.config)?;
            apply_output_override(&mut config);
            let reports = compare_batch(&config, &args.only)?;
            let matrix = summarize(&reports);
            if json {
                println!("{}", matrix.to_json());
            } else {
                println!("entry_id  verdict  parity");
                for row in &matrix.rows {
                    println!("{}  {}  {:.1}%", row.entry_id, row.verdict, row.parity_pct);
                }
                println!(
                    "{} of {} at or above the 80% threshold",
                    matrix.at_threshold, matrix.total
                );
            }
            if let Some(csv) = args.csv {
                std::fs::write(&csv, matrix.to_csv())
                    .with_context(|| format!("cannot write {}", csv.display()))?;
            }
            let all_ok = reports
                .iter()
                .all(|r| matches!(r.verdict, Verdict::Pass | Verdict::Skip));
            let any_error = reports.iter().any(|r| r.verdict == Verdict::Error);
            Ok(if all_ok {
                EXIT_PASS
            } else if any_error {
                2
            } else {
                EXIT_FAIL
            })
        }
    }
}
