use super::EXIT_PASS;
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use tflparity_core::render::to_json;
use tflparity_core::synth::{cdisc_pilot_presets, generate_pair, Arm, FixtureSpec, ReportKind};

#[derive(Subcommand)]
pub enum SynthCommand {
    /// Generate a paired legacy RTF / native IR fixture.
    Make(MakeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Demographics,
    AeSummary,
    AeSocPt,
    Listing,
    KmTte,
}

impl From<KindArg> for ReportKind {
    fn from(value: KindArg) -> Self {
        match value {
            KindArg::Demographics => ReportKind::Demographics,
            KindArg::AeSummary => ReportKind::AeSummary,
            KindArg::AeSocPt => ReportKind::AeSocPt,
            KindArg::Listing => ReportKind::Listing,
            KindArg::KmTte => ReportKind::KmTte,
        }
    }
}

#[derive(Args)]
pub struct MakeArgs {
    #[arg(long, value_enum, required_unless_present = "preset")]
    kind: Option<KindArg>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Total grid rows including the header row.
    #[arg(long, default_value_t = 20)]
    rows: u32,
    /// Treatment arms as `Label:n`, comma-separated.
    #[arg(long, default_value = "Placebo:50,Active:48")]
    arms: String,
    /// Generate the five public-benchmark echo fixtures instead.
    #[arg(long)]
    preset: bool,
    /// Output directory; fixtures land in `<out>/<report-id>/{legacy,native}/`.
    #[arg(long, default_value = "fixtures")]
    out: PathBuf,
}

fn parse_arms(spec: &str) -> Result<Vec<Arm>> {
    let mut arms = Vec::new();
    for part in spec.split(',') {
        let (label, n) = part
            .trim()
            .rsplit_once(':')
            .with_context(|| format!("arm {part:?} must be Label:n"))?;
        arms.push(Arm::new(label.trim(), n.trim().parse()?));
    }
    if arms.is_empty() {
        bail!("at least one arm is required");
    }
    Ok(arms)
}

fn write_pair(out: &Path, spec: &FixtureSpec, json: bool) -> Result<String> {
    let pair = generate_pair(spec);
    let id = spec.report_id();
    let dir = out.join(&id);
    std::fs::create_dir_all(dir.join("legacy"))?;
    std::fs::create_dir_all(dir.join("native"))?;
    std::fs::write(dir.join("legacy/legacy.rtf"), &pair.rtf)?;
    std::fs::write(dir.join("native/native.json"), to_json(&pair.grid)?)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "report_id": id,
                "cells": pair.grid.cells.len(),
                "rows": pair.grid.n_rows(),
                "cols": pair.grid.n_cols(),
                "dir": dir,
            })
        );
    } else {
        println!(
            "{id}: {} cells ({} x {}) -> {}",
            pair.grid.cells.len(),
            pair.grid.n_rows(),
            pair.grid.n_cols(),
            dir.display()
        );
    }
    Ok(id)
}

pub fn run(cmd: SynthCommand, json: bool) -> Result<i32> {
    match cmd {
        SynthCommand::Make(args) => {
            if args.preset {
                for spec in cdisc_pilot_presets() {
                    write_pair(&args.out, &spec, json)?;
                }
                return Ok(EXIT_PASS);
            }
            let spec = FixtureSpec {
                report_kind: args.kind.expect("clap enforces kind without preset").into(),
                arms: parse_arms(&args.arms)?,
                rows: args.rows,
                seed: args.seed,
            };
            write_pair(&args.out, &spec, json)?;
            Ok(EXIT_PASS)
        }
    }
}
