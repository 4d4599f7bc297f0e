use super::EXIT_PASS;
use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use std::io::Read;
use std::path::PathBuf;
use tflparity_core::rtf::parse_rtf_verbose;

#[derive(Subcommand)]
pub enum RtfCommand {
    /// Extract tables from an RTF file (or stdin with `-`) as JSON
    /// array-of-arrays.
    Parse(ParseArgs),
}

#[derive(Args)]
pub struct ParseArgs {
    /// RTF file path, or `-` for standard input.
    input: PathBuf,
}

pub fn run(cmd: RtfCommand, _json: bool) -> Result<i32> {
    match cmd {
        RtfCommand::Parse(args) => {
            let bytes = if args.input.as_os_str() == "-" {
                let mut buf = Vec::new();
                std::io::stdin().read_to_end(&mut buf)?;
                buf
            } else {
                std::fs::read(&args.input)
                    .with_context(|| format!("cannot read {}", args.input.display()))?
            };
            let (tables, warnings) = parse_rtf_verbose(&bytes)?;
            for warning in &warnings {
                eprintln!("warning (offset {}): {}", warning.offset, warning.message);
            }
            let rows: Vec<&Vec<Vec<String>>> = tables.iter().map(|t| &t.rows).collect();
            println!("{}", serde_json::to_string_pretty(&rows)?);
            Ok(EXIT_PASS)
        }
    }
}
