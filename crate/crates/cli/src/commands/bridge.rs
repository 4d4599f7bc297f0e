use super::{EXIT_FAIL, EXIT_PASS};
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use tflparity_core::analyzer::{collect_sas_files, parse_macro_headers};
use tflparity_core::bridge::{
    load_bridge_map, load_registry, load_study_config, resolve_parameters, self_audit,
    LegacyCorpus, ParamValue, ResolveOptions,
};

#[derive(Subcommand)]
pub enum BridgeCommand {
    /// Self-audit: targets resolve, mappings are valid, names are legal.
    Audit(AuditArgs),
    /// Resolve an entry's parameters through the three value layers.
    Resolve(ResolveArgs),
}

#[derive(Args)]
pub struct AuditArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    registry: PathBuf,
    #[arg(long)]
    study: PathBuf,
    /// Legacy `.sas` sources for coexistence-target checks.
    #[arg(long)]
    legacy_corpus: Option<PathBuf>,
}

#[derive(Args)]
pub struct ResolveArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    entry: String,
    #[arg(long)]
    study: PathBuf,
    /// Legacy-name call arguments, `name=value`, repeatable.
    #[arg(long = "arg")]
    args: Vec<String>,
    /// Pass unmapped legacy arguments through instead of failing.
    #[arg(long)]
    lenient: bool,
}

pub fn run(cmd: BridgeCommand, json: bool) -> Result<i32> {
    match cmd {
        BridgeCommand::Audit(args) => {
            let map = load_bridge_map(&args.map)?;
            let registry = load_registry(&args.registry)?;
            let study = load_study_config(&args.study)?;
            let corpus = args.legacy_corpus.map(|dir| {
                let scan = parse_macro_headers(&collect_sas_files(&dir));
                let mut corpus = LegacyCorpus::new();
                for def in &scan.defs {
                    corpus.add_macro(&def.name, def.parameters.iter().map(|(n, _)| n.clone()));
                }
                corpus
            });
            let findings = self_audit(&map, &registry, &study, corpus.as_ref());
            if json {
                println!("{}", serde_json::to_string_pretty(&findings)?);
            } else {
                println!(
                    "{} entries audited: {} error(s), {} finding(s)",
                    map.len(),
                    findings.errors(),
                    findings.findings.len()
                );
                for finding in &findings.findings {
                    println!(
                        "{:7} {}: {}",
                        format!("{:?}", finding.severity).to_uppercase(),
                        finding.entry_id,
                        finding.message
                    );
                }
            }
            Ok(if findings.is_clean() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
        BridgeCommand::Resolve(args) => {
            let map = load_bridge_map(&args.map)?;
            let Some(entry) = map.get(&args.entry) else {
                bail!("entry {:?} not in the bridge map", args.entry);
            };
            let study = load_study_config(&args.study)?;
            let mut call_args: BTreeMap<String, ParamValue> = BTreeMap::new();
            for pair in &args.args {
                let (name, value) = pair
                    .split_once('=')
                    .with_context(|| format!("--arg {pair:?} must be name=value"))?;
                call_args.insert(name.to_string(), ParamValue::from(value));
            }
            let resolved = resolve_parameters(
                entry,
                &study,
                &call_args,
                &ResolveOptions {
                    strict: !args.lenient,
                },
            )?;
            if json {
                println!("{}", serde_json::to_string_pretty(&resolved)?);
            } else {
                for (name, value) in &resolved {
                    println!("{name}={value}");
                }
            }
            Ok(EXIT_PASS)
        }
    }
}
