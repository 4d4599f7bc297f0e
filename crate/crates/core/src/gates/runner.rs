//! Per-entry execution and comparison for gates E and G (and `compare
//! batch`).

use super::{HarnessConfig, Loaded};
use crate::audit::build_manifest;
use crate::bridge::{
    build_legacy_plan, build_native_plan, ArtifactKind, BridgeMapEntry, ComparisonKind,
    ExecutionAdapter, ExecutionPlan,
};
use crate::compare::{
    compare_figure, compare_listing, compare_table, CompareOptions, ComparisonReport,
};
use crate::render::from_json;
use crate::rtf::parse_rtf;
use serde::Serialize;
use std::path::PathBuf;

/// Execution-side facts the triage needs alongside the comparison verdict.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExecDiagnostics {
    pub missing_paths: Vec<PathBuf>,
    pub resolution_error: Option<String>,
}

#[derive(Debug)]
pub struct EntryOutcome {
    pub report: ComparisonReport,
    pub diagnostics: ExecDiagnostics,
}

fn error_outcome(entry_id: &str, note: String, diagnostics: ExecDiagnostics) -> EntryOutcome {
    EntryOutcome {
        report: ComparisonReport::error(entry_id, note),
        diagnostics,
    }
}

/// Run both drivers for one entry, compare the artifacts, and drop a
/// manifest beside them.
pub fn run_entry(
    config: &HarnessConfig,
    loaded: &Loaded,
    entry: &BridgeMapEntry,
    adapter: &dyn ExecutionAdapter,
) -> EntryOutcome {
    let id = entry.legacy_id.as_str();
    if let Some(annotation) = &entry.skip {
        return EntryOutcome {
            report: ComparisonReport::skip(id, annotation.clone()),
            diagnostics: ExecDiagnostics::default(),
        };
    }

    let call_args = Default::default();
    let legacy_plan = match build_legacy_plan(entry, &loaded.study, &call_args, &config.output_dir)
    {
        Ok(plan) => plan,
        Err(e) => {
            return error_outcome(
                id,
                format!("legacy plan: {e}"),
                ExecDiagnostics {
                    resolution_error: Some(e.to_string()),
                    ..Default::default()
                },
            )
        }
    };
    let native_plan = match build_native_plan(entry, &loaded.study, &call_args, &config.output_dir)
    {
        Ok(plan) => plan,
        Err(e) => {
            return error_outcome(
                id,
                format!("native plan: {e}"),
                ExecDiagnostics {
                    resolution_error: Some(e.to_string()),
                    ..Default::default()
                },
            )
        }
    };

    let mut produced: Vec<PathBuf> = Vec::new();
    for plan in [&legacy_plan, &native_plan] {
        match adapter.run(plan) {
            Ok(outcome) => {
                if !outcome.succeeded() {
                    return error_outcome(
                        id,
                        format!(
                            "{:?} execution failed; missing {}",
                            plan.side,
                            outcome
                                .missing
                                .iter()
                                .map(|p| p.display().to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                        ExecDiagnostics {
                            missing_paths: outcome.missing,
                            ..Default::default()
                        },
                    );
                }
                produced.extend(outcome.produced);
                write_program(plan);
            }
            Err(e) => {
                return error_outcome(
                    id,
                    format!("{:?} execution error: {e}", plan.side),
                    ExecDiagnostics::default(),
                )
            }
        }
    }

    let legacy_rtf_path = legacy_plan
        .artifact(ArtifactKind::Rtf)
        .expect("legacy plan carries an RTF artifact")
        .to_path_buf();
    let native_json_path = native_plan
        .artifact(ArtifactKind::IrJson)
        .expect("native plan carries an IR artifact")
        .to_path_buf();

    let registry_entry = loaded.registry.get(&entry.native_target);
    let comparison = registry_entry.map(|r| r.comparison).unwrap_or_default();

    let report = match comparison {
        ComparisonKind::Figure => compare_figure(&legacy_rtf_path, &native_json_path, 5.0),
        kind => {
            let rtf_bytes = match std::fs::read(&legacy_rtf_path) {
                Ok(b) => b,
                Err(e) => {
                    return error_outcome(
                        id,
                        format!("cannot read {}: {e}", legacy_rtf_path.display()),
                        ExecDiagnostics {
                            missing_paths: vec![legacy_rtf_path],
                            ..Default::default()
                        },
                    )
                }
            };
            let tables = match parse_rtf(&rtf_bytes) {
                Ok(t) if !t.is_empty() => t,
                Ok(_) => {
                    return error_outcome(
                        id,
                        "legacy RTF contains no tables".into(),
                        ExecDiagnostics::default(),
                    )
                }
                Err(e) => {
                    return error_outcome(
                        id,
                        format!("legacy RTF parse: {e}"),
                        ExecDiagnostics::default(),
                    )
                }
            };
            let native_doc = match std::fs::read_to_string(&native_json_path) {
                Ok(d) => d,
                Err(e) => {
                    return error_outcome(
                        id,
                        format!("cannot read {}: {e}", native_json_path.display()),
                        ExecDiagnostics {
                            missing_paths: vec![native_json_path],
                            ..Default::default()
                        },
                    )
                }
            };
            let grid = match from_json(&native_doc) {
                Ok(g) => g,
                Err(e) => {
                    return error_outcome(id, format!("native IR: {e}"), ExecDiagnostics::default())
                }
            };

            let mut opts = CompareOptions::default();
            if let Some(epsilon) = config.compare_epsilon {
                opts.epsilon = epsilon;
            }
            opts.align.synonyms = loaded.synonyms.clone();
            opts.missing_registry_config =
                entry.expects_registry_config() && registry_entry.is_none();
            match kind {
                ComparisonKind::Listing => compare_listing(&tables[0], &grid),
                _ => compare_table(&tables[0], &grid, &opts),
            }
        }
    };

    let mut report = report;
    report.entry_id = id.to_string();

    // provenance: inputs are the fixture sources, outputs the artifacts
    let inputs: Vec<PathBuf> = {
        let mut files: Vec<PathBuf> = walkdir::WalkDir::new(config.fixtures_dir.join(id))
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file())
            .map(|e| e.into_path())
            .collect();
        files.sort();
        files
    };
    match build_manifest(&native_plan, &inputs, &produced) {
        Ok(manifest) => {
            let manifest_path = config.output_dir.join(id).join("manifest.json");
            if let Err(e) = std::fs::write(&manifest_path, manifest.to_json()) {
                report
                    .alignment_notes
                    .push(format!("manifest not written: {e}"));
            }
        }
        Err(e) => report.alignment_notes.push(format!("manifest: {e}")),
    }

    EntryOutcome {
        report,
        diagnostics: ExecDiagnostics::default(),
    }
}

fn write_program(plan: &ExecutionPlan) {
    if let Some((_, first)) = plan.expected_artifacts.first() {
        if let Some(dir) = first.parent() {
            let _ = std::fs::write(dir.join("program.sas"), &plan.program_text);
        }
    }
}
