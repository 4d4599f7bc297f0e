//! The staged verification workflow: gates A through G, strictly ordered,
//! from structural pre-flight to the full parity matrix, plus the four-class
//! failure triage.
//!
//! A gate runs only when its predecessors passed, with one exception: the
//! triage gate (F) always runs after E so failures get classified — that is
//! its whole job. The full matrix (G) requires E and F clean, or an explicit
//! force flag.

mod checks;
mod runner;

pub use checks::{builtin_self_checks, SelfCheck};
pub(crate) use runner::run_entry;
pub use runner::ExecDiagnostics;

use crate::audit::{AuditLog, AuditRecord, AuditStatus};
use crate::bridge::{
    load_registry, load_study_config, parse_bridge_map_entries, self_audit, syntax_known_symbols,
    BridgeMap, ExecutionAdapter, FixtureExecutor, LegacyCorpus, Registry, ShellExecutor,
    StudyConfig,
};
use crate::compare::{ComparisonReport, DivergenceCategory, Verdict};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Harness configuration, loaded from YAML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub bridge_map_path: PathBuf,
    pub study_config_path: PathBuf,
    pub registry_dir: PathBuf,
    pub fixtures_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Gate E compares this subset; empty means every entry.
    #[serde(default)]
    pub sample_entries: Vec<String>,
    /// Directory of legacy `.sas` sources for audit and corpus checks.
    #[serde(default)]
    pub legacy_corpus_dir: Option<PathBuf>,
    /// Extra treatment-synonym classes (YAML list of lists).
    #[serde(default)]
    pub synonyms_path: Option<PathBuf>,
    #[serde(default)]
    pub compare_epsilon: Option<f64>,
    #[serde(default)]
    pub reconcile_tolerance: Option<f64>,
    /// When set, plans run through `sh -c "<command> <program>"` instead of
    /// the fixture executor.
    #[serde(default)]
    pub executor_command: Option<String>,
}

impl HarnessConfig {
    pub fn load(path: &Path) -> Result<HarnessConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        serde_yaml::from_str(&text).map_err(|e| ConfigError {
            message: format!("{}: {e}", path.display()),
        })
    }

    pub fn adapter(&self) -> Box<dyn ExecutionAdapter> {
        match &self.executor_command {
            Some(command) => Box::new(ShellExecutor {
                command: command.clone(),
            }),
            None => Box::new(FixtureExecutor::new(&self.fixtures_dir)),
        }
    }
}

#[derive(Debug, Error)]
#[error("config error: {message}")]
pub struct ConfigError {
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl GateId {
    pub const ALL: [GateId; 7] = [
        GateId::A,
        GateId::B,
        GateId::C,
        GateId::D,
        GateId::E,
        GateId::F,
        GateId::G,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            GateId::A => "structural pre-flight",
            GateId::B => "bridge map self-audit",
            GateId::C => "syntax smoke test",
            GateId::D => "registered self-checks",
            GateId::E => "live parity on sample",
            GateId::F => "triage and resolution",
            GateId::G => "full matrix",
        }
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for GateId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_uppercase().as_str() {
            "A" => Ok(GateId::A),
            "B" => Ok(GateId::B),
            "C" => Ok(GateId::C),
            "D" => Ok(GateId::D),
            "E" => Ok(GateId::E),
            "F" => Ok(GateId::F),
            "G" => Ok(GateId::G),
            other => Err(format!("unknown gate {other:?} (expected A..G)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateResult {
    pub gate: GateId,
    pub status: GateStatus,
    pub findings: Vec<String>,
    pub duration_ms: u64,
}

/// Four-class failure taxonomy for triage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TriageClass {
    Infrastructure,
    Parameter,
    Semantic,
    Content,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriageItem {
    pub entry_id: String,
    pub class: TriageClass,
    pub rationale: String,
}

/// The complete record of one gate run.
#[derive(Debug, Serialize)]
pub struct GateRun {
    pub results: Vec<GateResult>,
    pub sample_reports: Vec<ComparisonReport>,
    pub full_reports: Vec<ComparisonReport>,
    pub triage: Vec<TriageItem>,
}

impl GateRun {
    pub fn all_executed_passed(&self) -> bool {
        self.results.iter().all(|r| r.status != GateStatus::Fail)
    }

    /// Process exit contract: 0 when every executed gate passed, 1 when any
    /// failed. (2 is reserved for usage/config errors at the call site.)
    pub fn exit_code(&self) -> i32 {
        if self.all_executed_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gate run serializes")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GateRunOptions {
    pub through: GateId,
    /// Run the full matrix even when triage reported open items.
    pub force: bool,
}

impl Default for GateRunOptions {
    fn default() -> Self {
        GateRunOptions {
            through: GateId::G,
            force: false,
        }
    }
}

/// Classify comparison failures: execution problems are infrastructure,
/// resolution problems are parameter errors, denominator-flavored content
/// divergence is semantic, and residual numeric divergence is content.
pub fn triage(failures: &[(ComparisonReport, ExecDiagnostics)]) -> Vec<TriageItem> {
    let mut items: Vec<TriageItem> = failures
        .iter()
        .filter(|(report, _)| matches!(report.verdict, Verdict::Error | Verdict::Fail))
        .map(|(report, diag)| {
            let (class, rationale) = if report.verdict == Verdict::Error {
                if let Some(err) = &diag.resolution_error {
                    (TriageClass::Parameter, format!("resolution failed: {err}"))
                } else if !diag.missing_paths.is_empty() {
                    (
                        TriageClass::Infrastructure,
                        format!(
                            "missing artifacts: {}",
                            diag.missing_paths
                                .iter()
                                .map(|p| p.display().to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                    )
                } else {
                    (
                        TriageClass::Infrastructure,
                        format!("execution error: {}", report.alignment_notes.join("; ")),
                    )
                }
            } else if let Some(err) = &diag.resolution_error {
                (TriageClass::Parameter, format!("resolution failed: {err}"))
            } else {
                let semantic = report.diffs.iter().any(|d| {
                    matches!(
                        d.category,
                        DivergenceCategory::AdslDenominator
                            | DivergenceCategory::PopulationDenominator
                            | DivergenceCategory::SocGroupTotal
                    )
                });
                if semantic {
                    (
                        TriageClass::Semantic,
                        "denominator-class divergence present".to_string(),
                    )
                } else {
                    (
                        TriageClass::Content,
                        format!(
                            "{} content diffs within matching structure",
                            report.diffs.len()
                        ),
                    )
                }
            };
            TriageItem {
                entry_id: report.entry_id.clone(),
                class,
                rationale,
            }
        })
        .collect();
    items.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));
    items
}

pub(crate) struct Loaded {
    pub(crate) entries: Vec<crate::bridge::BridgeMapEntry>,
    /// Built at gate B once the duplicate check has passed.
    pub(crate) map: Option<BridgeMap>,
    pub(crate) registry: Registry,
    pub(crate) study: StudyConfig,
    pub(crate) corpus: Option<LegacyCorpus>,
    pub(crate) synonyms: crate::compare::SynonymTable,
}

impl Loaded {
    pub(crate) fn map(&self) -> &BridgeMap {
        self.map.as_ref().expect("bridge map built at gate B")
    }
}

fn gate_a(config: &HarnessConfig) -> (Vec<String>, Option<Loaded>) {
    let mut findings = Vec::new();
    let check_file = |path: &Path, what: &str, findings: &mut Vec<String>| {
        if !path.is_file() {
            findings.push(format!("{what} not found: {}", path.display()));
        }
    };
    let check_dir = |path: &Path, what: &str, findings: &mut Vec<String>| {
        if !path.is_dir() {
            findings.push(format!("{what} not found: {}", path.display()));
        }
    };
    check_file(&config.bridge_map_path, "bridge map", &mut findings);
    check_file(&config.study_config_path, "study config", &mut findings);
    check_dir(&config.registry_dir, "registry dir", &mut findings);
    check_dir(&config.fixtures_dir, "fixtures dir", &mut findings);
    if let Some(dir) = &config.legacy_corpus_dir {
        check_dir(dir, "legacy corpus dir", &mut findings);
    }
    if let Err(e) = std::fs::create_dir_all(&config.output_dir) {
        findings.push(format!(
            "output dir {} not creatable: {e}",
            config.output_dir.display()
        ));
    }
    if !findings.is_empty() {
        return (findings, None);
    }

    let entries = match std::fs::read_to_string(&config.bridge_map_path)
        .map_err(|e| format!("bridge map unreadable: {e}"))
        .and_then(|text| parse_bridge_map_entries(&text).map_err(|e| format!("bridge map: {e}")))
    {
        Ok(entries) => entries,
        Err(e) => {
            findings.push(e);
            return (findings, None);
        }
    };
    let registry = match load_registry(&config.registry_dir) {
        Ok(r) => r,
        Err(e) => {
            findings.push(format!("registry: {e}"));
            return (findings, None);
        }
    };
    let study = match load_study_config(&config.study_config_path) {
        Ok(s) => s,
        Err(e) => {
            findings.push(format!("study config: {e}"));
            return (findings, None);
        }
    };
    for sample in &config.sample_entries {
        if !entries.iter().any(|e| &e.legacy_id == sample) {
            findings.push(format!("sample entry {sample:?} not in the bridge map"));
        }
    }
    let corpus = config.legacy_corpus_dir.as_ref().map(|dir| {
        let files = crate::analyzer::collect_sas_files(dir);
        let scan = crate::analyzer::parse_macro_headers(&files);
        let mut corpus = LegacyCorpus::new();
        for def in &scan.defs {
            corpus.add_macro(&def.name, def.parameters.iter().map(|(n, _)| n.clone()));
        }
        corpus
    });
    let mut synonyms = crate::compare::SynonymTable::default();
    if let Some(path) = &config.synonyms_path {
        match std::fs::read_to_string(path) {
            Ok(doc) => {
                if let Err(e) = synonyms.extend_from_yaml(&doc) {
                    findings.push(format!("synonyms: {e}"));
                }
            }
            Err(e) => findings.push(format!("synonyms {} unreadable: {e}", path.display())),
        }
    }
    if findings.is_empty() {
        (
            findings,
            Some(Loaded {
                entries,
                map: None,
                registry,
                study,
                corpus,
                synonyms,
            }),
        )
    } else {
        (findings, None)
    }
}

fn gate_c(config: &HarnessConfig, loaded: &Loaded) -> Vec<String> {
    let mut findings = Vec::new();
    for (id, entry) in &loaded.map().entries {
        let call_args = Default::default();
        match crate::bridge::build_legacy_plan(entry, &loaded.study, &call_args, &config.output_dir)
        {
            Ok(plan) => {
                let known = syntax_known_symbols(&plan, &loaded.study);
                for finding in crate::analyzer::syntax_check(&plan.program_text, &known) {
                    findings.push(format!(
                        "{id} legacy line {}: {}",
                        finding.line, finding.message
                    ));
                }
            }
            Err(e) => findings.push(format!("{id} legacy plan: {e}")),
        }
        match crate::bridge::build_native_plan(entry, &loaded.study, &call_args, &config.output_dir)
        {
            Ok(plan) => {
                let known = syntax_known_symbols(&plan, &loaded.study);
                for finding in crate::analyzer::syntax_check(&plan.program_text, &known) {
                    findings.push(format!(
                        "{id} native line {}: {}",
                        finding.line, finding.message
                    ));
                }
            }
            Err(e) => findings.push(format!("{id} native plan: {e}")),
        }
    }
    findings
}

fn parity_gate(
    config: &HarnessConfig,
    loaded: &Loaded,
    entries: &[String],
    adapter: &dyn ExecutionAdapter,
    audit_log: Option<&crate::audit::SharedAuditLog>,
) -> (Vec<String>, Vec<(ComparisonReport, ExecDiagnostics)>) {
    let outcomes: Vec<(ComparisonReport, ExecDiagnostics)> = entries
        .par_iter()
        .filter_map(|id| loaded.map().get(id))
        .map(|entry| {
            let outcome = run_entry(config, loaded, entry, adapter);
            if let Some(log) = audit_log {
                let status = match outcome.report.verdict {
                    Verdict::Pass | Verdict::Skip => AuditStatus::Success,
                    _ => AuditStatus::Failure,
                };
                let record = AuditRecord::now(
                    whoami(),
                    "compare",
                    &entry.legacy_id,
                    status,
                    "harness",
                    format!("verdict {}", outcome.report.verdict),
                );
                if let Ok(mut guard) = log.lock() {
                    let _ = guard.append(record);
                }
            }
            (outcome.report, outcome.diagnostics)
        })
        .collect();

    let mut findings = Vec::new();
    for (report, _) in &outcomes {
        if matches!(report.verdict, Verdict::Fail | Verdict::Error) {
            findings.push(format!(
                "{}: {} at {:.1}% parity",
                report.entry_id, report.verdict, report.parity_pct
            ));
        }
    }
    (findings, outcomes)
}

fn whoami() -> String {
    std::env::var("USER")
        .or_else(|_| std::env::var("USERNAME"))
        .unwrap_or_else(|_| "unknown".into())
}

/// Execute the gates in order through `opts.through`. The first FAIL halts
/// progression (later gates are SKIPPED), except that F always follows an
/// executed E.
pub fn run_gates(config: &HarnessConfig, opts: &GateRunOptions) -> Result<GateRun, ConfigError> {
    let mut results: Vec<GateResult> = Vec::new();
    let mut sample_outcomes: Vec<(ComparisonReport, ExecDiagnostics)> = Vec::new();
    let mut full_outcomes: Vec<(ComparisonReport, ExecDiagnostics)> = Vec::new();
    let mut triage_items: Vec<TriageItem> = Vec::new();
    let mut loaded: Option<Loaded> = None;
    // a failure in the structural gates (A-D) halts everything; parity
    // failures leave F free to classify and G gated on `force`
    let mut hard_halted = false;

    let audit_log = AuditLog::open(&config.output_dir.join("audit.ndjson"))
        .ok()
        .map(AuditLog::into_shared);

    let adapter = config.adapter();

    for gate in GateId::ALL {
        if gate > opts.through {
            break;
        }
        if hard_halted {
            results.push(GateResult {
                gate,
                status: GateStatus::Skipped,
                findings: vec!["skipped: an earlier gate failed".into()],
                duration_ms: 0,
            });
            continue;
        }
        let started = Instant::now();
        let mut findings: Vec<String> = Vec::new();
        let mut status = GateStatus::Pass;

        match gate {
            GateId::A => {
                let (gate_findings, maybe_loaded) = gate_a(config);
                findings = gate_findings;
                loaded = maybe_loaded;
                if loaded.is_none() {
                    status = GateStatus::Fail;
                }
            }
            GateId::B => {
                let loaded = loaded.as_mut().expect("gate A passed");
                match BridgeMap::from_entries(loaded.entries.clone()) {
                    Ok(map) => {
                        let audit = self_audit(
                            &map,
                            &loaded.registry,
                            &loaded.study,
                            loaded.corpus.as_ref(),
                        );
                        for finding in &audit.findings {
                            findings.push(format!(
                                "{:?} {}: {}",
                                finding.severity, finding.entry_id, finding.message
                            ));
                        }
                        if !audit.is_clean() {
                            status = GateStatus::Fail;
                        }
                        loaded.map = Some(map);
                    }
                    Err(e) => {
                        findings.push(e.to_string());
                        status = GateStatus::Fail;
                    }
                }
            }
            GateId::C => {
                let loaded = loaded.as_ref().expect("gate A passed");
                findings = gate_c(config, loaded);
                if !findings.is_empty() {
                    status = GateStatus::Fail;
                }
            }
            GateId::D => {
                for check in builtin_self_checks() {
                    match (check.run)() {
                        Ok(()) => findings.push(format!("{}: ok", check.name)),
                        Err(e) => {
                            findings.push(format!("{}: FAILED: {e}", check.name));
                            status = GateStatus::Fail;
                        }
                    }
                }
            }
            GateId::E => {
                let loaded_ref = loaded.as_ref().expect("gate A passed");
                let entries: Vec<String> = if config.sample_entries.is_empty() {
                    loaded_ref.map().entries.keys().cloned().collect()
                } else {
                    config.sample_entries.clone()
                };
                let (gate_findings, outcomes) = parity_gate(
                    config,
                    loaded_ref,
                    &entries,
                    adapter.as_ref(),
                    audit_log.as_ref(),
                );
                findings = gate_findings;
                sample_outcomes = outcomes;
                if !findings.is_empty() {
                    status = GateStatus::Fail;
                }
            }
            GateId::F => {
                triage_items = triage(&sample_outcomes);
                if triage_items.is_empty() {
                    findings.push("0 failures to triage".into());
                } else {
                    for item in &triage_items {
                        findings.push(format!(
                            "{} -> {:?}: {}",
                            item.entry_id, item.class, item.rationale
                        ));
                    }
                    status = GateStatus::Fail;
                }
            }
            GateId::G => {
                let has_open_items = !triage_items.is_empty();
                if has_open_items && !opts.force {
                    status = GateStatus::Skipped;
                    findings.push(
                        "skipped: open triage items; rerun with force to run the full matrix"
                            .into(),
                    );
                } else {
                    let loaded_ref = loaded.as_ref().expect("gate A passed");
                    let entries: Vec<String> = loaded_ref.map().entries.keys().cloned().collect();
                    let (gate_findings, outcomes) = parity_gate(
                        config,
                        loaded_ref,
                        &entries,
                        adapter.as_ref(),
                        audit_log.as_ref(),
                    );
                    findings = gate_findings;
                    full_outcomes = outcomes;
                    if !findings.is_empty() {
                        status = GateStatus::Fail;
                    }
                }
            }
        }

        if let Some(log) = &audit_log {
            let record = AuditRecord::now(
                whoami(),
                "gate",
                format!("gate_{gate}"),
                match status {
                    GateStatus::Pass => AuditStatus::Success,
                    GateStatus::Fail => AuditStatus::Failure,
                    GateStatus::Skipped => AuditStatus::Success,
                },
                "gates",
                gate.describe(),
            );
            if let Ok(mut guard) = log.lock() {
                let _ = guard.append(record);
            }
        }

        if status == GateStatus::Fail && gate < GateId::E {
            hard_halted = true;
        }
        results.push(GateResult {
            gate,
            status,
            findings,
            duration_ms: started.elapsed().as_millis() as u64,
        });
    }

    Ok(GateRun {
        results,
        sample_reports: sample_outcomes.into_iter().map(|(r, _)| r).collect(),
        full_reports: full_outcomes.into_iter().map(|(r, _)| r).collect(),
        triage: triage_items,
    })
}

/// Load the harness configuration's world and compare every entry (or the
/// given subset), without the gate ceremony. Used by batch comparison.
pub fn compare_batch(
    config: &HarnessConfig,
    only: &[String],
) -> Result<Vec<ComparisonReport>, ConfigError> {
    let (findings, loaded) = gate_a(config);
    let Some(mut loaded) = loaded else {
        return Err(ConfigError {
            message: findings.join("; "),
        });
    };
    loaded.map = Some(
        BridgeMap::from_entries(loaded.entries.clone()).map_err(|e| ConfigError {
            message: e.to_string(),
        })?,
    );
    let entries: Vec<String> = if only.is_empty() {
        loaded.map().entries.keys().cloned().collect()
    } else {
        only.to_vec()
    };
    let adapter = config.adapter();
    let audit_log = AuditLog::open(&config.output_dir.join("audit.ndjson"))
        .ok()
        .map(AuditLog::into_shared);
    let (_, outcomes) = parity_gate(
        config,
        &loaded,
        &entries,
        adapter.as_ref(),
        audit_log.as_ref(),
    );
    Ok(outcomes.into_iter().map(|(r, _)| r).collect())
}
