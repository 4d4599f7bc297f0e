//! The legacy→native registry (bridge map) and everything driven by it:
//! loading, self-audit, parameter resolution, and dual execution plans.
//!
//! Each entry records one correspondence between a legacy macro call and its
//! native pipeline target. In coexistence mode the target is the legacy macro
//! itself (run unchanged, output captured into the IR); in consolidation mode
//! it is a parameterized native report type. Downstream consumers never
//! branch on the mode: they see only [`ExecutionPlan`]s.

mod audit;
mod exec;
mod plan;

pub use audit::{self_audit, AuditFindings, Finding, LegacyCorpus, Severity};
pub use exec::{ExecError, ExecutionAdapter, ExecutionOutcome, FixtureExecutor, ShellExecutor};
pub use plan::{
    build_legacy_plan, build_native_plan, resolve_parameters, syntax_known_symbols, ArtifactKind,
    ExecutionPlan, ResolveError, ResolveOptions, Side,
};

use crate::ir::IrMappingConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Deployment mode of one bridge entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DeploymentMode {
    Coexistence,
    Consolidation,
}

impl fmt::Display for DeploymentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeploymentMode::Coexistence => "COEXISTENCE",
            DeploymentMode::Consolidation => "CONSOLIDATION",
        })
    }
}

/// A scalar parameter value. Rendered for SAS with locale-independent
/// decimals and Y/N booleans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Number(f64),
    Text(String),
}

impl ParamValue {
    pub fn render(&self) -> String {
        match self {
            ParamValue::Bool(true) => "Y".into(),
            ParamValue::Bool(false) => "N".into(),
            ParamValue::Int(v) => v.to_string(),
            ParamValue::Number(v) => crate::ir::shortest(*v),
            ParamValue::Text(v) => v.clone(),
        }
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Number(v)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

/// One legacy→native correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeMapEntry {
    pub legacy_id: String,
    pub native_target: String,
    pub mode: DeploymentMode,
    /// legacy parameter name → native parameter name.
    #[serde(default)]
    pub parameter_mapping: BTreeMap<String, String>,
    /// Values for parameters that exist only in the native framework.
    #[serde(default)]
    pub defaults: BTreeMap<String, ParamValue>,
    /// SAS code establishing preconditions, prepended verbatim.
    #[serde(default)]
    pub preamble_sas: Option<String>,
    /// Opaque follow-up statements, appended verbatim and never interpreted.
    #[serde(default)]
    pub post_calls: Vec<String>,
    /// Explicit skip annotation: the harness records a SKIP verdict instead
    /// of comparing this entry.
    #[serde(default)]
    pub skip: Option<String>,
}

impl BridgeMapEntry {
    /// Consolidation targets are registry report types; coexistence targets
    /// live in the legacy corpus and legitimately have no registry config.
    /// Keeping this here keeps every mode branch inside the bridge.
    pub fn expects_registry_config(&self) -> bool {
        self.mode == DeploymentMode::Consolidation
    }
}

/// The loaded bridge map, keyed by `legacy_id`.
#[derive(Debug, Clone, Default)]
pub struct BridgeMap {
    pub entries: BTreeMap<String, BridgeMapEntry>,
}

impl BridgeMap {
    pub fn from_entries(list: Vec<BridgeMapEntry>) -> Result<BridgeMap, BridgeError> {
        let mut entries = BTreeMap::new();
        for entry in list {
            let id = entry.legacy_id.clone();
            if entries.insert(id.clone(), entry).is_some() {
                return Err(BridgeError::DuplicateLegacyId(id));
            }
        }
        Ok(BridgeMap { entries })
    }

    pub fn get(&self, legacy_id: &str) -> Option<&BridgeMapEntry> {
        self.entries.get(legacy_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate legacy_id {0:?}")]
    DuplicateLegacyId(String),
    #[error("entry {entry_index}: missing required field {field:?}")]
    MissingRequiredField { field: String, entry_index: usize },
}

const REQUIRED_ENTRY_FIELDS: [&str; 3] = ["legacy_id", "native_target", "mode"];

/// Load a bridge map from YAML: a list of entries. Duplicate ids are load
/// errors, not warnings.
pub fn load_bridge_map(path: &Path) -> Result<BridgeMap, BridgeError> {
    let text = std::fs::read_to_string(path).map_err(|source| BridgeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_bridge_map(&text)
}

pub fn parse_bridge_map(text: &str) -> Result<BridgeMap, BridgeError> {
    BridgeMap::from_entries(parse_bridge_map_entries(text)?)
}

/// Syntactic parse only: field and type checks, duplicates tolerated. The
/// duplicate check belongs to the semantic load ([`BridgeMap::from_entries`])
/// and to the self-audit gate.
pub fn parse_bridge_map_entries(text: &str) -> Result<Vec<BridgeMapEntry>, BridgeError> {
    let raw: Vec<serde_yaml::Value> =
        serde_yaml::from_str(text).map_err(|e| BridgeError::Parse(e.to_string()))?;
    let mut entries = Vec::new();
    for (entry_index, value) in raw.into_iter().enumerate() {
        let map = value
            .as_mapping()
            .ok_or_else(|| BridgeError::Parse(format!("entry {entry_index} is not a mapping")))?;
        for field in REQUIRED_ENTRY_FIELDS {
            if !map.contains_key(serde_yaml::Value::from(field)) {
                return Err(BridgeError::MissingRequiredField {
                    field: field.into(),
                    entry_index,
                });
            }
        }
        let entry: BridgeMapEntry = serde_yaml::from_value(value)
            .map_err(|e| BridgeError::Parse(format!("entry {entry_index}: {e}")))?;
        entries.push(entry);
    }
    Ok(entries)
}

/// Which comparison strategy an entry's outputs take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonKind {
    #[default]
    Table,
    Listing,
    Figure,
}

/// A declared parameter of a report type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDecl {
    pub name: String,
    #[serde(default)]
    pub default: Option<ParamValue>,
}

/// One report type in the registry: declared parameters, comparison
/// strategy, and the IR mapping axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub report_id: String,
    #[serde(default)]
    pub comparison: ComparisonKind,
    #[serde(default)]
    pub parameters: Vec<ParamDecl>,
    #[serde(default)]
    pub rows: Vec<crate::ir::RowSpec>,
    #[serde(default)]
    pub cols: Vec<crate::ir::ColSpec>,
    #[serde(default)]
    pub cells: BTreeMap<String, crate::ir::CellSpec>,
    #[serde(default = "default_true")]
    pub strict: bool,
    #[serde(default)]
    pub fill: crate::ir::FillPolicy,
}

fn default_true() -> bool {
    true
}

impl RegistryEntry {
    pub fn mapping(&self) -> IrMappingConfig {
        IrMappingConfig {
            report_id: self.report_id.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            cells: self.cells.clone(),
            strict: self.strict,
            fill: self.fill,
        }
    }

    pub fn declared_params(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().map(|p| p.name.as_str())
    }
}

/// The report-type registry: one YAML file per report type in a directory.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub entries: BTreeMap<String, RegistryEntry>,
}

impl Registry {
    pub fn get(&self, report_id: &str) -> Option<&RegistryEntry> {
        self.entries.get(report_id)
    }
}

pub fn load_registry(dir: &Path) -> Result<Registry, BridgeError> {
    let mut entries = BTreeMap::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| BridgeError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("yaml") | Some("yml")
            )
        })
        .collect();
    paths.sort();
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(|source| BridgeError::Io {
            path: path.clone(),
            source,
        })?;
        let entry: RegistryEntry = serde_yaml::from_str(&text)
            .map_err(|e| BridgeError::Parse(format!("{}: {e}", path.display())))?;
        entries.insert(entry.report_id.clone(), entry);
    }
    Ok(Registry { entries })
}

/// Study-level configuration: dataset locations, library paths, environment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default)]
    pub dataset_paths: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub library_paths: Vec<PathBuf>,
    #[serde(default)]
    pub treatment_labels: BTreeMap<String, String>,
    #[serde(default)]
    pub population_filters: BTreeMap<String, String>,
    #[serde(default)]
    pub environment: BTreeMap<String, ParamValue>,
}

pub fn load_study_config(path: &Path) -> Result<StudyConfig, BridgeError> {
    let text = std::fs::read_to_string(path).map_err(|source| BridgeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_yaml::from_str(&text).map_err(|e| BridgeError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_ENTRIES: &str = r#"
- legacy_id: ae_summary_soc
  native_target: ae_soc_pt
  mode: CONSOLIDATION
  parameter_mapping:
    dsin: input_ds
    trtvar: treatment_var
  defaults:
    confidence_level: 0.95
- legacy_id: demog_all
  native_target: demographics
  mode: COEXISTENCE
"#;

    #[test]
    fn two_well_formed_entries() {
        let map = parse_bridge_map(TWO_ENTRIES).unwrap();
        assert_eq!(map.len(), 2);
        let entry = map.get("ae_summary_soc").unwrap();
        assert_eq!(entry.mode, DeploymentMode::Consolidation);
        assert_eq!(entry.parameter_mapping["dsin"], "input_ds");
        assert_eq!(entry.defaults["confidence_level"].render(), "0.95");
    }

    #[test]
    fn duplicate_legacy_id_rejected() {
        let doc = r#"
- legacy_id: ae_summary_soc
  native_target: a
  mode: COEXISTENCE
- legacy_id: ae_summary_soc
  native_target: b
  mode: COEXISTENCE
"#;
        match parse_bridge_map(doc) {
            Err(BridgeError::DuplicateLegacyId(id)) => assert_eq!(id, "ae_summary_soc"),
            other => panic!("expected duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_field_named_with_index() {
        let doc = r#"
- legacy_id: ok_entry
  native_target: t
  mode: COEXISTENCE
- legacy_id: broken_entry
  mode: COEXISTENCE
"#;
        match parse_bridge_map(doc) {
            Err(BridgeError::MissingRequiredField { field, entry_index }) => {
                assert_eq!(field, "native_target");
                assert_eq!(entry_index, 1);
            }
            other => panic!("expected missing field error, got {other:?}"),
        }
    }

    #[test]
    fn value_rendering() {
        assert_eq!(ParamValue::Bool(true).render(), "Y");
        assert_eq!(ParamValue::Bool(false).render(), "N");
        assert_eq!(ParamValue::Number(0.95).render(), "0.95");
        assert_eq!(ParamValue::Int(42).render(), "42");
        assert_eq!(ParamValue::from("adsl").render(), "adsl");
    }

    #[test]
    fn registry_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("ae.yaml"),
            r#"
report_id: ae_soc_pt
comparison: table
parameters:
  - name: input_ds
  - name: treatment_var
    default: TRT01A
"#,
        )
        .unwrap();
        let registry = load_registry(dir.path()).unwrap();
        let entry = registry.get("ae_soc_pt").unwrap();
        assert_eq!(entry.parameters.len(), 2);
        assert_eq!(entry.comparison, ComparisonKind::Table);
    }
}
