//! Bridge map self-audit: every reference a plan will need must resolve
//! before anything executes.

use super::plan::SAS_NAME_LIMIT;
use super::{BridgeMap, DeploymentMode, Registry, StudyConfig};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub entry_id: String,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AuditFindings {
    pub findings: Vec<Finding>,
}

impl AuditFindings {
    pub fn errors(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count()
    }

    pub fn is_clean(&self) -> bool {
        self.errors() == 0
    }

    fn push(&mut self, entry_id: &str, severity: Severity, message: String) {
        self.findings.push(Finding {
            entry_id: entry_id.to_string(),
            severity,
            message,
        });
    }
}

/// Parameter signatures of the legacy macro corpus, keyed by macro name.
/// Typically built from analyzer output over the legacy source tree.
#[derive(Debug, Clone, Default)]
pub struct LegacyCorpus {
    macros: BTreeMap<String, BTreeSet<String>>,
}

impl LegacyCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_macro<I, S>(&mut self, name: impl Into<String>, params: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.macros.insert(
            name.into().to_lowercase(),
            params
                .into_iter()
                .map(|p| p.into().to_lowercase())
                .collect(),
        );
    }

    pub fn contains(&self, name: &str) -> bool {
        self.macros.contains_key(&name.to_lowercase())
    }

    pub fn params(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.macros.get(&name.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.macros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.macros.is_empty()
    }
}

fn name_problem(name: &str) -> Option<String> {
    if name.len() > SAS_NAME_LIMIT {
        return Some(format!(
            "name {name:?} exceeds the {SAS_NAME_LIMIT}-character limit"
        ));
    }
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    if !head_ok || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Some(format!("name {name:?} is not a valid SAS identifier"));
    }
    None
}

/// Audit every entry: targets resolve, parameter mappings land on declared
/// parameters, defaults reference declared parameters, names are legal.
/// Findings are data; a clean audit guarantees plan construction succeeds.
pub fn self_audit(
    map: &BridgeMap,
    registry: &Registry,
    study: &StudyConfig,
    legacy: Option<&LegacyCorpus>,
) -> AuditFindings {
    let mut out = AuditFindings::default();

    // study-level value names feed every resolution, so they are part of
    // the audit-sufficiency contract too
    for name in study.environment.keys().chain(study.dataset_paths.keys()) {
        if let Some(problem) = name_problem(name) {
            out.push("study-config", Severity::Error, problem);
        }
    }

    for (id, entry) in &map.entries {
        // target resolution depends on the deployment mode
        let declared: Option<BTreeSet<String>> = match entry.mode {
            DeploymentMode::Consolidation => match registry.get(&entry.native_target) {
                Some(reg) => Some(reg.declared_params().map(|p| p.to_lowercase()).collect()),
                None => {
                    out.push(
                        id,
                        Severity::Error,
                        format!("native_target {:?} not in registry", entry.native_target),
                    );
                    None
                }
            },
            DeploymentMode::Coexistence => match legacy {
                Some(corpus) => match corpus.params(&entry.native_target) {
                    Some(params) => Some(params.clone()),
                    None => {
                        out.push(
                            id,
                            Severity::Error,
                            format!(
                                "native_target {:?} not in the legacy corpus",
                                entry.native_target
                            ),
                        );
                        None
                    }
                },
                None => {
                    out.push(
                        id,
                        Severity::Warning,
                        "coexistence entry not checked: no legacy corpus supplied".into(),
                    );
                    None
                }
            },
        };

        // the legacy macro itself must exist for the legacy driver
        if let Some(corpus) = legacy {
            if !corpus.contains(&entry.legacy_id) {
                out.push(
                    id,
                    Severity::Error,
                    format!(
                        "legacy macro {:?} not in the legacy corpus",
                        entry.legacy_id
                    ),
                );
            }
        }

        // no two legacy parameters may target one native parameter
        let mut seen_targets: BTreeMap<&str, &str> = BTreeMap::new();
        for (legacy_name, native_name) in &entry.parameter_mapping {
            if let Some(previous) = seen_targets.insert(native_name.as_str(), legacy_name.as_str())
            {
                out.push(
                    id,
                    Severity::Error,
                    format!(
                        "parameters {previous:?} and {legacy_name:?} both map to {native_name:?}"
                    ),
                );
            }
        }

        // mapping targets and defaults must be declared on the target
        if let Some(declared) = &declared {
            for native_name in entry.parameter_mapping.values() {
                if !declared.contains(&native_name.to_lowercase()) {
                    out.push(
                        id,
                        Severity::Error,
                        format!(
                            "mapping target {native_name:?} is not a declared parameter of {:?}",
                            entry.native_target
                        ),
                    );
                }
            }
            for default_name in entry.defaults.keys() {
                if !declared.contains(&default_name.to_lowercase()) {
                    out.push(
                        id,
                        Severity::Error,
                        format!(
                            "default {default_name:?} is not a declared parameter of {:?}",
                            entry.native_target
                        ),
                    );
                }
            }
        }

        // names a plan would emit must be legal up front
        for name in entry
            .parameter_mapping
            .keys()
            .chain(entry.parameter_mapping.values())
            .chain(entry.defaults.keys())
        {
            if let Some(problem) = name_problem(name) {
                out.push(id, Severity::Error, problem);
            }
        }

        // values referencing &vars should resolve against study settings
        for (name, value) in &entry.defaults {
            let rendered = value.render();
            for var in rendered.split('&').skip(1) {
                let var: String = var
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .collect();
                if !var.is_empty()
                    && !study.environment.contains_key(&var)
                    && !study.dataset_paths.contains_key(&var)
                {
                    out.push(
                        id,
                        Severity::Warning,
                        format!(
                            "default {name:?} references &{var} which no study setting defines"
                        ),
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{parse_bridge_map, RegistryEntry};

    fn registry_with(report_id: &str, params: &[&str]) -> Registry {
        let mut registry = Registry::default();
        registry.entries.insert(
            report_id.to_string(),
            RegistryEntry {
                report_id: report_id.to_string(),
                comparison: Default::default(),
                parameters: params
                    .iter()
                    .map(|p| crate::bridge::ParamDecl {
                        name: p.to_string(),
                        default: None,
                    })
                    .collect(),
                rows: Vec::new(),
                cols: Vec::new(),
                cells: BTreeMap::new(),
                strict: true,
                fill: Default::default(),
            },
        );
        registry
    }

    #[test]
    fn unknown_target_is_an_error() {
        let map = parse_bridge_map(
            "- legacy_id: x\n  native_target: nonexistent\n  mode: CONSOLIDATION\n",
        )
        .unwrap();
        let findings = self_audit(&map, &Registry::default(), &StudyConfig::default(), None);
        assert!(!findings.is_clean());
        assert!(findings.findings[0].message.contains("not in registry"));
    }

    #[test]
    fn undeclared_mapping_target_is_an_error() {
        let map = parse_bridge_map(
            "- legacy_id: x\n  native_target: t\n  mode: CONSOLIDATION\n  parameter_mapping:\n    dsin: undeclared\n",
        )
        .unwrap();
        let registry = registry_with("t", &["input_ds"]);
        let findings = self_audit(&map, &registry, &StudyConfig::default(), None);
        assert_eq!(findings.errors(), 1);
        assert!(findings.findings[0].message.contains("undeclared"));
    }

    #[test]
    fn clean_entry_yields_no_errors() {
        let map = parse_bridge_map(
            "- legacy_id: x\n  native_target: t\n  mode: CONSOLIDATION\n  parameter_mapping:\n    dsin: input_ds\n  defaults:\n    input_ds: adsl\n",
        )
        .unwrap();
        let registry = registry_with("t", &["input_ds"]);
        let findings = self_audit(&map, &registry, &StudyConfig::default(), None);
        assert!(findings.is_clean(), "{:?}", findings.findings);
    }

    #[test]
    fn colliding_mapping_targets_flagged() {
        let map = parse_bridge_map(
            "- legacy_id: x\n  native_target: t\n  mode: CONSOLIDATION\n  parameter_mapping:\n    a: same\n    b: same\n",
        )
        .unwrap();
        let registry = registry_with("t", &["same"]);
        let findings = self_audit(&map, &registry, &StudyConfig::default(), None);
        assert_eq!(findings.errors(), 1);
        assert!(findings.findings[0].message.contains("both map to"));
    }

    #[test]
    fn coexistence_checks_against_corpus() {
        let map = parse_bridge_map(
            "- legacy_id: old_mac\n  native_target: old_mac\n  mode: COEXISTENCE\n  parameter_mapping:\n    dsin: dsin\n",
        )
        .unwrap();
        let mut corpus = LegacyCorpus::new();
        corpus.add_macro("old_mac", ["dsin", "trtvar"]);
        let findings = self_audit(
            &map,
            &Registry::default(),
            &StudyConfig::default(),
            Some(&corpus),
        );
        assert!(findings.is_clean(), "{:?}", findings.findings);

        let empty = LegacyCorpus::new();
        let findings = self_audit(
            &map,
            &Registry::default(),
            &StudyConfig::default(),
            Some(&empty),
        );
        assert!(!findings.is_clean());
    }

    #[test]
    fn synthetic_full_scale_map_audits_clean() {
        // one-to-one coverage at the scale of a large legacy library
        let mut doc = String::new();
        let mut registry = Registry::default();
        for i in 0..365 {
            let target = format!("report_type_{i:03}");
            registry.entries.insert(
                target.clone(),
                registry_with(&target, &["input_ds", "treatment_var"])
                    .entries
                    .remove(&target)
                    .unwrap(),
            );
            doc.push_str(&format!(
                "- legacy_id: legacy_macro_{i:03}\n  native_target: {target}\n  mode: CONSOLIDATION\n  parameter_mapping:\n    dsin: input_ds\n    trtvar: treatment_var\n  defaults:\n    input_ds: adsl\n"
            ));
        }
        let map = parse_bridge_map(&doc).unwrap();
        assert_eq!(map.len(), 365);
        let findings = self_audit(&map, &registry, &StudyConfig::default(), None);
        assert_eq!(findings.errors(), 0, "{:?}", findings.findings.first());
    }

    #[test]
    fn invalid_study_name_is_an_error() {
        let map = parse_bridge_map("- legacy_id: x\n  native_target: t\n  mode: CONSOLIDATION\n")
            .unwrap();
        let mut study = StudyConfig::default();
        study
            .environment
            .insert("9bad name".into(), crate::bridge::ParamValue::from("v"));
        let registry = registry_with("t", &[]);
        let findings = self_audit(&map, &registry, &study, None);
        assert!(findings.errors() > 0);
    }

    #[test]
    fn unresolved_study_reference_is_a_warning() {
        let map = parse_bridge_map(
            "- legacy_id: x\n  native_target: t\n  mode: CONSOLIDATION\n  defaults:\n    input_ds: \"&missing_lib.adsl\"\n",
        )
        .unwrap();
        let registry = registry_with("t", &["input_ds"]);
        let findings = self_audit(&map, &registry, &StudyConfig::default(), None);
        assert!(findings.is_clean()); // warnings only
        assert!(findings
            .findings
            .iter()
            .any(|f| f.severity == Severity::Warning && f.message.contains("missing_lib")));
    }
}
