//! Parameter resolution and construction of the paired execution plans.

use super::{BridgeMapEntry, ParamValue, StudyConfig};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// SAS macro variable names are capped at 32 characters.
pub const SAS_NAME_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    Legacy,
    Native,
}

impl Side {
    pub fn as_dir(self) -> &'static str {
        match self {
            Side::Legacy => "legacy",
            Side::Native => "native",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ArtifactKind {
    Rtf,
    IrJson,
    Log,
}

/// A generated driver program plus the artifacts it is expected to produce.
#[derive(Debug, Clone, Serialize)]
pub struct ExecutionPlan {
    pub entry_id: String,
    pub side: Side,
    pub program_text: String,
    pub expected_artifacts: Vec<(ArtifactKind, PathBuf)>,
    pub resolved_params: BTreeMap<String, String>,
}

impl ExecutionPlan {
    pub fn artifact(&self, kind: ArtifactKind) -> Option<&Path> {
        self.expected_artifacts
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, p)| p.as_path())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ResolveError {
    #[error("parameter name {0:?} exceeds the {SAS_NAME_LIMIT}-character limit")]
    NameTooLong(String),
    #[error("parameter name {0:?} is not a valid SAS identifier")]
    InvalidIdentifier(String),
    #[error("legacy parameter {0:?} has no mapping to a native name")]
    UnmappedLegacyParameter(String),
}

#[derive(Debug, Clone, Copy)]
pub struct ResolveOptions {
    /// In strict mode an unmapped legacy argument is an error; in lenient
    /// mode it passes through under its legacy name.
    pub strict: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { strict: true }
    }
}

fn valid_sas_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_name(name: &str) -> Result<(), ResolveError> {
    if name.len() > SAS_NAME_LIMIT {
        return Err(ResolveError::NameTooLong(name.to_string()));
    }
    if !valid_sas_identifier(name) {
        return Err(ResolveError::InvalidIdentifier(name.to_string()));
    }
    Ok(())
}

/// Merge the three value layers with precedence call_args > defaults >
/// study-level values, translating legacy argument names through the entry's
/// parameter mapping. Names are validated against SAS identifier rules and
/// the 32-character limit; values are rendered to locale-independent text.
pub fn resolve_parameters(
    entry: &BridgeMapEntry,
    study: &StudyConfig,
    call_args: &BTreeMap<String, ParamValue>,
    opts: &ResolveOptions,
) -> Result<BTreeMap<String, String>, ResolveError> {
    let mut resolved: BTreeMap<String, String> = BTreeMap::new();

    for (name, path) in &study.dataset_paths {
        resolved.insert(name.clone(), path.display().to_string());
    }
    for (name, value) in &study.environment {
        resolved.insert(name.clone(), value.render());
    }
    for (name, value) in &entry.defaults {
        resolved.insert(name.clone(), value.render());
    }
    for (legacy_name, value) in call_args {
        let native_name = match entry.parameter_mapping.get(legacy_name) {
            Some(native) => native.clone(),
            None if opts.strict => {
                return Err(ResolveError::UnmappedLegacyParameter(legacy_name.clone()))
            }
            None => legacy_name.clone(),
        };
        resolved.insert(native_name, value.render());
    }

    for name in resolved.keys() {
        check_name(name)?;
    }
    Ok(resolved)
}

/// Quote a macro argument value only when it needs it, keeping generated
/// programs diff-able.
fn render_arg(value: &str) -> String {
    if value.is_empty()
        || value
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '(' | ')' | '\'' | '"' | '='))
    {
        format!("%str({value})")
    } else {
        value.to_string()
    }
}

fn macro_call(name: &str, args: &BTreeMap<String, String>) -> String {
    let rendered: Vec<String> = args
        .iter()
        .map(|(k, v)| format!("{k}={}", render_arg(v)))
        .collect();
    format!("%{name}({});", rendered.join(", "))
}

fn assemble_program(entry: &BridgeMapEntry, call: String) -> String {
    let mut program = String::new();
    if let Some(preamble) = &entry.preamble_sas {
        program.push_str(preamble);
        if !preamble.ends_with('\n') {
            program.push('\n');
        }
    }
    program.push_str(&call);
    program.push('\n');
    for post in &entry.post_calls {
        program.push_str(post);
        if !post.ends_with('\n') {
            program.push('\n');
        }
    }
    program
}

/// The macro-variable names a generated program can legitimately reference:
/// its resolved parameters plus study-level settings.
pub fn syntax_known_symbols(
    plan: &ExecutionPlan,
    study: &StudyConfig,
) -> std::collections::BTreeSet<String> {
    let mut known: std::collections::BTreeSet<String> =
        plan.resolved_params.keys().cloned().collect();
    known.extend(study.environment.keys().cloned());
    known.extend(study.dataset_paths.keys().cloned());
    known
}

fn artifact_path(output_root: &Path, entry_id: &str, side: Side, file: &str) -> PathBuf {
    output_root.join(entry_id).join(side.as_dir()).join(file)
}

/// Plan for the legacy driver: the original macro invoked with its original
/// parameter names, producing RTF plus a log.
pub fn build_legacy_plan(
    entry: &BridgeMapEntry,
    _study: &StudyConfig,
    call_args: &BTreeMap<String, ParamValue>,
    output_root: &Path,
) -> Result<ExecutionPlan, ResolveError> {
    let mut args = BTreeMap::new();
    for (name, value) in call_args {
        check_name(name)?;
        args.insert(name.clone(), value.render());
    }
    let program_text = assemble_program(entry, macro_call(&entry.legacy_id, &args));
    Ok(ExecutionPlan {
        entry_id: entry.legacy_id.clone(),
        side: Side::Legacy,
        program_text,
        expected_artifacts: vec![
            (
                ArtifactKind::Rtf,
                artifact_path(output_root, &entry.legacy_id, Side::Legacy, "legacy.rtf"),
            ),
            (
                ArtifactKind::Log,
                artifact_path(output_root, &entry.legacy_id, Side::Legacy, "legacy.log"),
            ),
        ],
        resolved_params: args,
    })
}

/// Plan for the native driver: the entry's `native_target` invoked with
/// translated parameter names, producing the IR JSON plus a log. Coexistence
/// entries point `native_target` at the legacy macro itself; the plan shape
/// is identical either way.
pub fn build_native_plan(
    entry: &BridgeMapEntry,
    study: &StudyConfig,
    call_args: &BTreeMap<String, ParamValue>,
    output_root: &Path,
) -> Result<ExecutionPlan, ResolveError> {
    let resolved = resolve_parameters(entry, study, call_args, &ResolveOptions::default())?;
    let program_text = assemble_program(entry, macro_call(&entry.native_target, &resolved));
    Ok(ExecutionPlan {
        entry_id: entry.legacy_id.clone(),
        side: Side::Native,
        program_text,
        expected_artifacts: vec![
            (
                ArtifactKind::IrJson,
                artifact_path(output_root, &entry.legacy_id, Side::Native, "native.json"),
            ),
            (
                ArtifactKind::Log,
                artifact_path(output_root, &entry.legacy_id, Side::Native, "native.log"),
            ),
        ],
        resolved_params: resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::DeploymentMode;

    fn entry() -> BridgeMapEntry {
        BridgeMapEntry {
            legacy_id: "ae_summary_soc".into(),
            native_target: "ae_soc_pt".into(),
            mode: DeploymentMode::Consolidation,
            parameter_mapping: [("dsin".to_string(), "input_ds".to_string())].into(),
            defaults: [("confidence_level".to_string(), ParamValue::Number(0.95))].into(),
            preamble_sas: None,
            post_calls: Vec::new(),
            skip: None,
        }
    }

    fn study() -> StudyConfig {
        let mut study = StudyConfig::default();
        study
            .environment
            .insert("studyid".into(), ParamValue::from("CDISCPILOT01"));
        study
    }

    #[test]
    fn legacy_names_translate_through_mapping() {
        let args: BTreeMap<String, ParamValue> =
            [("dsin".to_string(), ParamValue::from("adsl"))].into();
        let resolved =
            resolve_parameters(&entry(), &study(), &args, &ResolveOptions::default()).unwrap();
        assert_eq!(resolved["input_ds"], "adsl");
        assert!(!resolved.contains_key("dsin"));
    }

    #[test]
    fn precedence_call_args_over_defaults_over_study() {
        let mut entry = entry();
        entry
            .parameter_mapping
            .insert("conf".into(), "confidence_level".into());
        let mut study = study();
        study
            .environment
            .insert("confidence_level".into(), ParamValue::Number(0.80));

        // study layer only
        let resolved =
            resolve_parameters(&entry, &study, &BTreeMap::new(), &ResolveOptions::default())
                .unwrap();
        assert_eq!(resolved["confidence_level"], "0.95"); // default beats study

        // call layer wins over both
        let args: BTreeMap<String, ParamValue> =
            [("conf".to_string(), ParamValue::Number(0.99))].into();
        let resolved =
            resolve_parameters(&entry, &study, &args, &ResolveOptions::default()).unwrap();
        assert_eq!(resolved["confidence_level"], "0.99");
    }

    #[test]
    fn default_survives_without_override() {
        let resolved = resolve_parameters(
            &entry(),
            &study(),
            &BTreeMap::new(),
            &ResolveOptions::default(),
        )
        .unwrap();
        assert_eq!(resolved["confidence_level"], "0.95");
        assert_eq!(resolved["studyid"], "CDISCPILOT01");
    }

    #[test]
    fn thirty_three_character_name_rejected() {
        let mut entry = entry();
        let long = "a".repeat(33);
        entry.defaults.insert(long.clone(), ParamValue::from("x"));
        let err = resolve_parameters(
            &entry,
            &study(),
            &BTreeMap::new(),
            &ResolveOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, ResolveError::NameTooLong(long));
        // exactly 32 is fine
        let mut entry = self::entry();
        entry.defaults.insert("b".repeat(32), ParamValue::from("x"));
        assert!(resolve_parameters(
            &entry,
            &study(),
            &BTreeMap::new(),
            &ResolveOptions::default()
        )
        .is_ok());
    }

    #[test]
    fn invalid_identifier_rejected() {
        let mut entry = entry();
        entry.defaults.insert("9bad".into(), ParamValue::from("x"));
        assert!(matches!(
            resolve_parameters(
                &entry,
                &study(),
                &BTreeMap::new(),
                &ResolveOptions::default()
            ),
            Err(ResolveError::InvalidIdentifier(_))
        ));
    }

    #[test]
    fn unmapped_legacy_parameter_strictness() {
        let args: BTreeMap<String, ParamValue> =
            [("mystery".to_string(), ParamValue::from("x"))].into();
        assert!(matches!(
            resolve_parameters(&entry(), &study(), &args, &ResolveOptions::default()),
            Err(ResolveError::UnmappedLegacyParameter(_))
        ));
        let resolved =
            resolve_parameters(&entry(), &study(), &args, &ResolveOptions { strict: false })
                .unwrap();
        assert_eq!(resolved["mystery"], "x");
    }

    #[test]
    fn resolution_is_idempotent_and_order_independent() {
        let args: BTreeMap<String, ParamValue> = [
            ("dsin".to_string(), ParamValue::from("adsl")),
            ("zz".to_string(), ParamValue::from("v")),
        ]
        .into();
        let mut entry = entry();
        entry
            .parameter_mapping
            .insert("zz".into(), "zz_native".into());
        let a = resolve_parameters(&entry, &study(), &args, &ResolveOptions::default()).unwrap();
        let b = resolve_parameters(&entry, &study(), &args, &ResolveOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn legacy_plan_uses_original_names() {
        let args: BTreeMap<String, ParamValue> =
            [("dsin".to_string(), ParamValue::from("adsl"))].into();
        let plan = build_legacy_plan(&entry(), &study(), &args, Path::new("out")).unwrap();
        assert!(plan.program_text.contains("%ae_summary_soc(dsin=adsl);"));
        assert!(plan
            .artifact(ArtifactKind::Rtf)
            .unwrap()
            .ends_with("ae_summary_soc/legacy/legacy.rtf"));
        assert!(plan.artifact(ArtifactKind::Log).is_some());
    }

    #[test]
    fn native_plan_invokes_target_with_translated_names() {
        let args: BTreeMap<String, ParamValue> =
            [("dsin".to_string(), ParamValue::from("adsl"))].into();
        let plan = build_native_plan(&entry(), &study(), &args, Path::new("out")).unwrap();
        assert!(plan.program_text.contains("%ae_soc_pt("));
        assert!(plan.program_text.contains("input_ds=adsl"));
        assert!(plan.program_text.contains("confidence_level=0.95"));
        assert!(plan.artifact(ArtifactKind::IrJson).is_some());
    }

    #[test]
    fn preamble_first_postcalls_last_deterministic() {
        let mut entry = entry();
        entry.preamble_sas = Some("%let study=CDISCPILOT01;".into());
        entry.post_calls = vec!["%cleanup();".into()];
        let args = BTreeMap::new();
        let plan1 = build_legacy_plan(&entry, &study(), &args, Path::new("out")).unwrap();
        let plan2 = build_legacy_plan(&entry, &study(), &args, Path::new("out")).unwrap();
        assert!(plan1.program_text.starts_with("%let study=CDISCPILOT01;"));
        assert!(plan1.program_text.trim_end().ends_with("%cleanup();"));
        assert_eq!(plan1.program_text, plan2.program_text);

        // without post_calls the program ends with the macro call
        let bare = build_legacy_plan(&self::entry(), &study(), &args, Path::new("out")).unwrap();
        assert!(bare.program_text.trim_end().ends_with(");"));
    }

    #[test]
    fn values_with_spaces_are_quoted() {
        let args: BTreeMap<String, ParamValue> =
            [("dsin".to_string(), ParamValue::from("where age > 65"))].into();
        let plan = build_legacy_plan(&entry(), &study(), &args, Path::new("out")).unwrap();
        assert!(plan.program_text.contains("dsin=%str(where age > 65)"));
    }
}
