//! Shared world-building helpers for integration tests: a bridge map, a
//! report-type registry, a study config, and synthesized fixture artifacts
//! under a temp root.

use std::path::Path;
use tflparity_core::gates::HarnessConfig;
use tflparity_core::render::to_json;
use tflparity_core::synth::{generate_pair, Arm, FixtureSpec, ReportKind};

pub struct EntrySpec {
    pub legacy_id: &'static str,
    pub kind: ReportKind,
    pub rows: u32,
    pub seed: u64,
}

pub fn small_arms() -> Vec<Arm> {
    vec![Arm::new("Placebo", 50), Arm::new("Active", 48)]
}

pub fn fixture_spec(entry: &EntrySpec) -> FixtureSpec {
    FixtureSpec {
        report_kind: entry.kind,
        arms: small_arms(),
        rows: entry.rows,
        seed: entry.seed,
    }
}

/// Lay out a complete harness world under `root` and return its config.
pub fn write_world(root: &Path, entries: &[EntrySpec]) -> HarnessConfig {
    let fixtures = root.join("fixtures");
    let registry = root.join("registry");
    let out = root.join("out");
    std::fs::create_dir_all(&registry).unwrap();
    std::fs::create_dir_all(&out).unwrap();

    let mut map_doc = String::new();
    for entry in entries {
        let pair = generate_pair(&fixture_spec(entry));
        let dir = fixtures.join(entry.legacy_id);
        std::fs::create_dir_all(dir.join("legacy")).unwrap();
        std::fs::create_dir_all(dir.join("native")).unwrap();
        std::fs::write(dir.join("legacy/legacy.rtf"), &pair.rtf).unwrap();
        std::fs::write(dir.join("native/native.json"), to_json(&pair.grid).unwrap()).unwrap();

        let target = format!("{}_rt", entry.legacy_id);
        std::fs::write(
            registry.join(format!("{target}.yaml")),
            format!(
                "report_id: {target}\ncomparison: table\nparameters:\n  - name: input_ds\n  - name: treatment_var\n    default: TRT01A\n"
            ),
        )
        .unwrap();

        map_doc.push_str(&format!(
            "- legacy_id: {id}\n  native_target: {target}\n  mode: CONSOLIDATION\n  parameter_mapping:\n    dsin: input_ds\n  defaults:\n    input_ds: adsl\n",
            id = entry.legacy_id,
        ));
    }
    let map_path = root.join("bridge_map.yaml");
    std::fs::write(&map_path, map_doc).unwrap();

    let study_path = root.join("study.yaml");
    std::fs::write(
        &study_path,
        "environment:\n  studyid: CDISCPILOT01\ndataset_paths:\n  adsl: data/adsl.sas7bdat\n",
    )
    .unwrap();

    HarnessConfig {
        bridge_map_path: map_path,
        study_config_path: study_path,
        registry_dir: registry,
        fixtures_dir: fixtures,
        output_dir: out,
        sample_entries: Vec::new(),
        legacy_corpus_dir: None,
        synonyms_path: None,
        compare_epsilon: None,
        reconcile_tolerance: None,
        executor_command: None,
    }
}

pub fn default_entries() -> Vec<EntrySpec> {
    vec![
        EntrySpec {
            legacy_id: "ae_overview",
            kind: ReportKind::AeSummary,
            rows: 12,
            seed: 11,
        },
        EntrySpec {
            legacy_id: "demog_all",
            kind: ReportKind::Demographics,
            rows: 18,
            seed: 12,
        },
        EntrySpec {
            legacy_id: "ae_soc_pt_all",
            kind: ReportKind::AeSocPt,
            rows: 30,
            seed: 13,
        },
    ]
}
