//! Binary-level tests: subcommand wiring, exit-code contract, env override.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tflparity"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Generate the preset fixtures once per test dir.
fn with_fixtures(dir: &Path) {
    let output = run_in(dir, &["synth", "make", "--preset", "--out", "fx"]);
    assert!(output.status.success(), "{}", stdout(&output));
}

fn write_harness(dir: &Path, entries: &[&str]) {
    std::fs::create_dir_all(dir.join("registry")).unwrap();
    let mut map = String::new();
    for id in entries {
        std::fs::write(
            dir.join(format!("registry/{id}_rt.yaml")),
            format!("report_id: {id}_rt\nparameters:\n  - name: input_ds\n"),
        )
        .unwrap();
        map.push_str(&format!(
            "- legacy_id: {id}\n  native_target: {id}_rt\n  mode: CONSOLIDATION\n  defaults:\n    input_ds: adsl\n"
        ));
    }
    std::fs::write(dir.join("bridge_map.yaml"), map).unwrap();
    std::fs::write(dir.join("study.yaml"), "environment:\n  studyid: PILOT\n").unwrap();
    std::fs::write(
        dir.join("harness.yaml"),
        "bridge_map_path: bridge_map.yaml\nstudy_config_path: study.yaml\nregistry_dir: registry\nfixtures_dir: fx\noutput_dir: out\n",
    )
    .unwrap();
}

#[test]
fn self_parity_pair_compares_clean() {
    let dir = tempfile::tempdir().unwrap();
    with_fixtures(dir.path());

    let output = run_in(
        dir.path(),
        &["ir", "validate", "fx/demographics_s1001/native/native.json"],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stdout(&output));

    let output = run_in(
        dir.path(),
        &[
            "compare",
            "table",
            "fx/demographics_s1001/legacy/legacy.rtf",
            "fx/demographics_s1001/native/native.json",
        ],
    );
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("parity 100.0%"));
}

#[test]
fn failed_comparison_exits_one_with_json_report() {
    let dir = tempfile::tempdir().unwrap();
    with_fixtures(dir.path());
    // corrupt one display string in the native IR
    let native = dir.path().join("fx/ae_summary_s1002/native/native.json");
    let doc = std::fs::read_to_string(&native).unwrap();
    let first_paired = doc
        .lines()
        .find(|l| l.contains("cell_formatted") && l.contains("(") && l.contains("%"))
        .unwrap()
        .trim()
        .to_string();
    std::fs::write(
        &native,
        doc.replacen(&first_paired, &first_paired.replace('(', "(9"), 1),
    )
    .unwrap();

    let output = run_in(
        dir.path(),
        &[
            "compare",
            "table",
            "fx/ae_summary_s1002/legacy/legacy.rtf",
            "fx/ae_summary_s1002/native/native.json",
            "--json",
        ],
    );
    assert_eq!(output.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["verdict"], "FAIL");
    assert!(report["diffs"]
        .as_array()
        .map(|d| !d.is_empty())
        .unwrap_or(false));
}

#[test]
fn gates_report_failure_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    with_fixtures(dir.path());
    write_harness(dir.path(), &["demographics_s1001", "ae_summary_s1002"]);

    // clean run through G exits 0
    let output = run_in(dir.path(), &["gates", "run", "--config", "harness.yaml"]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout(&output));

    // duplicate id fails gate B and exits 1
    let mut map = std::fs::read_to_string(dir.path().join("bridge_map.yaml")).unwrap();
    map.push_str(
        "- legacy_id: demographics_s1001\n  native_target: demographics_s1001_rt\n  mode: CONSOLIDATION\n",
    );
    std::fs::write(dir.path().join("bridge_map.yaml"), map).unwrap();
    let output = run_in(
        dir.path(),
        &[
            "gates",
            "run",
            "--config",
            "harness.yaml",
            "--through",
            "B",
            "--json",
        ],
    );
    assert_eq!(output.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["results"][1]["gate"], "B");
    assert_eq!(report["results"][1]["status"], "FAIL");

    // an unreadable config is a usage-level error: exit 2
    let output = run_in(dir.path(), &["gates", "run", "--config", "missing.yaml"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn output_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    with_fixtures(dir.path());
    write_harness(dir.path(), &["ae_summary_s1002"]);

    let output = bin()
        .current_dir(dir.path())
        .env("TFLPARITY_OUT", "elsewhere")
        .args(["compare", "batch", "--config", "harness.yaml"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stdout(&output));
    assert!(dir
        .path()
        .join("elsewhere/ae_summary_s1002/manifest.json")
        .is_file());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn rtf_parse_emits_table_json() {
    let dir = tempfile::tempdir().unwrap();
    with_fixtures(dir.path());
    let output = run_in(
        dir.path(),
        &["rtf", "parse", "fx/listing_s1004/legacy/legacy.rtf"],
    );
    assert_eq!(output.status.code(), Some(0));
    let tables: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(tables[0].as_array().unwrap().len(), 4); // 4 rows
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    let output = run_in(dir.path(), &["ir", "validate", "junk.json"]);
    assert_eq!(output.status.code(), Some(2));

    std::fs::write(dir.path().join("junk.rtf"), "no magic here").unwrap();
    let output = run_in(dir.path(), &["rtf", "parse", "junk.rtf"]);
    assert_eq!(output.status.code(), Some(2));
}
