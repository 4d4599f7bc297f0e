//! The registered self-check suite behind gate D: fast, hermetic invariant
//! checks exposed programmatically so the workflow never shells out to a
//! test runner.

use crate::compare::{compare_table, CompareOptions, Verdict};
use crate::ir::{
    validate_grid, Alignment, Cell, CellGrid, CellType, Dimension, ElementType, StructureEntry,
};
use crate::render::{from_json, to_json, to_rtf, RenderConfig};
use crate::rtf::{classify_cell_text, normalize_text, parse_rtf, NormalizeOptions};
use crate::synth::{generate_pair, Arm, FixtureSpec, ReportKind};

pub struct SelfCheck {
    pub name: &'static str,
    pub run: fn() -> Result<(), String>,
}

fn probe_grid() -> CellGrid {
    let mk_cell = |row: u32, col: u32, text: &str, ty: CellType, v: Option<f64>| {
        Cell::new("probe", "exec", row, col, v, text, ty, 0).expect("probe cell")
    };
    let mk_row = |id: u32, label: &str| {
        StructureEntry::new(
            "probe",
            "exec",
            Dimension::Row,
            id,
            label,
            id - 1,
            0,
            Alignment::Left,
            1,
            ElementType::DataRow,
        )
        .expect("probe row")
    };
    let mk_col = |id: u32, label: &str, elem: ElementType| {
        StructureEntry::new(
            "probe",
            "exec",
            Dimension::Col,
            id,
            label,
            id - 1,
            0,
            Alignment::Center,
            1,
            elem,
        )
        .expect("probe col")
    };
    CellGrid::new(
        vec![
            mk_cell(1, 1, "Cardiac", CellType::Label, None),
            mk_cell(1, 2, "5 (16.7%)", CellType::Integer, Some(5.0)),
            mk_cell(1, 3, "8 (26.7%)", CellType::Integer, Some(8.0)),
        ],
        vec![
            mk_row(1, "Cardiac"),
            mk_col(1, "", ElementType::RowHeader),
            mk_col(2, "Placebo", ElementType::ColumnHeader),
            mk_col(3, "Dose 10", ElementType::ColumnHeader),
        ],
    )
}

fn check_ir_json_roundtrip() -> Result<(), String> {
    let grid = probe_grid();
    let doc = to_json(&grid).map_err(|e| e.to_string())?;
    let back = from_json(&doc).map_err(|e| e.to_string())?;
    if to_json(&back).map_err(|e| e.to_string())? != doc {
        return Err("canonical JSON did not round-trip".into());
    }
    if !validate_grid(&back).valid {
        return Err("round-tripped grid fails validation".into());
    }
    Ok(())
}

fn check_rtf_roundtrip() -> Result<(), String> {
    let grid = probe_grid();
    let rtf = to_rtf(&grid, &RenderConfig::default()).map_err(|e| e.to_string())?;
    let tables = parse_rtf(&rtf).map_err(|e| e.to_string())?;
    if tables.len() != 1 {
        return Err(format!("expected one table, parsed {}", tables.len()));
    }
    let texts: Vec<&str> = tables[0].rows[0].iter().map(|s| s.as_str()).collect();
    if texts != vec!["Cardiac", "5 (16.7%)", "8 (26.7%)"] {
        return Err(format!(
            "cell texts did not survive the round trip: {texts:?}"
        ));
    }
    Ok(())
}

fn check_normalize_idempotence() -> Result<(), String> {
    let opts = NormalizeOptions::default();
    for sample in ["  n  (%) ", "a\tb\nc", "", "already clean"] {
        let once = normalize_text(sample, &opts);
        let twice = normalize_text(&once, &opts);
        if once != twice {
            return Err(format!("normalize not idempotent on {sample:?}"));
        }
    }
    Ok(())
}

fn check_numeric_classification() -> Result<(), String> {
    let paired = classify_cell_text("5 (16.7%)");
    if paired.primary != Some(5.0) || paired.secondary != Some(16.7) {
        return Err("paired extraction failed".into());
    }
    if classify_cell_text("0.0312").primary != Some(0.0312) {
        return Err("single extraction failed".into());
    }
    if classify_cell_text("Placebo").is_numeric() {
        return Err("text misclassified as numeric".into());
    }
    Ok(())
}

fn check_self_parity_smoke() -> Result<(), String> {
    let spec = FixtureSpec {
        report_kind: ReportKind::AeSummary,
        arms: vec![Arm::new("A", 40), Arm::new("B", 40)],
        rows: 10,
        seed: 42,
    };
    let pair = generate_pair(&spec);
    let tables = parse_rtf(&pair.rtf).map_err(|e| e.to_string())?;
    let report = compare_table(&tables[0], &pair.grid, &CompareOptions::default());
    if report.verdict != Verdict::Pass {
        return Err(format!(
            "clean pair did not self-compare PASS: {:?}",
            report.diffs.first()
        ));
    }
    Ok(())
}

fn check_hash_vector() -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!("tflparity-selfcheck-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("empty.bin");
    std::fs::write(&path, b"").map_err(|e| e.to_string())?;
    let digest = crate::audit::hash_file(&path).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&path);
    if digest != "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855" {
        return Err(format!("empty-input digest mismatch: {digest}"));
    }
    Ok(())
}

/// The checks gate D executes, in order.
pub fn builtin_self_checks() -> Vec<SelfCheck> {
    vec![
        SelfCheck {
            name: "ir_json_roundtrip",
            run: check_ir_json_roundtrip,
        },
        SelfCheck {
            name: "rtf_roundtrip",
            run: check_rtf_roundtrip,
        },
        SelfCheck {
            name: "normalize_idempotence",
            run: check_normalize_idempotence,
        },
        SelfCheck {
            name: "numeric_classification",
            run: check_numeric_classification,
        },
        SelfCheck {
            name: "self_parity_smoke",
            run: check_self_parity_smoke,
        },
        SelfCheck {
            name: "hash_vector",
            run: check_hash_vector,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_check_passes() {
        for check in builtin_self_checks() {
            (check.run)().unwrap_or_else(|e| panic!("{} failed: {e}", check.name));
        }
    }
}
