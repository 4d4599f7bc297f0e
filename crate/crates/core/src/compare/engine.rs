//! The comparison operations: tables (aligned), listings (positional), and
//! figures (coarse file-size check).

use super::align::{align_tables, AlignOptions};
use super::classify::{classify_divergences, AlignContext};
use super::{CellDiff, ComparisonReport, DiffOrigin, DivergenceCategory, Verdict};
use crate::ir::{CellGrid, HierarchySpec};
use crate::rtf::{classify_cell_text, normalize_text, ExtractionKind, NormalizeOptions, RawTable};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct CompareOptions {
    /// Display-level numeric tolerance. Distinct from the IR reconciliation
    /// tolerance: rendered values have already been rounded for display.
    pub epsilon: f64,
    pub align: AlignOptions,
    pub normalize: NormalizeOptions,
    /// Apply the treatment-synonym table before text comparison, making
    /// synonym pairs equal instead of reportable diffs.
    pub apply_synonyms: bool,
    /// Count only data cells (not header rows or the label column) in the
    /// parity percentage.
    pub data_cells_only: bool,
    pub adsl_denominator: bool,
    pub population_denominator: bool,
    pub missing_registry_config: bool,
    /// Explicit skip annotation: produce a SKIP verdict without comparing.
    pub skip_annotation: Option<String>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            epsilon: 1e-9,
            align: AlignOptions::default(),
            normalize: NormalizeOptions::default(),
            apply_synonyms: false,
            data_cells_only: false,
            adsl_denominator: false,
            population_denominator: false,
            missing_registry_config: false,
            skip_annotation: None,
        }
    }
}

/// (equal, numeric_delta-if-same-kind)
fn cells_equal(legacy: &str, native: &str, opts: &CompareOptions) -> (bool, Option<f64>) {
    let norm_l = normalize_text(legacy, &opts.normalize);
    let norm_n = normalize_text(native, &opts.normalize);
    if norm_l == norm_n {
        return (true, None);
    }
    if opts.apply_synonyms && opts.align.synonyms.equivalent(&norm_l, &norm_n) {
        return (true, None);
    }
    let le = classify_cell_text(&norm_l);
    let ne = classify_cell_text(&norm_n);
    if le.kind != ne.kind || le.kind == ExtractionKind::None {
        return (false, None);
    }
    let dp = match (le.primary, ne.primary) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    };
    let ds = match (le.secondary, ne.secondary) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    };
    let delta = dp.max(ds);
    (delta <= opts.epsilon, Some(delta))
}

/// Align then compare every cell of a legacy table against a native grid.
/// Fallible preconditions (degenerate tables) surface as an ERROR verdict
/// rather than an error value.
pub fn compare_table(
    legacy: &RawTable,
    native: &CellGrid,
    opts: &CompareOptions,
) -> ComparisonReport {
    let entry_id = if native.report_id().is_empty() {
        "unnamed".to_string()
    } else {
        native.report_id().to_string()
    };
    if let Some(annotation) = &opts.skip_annotation {
        return ComparisonReport::skip(entry_id, annotation.clone());
    }

    let alignment = match align_tables(legacy, native, &opts.align) {
        Ok(a) => a,
        Err(e) => return ComparisonReport::error(entry_id, e.to_string()),
    };

    let cell_index = native.cell_index();
    let native_text = |row: u32, col: u32| -> &str {
        cell_index
            .get(&(row, col))
            .map(|c| c.cell_formatted.as_str())
            .unwrap_or("")
    };
    let legacy_text = |row: usize, col: usize| -> &str {
        legacy
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .map(String::as_str)
            .unwrap_or("")
    };

    // classifier context
    let hierarchy = HierarchySpec::from_grid_indents(native);
    let parent_native: BTreeSet<u32> = hierarchy.parents.iter().map(|p| p.parent_row).collect();
    let mut parent_legacy = BTreeSet::new();
    let mut row_label_similarity = BTreeMap::new();
    let mut blank_gated = BTreeSet::new();
    for pair in &alignment.row_pairs {
        row_label_similarity.insert(pair.legacy_row, pair.label_similarity);
        if pair.blank_label_gated {
            blank_gated.insert(pair.legacy_row);
        }
        if parent_native.contains(&pair.native_row) {
            parent_legacy.insert(pair.legacy_row);
        }
    }
    let legacy_col_header = |col: usize| -> String {
        alignment
            .legacy_header_rows
            .first()
            .map(|&h| legacy_text(h, col).to_string())
            .unwrap_or_default()
    };
    let mut ctx = AlignContext {
        legacy_header_rows: alignment.legacy_header_rows.iter().copied().collect(),
        native_header_rows: alignment.native_header_rows.iter().copied().collect(),
        blank_gated_legacy_rows: blank_gated,
        row_label_similarity,
        hierarchy_parent_legacy_rows: parent_legacy,
        hierarchy_parent_native_rows: parent_native,
        label_col_legacy: alignment.label_col.map(|(l, _)| l),
        label_similarity_threshold: opts.align.label_similarity_threshold,
        epsilon: opts.epsilon,
        adsl_denominator: opts.adsl_denominator,
        population_denominator: opts.population_denominator,
        missing_registry_config: opts.missing_registry_config,
        synonyms: opts.align.synonyms.clone(),
        ..Default::default()
    };
    for &col in &alignment.unmatched_legacy_cols {
        ctx.unmatched_legacy_col_headers
            .insert(col, legacy_col_header(col));
    }
    for &dim in &alignment.unmatched_native_cols {
        let header = native
            .col_entry(dim)
            .map(|c| c.label.clone())
            .unwrap_or_default();
        let header = if header.is_empty() {
            alignment
                .native_header_rows
                .first()
                .map(|&h| native_text(h, dim).to_string())
                .unwrap_or_default()
        } else {
            header
        };
        ctx.unmatched_native_col_headers.insert(dim, header);
    }

    // compare aligned positions
    let mut diffs = Vec::new();
    let mut total = 0usize;
    let mut matched = 0usize;
    let label_dim = alignment.label_col.map(|(_, n)| n);

    let row_iter: Vec<(usize, u32, bool)> = alignment
        .header_pairs
        .iter()
        .map(|&(l, n)| (l, n, true))
        .chain(
            alignment
                .row_pairs
                .iter()
                .map(|p| (p.legacy_row, p.native_row, false)),
        )
        .collect();

    for &(l_row, n_row, is_header) in &row_iter {
        for &(l_col, n_col) in &alignment.col_pairs {
            let l = legacy_text(l_row, l_col);
            let n = native_text(n_row, n_col);
            let is_data = !is_header && Some(n_col) != label_dim;
            let counts = !opts.data_cells_only || is_data;
            if counts {
                total += 1;
            }
            let (equal, delta) = cells_equal(l, n, opts);
            if equal {
                if counts {
                    matched += 1;
                }
            } else {
                diffs.push(CellDiff {
                    legacy_pos: Some((l_row, l_col)),
                    native_pos: Some((n_row, n_col)),
                    legacy_text: l.to_string(),
                    native_text: n.to_string(),
                    numeric_delta: delta,
                    category: DivergenceCategory::Unclassified,
                    origin: DiffOrigin::AlignedCell,
                });
            }
        }
    }

    // unmatched rows: every cell is a divergence
    for &l_row in &alignment.unmatched_legacy_rows {
        let width = legacy.rows.get(l_row).map(|r| r.len()).unwrap_or(0);
        for l_col in 0..width {
            total += 1;
            diffs.push(CellDiff {
                legacy_pos: Some((l_row, l_col)),
                native_pos: None,
                legacy_text: legacy_text(l_row, l_col).to_string(),
                native_text: String::new(),
                numeric_delta: None,
                category: DivergenceCategory::Unclassified,
                origin: DiffOrigin::UnmatchedLegacyRow,
            });
        }
    }
    for &n_row in &alignment.unmatched_native_rows {
        for col in native.cols() {
            total += 1;
            diffs.push(CellDiff {
                legacy_pos: None,
                native_pos: Some((n_row, col.dim_id)),
                legacy_text: String::new(),
                native_text: native_text(n_row, col.dim_id).to_string(),
                numeric_delta: None,
                category: DivergenceCategory::Unclassified,
                origin: DiffOrigin::UnmatchedNativeRow,
            });
        }
    }

    // unmatched columns: cells over the matched rows
    for &l_col in &alignment.unmatched_legacy_cols {
        for &(l_row, _, _) in &row_iter {
            total += 1;
            diffs.push(CellDiff {
                legacy_pos: Some((l_row, l_col)),
                native_pos: None,
                legacy_text: legacy_text(l_row, l_col).to_string(),
                native_text: String::new(),
                numeric_delta: None,
                category: DivergenceCategory::Unclassified,
                origin: DiffOrigin::UnmatchedLegacyCol,
            });
        }
    }
    for &n_col in &alignment.unmatched_native_cols {
        for &(_, n_row, _) in &row_iter {
            total += 1;
            diffs.push(CellDiff {
                legacy_pos: None,
                native_pos: Some((n_row, n_col)),
                legacy_text: String::new(),
                native_text: native_text(n_row, n_col).to_string(),
                numeric_delta: None,
                category: DivergenceCategory::Unclassified,
                origin: DiffOrigin::UnmatchedNativeCol,
            });
        }
    }

    let diffs = classify_divergences(diffs, &ctx);
    let verdict = if diffs.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let parity_pct = if total == 0 {
        100.0
    } else {
        100.0 * matched as f64 / total as f64
    };

    ComparisonReport {
        entry_id,
        verdict,
        total_cells: total,
        matched_cells: matched,
        parity_pct,
        diffs,
        alignment_notes: alignment.notes,
    }
}

/// Listings are order-significant: row count, column count, then positional
/// content equality. No fuzzy alignment.
pub fn compare_listing(legacy: &RawTable, native: &CellGrid) -> ComparisonReport {
    let entry_id = if native.report_id().is_empty() {
        "unnamed".to_string()
    } else {
        native.report_id().to_string()
    };
    let mut notes = Vec::new();

    let l_rows = legacy.n_rows();
    let l_cols = legacy.n_cols();
    let n_rows = native.n_rows() as usize;
    let n_cols = native.n_cols() as usize;
    let mut structural_fail = false;
    if l_rows != n_rows {
        structural_fail = true;
        notes.push(format!(
            "row counts differ: legacy {l_rows}, native {n_rows}"
        ));
    }
    if l_cols != n_cols {
        structural_fail = true;
        notes.push(format!(
            "column counts differ: legacy {l_cols}, native {n_cols}"
        ));
    }

    let index = native.cell_index();
    let norm = NormalizeOptions::default();
    let mut diffs = Vec::new();
    let total = l_rows.max(n_rows) * l_cols.max(n_cols);
    let mut matched = 0usize;

    for i in 0..l_rows.max(n_rows) {
        for j in 0..l_cols.max(n_cols) {
            let l = legacy
                .rows
                .get(i)
                .and_then(|r| r.get(j))
                .map(String::as_str)
                .unwrap_or("");
            let n = index
                .get(&((i + 1) as u32, (j + 1) as u32))
                .map(|c| c.cell_formatted.as_str())
                .unwrap_or("");
            if normalize_text(l, &norm) == normalize_text(n, &norm) {
                matched += 1;
            } else {
                diffs.push(CellDiff {
                    legacy_pos: Some((i, j)),
                    native_pos: Some(((i + 1) as u32, (j + 1) as u32)),
                    legacy_text: l.to_string(),
                    native_text: n.to_string(),
                    numeric_delta: None,
                    category: DivergenceCategory::Unclassified,
                    origin: DiffOrigin::AlignedCell,
                });
            }
        }
    }

    let ctx = AlignContext {
        epsilon: 0.0,
        label_similarity_threshold: 0.8,
        ..Default::default()
    };
    let diffs = classify_divergences(diffs, &ctx);
    let verdict = if diffs.is_empty() && !structural_fail {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    ComparisonReport {
        entry_id,
        verdict,
        total_cells: total,
        matched_cells: matched,
        parity_pct: if total == 0 {
            100.0
        } else {
            100.0 * matched as f64 / total as f64
        },
        diffs,
        alignment_notes: notes,
    }
}

/// Coarse structural check on figures: relative file-size difference within
/// `tolerance_pct` percent. Flagged for manual spot-checking either way.
pub fn compare_figure(
    legacy_path: &Path,
    native_path: &Path,
    tolerance_pct: f64,
) -> ComparisonReport {
    let entry_id = legacy_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "figure".into());
    let size_of = |p: &Path| -> Result<u64, String> {
        std::fs::metadata(p)
            .map(|m| m.len())
            .map_err(|e| format!("{}: {e}", p.display()))
    };
    let (a, b) = match (size_of(legacy_path), size_of(native_path)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return ComparisonReport::error(entry_id, e),
    };
    let max = a.max(b);
    let rel = if max == 0 {
        0.0
    } else {
        (a as f64 - b as f64).abs() / max as f64
    };
    let pass = rel <= tolerance_pct / 100.0;
    ComparisonReport {
        entry_id,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        total_cells: 1,
        matched_cells: usize::from(pass),
        parity_pct: if pass { 100.0 } else { 0.0 },
        diffs: Vec::new(),
        alignment_notes: vec![format!(
            "coarse file-size check: legacy {a} B vs native {b} B ({:.1}% difference); manual spot-check recommended",
            rel * 100.0
        )],
    }
}
