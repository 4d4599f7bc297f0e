//! Rule-based divergence classification.
//!
//! Every diff receives exactly one category, assigned by first match in a
//! fixed rule order. The order matters: structural causes (a whole missing
//! Total column) outrank cell-level causes (a drifted label), which outrank
//! the fallback.

use super::similarity::SynonymTable;
use super::{CellDiff, DiffOrigin, DivergenceCategory};
use crate::rtf::{classify_cell_text, normalize_text, ExtractionKind, NormalizeOptions};
use std::collections::{BTreeMap, BTreeSet};

/// Alignment facts the classifier needs.
#[derive(Debug, Clone, Default)]
pub struct AlignContext {
    /// Header text of each unmatched legacy column, by column index.
    pub unmatched_legacy_col_headers: BTreeMap<usize, String>,
    /// Header text of each unmatched native column, by dim_id.
    pub unmatched_native_col_headers: BTreeMap<u32, String>,
    pub legacy_header_rows: BTreeSet<usize>,
    pub native_header_rows: BTreeSet<u32>,
    pub blank_gated_legacy_rows: BTreeSet<usize>,
    /// Label similarity of each matched legacy data row.
    pub row_label_similarity: BTreeMap<usize, f64>,
    /// Hierarchy parent rows (group-total rows), both coordinate systems.
    pub hierarchy_parent_legacy_rows: BTreeSet<usize>,
    pub hierarchy_parent_native_rows: BTreeSet<u32>,
    /// Legacy index of the row-label column, when one exists.
    pub label_col_legacy: Option<usize>,
    pub label_similarity_threshold: f64,
    pub epsilon: f64,
    /// Study-level denominator provenance flags: percentages derived from
    /// subject-level data vs a filtered analysis population.
    pub adsl_denominator: bool,
    pub population_denominator: bool,
    /// The entry has no registry config; the native side is a default shell.
    pub missing_registry_config: bool,
    pub synonyms: SynonymTable,
}

fn first_word_is_total(header: &str) -> bool {
    normalize_text(
        header,
        &NormalizeOptions {
            case_fold: true,
            fold_unicode_fallback: false,
        },
    )
    .split(' ')
    .next()
    .map(|w| w == "total" || w == "overall")
    .unwrap_or(false)
}

fn fold(text: &str) -> String {
    normalize_text(
        text,
        &NormalizeOptions {
            case_fold: false,
            fold_unicode_fallback: true,
        },
    )
}

fn zero_like(text: &str) -> bool {
    let e = classify_cell_text(text);
    match e.kind {
        ExtractionKind::Single => e.primary == Some(0.0),
        ExtractionKind::Paired => e.primary == Some(0.0) && e.secondary == Some(0.0),
        ExtractionKind::None => false,
    }
}

fn classify_one(diff: &CellDiff, ctx: &AlignContext) -> DivergenceCategory {
    let legacy = classify_cell_text(&diff.legacy_text);
    let native = classify_cell_text(&diff.native_text);
    let eps = ctx.epsilon;

    // 1. whole column absent whose header reads "total"
    match diff.origin {
        DiffOrigin::UnmatchedLegacyCol => {
            if let Some((_, col)) = diff.legacy_pos {
                if ctx
                    .unmatched_legacy_col_headers
                    .get(&col)
                    .map(|h| first_word_is_total(h))
                    .unwrap_or(false)
                {
                    return DivergenceCategory::TotalColumn;
                }
            }
        }
        DiffOrigin::UnmatchedNativeCol => {
            if let Some((_, col)) = diff.native_pos {
                if ctx
                    .unmatched_native_col_headers
                    .get(&col)
                    .map(|h| first_word_is_total(h))
                    .unwrap_or(false)
                {
                    return DivergenceCategory::TotalColumn;
                }
            }
        }
        _ => {}
    }

    // 2. paired layout vs split single values
    let paired_vs_single = |paired: &crate::rtf::NumericExtraction,
                            single: &crate::rtf::NumericExtraction| {
        let v = single.primary.unwrap_or(f64::NAN);
        let p = paired.primary.unwrap_or(f64::NAN);
        let s = paired.secondary.unwrap_or(f64::NAN);
        (v - p).abs() <= eps || (v - s).abs() <= eps
    };
    match (legacy.kind, native.kind) {
        (ExtractionKind::Paired, ExtractionKind::Single) => {
            if paired_vs_single(&legacy, &native) {
                return DivergenceCategory::PairedCountPct;
            }
        }
        (ExtractionKind::Single, ExtractionKind::Paired) if paired_vs_single(&native, &legacy) => {
            return DivergenceCategory::PairedCountPct;
        }
        _ => {}
    }

    // 3. matching count, differing percentage: a denominator difference
    if legacy.kind == ExtractionKind::Paired && native.kind == ExtractionKind::Paired {
        let counts_match = match (legacy.primary, native.primary) {
            (Some(a), Some(b)) => (a - b).abs() <= eps,
            _ => false,
        };
        let pcts_differ = match (legacy.secondary, native.secondary) {
            (Some(a), Some(b)) => (a - b).abs() > eps,
            _ => false,
        };
        if counts_match && pcts_differ {
            if ctx.adsl_denominator {
                return DivergenceCategory::AdslDenominator;
            }
            if ctx.population_denominator {
                return DivergenceCategory::PopulationDenominator;
            }
        }
    }

    // 4. same treatment variable under a different name
    if ctx
        .synonyms
        .equivalent(&diff.legacy_text, &diff.native_text)
    {
        return DivergenceCategory::TreatmentNameHarmonization;
    }

    // 5. numeric mismatch on a hierarchy parent (group-total) row
    let on_parent_row = diff
        .legacy_pos
        .map(|(r, _)| ctx.hierarchy_parent_legacy_rows.contains(&r))
        .unwrap_or(false)
        || diff
            .native_pos
            .map(|(r, _)| ctx.hierarchy_parent_native_rows.contains(&r))
            .unwrap_or(false);
    if on_parent_row && legacy.is_numeric() && native.is_numeric() {
        return DivergenceCategory::SocGroupTotal;
    }

    // 6. zero on one side, nothing on the other
    let legacy_absent = diff.legacy_text.trim().is_empty();
    let native_absent = diff.native_text.trim().is_empty();
    if (legacy_absent && zero_like(&diff.native_text))
        || (native_absent && zero_like(&diff.legacy_text))
    {
        return DivergenceCategory::ZeroFill;
    }

    // 7. drifted row label on the label column
    if let (Some((row, col)), Some(label_col)) = (diff.legacy_pos, ctx.label_col_legacy) {
        if col == label_col {
            if let Some(&sim) = ctx.row_label_similarity.get(&row) {
                if sim >= ctx.label_similarity_threshold && sim < 1.0 {
                    return DivergenceCategory::RowLabelDrift;
                }
            }
        }
    }

    // 8. equal after folding transport-garbled characters
    if !diff.legacy_text.trim().is_empty() && fold(&diff.legacy_text) == fold(&diff.native_text) {
        return DivergenceCategory::UnicodeFallback;
    }

    // 9. confined to detected header rows
    let on_header = diff
        .legacy_pos
        .map(|(r, _)| ctx.legacy_header_rows.contains(&r))
        .unwrap_or(false)
        || diff
            .native_pos
            .map(|(r, _)| ctx.native_header_rows.contains(&r))
            .unwrap_or(false);
    if on_header {
        return DivergenceCategory::HeaderDetection;
    }

    // 10. row was matched through the blank-label gate
    if diff
        .legacy_pos
        .map(|(r, _)| ctx.blank_gated_legacy_rows.contains(&r))
        .unwrap_or(false)
    {
        return DivergenceCategory::BlankLabelAlignment;
    }

    // 11. the whole entry lacks a registry config
    if ctx.missing_registry_config {
        return DivergenceCategory::ConfigCoverage;
    }

    DivergenceCategory::Unclassified
}

/// Assign exactly one category to every diff, first rule wins.
pub fn classify_divergences(mut diffs: Vec<CellDiff>, ctx: &AlignContext) -> Vec<CellDiff> {
    for diff in &mut diffs {
        diff.category = classify_one(diff, ctx);
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diff(legacy: &str, native: &str) -> CellDiff {
        CellDiff {
            legacy_pos: Some((3, 2)),
            native_pos: Some((4, 3)),
            legacy_text: legacy.into(),
            native_text: native.into(),
            numeric_delta: None,
            category: DivergenceCategory::Unclassified,
            origin: DiffOrigin::AlignedCell,
        }
    }

    fn ctx() -> AlignContext {
        AlignContext {
            label_similarity_threshold: 0.8,
            epsilon: 1e-9,
            ..Default::default()
        }
    }

    #[test]
    fn unicode_fallback_detected() {
        let out = classify_divergences(vec![diff("\u{2265}10", "?10")], &ctx());
        assert_eq!(out[0].category, DivergenceCategory::UnicodeFallback);
    }

    #[test]
    fn zero_fill_vs_absent_cell() {
        let mut d = diff("0 (0.0%)", "");
        d.origin = DiffOrigin::UnmatchedLegacyRow;
        d.native_pos = None;
        let out = classify_divergences(vec![d], &ctx());
        assert_eq!(out[0].category, DivergenceCategory::ZeroFill);
    }

    #[test]
    fn denominator_flags_steer_percentage_mismatch() {
        let mut context = ctx();
        context.adsl_denominator = true;
        let out = classify_divergences(vec![diff("5 (16.7%)", "5 (15.2%)")], &context);
        assert_eq!(out[0].category, DivergenceCategory::AdslDenominator);

        let mut context = ctx();
        context.population_denominator = true;
        let out = classify_divergences(vec![diff("5 (16.7%)", "5 (15.2%)")], &context);
        assert_eq!(out[0].category, DivergenceCategory::PopulationDenominator);

        // without a flag the pair falls through to the fallback
        let out = classify_divergences(vec![diff("5 (16.7%)", "5 (15.2%)")], &ctx());
        assert_eq!(out[0].category, DivergenceCategory::Unclassified);
    }

    #[test]
    fn paired_vs_single_split() {
        let out = classify_divergences(vec![diff("5 (16.7%)", "5")], &ctx());
        assert_eq!(out[0].category, DivergenceCategory::PairedCountPct);
        let out = classify_divergences(vec![diff("16.7", "5 (16.7%)")], &ctx());
        assert_eq!(out[0].category, DivergenceCategory::PairedCountPct);
    }

    #[test]
    fn synonym_hit_is_harmonization() {
        let out = classify_divergences(vec![diff("TRT01A", "TRTA")], &ctx());
        assert_eq!(
            out[0].category,
            DivergenceCategory::TreatmentNameHarmonization
        );
    }

    #[test]
    fn total_column_by_header() {
        let mut d = diff("254", "");
        d.origin = DiffOrigin::UnmatchedLegacyCol;
        d.legacy_pos = Some((3, 4));
        d.native_pos = None;
        let mut context = ctx();
        context
            .unmatched_legacy_col_headers
            .insert(4, "Total (N=254)".into());
        let out = classify_divergences(vec![d], &context);
        assert_eq!(out[0].category, DivergenceCategory::TotalColumn);
    }

    #[test]
    fn parent_row_numeric_mismatch_is_group_total() {
        let mut context = ctx();
        context.hierarchy_parent_native_rows.insert(4);
        let out = classify_divergences(vec![diff("52 (61.9%)", "51 (60.7%)")], &context);
        assert_eq!(out[0].category, DivergenceCategory::SocGroupTotal);
    }

    #[test]
    fn label_drift_on_label_column() {
        let mut context = ctx();
        context.label_col_legacy = Some(0);
        context.row_label_similarity.insert(3, 1.0 - 1.0 / 9.0);
        let mut d = diff("Diarrhoea", "Diarrhea");
        d.legacy_pos = Some((3, 0));
        let out = classify_divergences(vec![d], &context);
        assert_eq!(out[0].category, DivergenceCategory::RowLabelDrift);
    }

    #[test]
    fn header_row_mismatch() {
        let mut context = ctx();
        context.legacy_header_rows.insert(3);
        let out = classify_divergences(vec![diff("Total (N=254)", "Total")], &context);
        assert_eq!(out[0].category, DivergenceCategory::HeaderDetection);
    }

    #[test]
    fn blank_gate_and_config_coverage() {
        let mut context = ctx();
        context.blank_gated_legacy_rows.insert(3);
        let out = classify_divergences(vec![diff("a", "b")], &context);
        assert_eq!(out[0].category, DivergenceCategory::BlankLabelAlignment);

        let mut context = ctx();
        context.missing_registry_config = true;
        let out = classify_divergences(vec![diff("a", "b")], &context);
        assert_eq!(out[0].category, DivergenceCategory::ConfigCoverage);
    }

    #[test]
    fn every_diff_gets_exactly_one_category() {
        let out = classify_divergences(vec![diff("x", "y"), diff("1", "2")], &ctx());
        assert!(out
            .iter()
            .all(|d| d.category == DivergenceCategory::Unclassified));
    }
}
