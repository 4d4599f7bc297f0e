//! Cell-level comparison of a legacy-rendered table against a native grid.
//!
//! The pipeline is: align rows and columns (headers detected and deduplicated
//! on the legacy side, data rows matched by label similarity, blank-label rows
//! gated by data similarity), compare every aligned cell (text exactly after
//! normalization, numerics within epsilon), then classify each difference
//! into a fixed divergence taxonomy. Verdicts: PASS (no differences), FAIL
//! (content divergence), ERROR (execution or parse failure upstream), SKIP
//! (explicit annotation).

mod align;
mod classify;
mod engine;
mod similarity;
mod summary;

pub use align::{align_tables, AlignError, AlignOptions, Alignment, RowPair};
pub use classify::{classify_divergences, AlignContext};
pub use engine::{compare_figure, compare_listing, compare_table, CompareOptions};
pub use similarity::{levenshtein, similarity, SynonymTable};
pub use summary::{summarize, SummaryMatrix, SummaryRow};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of one report comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
    Skip,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
            Verdict::Skip => "SKIP",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The recurring divergence categories plus the fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DivergenceCategory {
    TotalColumn,
    PairedCountPct,
    AdslDenominator,
    PopulationDenominator,
    TreatmentNameHarmonization,
    SocGroupTotal,
    ZeroFill,
    RowLabelDrift,
    UnicodeFallback,
    HeaderDetection,
    BlankLabelAlignment,
    ConfigCoverage,
    Unclassified,
}

impl DivergenceCategory {
    pub const ALL: [DivergenceCategory; 13] = [
        DivergenceCategory::TotalColumn,
        DivergenceCategory::PairedCountPct,
        DivergenceCategory::AdslDenominator,
        DivergenceCategory::PopulationDenominator,
        DivergenceCategory::TreatmentNameHarmonization,
        DivergenceCategory::SocGroupTotal,
        DivergenceCategory::ZeroFill,
        DivergenceCategory::RowLabelDrift,
        DivergenceCategory::UnicodeFallback,
        DivergenceCategory::HeaderDetection,
        DivergenceCategory::BlankLabelAlignment,
        DivergenceCategory::ConfigCoverage,
        DivergenceCategory::Unclassified,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DivergenceCategory::TotalColumn => "TOTAL_COLUMN",
            DivergenceCategory::PairedCountPct => "PAIRED_COUNT_PCT",
            DivergenceCategory::AdslDenominator => "ADSL_DENOMINATOR",
            DivergenceCategory::PopulationDenominator => "POPULATION_DENOMINATOR",
            DivergenceCategory::TreatmentNameHarmonization => "TREATMENT_NAME_HARMONIZATION",
            DivergenceCategory::SocGroupTotal => "SOC_GROUP_TOTAL",
            DivergenceCategory::ZeroFill => "ZERO_FILL",
            DivergenceCategory::RowLabelDrift => "ROW_LABEL_DRIFT",
            DivergenceCategory::UnicodeFallback => "UNICODE_FALLBACK",
            DivergenceCategory::HeaderDetection => "HEADER_DETECTION",
            DivergenceCategory::BlankLabelAlignment => "BLANK_LABEL_ALIGNMENT",
            DivergenceCategory::ConfigCoverage => "CONFIG_COVERAGE",
            DivergenceCategory::Unclassified => "UNCLASSIFIED",
        }
    }
}

impl fmt::Display for DivergenceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a difference came from, structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffOrigin {
    AlignedCell,
    UnmatchedLegacyRow,
    UnmatchedNativeRow,
    UnmatchedLegacyCol,
    UnmatchedNativeCol,
}

/// One cell-level difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDiff {
    /// Legacy (row, col), zero-based; absent when the legacy side has no
    /// counterpart (an unmatched native row/column).
    pub legacy_pos: Option<(usize, usize)>,
    /// Native (row_id, col_id); absent when the native side has no
    /// counterpart.
    pub native_pos: Option<(u32, u32)>,
    pub legacy_text: String,
    pub native_text: String,
    /// Present only when both sides yielded numeric extractions of the same
    /// kind; the largest absolute component difference.
    pub numeric_delta: Option<f64>,
    pub category: DivergenceCategory,
    pub origin: DiffOrigin,
}

/// Per-report comparison result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub entry_id: String,
    pub verdict: Verdict,
    pub total_cells: usize,
    pub matched_cells: usize,
    pub parity_pct: f64,
    pub diffs: Vec<CellDiff>,
    pub alignment_notes: Vec<String>,
}

impl ComparisonReport {
    pub fn error(entry_id: impl Into<String>, note: impl Into<String>) -> Self {
        ComparisonReport {
            entry_id: entry_id.into(),
            verdict: Verdict::Error,
            total_cells: 0,
            matched_cells: 0,
            parity_pct: 0.0,
            diffs: Vec::new(),
            alignment_notes: vec![note.into()],
        }
    }

    pub fn skip(entry_id: impl Into<String>, annotation: impl Into<String>) -> Self {
        ComparisonReport {
            entry_id: entry_id.into(),
            verdict: Verdict::Skip,
            total_cells: 0,
            matched_cells: 0,
            parity_pct: 0.0,
            diffs: Vec::new(),
            alignment_notes: vec![format!("skipped: {}", annotation.into())],
        }
    }

    /// Histogram of diff categories.
    pub fn category_counts(&self) -> std::collections::BTreeMap<DivergenceCategory, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for diff in &self.diffs {
            *counts.entry(diff.category).or_insert(0) += 1;
        }
        counts
    }

    /// One CSV line in the summary-matrix shape:
    /// entry_id, verdict, parity_pct, top category.
    pub fn csv_row(&self) -> String {
        let top = self
            .category_counts()
            .into_iter()
            .max_by_key(|(cat, n)| (*n, std::cmp::Reverse(*cat)))
            .map(|(cat, _)| cat.as_str())
            .unwrap_or("");
        format!(
            "{},{},{:.1},{}",
            self.entry_id, self.verdict, self.parity_pct, top
        )
    }
}
