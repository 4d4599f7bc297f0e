//! Aggregation of per-report comparisons into a summary matrix.

use super::{ComparisonReport, DivergenceCategory, Verdict};
use serde::Serialize;
use std::collections::BTreeMap;

/// The parity threshold a report must clear to count as acceptable.
pub const PARITY_THRESHOLD_PCT: f64 = 80.0;

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub entry_id: String,
    pub verdict: Verdict,
    pub parity_pct: f64,
    pub categories: BTreeMap<DivergenceCategory, usize>,
}

impl SummaryRow {
    pub fn top_category(&self) -> Option<DivergenceCategory> {
        self.categories
            .iter()
            .max_by_key(|(cat, n)| (**n, std::cmp::Reverse(**cat)))
            .map(|(cat, _)| *cat)
    }
}

/// At-a-glance parity status across a batch.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryMatrix {
    pub rows: Vec<SummaryRow>,
    pub verdict_counts: BTreeMap<Verdict, usize>,
    /// Entries at or above the acceptance threshold, over the total.
    pub at_threshold: usize,
    pub total: usize,
}

/// Reduce completed reports into a matrix ordered by entry id.
pub fn summarize(reports: &[ComparisonReport]) -> SummaryMatrix {
    let mut rows: Vec<SummaryRow> = reports
        .iter()
        .map(|r| SummaryRow {
            entry_id: r.entry_id.clone(),
            verdict: r.verdict,
            parity_pct: r.parity_pct,
            categories: r.category_counts(),
        })
        .collect();
    rows.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));

    let mut verdict_counts = BTreeMap::new();
    for row in &rows {
        *verdict_counts.entry(row.verdict).or_insert(0) += 1;
    }
    let at_threshold = rows
        .iter()
        .filter(|r| r.verdict != Verdict::Error && r.parity_pct >= PARITY_THRESHOLD_PCT)
        .count();
    SummaryMatrix {
        total: rows.len(),
        rows,
        verdict_counts,
        at_threshold,
    }
}

impl SummaryMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// CSV form: entry_id, verdict, parity_pct, top category.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("entry_id,verdict,parity_pct,top_category\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.1},{}\n",
                row.entry_id,
                row.verdict,
                row.parity_pct,
                row.top_category().map(|c| c.as_str()).unwrap_or("")
            ));
        }
        out
    }
}
