//! Row and column alignment between a parsed legacy table and a native grid.

use super::similarity::{similarity, SynonymTable};
use crate::ir::{CellGrid, ElementType};
use crate::rtf::{classify_cell_text, normalize_text, NormalizeOptions, RawTable};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct AlignOptions {
    /// A pre-data row needs at least this many non-empty cells to count as a
    /// header (guards against decorative one-cell title rows).
    pub min_header_cells: usize,
    /// Minimum normalized edit similarity for label-based row matching and
    /// header-based column matching.
    pub label_similarity_threshold: f64,
    /// Minimum fraction of equal data cells for matching a blank-label row.
    pub data_gate_threshold: f64,
    /// Epsilon for the numeric-equality part of data gating.
    pub gate_epsilon: f64,
    pub synonyms: SynonymTable,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            min_header_cells: 2,
            label_similarity_threshold: 0.8,
            data_gate_threshold: 0.8,
            gate_epsilon: 1e-9,
            synonyms: SynonymTable::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AlignError {
    #[error("{side} table has no data rows")]
    DegenerateTable { side: &'static str },
}

/// One matched data row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowPair {
    pub legacy_row: usize,
    pub native_row: u32,
    pub label_similarity: f64,
    /// Matched through the blank-label data-similarity gate rather than by
    /// label.
    pub blank_label_gated: bool,
}

/// Alignment between the two sides. Unmatched rows and columns are reported,
/// never silently dropped; blank rows and page-header repeats are skipped
/// with a note.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Alignment {
    pub header_pairs: Vec<(usize, u32)>,
    pub row_pairs: Vec<RowPair>,
    pub col_pairs: Vec<(usize, u32)>,
    pub unmatched_legacy_rows: Vec<usize>,
    pub unmatched_native_rows: Vec<u32>,
    pub unmatched_legacy_cols: Vec<usize>,
    pub unmatched_native_cols: Vec<u32>,
    pub skipped_legacy_rows: Vec<usize>,
    pub legacy_header_rows: Vec<usize>,
    pub native_header_rows: Vec<u32>,
    /// (legacy col idx, native col dim_id) of the row-label column.
    pub label_col: Option<(usize, u32)>,
    pub notes: Vec<String>,
}

pub(super) struct NativeRow {
    pub dim_id: u32,
    pub label: String,
    pub is_header: bool,
    pub is_separator: bool,
}

pub(super) fn native_rows(grid: &CellGrid) -> Vec<NativeRow> {
    let index = grid.cell_index();
    let label_col = grid
        .cols()
        .iter()
        .find(|c| c.element_type == ElementType::RowHeader)
        .map(|c| c.dim_id);
    grid.rows()
        .iter()
        .map(|row| {
            let cell_label = label_col
                .and_then(|c| index.get(&(row.dim_id, c)))
                .map(|c| c.cell_formatted.clone())
                .filter(|t| !t.trim().is_empty());
            NativeRow {
                dim_id: row.dim_id,
                label: cell_label.unwrap_or_else(|| row.label.clone()),
                is_header: matches!(
                    row.element_type,
                    ElementType::ColumnHeader | ElementType::SpanningHeader
                ),
                is_separator: row.element_type == ElementType::Separator,
            }
        })
        .collect()
}

fn match_norm(text: &str) -> String {
    normalize_text(
        text,
        &NormalizeOptions {
            case_fold: true,
            fold_unicode_fallback: false,
        },
    )
}

fn label_similarity(a: &str, b: &str, synonyms: &SynonymTable) -> f64 {
    if synonyms.equivalent(a, b) {
        return 1.0;
    }
    similarity(a, b)
}

/// Order-preserving longest common subsequence over exactly-equal, non-empty
/// labels. Falls back to no anchors when the product of the row counts is
/// unreasonably large.
fn exact_label_anchors(a: &[String], b: &[String]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 || n.saturating_mul(m) > 4_000_000 {
        return Vec::new();
    }
    let mut dp = vec![0u32; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[at(i, j)] = if !a[i].is_empty() && a[i] == b[j] {
                dp[at(i + 1, j + 1)] + 1
            } else {
                dp[at(i + 1, j)].max(dp[at(i, j + 1)])
            };
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        if !a[i].is_empty() && a[i] == b[j] {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if dp[at(i + 1, j)] >= dp[at(i, j + 1)] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Align a legacy table with a native grid.
pub fn align_tables(
    legacy: &RawTable,
    native: &CellGrid,
    opts: &AlignOptions,
) -> Result<Alignment, AlignError> {
    let mut out = Alignment::default();

    let natives = native_rows(native);
    let native_cols = native.cols();
    let cell_index = native.cell_index();

    // -- legacy header detection -------------------------------------------
    let normalized_rows: Vec<Vec<String>> = legacy
        .rows
        .iter()
        .map(|row| row.iter().map(|c| match_norm(c)).collect())
        .collect();
    let first_numeric = legacy
        .rows
        .iter()
        .position(|row| row.iter().any(|cell| classify_cell_text(cell).is_numeric()));

    let mut legacy_headers: Vec<usize> = Vec::new();
    let mut skipped: Vec<usize> = Vec::new();
    if let Some(first) = first_numeric {
        for (i, row) in normalized_rows.iter().enumerate().take(first) {
            let filled = row.iter().filter(|c| !c.is_empty()).count();
            if filled >= opts.min_header_cells {
                legacy_headers.push(i);
            } else {
                // below the guard: not a header, stays a data candidate
                out.notes.push(format!(
                    "legacy row {i} not a header: below min_header_cells guard"
                ));
            }
        }
        // page-repeated headers after the first data row
        for (i, row) in normalized_rows.iter().enumerate().skip(first) {
            if legacy_headers
                .iter()
                .any(|&h| normalized_rows[h] == *row && !row.iter().all(|c| c.is_empty()))
            {
                skipped.push(i);
                out.notes
                    .push(format!("legacy row {i} skipped: repeated page header"));
            }
        }
    }

    // blank rows are visual separators on the legacy side
    for (i, row) in normalized_rows.iter().enumerate() {
        if row.iter().all(|c| c.is_empty()) && !skipped.contains(&i) {
            skipped.push(i);
            out.notes.push(format!("legacy row {i} skipped: blank"));
        }
    }
    skipped.sort_unstable();
    skipped.dedup();

    let legacy_data: Vec<usize> = (0..legacy.rows.len())
        .filter(|i| !legacy_headers.contains(i) && !skipped.contains(i))
        .collect();
    let native_data: Vec<&NativeRow> = natives
        .iter()
        .filter(|r| !r.is_header && !r.is_separator)
        .collect();
    let native_headers: Vec<&NativeRow> = natives.iter().filter(|r| r.is_header).collect();

    for sep in natives.iter().filter(|r| r.is_separator) {
        out.notes
            .push(format!("native row {} skipped: separator", sep.dim_id));
    }

    if legacy_data.is_empty() {
        return Err(AlignError::DegenerateTable { side: "legacy" });
    }
    if native_data.is_empty() {
        return Err(AlignError::DegenerateTable { side: "native" });
    }

    // -- header row pairing (positional) ------------------------------------
    for (l, n) in legacy_headers.iter().zip(native_headers.iter()) {
        out.header_pairs.push((*l, n.dim_id));
    }
    if legacy_headers.len() > native_headers.len() {
        out.unmatched_legacy_rows
            .extend(legacy_headers[native_headers.len()..].iter().copied());
    } else {
        out.unmatched_native_rows.extend(
            native_headers[legacy_headers.len()..]
                .iter()
                .map(|r| r.dim_id),
        );
    }
    out.legacy_header_rows = legacy_headers.clone();
    out.native_header_rows = native_headers.iter().map(|r| r.dim_id).collect();

    // -- column alignment ----------------------------------------------------
    let legacy_ncols = legacy.rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let legacy_col_header = |j: usize| -> String {
        legacy_headers
            .first()
            .and_then(|&h| legacy.rows[h].get(j))
            .map(|c| match_norm(c))
            .unwrap_or_default()
    };

    if legacy_ncols == native_cols.len() {
        for (j, col) in native_cols.iter().enumerate() {
            out.col_pairs.push((j, col.dim_id));
        }
    } else {
        out.notes.push(format!(
            "column counts differ: legacy {legacy_ncols}, native {}",
            native_cols.len()
        ));
        // order-preserving greedy match on header text
        let native_header_text = |dim_id: u32, label: &str| -> String {
            native_headers
                .first()
                .and_then(|h| cell_index.get(&(h.dim_id, dim_id)))
                .map(|c| match_norm(&c.cell_formatted))
                .filter(|t| !t.is_empty())
                .unwrap_or_else(|| match_norm(label))
        };
        let mut cursor = 0usize;
        for j in 0..legacy_ncols {
            let header = legacy_col_header(j);
            let mut matched = None;
            for (p, col) in native_cols.iter().enumerate().skip(cursor) {
                let native_header = native_header_text(col.dim_id, &col.label);
                let sim = label_similarity(&header, &native_header, &opts.synonyms);
                if sim >= opts.label_similarity_threshold {
                    matched = Some(p);
                    break;
                }
            }
            match matched {
                Some(p) => {
                    for skipped_native in cursor..p {
                        out.unmatched_native_cols
                            .push(native_cols[skipped_native].dim_id);
                    }
                    out.col_pairs.push((j, native_cols[p].dim_id));
                    cursor = p + 1;
                }
                None => out.unmatched_legacy_cols.push(j),
            }
        }
        for col in native_cols.iter().skip(cursor) {
            out.unmatched_native_cols.push(col.dim_id);
        }
    }

    // -- label column ---------------------------------------------------------
    let native_label_dim = native_cols
        .iter()
        .find(|c| c.element_type == ElementType::RowHeader)
        .map(|c| c.dim_id);
    out.label_col = native_label_dim.and_then(|dim| {
        out.col_pairs
            .iter()
            .find(|(_, n)| *n == dim)
            .map(|(l, n)| (*l, *n))
    });

    // -- data row matching -----------------------------------------------------
    let native_label_norm: HashMap<u32, String> = native_data
        .iter()
        .map(|r| (r.dim_id, match_norm(&r.label)))
        .collect();
    let data_cols: Vec<(usize, u32)> = out
        .col_pairs
        .iter()
        .filter(|(_, n)| Some(*n) != native_label_dim)
        .copied()
        .collect();

    // the gate tolerates transport garbling: fold fallback characters so a
    // "?"-for-"≥" difference does not block an otherwise identical row
    let gate_norm = |text: &str| {
        normalize_text(
            text,
            &NormalizeOptions {
                case_fold: true,
                fold_unicode_fallback: true,
            },
        )
    };
    let row_data_similarity = |legacy_row: usize, native_dim: u32| -> f64 {
        if data_cols.is_empty() {
            return 0.0;
        }
        let mut equal = 0usize;
        for (lj, nd) in &data_cols {
            let l_text = legacy.rows[legacy_row]
                .get(*lj)
                .map(String::as_str)
                .unwrap_or("");
            let n_text = cell_index
                .get(&(native_dim, *nd))
                .map(|c| c.cell_formatted.as_str())
                .unwrap_or("");
            let ln = gate_norm(l_text);
            let nn = gate_norm(n_text);
            if ln == nn {
                equal += 1;
                continue;
            }
            let (le, ne) = (classify_cell_text(&ln), classify_cell_text(&nn));
            if le.is_numeric() && le.kind == ne.kind {
                let p_ok = match (le.primary, ne.primary) {
                    (Some(a), Some(b)) => (a - b).abs() <= opts.gate_epsilon,
                    _ => false,
                };
                let s_ok = match (le.secondary, ne.secondary) {
                    (Some(a), Some(b)) => (a - b).abs() <= opts.gate_epsilon,
                    (None, None) => true,
                    _ => false,
                };
                if p_ok && s_ok {
                    equal += 1;
                }
            }
        }
        equal as f64 / data_cols.len() as f64
    };

    let legacy_label = |i: usize| -> String {
        match out.label_col {
            Some((lj, _)) => normalized_rows[i].get(lj).cloned().unwrap_or_default(),
            None => String::new(),
        }
    };

    // Anchor rows whose normalized labels match exactly (an order-preserving
    // longest common subsequence), then fuzzy-match only inside the gaps.
    // Repeated label stems (visit blocks, term lists) otherwise let a greedy
    // forward scan bind a row to a lookalike far past a deletion.
    let l_labels: Vec<String> = legacy_data.iter().map(|&i| legacy_label(i)).collect();
    let n_labels: Vec<String> = native_data
        .iter()
        .map(|r| native_label_norm[&r.dim_id].clone())
        .collect();
    let anchors = exact_label_anchors(&l_labels, &n_labels);

    let mut segment_bounds: Vec<(usize, usize)> = anchors.clone();
    segment_bounds.push((legacy_data.len(), native_data.len()));
    let (mut prev_l, mut prev_n) = (0usize, 0usize);
    for (anchor_idx, &(al, an)) in segment_bounds.iter().enumerate() {
        // fuzzy region between anchors
        let mut cursor = prev_n;
        for li in prev_l..al {
            let i = legacy_data[li];
            let label = &l_labels[li];
            if !label.is_empty() {
                let mut matched = None;
                for p in cursor..an {
                    let sim = label_similarity(label, &n_labels[p], &opts.synonyms);
                    if sim >= opts.label_similarity_threshold {
                        matched = Some((p, sim));
                        break;
                    }
                }
                match matched {
                    Some((p, sim)) => {
                        for skipped_native in cursor..p {
                            out.unmatched_native_rows
                                .push(native_data[skipped_native].dim_id);
                        }
                        out.row_pairs.push(RowPair {
                            legacy_row: i,
                            native_row: native_data[p].dim_id,
                            label_similarity: sim,
                            blank_label_gated: false,
                        });
                        cursor = p + 1;
                    }
                    None => out.unmatched_legacy_rows.push(i),
                }
            } else if cursor < an {
                // blank label: only a strong data-cell match may pair the rows
                let candidate = native_data[cursor];
                let gate = row_data_similarity(i, candidate.dim_id);
                if gate >= opts.data_gate_threshold {
                    out.row_pairs.push(RowPair {
                        legacy_row: i,
                        native_row: candidate.dim_id,
                        label_similarity: label_similarity(
                            label,
                            &n_labels[cursor],
                            &opts.synonyms,
                        ),
                        blank_label_gated: true,
                    });
                    cursor += 1;
                } else {
                    out.unmatched_legacy_rows.push(i);
                    out.notes.push(format!(
                        "legacy row {i} has a blank label and data similarity {gate:.2} below the gate"
                    ));
                }
            } else {
                out.unmatched_legacy_rows.push(i);
            }
        }
        for p in cursor..an {
            out.unmatched_native_rows.push(native_data[p].dim_id);
        }
        if anchor_idx < anchors.len() {
            out.row_pairs.push(RowPair {
                legacy_row: legacy_data[al],
                native_row: native_data[an].dim_id,
                label_similarity: 1.0,
                blank_label_gated: false,
            });
            prev_l = al + 1;
            prev_n = an + 1;
        }
    }

    out.skipped_legacy_rows = skipped;
    out.unmatched_legacy_rows.sort_unstable();
    out.unmatched_native_rows.sort_unstable();
    Ok(out)
}
