//! Seeded single-category divergence injection.
//!
//! Each injection applies one mutation of the named category to one side of
//! a clean pair and returns the classification the comparison is expected to
//! surface. Legacy-side mutations clone the grid, mutate it, and re-render
//! the RTF; native-side mutations leave the RTF alone.

use super::FixturePair;
use crate::compare::DivergenceCategory;
use crate::ir::{CellGrid, CellType, Dimension, ElementType, HierarchySpec};
use crate::render::{to_rtf, RenderConfig};
use crate::rtf::{classify_cell_text, ExtractionKind};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InjectError {
    #[error("category {category} is not applicable here: {reason}")]
    CategoryNotApplicable {
        category: DivergenceCategory,
        reason: String,
    },
}

/// Comparison flags the harness must set for the classifier to attribute the
/// divergence (mirrors study-level context that cannot be read off the
/// artifacts themselves).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompareHints {
    pub adsl_denominator: bool,
    pub population_denominator: bool,
    pub missing_registry_config: bool,
}

/// The mutated pair plus the assertion material.
#[derive(Debug, Clone)]
pub struct InjectedPair {
    pub legacy_rtf: Vec<u8>,
    pub native_grid: CellGrid,
    pub expected: Vec<DivergenceCategory>,
    pub hints: CompareHints,
}

fn not_applicable(category: DivergenceCategory, reason: &str) -> InjectError {
    InjectError::CategoryNotApplicable {
        category,
        reason: reason.to_string(),
    }
}

fn rerender(grid: &CellGrid) -> Vec<u8> {
    to_rtf(grid, &RenderConfig::default()).expect("mutated grid renders")
}

/// Column dims that carry data (everything but the label column).
fn data_col_dims(grid: &CellGrid) -> Vec<u32> {
    grid.cols()
        .iter()
        .filter(|c| c.element_type != ElementType::RowHeader)
        .map(|c| c.dim_id)
        .collect()
}

/// Parse the arm size out of a "Label (N=x)" header.
fn header_n(label: &str) -> Option<u32> {
    let start = label.find("(N=")?;
    let rest = &label[start + 3..];
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

fn header_text(grid: &CellGrid, col: u32) -> String {
    grid.cell_at(1, col)
        .map(|c| c.cell_formatted.clone())
        .or_else(|| grid.col_entry(col).map(|c| c.label.clone()))
        .unwrap_or_default()
}

fn set_cell(
    grid: &mut CellGrid,
    row: u32,
    col: u32,
    formatted: String,
    cell_type: CellType,
    value: Option<f64>,
) {
    if let Some(cell) = grid
        .cells
        .iter_mut()
        .find(|c| c.row_id == row && c.col_id == col)
    {
        cell.cell_formatted = formatted;
        cell.cell_type = cell_type;
        cell.cell_value = value;
    }
}

fn drop_column(grid: &mut CellGrid, dim: u32) {
    grid.cells.retain(|c| c.col_id != dim);
    grid.structure
        .retain(|s| !(s.dimension == Dimension::Col && s.dim_id == dim));
    for cell in &mut grid.cells {
        if cell.col_id > dim {
            cell.col_id -= 1;
        }
    }
    for entry in &mut grid.structure {
        if entry.dimension == Dimension::Col && entry.dim_id > dim {
            entry.dim_id -= 1;
            entry.sort_order = entry.dim_id - 1;
        }
    }
}

fn drop_row(grid: &mut CellGrid, dim: u32) {
    grid.cells.retain(|c| c.row_id != dim);
    grid.structure
        .retain(|s| !(s.dimension == Dimension::Row && s.dim_id == dim));
    for cell in &mut grid.cells {
        if cell.row_id > dim {
            cell.row_id -= 1;
        }
    }
    for entry in &mut grid.structure {
        if entry.dimension == Dimension::Row && entry.dim_id > dim {
            entry.dim_id -= 1;
            entry.sort_order = entry.dim_id - 1;
        }
    }
}

/// Data rows (dim ids) excluding the header row.
fn body_rows(grid: &CellGrid) -> Vec<u32> {
    grid.rows()
        .iter()
        .filter(|r| {
            !matches!(
                r.element_type,
                ElementType::ColumnHeader | ElementType::SpanningHeader | ElementType::Separator
            )
        })
        .map(|r| r.dim_id)
        .collect()
}

fn paired_positions(grid: &CellGrid) -> Vec<(u32, u32)> {
    let data_cols = data_col_dims(grid);
    let mut out = Vec::new();
    for &row in &body_rows(grid) {
        for &col in &data_cols {
            if let Some(cell) = grid.cell_at(row, col) {
                if classify_cell_text(&cell.cell_formatted).kind == ExtractionKind::Paired {
                    out.push((row, col));
                }
            }
        }
    }
    out
}

fn recompute_pct_column(grid: &mut CellGrid, col: u32, denom: u32) -> usize {
    let rows = body_rows(grid);
    let mut altered = 0usize;
    for row in rows {
        let Some(cell) = grid.cell_at(row, col) else {
            continue;
        };
        let extraction = classify_cell_text(&cell.cell_formatted);
        if extraction.kind != ExtractionKind::Paired {
            continue;
        }
        let count = extraction.primary.unwrap_or(0.0);
        let old = cell.cell_formatted.clone();
        let new_pct = if denom == 0 {
            0.0
        } else {
            100.0 * count / denom as f64
        };
        let formatted = format!("{} ({new_pct:.1}%)", count as u32);
        if formatted != old {
            set_cell(grid, row, col, formatted, CellType::Integer, Some(count));
            altered += 1;
        }
    }
    altered
}

/// Apply one seeded mutation of `category` to the pair.
pub fn inject_divergence(
    pair: &FixturePair,
    category: DivergenceCategory,
    seed: u64,
) -> Result<InjectedPair, InjectError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1f2e_3d4c_5b6a_7988);
    let mut hints = CompareHints::default();
    let grid = &pair.grid;

    let pick = |rng: &mut ChaCha8Rng, n: usize| -> usize {
        if n <= 1 {
            0
        } else {
            rng.gen_range(0..n)
        }
    };

    let (legacy_rtf, native_grid) = match category {
        DivergenceCategory::TotalColumn => {
            let total_col = grid
                .cols()
                .iter()
                .find(|c| {
                    header_text(grid, c.dim_id)
                        .to_lowercase()
                        .trim_start()
                        .starts_with("total")
                })
                .map(|c| c.dim_id)
                .ok_or_else(|| not_applicable(category, "no Total column"))?;
            let mut native = grid.clone();
            drop_column(&mut native, total_col);
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::PairedCountPct => {
            let positions = paired_positions(grid);
            let nonzero: Vec<&(u32, u32)> = positions
                .iter()
                .filter(|(r, c)| {
                    grid.cell_at(*r, *c)
                        .and_then(|cell| cell.cell_value)
                        .map(|v| v > 0.0)
                        .unwrap_or(false)
                })
                .collect();
            let &&(row, col) = nonzero
                .get(pick(&mut rng, nonzero.len()))
                .ok_or_else(|| not_applicable(category, "no non-zero paired cells"))?;
            let mut native = grid.clone();
            let count = grid
                .cell_at(row, col)
                .and_then(|c| c.cell_value)
                .unwrap_or(0.0);
            set_cell(
                &mut native,
                row,
                col,
                format!("{}", count as u32),
                CellType::Integer,
                Some(count),
            );
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::AdslDenominator | DivergenceCategory::PopulationDenominator => {
            let mut native = grid.clone();
            let mut altered = 0usize;
            for col in data_col_dims(grid) {
                let Some(n) = header_n(&header_text(grid, col)) else {
                    continue;
                };
                let denom = if category == DivergenceCategory::AdslDenominator {
                    n + 5
                } else {
                    n.saturating_sub(7).max(1)
                };
                altered = recompute_pct_column(&mut native, col, denom);
                if altered > 0 {
                    break;
                }
            }
            if altered == 0 {
                return Err(not_applicable(
                    category,
                    "no paired cells with (N=) headers",
                ));
            }
            if category == DivergenceCategory::AdslDenominator {
                hints.adsl_denominator = true;
            } else {
                hints.population_denominator = true;
            }
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::TreatmentNameHarmonization => {
            let arm_cols: Vec<u32> = data_col_dims(grid)
                .into_iter()
                .filter(|c| header_n(&header_text(grid, *c)).is_some())
                .collect();
            let col = *arm_cols
                .get(pick(&mut rng, arm_cols.len()))
                .ok_or_else(|| not_applicable(category, "no arm columns"))?;
            // one logical rename: the two pipelines name the same treatment
            // variable differently
            let mut legacy = grid.clone();
            set_cell(&mut legacy, 1, col, "TRT01A".into(), CellType::Header, None);
            let mut native = grid.clone();
            set_cell(&mut native, 1, col, "TRTA".into(), CellType::Header, None);
            if let Some(entry) = native
                .structure
                .iter_mut()
                .find(|s| s.dimension == Dimension::Col && s.dim_id == col)
            {
                entry.label = "TRTA".into();
            }
            (rerender(&legacy), native)
        }
        DivergenceCategory::SocGroupTotal => {
            let hierarchy = HierarchySpec::from_grid_indents(grid);
            let data_cols = data_col_dims(grid);
            let target = hierarchy
                .parents
                .iter()
                .find_map(|p| {
                    data_cols.iter().find_map(|&col| {
                        grid.cell_at(p.parent_row, col)
                            .filter(|c| c.cell_value.unwrap_or(0.0) > 0.0)
                            .map(|_| (p.parent_row, col))
                    })
                })
                .ok_or_else(|| not_applicable(category, "no numeric hierarchy parent rows"))?;
            let (row, col) = target;
            let mut native = grid.clone();
            let count = grid
                .cell_at(row, col)
                .and_then(|c| c.cell_value)
                .unwrap_or(1.0);
            let new_count = (count - 1.0).max(0.0);
            let n = header_n(&header_text(grid, col)).unwrap_or(0);
            let pct = if n == 0 {
                0.0
            } else {
                100.0 * new_count / n as f64
            };
            set_cell(
                &mut native,
                row,
                col,
                format!("{} ({pct:.1}%)", new_count as u32),
                CellType::Integer,
                Some(new_count),
            );
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::ZeroFill => {
            let data_cols = data_col_dims(grid);
            let zero_row = body_rows(grid)
                .into_iter()
                .find(|&row| {
                    let mut any = false;
                    let all_zero = data_cols.iter().all(|&col| match grid.cell_at(row, col) {
                        Some(cell) if !cell.cell_formatted.trim().is_empty() => {
                            any = true;
                            let e = classify_cell_text(&cell.cell_formatted);
                            match e.kind {
                                ExtractionKind::Single => e.primary == Some(0.0),
                                ExtractionKind::Paired => {
                                    e.primary == Some(0.0) && e.secondary == Some(0.0)
                                }
                                ExtractionKind::None => false,
                            }
                        }
                        _ => true,
                    });
                    any && all_zero
                })
                .ok_or_else(|| not_applicable(category, "no all-zero row"))?;
            let mut native = grid.clone();
            drop_row(&mut native, zero_row);
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::RowLabelDrift => {
            let candidates: Vec<u32> = body_rows(grid)
                .into_iter()
                .filter(|&row| {
                    grid.row_entry(row)
                        .map(|e| e.label.chars().count() >= 6)
                        .unwrap_or(false)
                })
                .collect();
            let row = *candidates
                .get(pick(&mut rng, candidates.len()))
                .ok_or_else(|| not_applicable(category, "no label long enough to drift"))?;
            let label = grid
                .row_entry(row)
                .map(|e| e.label.clone())
                .unwrap_or_default();
            let chars: Vec<char> = label.chars().collect();
            let drop_at = chars.len() / 2;
            let drifted: String = chars
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop_at)
                .map(|(_, c)| c)
                .collect();
            let mut legacy = grid.clone();
            if let Some(entry) = legacy
                .structure
                .iter_mut()
                .find(|s| s.dimension == Dimension::Row && s.dim_id == row)
            {
                entry.label = drifted.clone();
            }
            set_cell(&mut legacy, row, 1, drifted, CellType::Label, None);
            (rerender(&legacy), grid.clone())
        }
        DivergenceCategory::UnicodeFallback => {
            let mut legacy = grid.clone();
            let mut replaced = false;
            for cell in &mut legacy.cells {
                if cell.cell_formatted.contains('\u{2265}') {
                    cell.cell_formatted = cell.cell_formatted.replace('\u{2265}', "?");
                    replaced = true;
                }
            }
            for entry in &mut legacy.structure {
                if entry.label.contains('\u{2265}') {
                    entry.label = entry.label.replace('\u{2265}', "?");
                    replaced = true;
                }
            }
            if !replaced {
                return Err(not_applicable(category, "no \u{2265} characters present"));
            }
            (rerender(&legacy), grid.clone())
        }
        DivergenceCategory::HeaderDetection => {
            let arm_cols: Vec<u32> = data_col_dims(grid)
                .into_iter()
                .filter(|c| header_text(grid, *c).contains("(N="))
                .collect();
            let col = *arm_cols
                .get(pick(&mut rng, arm_cols.len()))
                .ok_or_else(|| not_applicable(category, "no sized headers"))?;
            let full = header_text(grid, col);
            let stripped = full.split(" (N=").next().unwrap_or(&full).to_string();
            let mut native = grid.clone();
            set_cell(&mut native, 1, col, stripped, CellType::Header, None);
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::BlankLabelAlignment => {
            // the label must be removable without leaving the row entirely
            // blank, so data-similarity gating has something to work with
            let data_cols = data_col_dims(grid);
            let candidates: Vec<u32> = body_rows(grid)
                .into_iter()
                .filter(|&row| {
                    let labeled = grid
                        .row_entry(row)
                        .map(|e| !e.label.trim().is_empty())
                        .unwrap_or(false);
                    let has_data = data_cols.iter().any(|&col| {
                        grid.cell_at(row, col)
                            .map(|c| !c.cell_formatted.trim().is_empty())
                            .unwrap_or(false)
                    });
                    labeled && has_data
                })
                .collect();
            let row = *candidates
                .get(pick(&mut rng, candidates.len()))
                .ok_or_else(|| not_applicable(category, "no labeled rows"))?;
            let mut legacy = grid.clone();
            if let Some(entry) = legacy
                .structure
                .iter_mut()
                .find(|s| s.dimension == Dimension::Row && s.dim_id == row)
            {
                entry.label = String::new();
            }
            set_cell(&mut legacy, row, 1, String::new(), CellType::Label, None);
            (rerender(&legacy), grid.clone())
        }
        DivergenceCategory::ConfigCoverage => {
            let data_cols = data_col_dims(grid);
            let mut native = grid.clone();
            for row in body_rows(grid) {
                for &col in &data_cols {
                    set_cell(&mut native, row, col, String::new(), CellType::Empty, None);
                }
            }
            hints.missing_registry_config = true;
            (pair.rtf.clone(), native)
        }
        DivergenceCategory::Unclassified => {
            return Err(not_applicable(
                category,
                "the fallback class is not injectable",
            ))
        }
    };

    Ok(InjectedPair {
        legacy_rtf,
        native_grid,
        expected: vec![category],
        hints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::{compare_table, CompareOptions, Verdict};
    use crate::rtf::parse_rtf;
    use crate::synth::{cdisc_pilot_presets, generate_pair, Arm, FixtureSpec, ReportKind};

    fn compare_injected(injected: &InjectedPair) -> crate::compare::ComparisonReport {
        let tables = parse_rtf(&injected.legacy_rtf).unwrap();
        let opts = CompareOptions {
            adsl_denominator: injected.hints.adsl_denominator,
            population_denominator: injected.hints.population_denominator,
            missing_registry_config: injected.hints.missing_registry_config,
            ..Default::default()
        };
        compare_table(&tables[0], &injected.native_grid, &opts)
    }

    #[test]
    fn total_column_injection_detected() {
        let pair = generate_pair(&cdisc_pilot_presets()[0]);
        let injected = inject_divergence(&pair, DivergenceCategory::TotalColumn, 3).unwrap();
        let report = compare_injected(&injected);
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report
            .diffs
            .iter()
            .any(|d| d.category == DivergenceCategory::TotalColumn));
    }

    #[test]
    fn unicode_fallback_injection_detected() {
        let pair = generate_pair(&cdisc_pilot_presets()[1]);
        let injected = inject_divergence(&pair, DivergenceCategory::UnicodeFallback, 5).unwrap();
        let report = compare_injected(&injected);
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(
            report
                .diffs
                .iter()
                .any(|d| d.category == DivergenceCategory::UnicodeFallback),
            "{:?}",
            report.diffs
        );
    }

    #[test]
    fn zero_fill_injection_detected() {
        let pair = generate_pair(&cdisc_pilot_presets()[2]);
        let injected = inject_divergence(&pair, DivergenceCategory::ZeroFill, 9).unwrap();
        let report = compare_injected(&injected);
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report
            .diffs
            .iter()
            .any(|d| d.category == DivergenceCategory::ZeroFill));
    }

    #[test]
    fn row_label_drift_aligns_and_classifies() {
        let pair = generate_pair(&cdisc_pilot_presets()[0]);
        let injected = inject_divergence(&pair, DivergenceCategory::RowLabelDrift, 11).unwrap();
        let report = compare_injected(&injected);
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(
            report
                .diffs
                .iter()
                .any(|d| d.category == DivergenceCategory::RowLabelDrift),
            "{:?}",
            report.diffs
        );
        // the drifted row aligned: no unmatched-row diffs
        assert!(report
            .diffs
            .iter()
            .all(|d| d.origin == crate::compare::DiffOrigin::AlignedCell));
    }

    #[test]
    fn soc_group_total_requires_hierarchy() {
        let demo = generate_pair(&cdisc_pilot_presets()[0]);
        assert!(matches!(
            inject_divergence(&demo, DivergenceCategory::SocGroupTotal, 1),
            Err(InjectError::CategoryNotApplicable { .. })
        ));
        let soc = generate_pair(&cdisc_pilot_presets()[2]);
        let injected = inject_divergence(&soc, DivergenceCategory::SocGroupTotal, 1).unwrap();
        let report = compare_injected(&injected);
        assert!(report
            .diffs
            .iter()
            .any(|d| d.category == DivergenceCategory::SocGroupTotal));
    }

    #[test]
    fn unclassified_not_injectable() {
        let pair = generate_pair(&FixtureSpec {
            report_kind: ReportKind::AeSummary,
            arms: vec![Arm::new("A", 40), Arm::new("B", 40)],
            rows: 12,
            seed: 1,
        });
        assert!(inject_divergence(&pair, DivergenceCategory::Unclassified, 1).is_err());
    }
}
