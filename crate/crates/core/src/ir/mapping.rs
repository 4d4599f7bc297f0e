//! Construction of a [`CellGrid`] from long-format statistics, and numeric
//! reconciliation of a grid back against its source records.
//!
//! The mapping config is a YAML document per report type: a row axis (group
//! keys in display order), a column axis (treatment keys), and per-statistic
//! cell typing and formatting. Header rows and label columns declared in the
//! config are materialized from the axis labels themselves.

use super::{
    Alignment, Cell, CellGrid, CellType, Dimension, ElementType, StatRecord, StructureEntry,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// How positions with no mapped record are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum FillPolicy {
    /// Materialize an EMPTY cell (the default: a dense grid with blanks).
    #[default]
    Empty,
    /// Materialize an INTEGER zero ("0"). Zero-fill is a named transform so
    /// divergence against a blank-filled counterpart stays attributable.
    Zero,
}

/// One entry of the row axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    /// Group key matched against `StatRecord::group`.
    pub key: String,
    /// Display label; defaults to the key.
    #[serde(default)]
    pub label: Option<String>,
    /// Pin this row to one statistic. Required when several statistics of the
    /// same group land in the grid as separate rows.
    #[serde(default)]
    pub stat: Option<String>,
    #[serde(default)]
    pub indent: u32,
    #[serde(default = "default_row_element")]
    pub element_type: ElementType,
    #[serde(default)]
    pub alignment: Alignment,
}

fn default_row_element() -> ElementType {
    ElementType::DataRow
}

impl RowSpec {
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.key)
    }

    fn is_header(&self) -> bool {
        matches!(
            self.element_type,
            ElementType::ColumnHeader | ElementType::SpanningHeader
        )
    }
}

/// One entry of the column axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColSpec {
    /// Treatment key matched against `StatRecord::treatment`.
    pub key: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_col_element")]
    pub element_type: ElementType,
    #[serde(default = "default_col_alignment")]
    pub alignment: Alignment,
}

fn default_col_element() -> ElementType {
    ElementType::ColumnHeader
}

fn default_col_alignment() -> Alignment {
    Alignment::Center
}

impl ColSpec {
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.key)
    }

    /// Label columns carry row labels rather than treatment values.
    pub fn is_label_col(&self) -> bool {
        self.element_type == ElementType::RowHeader
    }
}

/// Typing and formatting for one statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub cell_type: CellType,
    /// Display template applied when the record carries no formatted string.
    /// `{value}` inserts the shortest round-trip representation and
    /// `{value:.N}` fixes N decimal places.
    #[serde(default)]
    pub format: Option<String>,
}

/// Mapping config for one report type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrMappingConfig {
    pub report_id: String,
    #[serde(default)]
    pub rows: Vec<RowSpec>,
    #[serde(default)]
    pub cols: Vec<ColSpec>,
    /// stat_name → cell spec.
    #[serde(default)]
    pub cells: BTreeMap<String, CellSpec>,
    /// Strict mode errors on records the mapping cannot place; lenient mode
    /// skips them with a warning.
    #[serde(default = "default_strict")]
    pub strict: bool,
    #[serde(default)]
    pub fill: FillPolicy,
}

fn default_strict() -> bool {
    true
}

impl IrMappingConfig {
    pub fn from_yaml(doc: &str) -> Result<Self, BuildError> {
        serde_yaml::from_str(doc).map_err(|e| BuildError::Config(e.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("mapping config error: {0}")]
    Config(String),
    #[error("record (group={group}, treatment={treatment}, stat={stat}) has no mapping target")]
    UnmappedRecord {
        group: String,
        treatment: String,
        stat: String,
    },
    #[error("two records map to grid position ({row_id},{col_id})")]
    MappingAmbiguous { row_id: u32, col_id: u32 },
    #[error(transparent)]
    Field(#[from] super::FieldError),
}

/// A record skipped in lenient mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRecord {
    pub group: String,
    pub treatment: String,
    pub stat_name: String,
    pub reason: String,
}

/// Result of [`build_grid`]: the grid plus any lenient-mode skips.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub grid: CellGrid,
    pub skipped: Vec<SkippedRecord>,
}

fn apply_format(template: &str, value: f64) -> String {
    if let Some(start) = template.find("{value") {
        let rest = &template[start..];
        if let Some(end) = rest.find('}') {
            let inner = &rest[1..end]; // "value" or "value:.N"
            let rendered = if let Some(spec) = inner.strip_prefix("value:.") {
                match spec.parse::<usize>() {
                    Ok(places) => format!("{value:.places$}"),
                    Err(_) => shortest(value),
                }
            } else {
                shortest(value)
            };
            let mut out = String::new();
            out.push_str(&template[..start]);
            out.push_str(&rendered);
            out.push_str(&template[start + end + 1..]);
            return out;
        }
    }
    template.to_string()
}

/// Shortest decimal representation that round-trips the value.
pub(crate) fn shortest(value: f64) -> String {
    let mut buf = ryu_like(value);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_like(value: f64) -> String {
    // serde_json uses ryu internally; format! {} on f64 is also shortest
    // round-trip since Rust 1.0 uses Grisu/Ryū-style formatting.
    format!("{value}")
}

/// Transform long-format records into a validated grid.
///
/// Row and column order comes solely from the mapping config, so permuting
/// the input records leaves the output unchanged. Every mapped record lands
/// in exactly one cell; in strict mode an unplaceable record is an error.
pub fn build_grid(
    source: &[StatRecord],
    mapping: &IrMappingConfig,
    execution_id: &str,
) -> Result<BuildOutcome, BuildError> {
    // duplicate axis keys make placement ambiguous before any record is seen
    let mut seen_rows: BTreeMap<(&str, Option<&str>), ()> = BTreeMap::new();
    for row in &mapping.rows {
        if seen_rows
            .insert((row.key.as_str(), row.stat.as_deref()), ())
            .is_some()
        {
            return Err(BuildError::Config(format!(
                "duplicate row key {:?} (stat {:?})",
                row.key, row.stat
            )));
        }
    }
    let mut seen_cols: BTreeMap<&str, ()> = BTreeMap::new();
    for col in mapping.cols.iter().filter(|c| !c.is_label_col()) {
        if seen_cols.insert(col.key.as_str(), ()).is_some() {
            return Err(BuildError::Config(format!(
                "duplicate column key {:?}",
                col.key
            )));
        }
    }

    let report_id = mapping.report_id.as_str();
    let mut structure = Vec::new();
    for (idx, row) in mapping.rows.iter().enumerate() {
        structure.push(StructureEntry::new(
            report_id,
            execution_id,
            Dimension::Row,
            (idx + 1) as u32,
            row.display_label(),
            idx as u32,
            row.indent,
            row.alignment,
            1,
            row.element_type,
        )?);
    }
    for (idx, col) in mapping.cols.iter().enumerate() {
        structure.push(StructureEntry::new(
            report_id,
            execution_id,
            Dimension::Col,
            (idx + 1) as u32,
            col.display_label(),
            idx as u32,
            0,
            col.alignment,
            1,
            col.element_type,
        )?);
    }

    let mut placed: HashMap<(u32, u32), Cell> = HashMap::new();
    let mut skipped = Vec::new();

    for record in source {
        let row_idx = find_row(mapping, record);
        let col_idx = mapping
            .cols
            .iter()
            .position(|c| !c.is_label_col() && c.key == record.treatment);
        let spec = mapping.cells.get(&record.stat_name);

        let (row_idx, col_idx, spec) = match (row_idx, col_idx, spec) {
            (Some(r), Some(c), Some(s)) => (r, c, s),
            _ => {
                if mapping.strict {
                    return Err(BuildError::UnmappedRecord {
                        group: record.group.clone(),
                        treatment: record.treatment.clone(),
                        stat: record.stat_name.clone(),
                    });
                }
                skipped.push(SkippedRecord {
                    group: record.group.clone(),
                    treatment: record.treatment.clone(),
                    stat_name: record.stat_name.clone(),
                    reason: "no mapping target".into(),
                });
                continue;
            }
        };

        let row_id = (row_idx + 1) as u32;
        let col_id = (col_idx + 1) as u32;
        let formatted = if record.formatted.is_empty() {
            match &spec.format {
                Some(tpl) => apply_format(tpl, record.stat_value),
                None => shortest(record.stat_value),
            }
        } else {
            record.formatted.clone()
        };
        let value = if spec.cell_type.is_numeric() {
            Some(record.stat_value)
        } else {
            None
        };
        let cell = Cell::new(
            report_id,
            execution_id,
            row_id,
            col_id,
            value,
            formatted,
            spec.cell_type,
            0,
        )?;
        if placed.insert((row_id, col_id), cell).is_some() {
            return Err(BuildError::MappingAmbiguous { row_id, col_id });
        }
    }

    // materialize headers, labels, and fill cells for the dense grid
    for (r_idx, row) in mapping.rows.iter().enumerate() {
        if row.element_type == ElementType::Separator {
            continue;
        }
        let row_id = (r_idx + 1) as u32;
        for (c_idx, col) in mapping.cols.iter().enumerate() {
            let col_id = (c_idx + 1) as u32;
            if placed.contains_key(&(row_id, col_id)) {
                continue;
            }
            let cell = if row.is_header() {
                let text = if col.is_label_col() {
                    row.display_label().to_string()
                } else {
                    col.display_label().to_string()
                };
                Cell::new(
                    report_id,
                    execution_id,
                    row_id,
                    col_id,
                    None,
                    text,
                    CellType::Header,
                    0,
                )?
            } else if col.is_label_col() {
                Cell::new(
                    report_id,
                    execution_id,
                    row_id,
                    col_id,
                    None,
                    row.display_label(),
                    CellType::Label,
                    0,
                )?
            } else {
                match mapping.fill {
                    FillPolicy::Empty => Cell::new(
                        report_id,
                        execution_id,
                        row_id,
                        col_id,
                        None,
                        "",
                        CellType::Empty,
                        0,
                    )?,
                    FillPolicy::Zero => Cell::new(
                        report_id,
                        execution_id,
                        row_id,
                        col_id,
                        Some(0.0),
                        "0",
                        CellType::Integer,
                        0,
                    )?,
                }
            };
            placed.insert((row_id, col_id), cell);
        }
    }

    let mut cells: Vec<Cell> = placed.into_values().collect();
    cells.sort_by_key(|c| (c.row_id, c.col_id));
    for (idx, cell) in cells.iter_mut().enumerate() {
        cell.sort_order = idx as u32;
    }

    Ok(BuildOutcome {
        grid: CellGrid::new(cells, structure),
        skipped,
    })
}

fn find_row(mapping: &IrMappingConfig, record: &StatRecord) -> Option<usize> {
    // a row pinned to this exact stat wins over a stat-agnostic row
    mapping
        .rows
        .iter()
        .position(|r| r.key == record.group && r.stat.as_deref() == Some(record.stat_name.as_str()))
        .or_else(|| {
            mapping
                .rows
                .iter()
                .position(|r| r.key == record.group && r.stat.is_none())
        })
}

#[derive(Debug, Error)]
pub enum ReconcileError {
    #[error("cell ({row_id},{col_id}) maps to {count} source records")]
    MappingAmbiguous {
        row_id: u32,
        col_id: u32,
        count: usize,
    },
}

/// One numeric trace-back failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub row_id: u32,
    pub col_id: u32,
    pub ir_value: f64,
    pub source_value: f64,
    pub abs_diff: f64,
}

/// Outcome of [`reconcile`]. `passed` holds iff `mismatches` is empty;
/// numeric cells with no mapped source are informational, not failures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconcileReport {
    pub tolerance: f64,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub unmapped: Vec<(u32, u32)>,
    pub passed: bool,
}

pub const DEFAULT_RECONCILE_TOLERANCE: f64 = 1e-10;

/// Trace every numeric cell back to its source statistic and compare by
/// absolute difference against `tolerance`.
pub fn reconcile(
    grid: &CellGrid,
    source: &[StatRecord],
    mapping: &IrMappingConfig,
    tolerance: f64,
) -> Result<ReconcileReport, ReconcileError> {
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    let mut unmapped = Vec::new();

    for cell in grid.cells.iter().filter(|c| c.cell_type.is_numeric()) {
        let row = mapping.rows.get((cell.row_id - 1) as usize);
        let col = mapping.cols.get((cell.col_id - 1) as usize);
        let (row, col) = match (row, col) {
            (Some(r), Some(c)) if !c.is_label_col() && !r.is_header() => (r, c),
            _ => {
                unmapped.push((cell.row_id, cell.col_id));
                continue;
            }
        };
        let candidates: Vec<&StatRecord> = source
            .iter()
            .filter(|s| {
                s.group == row.key
                    && s.treatment == col.key
                    && mapping.cells.contains_key(&s.stat_name)
                    && match &row.stat {
                        Some(pinned) => &s.stat_name == pinned,
                        None => true,
                    }
            })
            .collect();
        match candidates.len() {
            0 => unmapped.push((cell.row_id, cell.col_id)),
            1 => {
                checked += 1;
                let ir_value = cell.cell_value.expect("numeric cell carries a value");
                let source_value = candidates[0].stat_value;
                let abs_diff = (ir_value - source_value).abs();
                if abs_diff > tolerance {
                    mismatches.push(Mismatch {
                        row_id: cell.row_id,
                        col_id: cell.col_id,
                        ir_value,
                        source_value,
                        abs_diff,
                    });
                }
            }
            n => {
                return Err(ReconcileError::MappingAmbiguous {
                    row_id: cell.row_id,
                    col_id: cell.col_id,
                    count: n,
                })
            }
        }
    }

    Ok(ReconcileReport {
        tolerance,
        checked,
        mismatches: {
            mismatches.sort_by_key(|m| (m.row_id, m.col_id));
            mismatches
        },
        unmapped,
        passed: true,
    }
    .finalize())
}

impl ReconcileReport {
    fn finalize(mut self) -> Self {
        self.passed = self.mismatches.is_empty();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::validate_grid;

    fn fig_mapping() -> IrMappingConfig {
        IrMappingConfig::from_yaml(
            r#"
report_id: ae_card
rows:
  - key: Card
    label: Cardiac
cols:
  - key: Plac
    label: Placebo
  - key: D10
    label: Dose 10
cells:
  N: { cell_type: INTEGER }
strict: true
"#,
        )
        .unwrap()
    }

    fn fig_records() -> Vec<StatRecord> {
        vec![
            StatRecord::new("Card", "Plac", "N", 5.0, "5 (16.7%)", "freq"),
            StatRecord::new("Card", "D10", "N", 8.0, "8 (26.7%)", "freq"),
        ]
    }

    #[test]
    fn single_group_two_treatments() {
        let outcome = build_grid(&fig_records(), &fig_mapping(), "e1").unwrap();
        let grid = &outcome.grid;
        assert_eq!(grid.n_rows(), 1);
        assert_eq!(grid.n_cols(), 2);
        let cell = grid.cell_at(1, 1).unwrap();
        assert_eq!(cell.cell_formatted, "5 (16.7%)");
        assert_eq!(cell.cell_value, Some(5.0));
        assert_eq!(cell.cell_type, CellType::Integer);
        assert!(validate_grid(grid).valid);
    }

    #[test]
    fn empty_records_empty_mapping() {
        let mapping = IrMappingConfig {
            report_id: "empty".into(),
            rows: vec![],
            cols: vec![],
            cells: BTreeMap::new(),
            strict: true,
            fill: FillPolicy::Empty,
        };
        let outcome = build_grid(&[], &mapping, "e1").unwrap();
        assert!(outcome.grid.cells.is_empty());
        assert!(validate_grid(&outcome.grid).valid);
    }

    #[test]
    fn three_by_three_grid_enumerated() {
        // oracle: enumerate the expected 9 (group, treatment) cells by hand
        let groups = ["g1", "g2", "g3"];
        let treatments = ["t1", "t2", "t3"];
        let mut expected = Vec::new();
        let mut records = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            for (ti, t) in treatments.iter().enumerate() {
                let v = (gi * 3 + ti) as f64;
                expected.push(((gi + 1) as u32, (ti + 1) as u32, v));
                records.push(StatRecord::new(*g, *t, "N", v, format!("{v}"), "m"));
            }
        }
        let mapping = IrMappingConfig::from_yaml(
            r#"
report_id: nine
rows:
  - { key: g1 }
  - { key: g2 }
  - { key: g3 }
cols:
  - { key: t1 }
  - { key: t2 }
  - { key: t3 }
cells:
  N: { cell_type: DECIMAL }
"#,
        )
        .unwrap();
        let grid = build_grid(&records, &mapping, "e1").unwrap().grid;
        assert_eq!(grid.cells.len(), 9);
        assert_eq!(
            grid.rows().iter().map(|r| r.dim_id).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(
            grid.cols().iter().map(|c| c.dim_id).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        for (row, col, v) in expected {
            assert_eq!(grid.cell_at(row, col).unwrap().cell_value, Some(v));
        }
    }

    #[test]
    fn permuting_records_leaves_grid_unchanged() {
        let mut records = fig_records();
        let a = build_grid(&records, &fig_mapping(), "e1").unwrap().grid;
        records.reverse();
        let b = build_grid(&records, &fig_mapping(), "e1").unwrap().grid;
        assert_eq!(a, b);
    }

    #[test]
    fn strict_mode_rejects_unknown_treatment() {
        let mut records = fig_records();
        records.push(StatRecord::new("Card", "D20", "N", 9.0, "9", "freq"));
        let err = build_grid(&records, &fig_mapping(), "e1").unwrap_err();
        assert!(matches!(err, BuildError::UnmappedRecord { .. }));

        let mut lenient = fig_mapping();
        lenient.strict = false;
        let outcome = build_grid(&records, &lenient, "e1").unwrap();
        assert_eq!(outcome.skipped.len(), 1);
        assert_eq!(outcome.skipped[0].treatment, "D20");
    }

    #[test]
    fn duplicate_target_is_ambiguous() {
        let mut records = fig_records();
        records.push(StatRecord::new("Card", "Plac", "N", 6.0, "6", "freq"));
        let err = build_grid(&records, &fig_mapping(), "e1").unwrap_err();
        assert!(matches!(
            err,
            BuildError::MappingAmbiguous {
                row_id: 1,
                col_id: 1
            }
        ));
    }

    #[test]
    fn reconcile_within_tolerance() {
        let records = fig_records();
        let grid = build_grid(&records, &fig_mapping(), "e1").unwrap().grid;
        let report =
            reconcile(&grid, &records, &fig_mapping(), DEFAULT_RECONCILE_TOLERANCE).unwrap();
        assert!(report.passed);
        assert_eq!(report.checked, 2);
    }

    #[test]
    fn reconcile_tolerance_boundaries() {
        let mapping = IrMappingConfig::from_yaml(
            r#"
report_id: demo
rows: [ { key: Age } ]
cols: [ { key: Placebo } ]
cells:
  MEAN: { cell_type: DECIMAL }
"#,
        )
        .unwrap();
        let build = |v: f64| {
            build_grid(
                &[StatRecord::new("Age", "Placebo", "MEAN", v, "75.2", "desc")],
                &mapping,
                "e1",
            )
            .unwrap()
            .grid
        };

        // exact value traces back exactly
        let source = vec![StatRecord::new(
            "Age", "Placebo", "MEAN", 75.2, "75.2", "desc",
        )];
        let report = reconcile(&build(75.2), &source, &mapping, 1e-10).unwrap();
        assert!(report.passed);

        // 1e-11 perturbation sits below the default tolerance
        let report = reconcile(&build(75.2 + 1e-11), &source, &mapping, 1e-10).unwrap();
        assert!(report.passed);

        // 1e-9 perturbation is above it and must be reported
        let report = reconcile(&build(75.2 + 1e-9), &source, &mapping, 1e-10).unwrap();
        assert!(!report.passed);
        assert_eq!(report.mismatches.len(), 1);
        assert!(report.mismatches[0].abs_diff > 1e-10);
    }

    #[test]
    fn reconcile_ambiguity_detected() {
        let mapping = IrMappingConfig::from_yaml(
            r#"
report_id: demo
rows: [ { key: Age } ]
cols: [ { key: Placebo } ]
cells:
  MEAN: { cell_type: DECIMAL }
  SD: { cell_type: DECIMAL }
"#,
        )
        .unwrap();
        // one un-pinned row with two stats for the same (group, treatment)
        let source = vec![
            StatRecord::new("Age", "Placebo", "MEAN", 75.2, "75.2", "desc"),
            StatRecord::new("Age", "Placebo", "SD", 8.6, "8.6", "desc"),
        ];
        let grid = CellGrid::new(
            vec![Cell::new("demo", "e1", 1, 1, Some(75.2), "75.2", CellType::Decimal, 0).unwrap()],
            vec![
                StructureEntry::new(
                    "demo",
                    "e1",
                    Dimension::Row,
                    1,
                    "Age",
                    0,
                    0,
                    Alignment::Left,
                    1,
                    ElementType::DataRow,
                )
                .unwrap(),
                StructureEntry::new(
                    "demo",
                    "e1",
                    Dimension::Col,
                    1,
                    "Placebo",
                    0,
                    0,
                    Alignment::Center,
                    1,
                    ElementType::ColumnHeader,
                )
                .unwrap(),
            ],
        );
        let err = reconcile(&grid, &source, &mapping, 1e-10).unwrap_err();
        assert!(matches!(
            err,
            ReconcileError::MappingAmbiguous { count: 2, .. }
        ));
    }

    #[test]
    fn header_and_label_materialization() {
        let mapping = IrMappingConfig::from_yaml(
            r#"
report_id: demo
rows:
  - { key: _hdr, label: "", element_type: COLUMN_HEADER }
  - { key: Age, label: "Age (years)" }
cols:
  - { key: _label, label: "", element_type: ROW_HEADER }
  - { key: Placebo, label: "Placebo (N=86)" }
cells:
  MEAN: { cell_type: DECIMAL }
"#,
        )
        .unwrap();
        let records = vec![StatRecord::new(
            "Age", "Placebo", "MEAN", 75.2, "75.2", "desc",
        )];
        let grid = build_grid(&records, &mapping, "e1").unwrap().grid;
        assert_eq!(grid.cells.len(), 4);
        assert_eq!(grid.cell_at(1, 2).unwrap().cell_formatted, "Placebo (N=86)");
        assert_eq!(grid.cell_at(1, 2).unwrap().cell_type, CellType::Header);
        assert_eq!(grid.cell_at(2, 1).unwrap().cell_formatted, "Age (years)");
        assert_eq!(grid.cell_at(2, 1).unwrap().cell_type, CellType::Label);
        assert_eq!(grid.cell_at(2, 2).unwrap().cell_value, Some(75.2));
        assert!(validate_grid(&grid).valid);
        // reconcile skips header/label cells and checks the one data cell
        let report = reconcile(&grid, &records, &mapping, 1e-10).unwrap();
        assert!(report.passed);
        assert_eq!(report.checked, 1);
    }

    #[test]
    fn zero_fill_policy() {
        let mut mapping = fig_mapping();
        mapping.fill = FillPolicy::Zero;
        let records = vec![StatRecord::new("Card", "Plac", "N", 5.0, "5", "freq")];
        let grid = build_grid(&records, &mapping, "e1").unwrap().grid;
        let filled = grid.cell_at(1, 2).unwrap();
        assert_eq!(filled.cell_formatted, "0");
        assert_eq!(filled.cell_value, Some(0.0));
    }

    #[test]
    fn format_template_applies_when_no_formatted_string() {
        let mapping = IrMappingConfig::from_yaml(
            r#"
report_id: t
rows: [ { key: g } ]
cols: [ { key: t } ]
cells:
  P: { cell_type: PVALUE, format: "p={value:.4}" }
"#,
        )
        .unwrap();
        let records = vec![StatRecord::new("g", "t", "P", 0.0312, "", "chisq")];
        let grid = build_grid(&records, &mapping, "e1").unwrap().grid;
        assert_eq!(grid.cell_at(1, 1).unwrap().cell_formatted, "p=0.0312");
    }
}
