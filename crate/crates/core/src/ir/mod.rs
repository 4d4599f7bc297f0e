//! The cell-grid Intermediate Representation.
//!
//! A rendered clinical report table is modeled as two flat datasets: a cell
//! table (one row per grid cell, typed via a controlled vocabulary) and a
//! structure table (one row per grid row/column axis entry). Four validity
//! rules tie the two together: completeness, contiguity, uniqueness, and
//! consistency. Everything downstream — rendering, comparison, provenance —
//! consumes grids that satisfy those rules.

mod hierarchy;
mod mapping;

pub use hierarchy::{
    check_hierarchy_consistency, HierarchyError, HierarchySpec, HierarchyViolation, LintReport,
    ParentSpec,
};
pub(crate) use mapping::shortest;
pub use mapping::{
    build_grid, reconcile, BuildError, BuildOutcome, CellSpec, ColSpec, FillPolicy,
    IrMappingConfig, ReconcileError, ReconcileReport, RowSpec, SkippedRecord,
    DEFAULT_RECONCILE_TOLERANCE,
};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Controlled vocabulary for cell content.
///
/// The numeric types (`INTEGER`, `DECIMAL`, `PVALUE`, `PERCENTAGE`) carry a
/// raw value alongside the display string; the remaining types carry display
/// content only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CellType {
    Integer,
    Decimal,
    Pvalue,
    Percentage,
    Text,
    Header,
    Label,
    Footnote,
    Empty,
}

impl CellType {
    /// True for the four types that carry a raw numeric `cell_value`.
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            CellType::Integer | CellType::Decimal | CellType::Pvalue | CellType::Percentage
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CellType::Integer => "INTEGER",
            CellType::Decimal => "DECIMAL",
            CellType::Pvalue => "PVALUE",
            CellType::Percentage => "PERCENTAGE",
            CellType::Text => "TEXT",
            CellType::Header => "HEADER",
            CellType::Label => "LABEL",
            CellType::Footnote => "FOOTNOTE",
            CellType::Empty => "EMPTY",
        }
    }
}

impl fmt::Display for CellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Role of a structure entry within its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElementType {
    ColumnHeader,
    RowHeader,
    DataRow,
    TotalRow,
    Separator,
    SpanningHeader,
}

impl ElementType {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementType::ColumnHeader => "COLUMN_HEADER",
            ElementType::RowHeader => "ROW_HEADER",
            ElementType::DataRow => "DATA_ROW",
            ElementType::TotalRow => "TOTAL_ROW",
            ElementType::Separator => "SEPARATOR",
            ElementType::SpanningHeader => "SPANNING_HEADER",
        }
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Axis a structure entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Dimension {
    Row,
    Col,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Row => "ROW",
            Dimension::Col => "COL",
        })
    }
}

/// Horizontal text alignment for a structure entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
#[derive(Default)]
pub enum Alignment {
    #[default]
    Left,
    Center,
    Right,
}

/// Field-level constraint failure raised at construction time.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FieldError {
    #[error("{field} must be >= 1, got 0")]
    ZeroId { field: &'static str },
    #[error("cell ({row_id},{col_id}): cell_type {cell_type} requires a cell_value")]
    ValueMissing {
        row_id: u32,
        col_id: u32,
        cell_type: CellType,
    },
    #[error("cell ({row_id},{col_id}): cell_type {cell_type} must not carry a cell_value")]
    ValueUnexpected {
        row_id: u32,
        col_id: u32,
        cell_type: CellType,
    },
    #[error("cell ({row_id},{col_id}): cell_value must be finite")]
    NonFiniteValue { row_id: u32, col_id: u32 },
    #[error("structure entry {dim_id}: span_count must be >= 1")]
    ZeroSpan { dim_id: u32 },
}

/// One cell of the report grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub report_id: String,
    pub execution_id: String,
    pub row_id: u32,
    pub col_id: u32,
    pub cell_value: Option<f64>,
    pub cell_formatted: String,
    pub cell_type: CellType,
    pub sort_order: u32,
}

impl Cell {
    /// Checked constructor enforcing the field-level invariants: positive
    /// coordinates, a value present iff the type is numeric, finite values.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        report_id: impl Into<String>,
        execution_id: impl Into<String>,
        row_id: u32,
        col_id: u32,
        cell_value: Option<f64>,
        cell_formatted: impl Into<String>,
        cell_type: CellType,
        sort_order: u32,
    ) -> Result<Self, FieldError> {
        if row_id == 0 {
            return Err(FieldError::ZeroId { field: "row_id" });
        }
        if col_id == 0 {
            return Err(FieldError::ZeroId { field: "col_id" });
        }
        match (cell_type.is_numeric(), cell_value) {
            (true, None) => {
                return Err(FieldError::ValueMissing {
                    row_id,
                    col_id,
                    cell_type,
                })
            }
            (false, Some(_)) => {
                return Err(FieldError::ValueUnexpected {
                    row_id,
                    col_id,
                    cell_type,
                })
            }
            (true, Some(v)) if !v.is_finite() => {
                return Err(FieldError::NonFiniteValue { row_id, col_id })
            }
            _ => {}
        }
        Ok(Cell {
            report_id: report_id.into(),
            execution_id: execution_id.into(),
            row_id,
            col_id,
            cell_value,
            cell_formatted: cell_formatted.into(),
            cell_type,
            sort_order,
        })
    }
}

/// One axis entry (a row or a column) of the report grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureEntry {
    pub report_id: String,
    pub execution_id: String,
    pub dimension: Dimension,
    pub dim_id: u32,
    pub label: String,
    pub sort_order: u32,
    pub indent_level: u32,
    pub alignment: Alignment,
    pub span_count: u32,
    pub element_type: ElementType,
}

impl StructureEntry {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        report_id: impl Into<String>,
        execution_id: impl Into<String>,
        dimension: Dimension,
        dim_id: u32,
        label: impl Into<String>,
        sort_order: u32,
        indent_level: u32,
        alignment: Alignment,
        span_count: u32,
        element_type: ElementType,
    ) -> Result<Self, FieldError> {
        if dim_id == 0 {
            return Err(FieldError::ZeroId { field: "dim_id" });
        }
        if span_count == 0 {
            return Err(FieldError::ZeroSpan { dim_id });
        }
        Ok(StructureEntry {
            report_id: report_id.into(),
            execution_id: execution_id.into(),
            dimension,
            dim_id,
            label: label.into(),
            sort_order,
            indent_level,
            alignment,
            span_count,
            element_type,
        })
    }
}

/// The full IR for one report: cells plus structure.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CellGrid {
    pub cells: Vec<Cell>,
    pub structure: Vec<StructureEntry>,
}

impl CellGrid {
    pub fn new(cells: Vec<Cell>, structure: Vec<StructureEntry>) -> Self {
        CellGrid { cells, structure }
    }

    /// Report id shared by the grid members (empty string for an empty grid).
    pub fn report_id(&self) -> &str {
        self.cells
            .first()
            .map(|c| c.report_id.as_str())
            .or_else(|| self.structure.first().map(|s| s.report_id.as_str()))
            .unwrap_or("")
    }

    pub fn execution_id(&self) -> &str {
        self.cells
            .first()
            .map(|c| c.execution_id.as_str())
            .or_else(|| self.structure.first().map(|s| s.execution_id.as_str()))
            .unwrap_or("")
    }

    /// ROW entries sorted by `dim_id`.
    pub fn rows(&self) -> Vec<&StructureEntry> {
        let mut rows: Vec<&StructureEntry> = self
            .structure
            .iter()
            .filter(|s| s.dimension == Dimension::Row)
            .collect();
        rows.sort_by_key(|s| s.dim_id);
        rows
    }

    /// COL entries sorted by `dim_id`.
    pub fn cols(&self) -> Vec<&StructureEntry> {
        let mut cols: Vec<&StructureEntry> = self
            .structure
            .iter()
            .filter(|s| s.dimension == Dimension::Col)
            .collect();
        cols.sort_by_key(|s| s.dim_id);
        cols
    }

    pub fn n_rows(&self) -> u32 {
        self.rows().last().map(|s| s.dim_id).unwrap_or(0)
    }

    pub fn n_cols(&self) -> u32 {
        self.cols().last().map(|s| s.dim_id).unwrap_or(0)
    }

    /// Position → cell lookup. Built on demand; callers doing repeated
    /// lookups should hold on to the returned map.
    pub fn cell_index(&self) -> HashMap<(u32, u32), &Cell> {
        self.cells
            .iter()
            .map(|c| ((c.row_id, c.col_id), c))
            .collect()
    }

    pub fn cell_at(&self, row_id: u32, col_id: u32) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.row_id == row_id && c.col_id == col_id)
    }

    pub fn row_entry(&self, dim_id: u32) -> Option<&StructureEntry> {
        self.structure
            .iter()
            .find(|s| s.dimension == Dimension::Row && s.dim_id == dim_id)
    }

    pub fn col_entry(&self, dim_id: u32) -> Option<&StructureEntry> {
        self.structure
            .iter()
            .find(|s| s.dimension == Dimension::Col && s.dim_id == dim_id)
    }
}

/// The four structural validity rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ValidationRule {
    Completeness,
    Contiguity,
    Uniqueness,
    Consistency,
}

impl fmt::Display for ValidationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationRule::Completeness => "COMPLETENESS",
            ValidationRule::Contiguity => "CONTIGUITY",
            ValidationRule::Uniqueness => "UNIQUENESS",
            ValidationRule::Consistency => "CONSISTENCY",
        })
    }
}

/// One rule violation, with grid coordinates where they apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: ValidationRule,
    pub detail: String,
    pub location: Option<(u32, u32)>,
}

/// Outcome of [`validate_grid`]. `valid` holds iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort_by(|a, b| {
            (a.rule, a.location.unwrap_or((0, 0)), &a.detail).cmp(&(
                b.rule,
                b.location.unwrap_or((0, 0)),
                &b.detail,
            ))
        });
        ValidationReport {
            valid: violations.is_empty(),
            violations,
        }
    }
}

/// Options for [`validate_grid`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Whether SEPARATOR rows may own cells. Off by default: separators are
    /// visual gaps and a cell sitting on one is almost always a construction
    /// bug upstream.
    pub allow_separator_cells: bool,
}

/// Check the four structural rules independently and report every violated
/// instance. Violations are ordered by (rule, row, col, detail) so the report
/// is stable for a given grid.
pub fn validate_grid(grid: &CellGrid) -> ValidationReport {
    validate_grid_with(grid, &ValidateOptions::default())
}

pub fn validate_grid_with(grid: &CellGrid, opts: &ValidateOptions) -> ValidationReport {
    let mut violations = Vec::new();

    let row_ids: BTreeSet<u32> = grid
        .structure
        .iter()
        .filter(|s| s.dimension == Dimension::Row)
        .map(|s| s.dim_id)
        .collect();
    let col_ids: BTreeSet<u32> = grid
        .structure
        .iter()
        .filter(|s| s.dimension == Dimension::Col)
        .map(|s| s.dim_id)
        .collect();

    // completeness: every referenced (row_id, col_id) has structure entries
    for cell in &grid.cells {
        if !row_ids.contains(&cell.row_id) {
            violations.push(Violation {
                rule: ValidationRule::Completeness,
                detail: format!(
                    "cell references ROW dim_id {} with no structure entry",
                    cell.row_id
                ),
                location: Some((cell.row_id, cell.col_id)),
            });
        }
        if !col_ids.contains(&cell.col_id) {
            violations.push(Violation {
                rule: ValidationRule::Completeness,
                detail: format!(
                    "cell references COL dim_id {} with no structure entry",
                    cell.col_id
                ),
                location: Some((cell.row_id, cell.col_id)),
            });
        }
        if !opts.allow_separator_cells {
            if let Some(row) = grid.row_entry(cell.row_id) {
                if row.element_type == ElementType::Separator {
                    violations.push(Violation {
                        rule: ValidationRule::Completeness,
                        detail: format!(
                            "cell sits on SEPARATOR row {} (allow_separator_cells is off)",
                            cell.row_id
                        ),
                        location: Some((cell.row_id, cell.col_id)),
                    });
                }
            }
        }
    }

    // contiguity: dim_ids form 1..=max with no gaps, per dimension
    for (dim, ids) in [("ROW", &row_ids), ("COL", &col_ids)] {
        if let Some(&max) = ids.iter().next_back() {
            for expected in 1..=max {
                if !ids.contains(&expected) {
                    violations.push(Violation {
                        rule: ValidationRule::Contiguity,
                        detail: format!("{dim} dim_ids skip {expected} (ids must run 1..={max})"),
                        location: None,
                    });
                }
            }
        }
    }
    // duplicate structure slots break the one-entry-per-position reading
    for dim in [Dimension::Row, Dimension::Col] {
        let mut seen = BTreeSet::new();
        for entry in grid.structure.iter().filter(|s| s.dimension == dim) {
            if !seen.insert(entry.dim_id) {
                violations.push(Violation {
                    rule: ValidationRule::Uniqueness,
                    detail: format!("duplicate {} structure entry dim_id {}", dim, entry.dim_id),
                    location: None,
                });
            }
        }
    }

    // uniqueness: no two cells share a grid position
    let mut seen = BTreeSet::new();
    for cell in &grid.cells {
        if !seen.insert((cell.row_id, cell.col_id)) {
            violations.push(Violation {
                rule: ValidationRule::Uniqueness,
                detail: format!(
                    "grid position ({},{}) appears more than once",
                    cell.row_id, cell.col_id
                ),
                location: Some((cell.row_id, cell.col_id)),
            });
        }
    }

    // consistency: one report_id and one execution_id across both datasets
    let mut report_ids: BTreeSet<&str> = grid.cells.iter().map(|c| c.report_id.as_str()).collect();
    report_ids.extend(grid.structure.iter().map(|s| s.report_id.as_str()));
    if report_ids.len() > 1 {
        violations.push(Violation {
            rule: ValidationRule::Consistency,
            detail: format!(
                "multiple report_ids present: {}",
                report_ids.into_iter().collect::<Vec<_>>().join(", ")
            ),
            location: None,
        });
    }
    let mut exec_ids: BTreeSet<&str> = grid.cells.iter().map(|c| c.execution_id.as_str()).collect();
    exec_ids.extend(grid.structure.iter().map(|s| s.execution_id.as_str()));
    if exec_ids.len() > 1 {
        violations.push(Violation {
            rule: ValidationRule::Consistency,
            detail: format!(
                "multiple execution_ids present: {}",
                exec_ids.into_iter().collect::<Vec<_>>().join(", ")
            ),
            location: None,
        });
    }

    ValidationReport::from_violations(violations)
}

/// Long-format statistic record, the standard compute output schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRecord {
    pub group: String,
    pub treatment: String,
    pub stat_name: String,
    pub stat_value: f64,
    pub formatted: String,
    pub method_id: String,
}

impl StatRecord {
    pub fn new(
        group: impl Into<String>,
        treatment: impl Into<String>,
        stat_name: impl Into<String>,
        stat_value: f64,
        formatted: impl Into<String>,
        method_id: impl Into<String>,
    ) -> Self {
        StatRecord {
            group: group.into(),
            treatment: treatment.into(),
            stat_name: stat_name.into(),
            stat_value,
            formatted: formatted.into(),
            method_id: method_id.into(),
        }
    }
}
