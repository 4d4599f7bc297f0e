//! Consistency lint for two-level count hierarchies (e.g. body-system rows
//! with preferred-term rows nested beneath them).
//!
//! A subject counted under any child term is also counted under its parent
//! group, so a parent count below the largest child count is impossible in a
//! correctly derived table. The check is inclusive: parent >= max(child).

use super::{CellGrid, Dimension, ElementType};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One parent row and the child rows aggregated under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParentSpec {
    pub parent_row: u32,
    pub children: Vec<u32>,
}

/// Which rows form the hierarchy and which columns carry the counts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub parents: Vec<ParentSpec>,
    pub columns: Vec<u32>,
}

impl HierarchySpec {
    /// Derive a spec from indentation: a data-bearing row at indent 0
    /// followed by deeper-indented rows is a parent of those rows. Columns
    /// default to every non-label column.
    pub fn from_grid_indents(grid: &CellGrid) -> HierarchySpec {
        let rows = grid.rows();
        let mut parents = Vec::new();
        let mut i = 0;
        while i < rows.len() {
            let row = rows[i];
            let is_candidate = row.indent_level == 0
                && matches!(
                    row.element_type,
                    ElementType::DataRow | ElementType::TotalRow | ElementType::RowHeader
                );
            if is_candidate {
                let mut children = Vec::new();
                let mut j = i + 1;
                while j < rows.len() && rows[j].indent_level > 0 {
                    if rows[j].element_type != ElementType::Separator {
                        children.push(rows[j].dim_id);
                    }
                    j += 1;
                }
                if !children.is_empty() {
                    parents.push(ParentSpec {
                        parent_row: row.dim_id,
                        children,
                    });
                    i = j;
                    continue;
                }
            }
            i += 1;
        }
        let columns = grid
            .structure
            .iter()
            .filter(|s| s.dimension == Dimension::Col && s.element_type != ElementType::RowHeader)
            .map(|s| s.dim_id)
            .collect();
        HierarchySpec { parents, columns }
    }
}

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("hierarchy spec references row_id {row_id} absent from the grid")]
    SpecRowMissing { row_id: u32 },
}

/// A parent count strictly below one of its child counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyViolation {
    pub parent_row: u32,
    pub child_row: u32,
    pub col_id: u32,
    pub parent_value: f64,
    pub child_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LintReport {
    /// Comparison semantics, recorded so report consumers do not have to
    /// guess whether ties are violations (they are not).
    pub semantics: String,
    pub checked_pairs: usize,
    pub violations: Vec<HierarchyViolation>,
}

impl LintReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Flag every (parent, column) whose count is below the maximum child count.
pub fn check_hierarchy_consistency(
    grid: &CellGrid,
    spec: &HierarchySpec,
) -> Result<LintReport, HierarchyError> {
    let index = grid.cell_index();
    let row_exists = |row_id: u32| grid.row_entry(row_id).is_some();

    for parent in &spec.parents {
        if !row_exists(parent.parent_row) {
            return Err(HierarchyError::SpecRowMissing {
                row_id: parent.parent_row,
            });
        }
        for &child in &parent.children {
            if !row_exists(child) {
                return Err(HierarchyError::SpecRowMissing { row_id: child });
            }
        }
    }

    let mut checked_pairs = 0usize;
    let mut violations = Vec::new();
    for parent in &spec.parents {
        for &col in &spec.columns {
            let parent_value = match index
                .get(&(parent.parent_row, col))
                .and_then(|c| c.cell_value)
            {
                Some(v) => v,
                None => continue, // non-numeric parent cell: nothing to compare
            };
            for &child in &parent.children {
                let child_value = match index.get(&(child, col)).and_then(|c| c.cell_value) {
                    Some(v) => v,
                    None => continue,
                };
                checked_pairs += 1;
                if parent_value < child_value {
                    violations.push(HierarchyViolation {
                        parent_row: parent.parent_row,
                        child_row: child,
                        col_id: col,
                        parent_value,
                        child_value,
                    });
                }
            }
        }
    }
    violations.sort_by_key(|v| (v.parent_row, v.col_id, v.child_row));

    Ok(LintReport {
        semantics: "parent >= max(child); equality is consistent".into(),
        checked_pairs,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Alignment, Cell, CellType, StructureEntry};

    fn count_cell(row: u32, col: u32, n: f64) -> Cell {
        Cell::new(
            "r",
            "e",
            row,
            col,
            Some(n),
            format!("{n}"),
            CellType::Integer,
            0,
        )
        .unwrap()
    }

    fn row(dim_id: u32, label: &str, indent: u32) -> StructureEntry {
        StructureEntry::new(
            "r",
            "e",
            Dimension::Row,
            dim_id,
            label,
            dim_id - 1,
            indent,
            Alignment::Left,
            1,
            ElementType::DataRow,
        )
        .unwrap()
    }

    fn col(dim_id: u32) -> StructureEntry {
        StructureEntry::new(
            "r",
            "e",
            Dimension::Col,
            dim_id,
            format!("arm{dim_id}"),
            dim_id - 1,
            0,
            Alignment::Center,
            1,
            ElementType::ColumnHeader,
        )
        .unwrap()
    }

    fn soc_pt_grid(parent: f64, children: &[f64]) -> (CellGrid, HierarchySpec) {
        let mut cells = vec![count_cell(1, 1, parent)];
        let mut structure = vec![row(1, "Cardiac disorders", 0), col(1)];
        for (i, &c) in children.iter().enumerate() {
            let dim = (i + 2) as u32;
            cells.push(count_cell(dim, 1, c));
            structure.push(row(dim, &format!("pt{i}"), 1));
        }
        let spec = HierarchySpec {
            parents: vec![ParentSpec {
                parent_row: 1,
                children: (2..(children.len() as u32 + 2)).collect(),
            }],
            columns: vec![1],
        };
        (CellGrid::new(cells, structure), spec)
    }

    #[test]
    fn parent_above_children_passes() {
        let (grid, spec) = soc_pt_grid(10.0, &[8.0, 5.0]);
        let report = check_hierarchy_consistency(&grid, &spec).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked_pairs, 2);
    }

    #[test]
    fn child_above_parent_flagged() {
        let (grid, spec) = soc_pt_grid(4.0, &[8.0]);
        let report = check_hierarchy_consistency(&grid, &spec).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].parent_value, 4.0);
        assert_eq!(report.violations[0].child_value, 8.0);
    }

    #[test]
    fn equal_counts_are_consistent() {
        // a single dominant term can account for every subject in its group
        let (grid, spec) = soc_pt_grid(52.0, &[52.0]);
        let report = check_hierarchy_consistency(&grid, &spec).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn missing_row_rejected() {
        let (grid, mut spec) = soc_pt_grid(10.0, &[8.0]);
        spec.parents[0].children.push(99);
        let err = check_hierarchy_consistency(&grid, &spec).unwrap_err();
        assert!(matches!(err, HierarchyError::SpecRowMissing { row_id: 99 }));
    }

    #[test]
    fn spec_derived_from_indents() {
        let (grid, _) = soc_pt_grid(10.0, &[8.0, 5.0]);
        let derived = HierarchySpec::from_grid_indents(&grid);
        assert_eq!(derived.parents.len(), 1);
        assert_eq!(derived.parents[0].parent_row, 1);
        assert_eq!(derived.parents[0].children, vec![2, 3]);
        assert_eq!(derived.columns, vec![1]);
    }
}
