//! Render engines over the IR.
//!
//! Renderers are pure format translators: they read `cell_formatted` for
//! display and never look at the raw numeric value. JSON is the canonical
//! machine-readable export (byte-deterministic for a given grid) and the
//! only format with a reader.

mod html;
mod json;
mod rtf;

pub use html::to_html;
pub use json::{from_json, to_json};
pub use rtf::to_rtf;

use crate::ir::ValidationReport;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RenderFormat {
    Json,
    Html,
    Rtf,
}

/// What happens to FOOTNOTE-typed cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FootnotePolicy {
    #[default]
    Inline,
    Omit,
}

#[derive(Debug, Clone, Default)]
pub struct RenderConfig {
    pub title: Option<String>,
    pub footnote_policy: FootnotePolicy,
    /// Explicit RTF column widths in twips; when absent the page width
    /// (9360 twips) is divided equally. Length must equal the column count.
    pub column_widths_twips: Option<Vec<u32>>,
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("grid fails validation with {} violation(s)", .0.violations.len())]
    InvalidGrid(ValidationReport),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("decoded grid fails validation with {} violation(s)", .0.violations.len())]
    Validity(ValidationReport),
    #[error("column_widths_twips has {got} entries but the grid has {expected} columns")]
    ColumnWidths { expected: usize, got: usize },
}

pub(crate) fn ensure_valid(grid: &crate::ir::CellGrid) -> Result<(), RenderError> {
    let report = crate::ir::validate_grid(grid);
    if report.valid {
        Ok(())
    } else {
        Err(RenderError::InvalidGrid(report))
    }
}
