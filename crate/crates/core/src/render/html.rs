//! HTML fragment renderer.
//!
//! Emits a single `<table>` with no document envelope so the output can be
//! embedded; the CLI wraps it when writing standalone files.

use super::{ensure_valid, FootnotePolicy, RenderConfig, RenderError};
use crate::ir::{Alignment, CellGrid, CellType, ElementType, StructureEntry};
use std::fmt::Write as _;

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

fn align_css(alignment: Alignment) -> &'static str {
    match alignment {
        Alignment::Left => "left",
        Alignment::Center => "center",
        Alignment::Right => "right",
    }
}

fn is_header_row(entry: &StructureEntry) -> bool {
    matches!(
        entry.element_type,
        ElementType::ColumnHeader | ElementType::SpanningHeader
    )
}

/// Render a valid grid to an HTML `<table>` fragment.
pub fn to_html(grid: &CellGrid, cfg: &RenderConfig) -> Result<String, RenderError> {
    ensure_valid(grid)?;

    let rows = grid.rows();
    let cols = grid.cols();
    let index = grid.cell_index();
    let omit_footnotes = cfg.footnote_policy == FootnotePolicy::Omit;

    let mut out = String::new();
    out.push_str("<table class=\"tfl\">\n");
    if let Some(title) = &cfg.title {
        let _ = writeln!(out, "<caption>{}</caption>", escape(title));
    }

    let header_rows: Vec<&&StructureEntry> = rows.iter().filter(|r| is_header_row(r)).collect();
    out.push_str("<thead>\n");
    if header_rows.is_empty() {
        // no header rows in the grid itself: synthesize one from column labels
        if cols.iter().any(|c| !c.label.is_empty()) {
            out.push_str("<tr>");
            let mut skip = 0u32;
            for col in &cols {
                if skip > 0 {
                    skip -= 1;
                    continue;
                }
                if col.span_count > 1 {
                    let _ = write!(
                        out,
                        "<th colspan=\"{}\" style=\"text-align:{}\">{}</th>",
                        col.span_count,
                        align_css(col.alignment),
                        escape(&col.label)
                    );
                    skip = col.span_count - 1;
                } else {
                    let _ = write!(
                        out,
                        "<th style=\"text-align:{}\">{}</th>",
                        align_css(col.alignment),
                        escape(&col.label)
                    );
                }
            }
            out.push_str("</tr>\n");
        }
    } else {
        for row in &header_rows {
            out.push_str("<tr>");
            let mut skip = 0u32;
            for col in &cols {
                if skip > 0 {
                    skip -= 1;
                    continue;
                }
                let text = index
                    .get(&(row.dim_id, col.dim_id))
                    .map(|c| c.cell_formatted.as_str())
                    .unwrap_or("");
                let span = col
                    .span_count
                    .max(if row.element_type == ElementType::SpanningHeader {
                        row.span_count
                    } else {
                        1
                    });
                if span > 1 {
                    let _ = write!(
                        out,
                        "<th colspan=\"{}\" style=\"text-align:{}\">{}</th>",
                        span,
                        align_css(col.alignment),
                        escape(text)
                    );
                    skip = span - 1;
                } else {
                    let _ = write!(
                        out,
                        "<th style=\"text-align:{}\">{}</th>",
                        align_css(col.alignment),
                        escape(text)
                    );
                }
            }
            out.push_str("</tr>\n");
        }
    }
    out.push_str("</thead>\n<tbody>\n");

    for row in rows.iter().filter(|r| !is_header_row(r)) {
        if row.element_type == ElementType::Separator {
            let _ = writeln!(
                out,
                "<tr class=\"separator\"><td colspan=\"{}\"></td></tr>",
                cols.len().max(1)
            );
            continue;
        }
        let row_cells: Vec<&str> = cols
            .iter()
            .map(|col| {
                index
                    .get(&(row.dim_id, col.dim_id))
                    .map(|c| {
                        if omit_footnotes && c.cell_type == CellType::Footnote {
                            ""
                        } else {
                            c.cell_formatted.as_str()
                        }
                    })
                    .unwrap_or("")
            })
            .collect();
        let all_footnote = cols.iter().all(|col| {
            index
                .get(&(row.dim_id, col.dim_id))
                .map(|c| matches!(c.cell_type, CellType::Footnote | CellType::Empty))
                .unwrap_or(true)
        });
        if omit_footnotes && all_footnote && row_cells.iter().any(|t| t.is_empty()) {
            continue;
        }

        out.push_str("<tr>");
        for (idx, col) in cols.iter().enumerate() {
            let mut style = format!("text-align:{}", align_css(col.alignment));
            let is_label_col = col.element_type == ElementType::RowHeader
                || (idx == 0
                    && !cols
                        .iter()
                        .any(|c| c.element_type == ElementType::RowHeader));
            if is_label_col && row.indent_level > 0 {
                let _ = write!(style, ";padding-left:{}em", row.indent_level as f32 * 1.5);
            }
            let _ = write!(
                out,
                "<td style=\"{}\">{}</td>",
                style,
                escape(row_cells[idx])
            );
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</tbody>\n</table>\n");
    Ok(out)
}
