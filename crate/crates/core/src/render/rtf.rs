//! RTF table writer.
//!
//! Emits minimal RTF 1.x: a fixed single-font header, one `\trowd ... \row`
//! group per grid row, one `\cell` per grid column. The output is plain
//! ASCII; anything outside ASCII is escaped as `\uN` with a `?` fallback so
//! the bytes survive any transport. Widths default to an equal division of
//! 9360 twips, which keeps golden files stable across configs.

use super::{ensure_valid, FootnotePolicy, RenderConfig, RenderError};
use crate::ir::{Alignment, CellGrid, CellType, ElementType};
use std::fmt::Write as _;

const PAGE_WIDTH_TWIPS: u32 = 9360;

fn escape_into(out: &mut String, text: &str) {
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '{' => out.push_str("\\{"),
            '}' => out.push_str("\\}"),
            '\n' => out.push_str("\\line "),
            '\t' => out.push_str("\\tab "),
            '\r' => {}
            c if (c as u32) < 0x80 => out.push(c),
            c => {
                // \uN takes a signed 16-bit argument; supplementary planes
                // become a UTF-16 surrogate pair, one \u per unit
                let mut units = [0u16; 2];
                for unit in c.encode_utf16(&mut units) {
                    let signed = if *unit > 0x7FFF {
                        *unit as i32 - 0x10000
                    } else {
                        *unit as i32
                    };
                    let _ = write!(out, "\\u{signed}?");
                }
            }
        }
    }
}

fn alignment_word(alignment: Alignment) -> &'static str {
    match alignment {
        Alignment::Left => "\\ql",
        Alignment::Center => "\\qc",
        Alignment::Right => "\\qr",
    }
}

/// Render a valid grid to RTF bytes.
pub fn to_rtf(grid: &CellGrid, cfg: &RenderConfig) -> Result<Vec<u8>, RenderError> {
    ensure_valid(grid)?;

    let rows = grid.rows();
    let cols = grid.cols();
    let index = grid.cell_index();
    let ncols = cols.len();

    let edges: Vec<u32> = match &cfg.column_widths_twips {
        Some(widths) => {
            if widths.len() != ncols {
                return Err(RenderError::ColumnWidths {
                    expected: ncols,
                    got: widths.len(),
                });
            }
            widths
                .iter()
                .scan(0u32, |acc, w| {
                    *acc += w;
                    Some(*acc)
                })
                .collect()
        }
        None => (1..=ncols)
            .map(|i| (PAGE_WIDTH_TWIPS as u64 * i as u64 / ncols.max(1) as u64) as u32)
            .collect(),
    };

    let mut out = String::new();
    out.push_str("{\\rtf1\\ansi\\deff0\\uc1{\\fonttbl{\\f0\\fmodern Courier New;}}\n");
    if let Some(title) = &cfg.title {
        out.push_str("\\pard\\qc ");
        escape_into(&mut out, title);
        out.push_str("\\par\n");
    }

    for row in &rows {
        out.push_str("\\trowd\\trgaph108");
        for edge in &edges {
            let _ = write!(out, "\\cellx{edge}");
        }
        out.push('\n');
        for col in &cols {
            out.push_str("\\pard\\intbl");
            out.push_str(alignment_word(col.alignment));
            if row.indent_level > 0 && col.element_type == ElementType::RowHeader {
                let _ = write!(out, "\\li{}", row.indent_level * 240);
            }
            out.push(' ');
            if let Some(cell) = index.get(&(row.dim_id, col.dim_id)) {
                let omit = cfg.footnote_policy == FootnotePolicy::Omit
                    && cell.cell_type == CellType::Footnote;
                if !omit {
                    escape_into(&mut out, &cell.cell_formatted);
                }
            }
            out.push_str("\\cell\n");
        }
        out.push_str("\\row\n");
    }
    out.push('}');
    out.push('\n');

    debug_assert!(out.is_ascii());
    Ok(out.into_bytes())
}
