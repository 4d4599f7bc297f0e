//! Tolerant RTF table parser.
//!
//! Legacy clinical RTF is noisy: generated by different engines, full of
//! formatting runs, destination groups, and encoding escapes. The parser
//! extracts table content only — each `\trowd ... \row` sequence becomes one
//! row of raw cell texts — and ignores everything it does not understand.
//! Consecutive row sequences with no intervening non-table content form one
//! [`RawTable`]; a title paragraph between two tables splits them.
//!
//! Guarantees: arbitrary byte input either parses or fails with
//! [`RtfError::NotRtf`] / [`RtfError::UnbalancedGroup`]; it never panics.

mod text;

pub use text::{
    classify_cell_text, normalize_text, ExtractionKind, NormalizeOptions, NumericExtraction,
};

use serde::Serialize;
use thiserror::Error;

/// An extracted table: ragged rows of raw (undecorated) cell texts.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RawTable {
    pub rows: Vec<Vec<String>>,
    pub source_path: Option<String>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Widest row; legacy output may be ragged.
    pub fn n_cols(&self) -> usize {
        self.rows.iter().map(|r| r.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseWarning {
    pub message: String,
    pub offset: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum RtfError {
    #[error("input does not begin with {{\\rtf")]
    NotRtf,
    #[error("unbalanced group at byte offset {offset}")]
    UnbalancedGroup { offset: usize },
}

/// Windows-1252 mapping for the 0x80–0x9F range (the rest is Latin-1).
fn cp1252(byte: u8) -> char {
    match byte {
        0x80 => '\u{20AC}',
        0x82 => '\u{201A}',
        0x83 => '\u{0192}',
        0x84 => '\u{201E}',
        0x85 => '\u{2026}',
        0x86 => '\u{2020}',
        0x87 => '\u{2021}',
        0x88 => '\u{02C6}',
        0x89 => '\u{2030}',
        0x8A => '\u{0160}',
        0x8B => '\u{2039}',
        0x8C => '\u{0152}',
        0x8E => '\u{017D}',
        0x91 => '\u{2018}',
        0x92 => '\u{2019}',
        0x93 => '\u{201C}',
        0x94 => '\u{201D}',
        0x95 => '\u{2022}',
        0x96 => '\u{2013}',
        0x97 => '\u{2014}',
        0x98 => '\u{02DC}',
        0x99 => '\u{2122}',
        0x9A => '\u{0161}',
        0x9B => '\u{203A}',
        0x9C => '\u{0153}',
        0x9E => '\u{017E}',
        0x9F => '\u{0178}',
        b => char::from(b),
    }
}

/// Group destinations whose content is never table text.
fn is_skip_destination(word: &str) -> bool {
    matches!(
        word,
        "fonttbl"
            | "colortbl"
            | "stylesheet"
            | "info"
            | "header"
            | "footer"
            | "headerl"
            | "headerr"
            | "headerf"
            | "footerl"
            | "footerr"
            | "footerf"
            | "pict"
            | "object"
            | "themedata"
            | "generator"
    )
}

#[derive(Clone, Copy)]
struct GroupState {
    uc: u32,
    skip: bool,
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    stack: Vec<GroupState>,
    state: GroupState,
    // text accumulated since the last cell/row boundary
    buf: String,
    cur_cells: Vec<String>,
    cur_rows: Vec<Vec<String>>,
    tables: Vec<RawTable>,
    warnings: Vec<ParseWarning>,
    in_row: bool,
    warned_nesting: bool,
    // a high UTF-16 surrogate from \uN waiting for its partner
    pending_surrogate: Option<u16>,
}

impl<'a> Parser<'a> {
    fn new(input: &'a [u8]) -> Self {
        Parser {
            input,
            pos: 0,
            stack: Vec::new(),
            state: GroupState { uc: 1, skip: false },
            buf: String::new(),
            cur_cells: Vec::new(),
            cur_rows: Vec::new(),
            tables: Vec::new(),
            warnings: Vec::new(),
            in_row: false,
            warned_nesting: false,
            pending_surrogate: None,
        }
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(ParseWarning {
            message: message.into(),
            offset: self.pos,
        });
    }

    fn flush_table(&mut self) {
        if !self.cur_rows.is_empty() {
            self.tables.push(RawTable {
                rows: std::mem::take(&mut self.cur_rows),
                source_path: None,
            });
        }
    }

    fn end_cell(&mut self) {
        self.flush_surrogate();
        let text = std::mem::take(&mut self.buf);
        self.cur_cells.push(text);
        self.in_row = true;
    }

    fn end_row(&mut self) {
        self.flush_surrogate();
        if !self.buf.trim().is_empty() {
            // residue without a closing \cell: keep it rather than lose data
            let text = std::mem::take(&mut self.buf);
            self.cur_cells.push(text);
        } else {
            self.buf.clear();
        }
        if !self.cur_cells.is_empty() {
            self.cur_rows.push(std::mem::take(&mut self.cur_cells));
        }
        self.in_row = false;
    }

    fn begin_row_def(&mut self) {
        // non-table text between row sequences separates tables
        if !self.in_row && !self.buf.trim().is_empty() {
            self.flush_table();
        }
        self.buf.clear();
        self.in_row = true;
    }

    fn push_char(&mut self, ch: char) {
        if self.pending_surrogate.take().is_some() && !self.state.skip {
            self.buf.push('\u{FFFD}');
        }
        if !self.state.skip {
            self.buf.push(ch);
        }
    }

    fn flush_surrogate(&mut self) {
        if self.pending_surrogate.take().is_some() && !self.state.skip {
            self.buf.push('\u{FFFD}');
        }
    }

    /// Consume the fallback characters that follow a `\uN` escape.
    fn skip_fallback(&mut self) {
        let mut remaining = self.state.uc;
        while remaining > 0 && self.pos < self.input.len() {
            match self.input[self.pos] {
                b'\\' => {
                    if self.input.get(self.pos + 1) == Some(&b'\'')
                        && self.pos + 3 < self.input.len()
                    {
                        self.pos += 4;
                        remaining -= 1;
                    } else {
                        break; // a control word ends the fallback run
                    }
                }
                b'{' | b'}' => break,
                _ => {
                    self.pos += 1;
                    remaining -= 1;
                }
            }
        }
    }

    fn control_word(&mut self) {
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.input[start..self.pos]).unwrap_or("");
        let mut param: Option<i64> = None;
        let mut negative = false;
        if self.input.get(self.pos) == Some(&b'-') {
            negative = true;
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos > digits_start {
            let digits = std::str::from_utf8(&self.input[digits_start..self.pos]).unwrap_or("0");
            let mut value: i64 = digits.parse().unwrap_or(0);
            if negative {
                value = -value;
            }
            param = Some(value);
        }
        // a single space after the control word is its delimiter
        if self.input.get(self.pos) == Some(&b' ') {
            self.pos += 1;
        }

        if self.state.skip {
            if word == "bin" {
                let n = param.unwrap_or(0).max(0) as usize;
                self.pos = (self.pos + n).min(self.input.len());
            }
            return;
        }

        match word {
            "trowd" => self.begin_row_def(),
            "cell" => self.end_cell(),
            "row" => self.end_row(),
            "par" | "line" => self.push_char('\n'),
            "tab" => self.push_char('\t'),
            "uc" => self.state.uc = param.unwrap_or(1).clamp(0, 8) as u32,
            "u" => {
                let raw = param.unwrap_or(b'?' as i64);
                let code = if raw < 0 { raw + 65536 } else { raw };
                let unit = u16::try_from(code).unwrap_or(b'?' as u16);
                match (self.pending_surrogate.take(), unit) {
                    (None, 0xD800..=0xDBFF) => {
                        // supplementary characters arrive as a surrogate pair
                        self.pending_surrogate = Some(unit);
                    }
                    (Some(high), 0xDC00..=0xDFFF) => {
                        let combined =
                            0x10000 + (((high as u32) - 0xD800) << 10) + ((unit as u32) - 0xDC00);
                        self.push_char(char::from_u32(combined).unwrap_or('\u{FFFD}'));
                    }
                    (pending, _) => {
                        self.pending_surrogate = pending; // push_char flushes orphans
                        let ch = u32::try_from(code)
                            .ok()
                            .and_then(char::from_u32)
                            .unwrap_or('\u{FFFD}');
                        self.push_char(ch);
                    }
                }
                self.skip_fallback();
            }
            "itap" => {
                if param.unwrap_or(1) > 1 && !self.warned_nesting {
                    self.warn("nested table (itap > 1) flattened");
                    self.warned_nesting = true;
                }
            }
            "nestcell" => {
                if !self.warned_nesting {
                    self.warn("nested table cell flattened");
                    self.warned_nesting = true;
                }
                self.push_char(' ');
            }
            "nestrow" => self.push_char('\n'),
            "bin" => {
                let n = param.unwrap_or(0).max(0) as usize;
                self.pos = (self.pos + n).min(self.input.len());
            }
            w if is_skip_destination(w) => self.state.skip = true,
            _ => {} // unknown control words are formatting noise, not errors
        }
    }

    fn control_symbol(&mut self) {
        let sym = self.input[self.pos];
        self.pos += 1;
        if self.state.skip && sym != b'\'' {
            return;
        }
        match sym {
            b'\\' | b'{' | b'}' => self.push_char(sym as char),
            b'\'' => {
                let hex = self.input.get(self.pos..self.pos + 2);
                match hex
                    .and_then(|h| std::str::from_utf8(h).ok())
                    .and_then(|h| u8::from_str_radix(h, 16).ok())
                {
                    Some(byte) => {
                        self.pos += 2;
                        self.push_char(cp1252(byte));
                    }
                    None => self.warn("malformed \\'hh escape"),
                }
            }
            b'~' => self.push_char(' '),
            b'_' => self.push_char('-'),
            b'-' => {} // optional hyphen: no visible character
            b'*' => self.state.skip = true,
            _ => {}
        }
    }

    fn run(mut self) -> Result<(Vec<RawTable>, Vec<ParseWarning>), RtfError> {
        while self.pos < self.input.len() {
            match self.input[self.pos] {
                b'{' => {
                    self.pos += 1;
                    self.stack.push(self.state);
                }
                b'}' => {
                    let offset = self.pos;
                    self.pos += 1;
                    match self.stack.pop() {
                        Some(state) => self.state = state,
                        None => return Err(RtfError::UnbalancedGroup { offset }),
                    }
                }
                b'\\' => {
                    self.pos += 1;
                    match self.input.get(self.pos) {
                        Some(b) if b.is_ascii_alphabetic() => self.control_word(),
                        Some(_) => self.control_symbol(),
                        None => break,
                    }
                }
                b'\r' | b'\n' | b'\0' => self.pos += 1,
                byte => {
                    self.pos += 1;
                    if byte < 0x80 {
                        self.push_char(byte as char);
                    } else {
                        // raw high byte outside an escape: decode as cp1252
                        self.push_char(cp1252(byte));
                    }
                }
            }
        }
        if !self.stack.is_empty() {
            return Err(RtfError::UnbalancedGroup {
                offset: self.input.len(),
            });
        }
        if !self.cur_cells.is_empty() {
            self.warn("input ended inside a table row");
            self.cur_rows.push(std::mem::take(&mut self.cur_cells));
        }
        self.flush_table();
        Ok((self.tables, self.warnings))
    }
}

/// Parse RTF bytes into tables.
pub fn parse_rtf(input: &[u8]) -> Result<Vec<RawTable>, RtfError> {
    parse_rtf_verbose(input).map(|(tables, _)| tables)
}

/// Parse RTF bytes, also returning tolerance warnings (flattened nesting,
/// malformed escapes, truncated rows).
pub fn parse_rtf_verbose(input: &[u8]) -> Result<(Vec<RawTable>, Vec<ParseWarning>), RtfError> {
    let trimmed_start = input
        .iter()
        .position(|b| !b.is_ascii_whitespace())
        .unwrap_or(input.len());
    if !input[trimmed_start..].starts_with(b"{\\rtf") {
        return Err(RtfError::NotRtf);
    }
    Parser::new(&input[trimmed_start..]).run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_table_row() {
        let tables =
            parse_rtf(b"{\\rtf1 \\trowd \\cellx1000\\cellx2000 a\\cell b\\cell \\row }").unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].rows, vec![vec!["a".to_string(), "b".to_string()]]);
    }

    #[test]
    fn unicode_escape_with_fallback() {
        let tables = parse_rtf(b"{\\rtf1 \\trowd \\cellx1000 \\u8805?10\\cell \\row }").unwrap();
        assert_eq!(tables[0].rows[0][0], "\u{2265}10");
    }

    #[test]
    fn uc_governs_fallback_length() {
        let tables =
            parse_rtf(b"{\\rtf1\\uc2 \\trowd \\cellx1000 \\u8805??10\\cell \\row }").unwrap();
        assert_eq!(tables[0].rows[0][0], "\u{2265}10");
    }

    #[test]
    fn no_table_yields_empty_list() {
        let tables = parse_rtf(b"{\\rtf1 Just a paragraph.\\par}").unwrap();
        assert!(tables.is_empty());
    }

    #[test]
    fn bad_magic_is_not_rtf() {
        assert_eq!(parse_rtf(b"hello"), Err(RtfError::NotRtf));
        assert_eq!(parse_rtf(b""), Err(RtfError::NotRtf));
    }

    #[test]
    fn unbalanced_groups_reported_with_offset() {
        match parse_rtf(b"{\\rtf1 {unclosed") {
            Err(RtfError::UnbalancedGroup { .. }) => {}
            other => panic!("expected unbalanced group, got {other:?}"),
        }
        match parse_rtf(b"{\\rtf1 }}") {
            Err(RtfError::UnbalancedGroup { offset }) => assert!(offset > 0),
            other => panic!("expected unbalanced group, got {other:?}"),
        }
    }

    #[test]
    fn intervening_text_splits_tables() {
        let doc = b"{\\rtf1 \\trowd\\cellx1000 a\\cell\\row Table 2 title \\trowd\\cellx1000 b\\cell\\row }";
        let tables = parse_rtf(doc).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0].rows[0][0], "a");
        assert_eq!(tables[1].rows[0][0], "b");
    }

    #[test]
    fn consecutive_rows_form_one_table() {
        let doc = b"{\\rtf1 \\trowd\\cellx1000 a\\cell\\row \\trowd\\cellx1000 b\\cell\\row }";
        let tables = parse_rtf(doc).unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].rows.len(), 2);
    }

    #[test]
    fn destination_groups_are_skipped() {
        let doc = b"{\\rtf1{\\fonttbl{\\f0 Courier;}}{\\*\\generator Acme 1.0;}\\trowd\\cellx1000 x\\cell\\row }";
        let tables = parse_rtf(doc).unwrap();
        assert_eq!(tables[0].rows[0][0], "x");
    }

    #[test]
    fn hex_escapes_decode_cp1252() {
        let tables = parse_rtf(b"{\\rtf1 \\trowd\\cellx1000 a\\'96b\\cell\\row }").unwrap();
        assert_eq!(tables[0].rows[0][0], "a\u{2013}b");
    }

    #[test]
    fn nested_table_flattened_with_warning() {
        let doc = b"{\\rtf1 \\trowd\\cellx1000 outer \\itap2 inner\\nestcell\\cell\\row }";
        let (tables, warnings) = parse_rtf_verbose(doc).unwrap();
        assert_eq!(tables.len(), 1);
        assert!(warnings.iter().any(|w| w.message.contains("flattened")));
    }

    #[test]
    fn ragged_rows_are_preserved() {
        let doc =
            b"{\\rtf1 \\trowd\\cellx1000 a\\cell b\\cell\\row \\trowd\\cellx1000 c\\cell\\row }";
        let tables = parse_rtf(doc).unwrap();
        assert_eq!(tables[0].rows[0].len(), 2);
        assert_eq!(tables[0].rows[1].len(), 1);
    }

    #[test]
    fn escaped_braces_and_backslashes() {
        let tables = parse_rtf(b"{\\rtf1 \\trowd\\cellx1000 a\\{b\\}c\\\\d\\cell\\row }").unwrap();
        assert_eq!(tables[0].rows[0][0], "a{b}c\\d");
    }
}

#[cfg(test)]
mod surrogate_tests {
    use super::*;

    #[test]
    fn surrogate_pair_reassembled() {
        // U+1D11E (musical G clef) = D834 DD1E = \u-10188 \u-8930
        let doc = b"{\\rtf1 \\trowd\\cellx1000 \\u-10188?\\u-8930?x\\cell\\row }";
        let tables = parse_rtf(doc).unwrap();
        assert_eq!(tables[0].rows[0][0], "\u{1D11E}x");
    }

    #[test]
    fn orphaned_high_surrogate_replaced() {
        let doc = b"{\\rtf1 \\trowd\\cellx1000 \\u-10188?x\\cell\\row }";
        let tables = parse_rtf(doc).unwrap();
        assert_eq!(tables[0].rows[0][0], "\u{FFFD}x");
    }
}
