//! Cell-text normalization and numeric classification.

use serde::Serialize;
use std::sync::OnceLock;

/// Options for [`normalize_text`]. Whitespace collapsing and trimming always
/// apply; the rest is opt-in.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalizeOptions {
    /// Lower-case the text (legacy engines disagree on header casing).
    pub case_fold: bool,
    /// Map characters that an ANSI-transport round trip can garble — any
    /// non-ASCII character and the `?` produced by a Unicode fallback — onto
    /// a single placeholder, so "≥10" and "?10" normalize identically.
    pub fold_unicode_fallback: bool,
}

/// Collapse internal whitespace runs to one space, trim the ends, and apply
/// the selected foldings. Idempotent.
pub fn normalize_text(raw: &str, opts: &NormalizeOptions) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        let ch = if opts.fold_unicode_fallback && (!ch.is_ascii() || ch == '?') {
            '?'
        } else {
            ch
        };
        if opts.case_fold {
            out.extend(ch.to_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

/// What a cell's text parses to numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ExtractionKind {
    None,
    Single,
    Paired,
}

/// Numeric content extracted from a display string, if any. `SINGLE` carries
/// one value in `primary`; `PAIRED` (the "n (pct%)" layout) carries the count
/// in `primary` and the parenthesized value in `secondary`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericExtraction {
    pub kind: ExtractionKind,
    pub primary: Option<f64>,
    pub secondary: Option<f64>,
}

impl NumericExtraction {
    pub const NONE: NumericExtraction = NumericExtraction {
        kind: ExtractionKind::None,
        primary: None,
        secondary: None,
    };

    pub fn single(value: f64) -> Self {
        NumericExtraction {
            kind: ExtractionKind::Single,
            primary: Some(value),
            secondary: None,
        }
    }

    pub fn paired(primary: f64, secondary: f64) -> Self {
        NumericExtraction {
            kind: ExtractionKind::Paired,
            primary: Some(primary),
            secondary: Some(secondary),
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.kind != ExtractionKind::None
    }
}

const NUMBER: &str = r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?";

fn single_re() -> &'static regex::Regex {
    static RE: OnceLock<regex::Regex> = OnceLock::new();
    RE.get_or_init(|| regex::Regex::new(&format!(r"^({NUMBER})$")).expect("static regex"))
}

fn paired_re() -> &'static regex::Regex {
    static RE: OnceLock<regex::Regex> = OnceLock::new();
    RE.get_or_init(|| {
        regex::Regex::new(&format!(r"^({NUMBER})\s*\(\s*({NUMBER})\s*%?\s*\)$"))
            .expect("static regex")
    })
}

fn parse_number(text: &str) -> Option<f64> {
    text.replace(',', "").parse::<f64>().ok()
}

/// Classify already-normalized cell text as a single numeric literal, a
/// paired count/percentage, or plain text. Total: anything unrecognized is
/// `NONE`, never an error.
pub fn classify_cell_text(raw: &str) -> NumericExtraction {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return NumericExtraction::NONE;
    }
    if let Some(caps) = paired_re().captures(trimmed) {
        if let (Some(p), Some(s)) = (parse_number(&caps[1]), parse_number(&caps[2])) {
            return NumericExtraction::paired(p, s);
        }
    }
    if let Some(caps) = single_re().captures(trimmed) {
        if let Some(v) = parse_number(&caps[1]) {
            return NumericExtraction::single(v);
        }
    }
    NumericExtraction::NONE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_collapsed_and_trimmed() {
        let opts = NormalizeOptions::default();
        assert_eq!(normalize_text("  n  (%) ", &opts), "n (%)");
        assert_eq!(normalize_text("a\t b\n c", &opts), "a b c");
        assert_eq!(normalize_text("", &opts), "");
    }

    #[test]
    fn case_folding_is_optional() {
        let folded = NormalizeOptions {
            case_fold: true,
            ..Default::default()
        };
        assert_eq!(normalize_text("TOTAL", &folded), "total");
        assert_eq!(
            normalize_text("TOTAL", &NormalizeOptions::default()),
            "TOTAL"
        );
    }

    #[test]
    fn fallback_folding_unifies_garbled_text() {
        let opts = NormalizeOptions {
            fold_unicode_fallback: true,
            ..Default::default()
        };
        assert_eq!(normalize_text("\u{2265}10", &opts), "?10");
        assert_eq!(normalize_text("?10", &opts), "?10");
    }

    #[test]
    fn paired_count_percentage() {
        assert_eq!(
            classify_cell_text("5 (16.7%)"),
            NumericExtraction::paired(5.0, 16.7)
        );
        assert_eq!(
            classify_cell_text("5 (16.7)"),
            NumericExtraction::paired(5.0, 16.7)
        );
        assert_eq!(
            classify_cell_text("1,234 (56.7%)"),
            NumericExtraction::paired(1234.0, 56.7)
        );
        assert_eq!(
            classify_cell_text("-3 (0.5%)"),
            NumericExtraction::paired(-3.0, 0.5)
        );
    }

    #[test]
    fn single_literals() {
        assert_eq!(
            classify_cell_text("0.0312"),
            NumericExtraction::single(0.0312)
        );
        assert_eq!(classify_cell_text("75.2"), NumericExtraction::single(75.2));
        assert_eq!(classify_cell_text("-12"), NumericExtraction::single(-12.0));
        assert_eq!(
            classify_cell_text("1,234,567"),
            NumericExtraction::single(1234567.0)
        );
    }

    #[test]
    fn non_numeric_is_none() {
        assert_eq!(classify_cell_text(""), NumericExtraction::NONE);
        assert_eq!(classify_cell_text("Placebo"), NumericExtraction::NONE);
        assert_eq!(classify_cell_text("<0.001"), NumericExtraction::NONE);
        assert_eq!(
            classify_cell_text("5 (16.7%) extra"),
            NumericExtraction::NONE
        );
    }
}
