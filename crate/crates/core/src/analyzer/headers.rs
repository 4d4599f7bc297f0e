//! `%macro` header parsing over a source corpus.

use super::lex::strip_comments;
use serde::Serialize;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// One parsed macro definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroDef {
    /// Lower-cased: SAS macro names are case-insensitive.
    pub name: String,
    /// (name, default) pairs from the header, lower-cased names.
    pub parameters: Vec<(String, Option<String>)>,
    pub source_path: PathBuf,
    /// 1-based inclusive lines of `%macro` through `%mend`.
    pub body_span: (usize, usize),
}

/// Result of scanning a corpus: definitions, per-file stripped sources, and
/// non-fatal problems.
#[derive(Debug, Default)]
pub struct CorpusScan {
    pub defs: Vec<MacroDef>,
    /// Comment-stripped source per file, for body extraction.
    pub stripped: HashMap<PathBuf, String>,
    pub io_errors: Vec<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

impl CorpusScan {
    /// The stripped body lines of a definition (header through `%mend`).
    pub fn body_of(&self, def: &MacroDef) -> String {
        let Some(text) = self.stripped.get(&def.source_path) else {
            return String::new();
        };
        let (start, end) = def.body_span;
        text.lines()
            .skip(start.saturating_sub(1))
            .take(end.saturating_sub(start) + 1)
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Split a parameter list on top-level commas.
fn split_params(text: &str) -> Vec<(String, Option<String>)> {
    let mut params = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth -= 1;
                current.push(c);
            }
            ',' if depth == 0 => {
                params.push(std::mem::take(&mut current));
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        params.push(current);
    }
    params
        .into_iter()
        .filter_map(|p| {
            let p = p.trim();
            if p.is_empty() {
                return None;
            }
            match p.split_once('=') {
                Some((name, default)) => {
                    let default = default.trim();
                    Some((
                        name.trim().to_lowercase(),
                        if default.is_empty() {
                            None
                        } else {
                            Some(default.to_string())
                        },
                    ))
                }
                None => Some((p.to_lowercase(), None)),
            }
        })
        .collect()
}

struct HeaderHit {
    name: String,
    parameters: Vec<(String, Option<String>)>,
    line: usize,
}

enum Token {
    MacroHeader(HeaderHit),
    Mend(usize),
}

/// Scan stripped source for `%macro`/`%mend` tokens in order.
fn scan_tokens(stripped: &str) -> Vec<Token> {
    let lower = stripped.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let orig: Vec<char> = stripped.chars().collect();
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c == '%' {
            let word_start = i + 1;
            let mut j = word_start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[word_start..j].iter().collect();
            if word == "macro" {
                // name follows after whitespace
                let mut k = j;
                while k < chars.len() && chars[k].is_whitespace() && chars[k] != '\n' {
                    k += 1;
                }
                let name_start = k;
                while k < chars.len() && is_ident_char(chars[k]) {
                    k += 1;
                }
                let name: String = chars[name_start..k].iter().collect();
                if !name.is_empty() {
                    // optional parameter list before the closing semicolon
                    let mut m = k;
                    while m < chars.len() && chars[m].is_whitespace() {
                        m += 1;
                    }
                    let parameters = if m < chars.len() && chars[m] == '(' {
                        let mut depth = 0i32;
                        let mut n = m;
                        while n < chars.len() {
                            match chars[n] {
                                '(' => depth += 1,
                                ')' => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                _ => {}
                            }
                            n += 1;
                        }
                        let inner: String = orig[m + 1..n.min(orig.len())].iter().collect();
                        i = n;
                        split_params(&inner)
                    } else {
                        i = k;
                        Vec::new()
                    };
                    tokens.push(Token::MacroHeader(HeaderHit {
                        name,
                        parameters,
                        line,
                    }));
                    continue;
                }
            } else if word == "mend" {
                tokens.push(Token::Mend(line));
            }
            i = j;
            continue;
        }
        i += 1;
    }
    tokens
}

/// Parse every `%macro` header in the given files. IO failures are collected
/// per file and do not abort the batch; nested definitions are attributed to
/// the inner name with a warning.
pub fn parse_macro_headers(files: &[PathBuf]) -> CorpusScan {
    let mut scan = CorpusScan::default();
    for path in files {
        let source = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                scan.io_errors.push((path.clone(), e.to_string()));
                continue;
            }
        };
        let stripped = strip_comments(&source);
        let mut stack: Vec<(HeaderHit, bool)> = Vec::new(); // (header, is_nested)
        for token in scan_tokens(&stripped) {
            match token {
                Token::MacroHeader(hit) => {
                    let nested = !stack.is_empty();
                    if nested {
                        scan.warnings.push(format!(
                            "{}:{}: nested macro definition {:?} attributed to the inner name",
                            path.display(),
                            hit.line,
                            hit.name
                        ));
                    }
                    stack.push((hit, nested));
                }
                Token::Mend(line) => {
                    if let Some((hit, _)) = stack.pop() {
                        scan.defs.push(MacroDef {
                            name: hit.name,
                            parameters: hit.parameters,
                            source_path: path.clone(),
                            body_span: (hit.line, line),
                        });
                    } else {
                        scan.warnings.push(format!(
                            "{}:{}: %mend without %macro",
                            path.display(),
                            line
                        ));
                    }
                }
            }
        }
        for (hit, _) in stack {
            scan.warnings.push(format!(
                "{}:{}: %macro {:?} has no matching %mend",
                path.display(),
                hit.line,
                hit.name
            ));
        }
        scan.stripped.insert(path.clone(), stripped);
    }
    scan.defs
        .sort_by(|a, b| (&a.source_path, a.body_span.0).cmp(&(&b.source_path, b.body_span.0)));
    scan
}

/// Collect `.sas` files under a directory, sorted for determinism.
pub fn collect_sas_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case("sas"))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    files
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_text(text: &str) -> CorpusScan {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("test.sas");
        std::fs::write(&path, text).unwrap();
        let mut scan = parse_macro_headers(std::slice::from_ref(&path));
        // detach from the tempdir so the scan owns everything it needs
        for def in &mut scan.defs {
            def.source_path = PathBuf::from("test.sas");
        }
        let stripped = scan.stripped.remove(&path).unwrap();
        scan.stripped.insert(PathBuf::from("test.sas"), stripped);
        scan
    }

    #[test]
    fn header_with_defaults() {
        let scan = scan_text("%macro ae_sum(dsin=, trtvar=TRT01A);\n%mend ae_sum;\n");
        assert_eq!(scan.defs.len(), 1);
        let def = &scan.defs[0];
        assert_eq!(def.name, "ae_sum");
        assert_eq!(
            def.parameters,
            vec![
                ("dsin".to_string(), None),
                ("trtvar".to_string(), Some("TRT01A".to_string()))
            ]
        );
    }

    #[test]
    fn commented_header_ignored() {
        let scan = scan_text("/* %macro ghost(a=); */\n%macro real;\n%mend;\n");
        assert_eq!(scan.defs.len(), 1);
        assert_eq!(scan.defs[0].name, "real");
    }

    #[test]
    fn three_defs_with_correct_spans() {
        let text = "\
%macro one;\n\
  %put one;\n\
%mend;\n\
%macro two(a);\n\
%mend two;\n\
%macro three(x=1, y=(a,b));\n\
  data _null_;\n\
  run;\n\
%mend;\n";
        let scan = scan_text(text);
        assert_eq!(scan.defs.len(), 3);
        assert_eq!(scan.defs[0].body_span, (1, 3));
        assert_eq!(scan.defs[1].body_span, (4, 5));
        assert_eq!(scan.defs[2].body_span, (6, 9));
        // parenthesized default survives the top-level comma split
        assert_eq!(
            scan.defs[2].parameters[1],
            ("y".to_string(), Some("(a,b)".to_string()))
        );
    }

    #[test]
    fn nested_definition_warns_and_attributes_inner() {
        let text = "%macro outer;\n%macro inner;\n%mend;\n%mend;\n";
        let scan = scan_text(text);
        assert_eq!(scan.defs.len(), 2);
        assert!(scan.warnings.iter().any(|w| w.contains("nested")));
        let inner = scan.defs.iter().find(|d| d.name == "inner").unwrap();
        assert_eq!(inner.body_span, (2, 3));
    }

    #[test]
    fn body_extraction() {
        let scan = scan_text("%macro m;\n  %put hi;\n%mend;\ndata a; run;\n");
        let body = scan.body_of(&scan.defs[0]);
        assert!(body.contains("%put hi"));
        assert!(!body.contains("data a"));
    }

    #[test]
    fn io_errors_collected_not_fatal() {
        let scan = parse_macro_headers(&[PathBuf::from("/nonexistent/x.sas")]);
        assert_eq!(scan.io_errors.len(), 1);
        assert!(scan.defs.is_empty());
    }
}
