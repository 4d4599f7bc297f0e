//! Syntax smoke check over generated driver programs: balanced parentheses,
//! paired %macro/%mend, and macro-variable references that resolve.

use super::lex::strip_comments;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntaxFinding {
    pub line: usize,
    pub message: String,
}

/// Automatic macro variables that always resolve.
const AUTOMATIC_VARS: &[&str] = &[
    "sysdate",
    "sysdate9",
    "systime",
    "sysday",
    "sysuserid",
    "sysuser",
    "syslast",
    "sysjobid",
    "sysenv",
    "sysscp",
    "sysscpl",
    "sysver",
    "syssite",
    "sysparm",
    "syserr",
    "sysrc",
    "sqlobs",
    "sysmacroname",
    "sysprocessname",
];

/// Check a generated program against a set of known macro-variable names
/// (resolved parameters plus whatever the program itself `%let`s). Findings
/// are data with line numbers, never errors.
pub fn syntax_check(program: &str, known_symbols: &BTreeSet<String>) -> Vec<SyntaxFinding> {
    let stripped = strip_comments(program);
    let mut findings = Vec::new();

    // parenthesis balance outside string literals
    let mut quote: Option<char> = None;
    let mut paren_stack: Vec<usize> = Vec::new();
    let mut line = 1usize;
    for c in stripped.chars() {
        match c {
            '\n' => line += 1,
            '\'' | '"' => match quote {
                None => quote = Some(c),
                Some(q) if q == c => quote = None,
                _ => {}
            },
            '(' if quote.is_none() => paren_stack.push(line),
            ')' if quote.is_none() && paren_stack.pop().is_none() => {
                findings.push(SyntaxFinding {
                    line,
                    message: "unmatched closing parenthesis".into(),
                });
            }
            _ => {}
        }
    }
    for open_line in paren_stack {
        findings.push(SyntaxFinding {
            line: open_line,
            message: "unmatched opening parenthesis".into(),
        });
    }

    // %macro / %mend pairing and %let collection
    let lower = stripped.to_lowercase();
    let mut lets: BTreeSet<String> = BTreeSet::new();
    let mut macro_stack: Vec<usize> = Vec::new();
    let mut line = 1usize;
    let chars: Vec<char> = lower.chars().collect();
    let ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut i = 0usize;
    while i < chars.len() {
        match chars[i] {
            '\n' => {
                line += 1;
                i += 1;
            }
            '%' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && ident(chars[j]) {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                match word.as_str() {
                    "macro" => macro_stack.push(line),
                    "mend" => {
                        if macro_stack.pop().is_none() {
                            findings.push(SyntaxFinding {
                                line,
                                message: "%mend without %macro".into(),
                            });
                        }
                    }
                    "let" => {
                        let mut k = j;
                        while k < chars.len() && chars[k].is_whitespace() {
                            k += 1;
                        }
                        let name_start = k;
                        while k < chars.len() && ident(chars[k]) {
                            k += 1;
                        }
                        let name: String = chars[name_start..k].iter().collect();
                        if !name.is_empty() {
                            lets.insert(name);
                        }
                    }
                    _ => {}
                }
                i = j;
            }
            _ => i += 1,
        }
    }
    for open_line in macro_stack {
        findings.push(SyntaxFinding {
            line: open_line,
            message: "%macro without %mend".into(),
        });
    }

    // &name references must resolve
    let known_lower: BTreeSet<String> = known_symbols.iter().map(|s| s.to_lowercase()).collect();
    let automatic: BTreeSet<&str> = AUTOMATIC_VARS.iter().copied().collect();
    let mut line = 1usize;
    let mut i = 0usize;
    while i < chars.len() {
        match chars[i] {
            '\n' => {
                line += 1;
                i += 1;
            }
            '&' => {
                if chars.get(i + 1) == Some(&'&') {
                    // dynamic composition: out of scope for a static check
                    while i < chars.len() && (chars[i] == '&' || ident(chars[i])) {
                        i += 1;
                    }
                    continue;
                }
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && ident(chars[j]) {
                    j += 1;
                }
                let name: String = chars[start..j].iter().collect();
                if !name.is_empty()
                    && !known_lower.contains(&name)
                    && !lets.contains(&name)
                    && !automatic.contains(name.as_str())
                {
                    findings.push(SyntaxFinding {
                        line,
                        message: format!("unresolved macro variable &{name}"),
                    });
                }
                i = j;
            }
            _ => i += 1,
        }
    }

    findings.sort_by(|a, b| (a.line, &a.message).cmp(&(b.line, &b.message)));
    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn known(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unmatched_paren_reported_with_line() {
        let findings = syntax_check("line one;\n%call(a=(1;\n", &known(&[]));
        assert!(findings
            .iter()
            .any(|f| f.line == 2 && f.message.contains("opening parenthesis")));
    }

    #[test]
    fn known_symbol_resolves() {
        let findings = syntax_check("%report(input=&input_ds);", &known(&["input_ds"]));
        assert!(findings.is_empty(), "{findings:?}");
    }

    #[test]
    fn unknown_variable_flagged() {
        let findings = syntax_check("%report(input=&undefined_var);", &known(&["input_ds"]));
        assert_eq!(findings.len(), 1);
        assert!(findings[0].message.contains("&undefined_var"));
    }

    #[test]
    fn let_assignments_resolve_later_refs() {
        let findings = syntax_check("%let study=CDISCPILOT01;\n%put &study;\n", &known(&[]));
        assert!(findings.is_empty(), "{findings:?}");
    }

    #[test]
    fn macro_pairing_checked() {
        let findings = syntax_check("%macro a;\n%put x;\n", &known(&[]));
        assert!(findings
            .iter()
            .any(|f| f.message.contains("%macro without %mend")));
        let findings = syntax_check("%mend;\n", &known(&[]));
        assert!(findings
            .iter()
            .any(|f| f.message.contains("%mend without %macro")));
    }

    #[test]
    fn automatic_vars_and_dynamic_refs_pass() {
        let findings = syntax_check("%put &sysdate9 &&dyn&i;", &known(&[]));
        assert!(findings.is_empty(), "{findings:?}");
    }

    #[test]
    fn parens_inside_strings_ignored() {
        let findings = syntax_check("title 'open ( paren';", &known(&[]));
        assert!(findings.is_empty(), "{findings:?}");
    }
}
