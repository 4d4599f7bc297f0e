//! Lexical preprocessing for SAS source: comment stripping and string
//! blanking. Line structure is always preserved so downstream line numbers
//! and LOC counts stay true to the file.

/// Replace `/* */` block comments, `%*` macro comments, and `* ... ;`
/// statement comments with spaces. Quoted literals pass through untouched.
pub fn strip_comments(source: &str) -> String {
    #[derive(PartialEq)]
    enum State {
        Normal,
        Block,
        StmtComment,
        MacroComment,
        Single,
        Double,
    }

    let bytes: Vec<char> = source.chars().collect();
    let mut out = String::with_capacity(source.len());
    let mut state = State::Normal;
    // a `*` opens a statement comment only where a statement can begin
    let mut stmt_start = true;
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i];
        let next = bytes.get(i + 1).copied();
        match state {
            State::Normal => match c {
                '/' if next == Some('*') => {
                    state = State::Block;
                    out.push_str("  ");
                    i += 2;
                    continue;
                }
                '%' if next == Some('*') => {
                    state = State::MacroComment;
                    out.push_str("  ");
                    i += 2;
                    continue;
                }
                '*' if stmt_start => {
                    state = State::StmtComment;
                    out.push(' ');
                }
                '\'' => {
                    state = State::Single;
                    out.push(c);
                    stmt_start = false;
                }
                '"' => {
                    state = State::Double;
                    out.push(c);
                    stmt_start = false;
                }
                ';' => {
                    out.push(c);
                    stmt_start = true;
                }
                c if c.is_whitespace() => out.push(c),
                _ => {
                    out.push(c);
                    stmt_start = false;
                }
            },
            State::Block => {
                if c == '*' && next == Some('/') {
                    state = State::Normal;
                    out.push_str("  ");
                    i += 2;
                    continue;
                }
                out.push(if c == '\n' { '\n' } else { ' ' });
            }
            State::StmtComment | State::MacroComment => {
                if c == ';' {
                    state = State::Normal;
                    out.push(';');
                    stmt_start = true;
                } else {
                    out.push(if c == '\n' { '\n' } else { ' ' });
                }
            }
            State::Single => {
                out.push(c);
                if c == '\'' {
                    if next == Some('\'') {
                        out.push('\'');
                        i += 2;
                        continue;
                    }
                    state = State::Normal;
                }
            }
            State::Double => {
                out.push(c);
                if c == '"' {
                    if next == Some('"') {
                        out.push('"');
                        i += 2;
                        continue;
                    }
                    state = State::Normal;
                }
            }
        }
        i += 1;
    }
    out
}

/// Blank out quoted literal content (keeping the quotes and newlines), so
/// token scans cannot be fooled by strings.
pub fn blank_strings(source: &str) -> String {
    let mut out = String::with_capacity(source.len());
    let mut quote: Option<char> = None;
    for c in source.chars() {
        match quote {
            None => {
                if c == '\'' || c == '"' {
                    quote = Some(c);
                }
                out.push(c);
            }
            Some(q) => {
                if c == q {
                    quote = None;
                    out.push(c);
                } else {
                    out.push(if c == '\n' { '\n' } else { ' ' });
                }
            }
        }
    }
    out
}
