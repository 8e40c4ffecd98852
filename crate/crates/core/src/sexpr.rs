//! Position-tracking s-expression reader shared by the task-spec and query formats.
//!
//! The surface syntax is small: lists in parentheses, `:keyword` atoms, bare
//! symbols, decimal numbers and double-quoted strings. Comments run from `;`
//! to the end of the line.

use std::fmt;

use thiserror::Error;

/// 1-based line and column of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    List(Vec<Sexp>, Pos),
    Keyword(String, Pos),
    Symbol(String, Pos),
    Str(String, Pos),
    Number(f64, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::List(_, p)
            | Sexp::Keyword(_, p)
            | Sexp::Symbol(_, p)
            | Sexp::Str(_, p)
            | Sexp::Number(_, p) => *p,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Sexp::List(..) => "list",
            Sexp::Keyword(..) => "keyword",
            Sexp::Symbol(..) => "symbol",
            Sexp::Str(..) => "string",
            Sexp::Number(..) => "number",
        }
    }

    pub fn as_number(&self) -> Result<f64, SyntaxError> {
        match self {
            Sexp::Number(v, _) => Ok(*v),
            other => Err(SyntaxError::at(
                other.pos(),
                format!("expected number, found {}", other.describe()),
            )),
        }
    }

    pub fn as_str(&self) -> Result<&str, SyntaxError> {
        match self {
            Sexp::Str(s, _) => Ok(s),
            other => Err(SyntaxError::at(
                other.pos(),
                format!("expected string, found {}", other.describe()),
            )),
        }
    }

    pub fn as_symbol(&self) -> Result<&str, SyntaxError> {
        match self {
            Sexp::Symbol(s, _) => Ok(s),
            other => Err(SyntaxError::at(
                other.pos(),
                format!("expected symbol, found {}", other.describe()),
            )),
        }
    }

    pub fn as_list(&self) -> Result<&[Sexp], SyntaxError> {
        match self {
            Sexp::List(items, _) => Ok(items),
            other => Err(SyntaxError::at(
                other.pos(),
                format!("expected list, found {}", other.describe()),
            )),
        }
    }

    /// A list whose first element is the symbol `head`; returns the remaining items.
    pub fn as_form<'a>(&'a self, head: &str) -> Result<&'a [Sexp], SyntaxError> {
        let items = self.as_list()?;
        match items.first() {
            Some(Sexp::Symbol(s, _)) if s == head => Ok(&items[1..]),
            Some(other) => Err(SyntaxError::at(
                other.pos(),
                format!("expected `({head} ...)`"),
            )),
            None => Err(SyntaxError::at(self.pos(), format!("expected `({head} ...)`, found `()`"))),
        }
    }

    /// Head symbol of a non-empty list, if any.
    pub fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Symbol(s, _)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, SyntaxError> {
        self.skip_trivia();
        let start = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(SyntaxError::at(start, "unclosed `(`"));
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, start)));
                        }
                        Some(_) => {
                            // read() only returns None at end of input, handled above
                            if let Some(item) = self.read()? {
                                items.push(item);
                            }
                        }
                    }
                }
            }
            ')' => Err(SyntaxError::at(start, "unexpected `)`")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(SyntaxError::at(start, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => {
                            let esc_pos = self.pos();
                            match self.bump() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some(other) => {
                                    return Err(SyntaxError::at(
                                        esc_pos,
                                        format!("unknown escape `\\{other}`"),
                                    ))
                                }
                                None => return Err(SyntaxError::at(start, "unterminated string")),
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
                Ok(Some(Sexp::Str(s, start)))
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    word.push(c);
                    self.bump();
                }
                classify_atom(word, start).map(Some)
            }
        }
    }
}

fn classify_atom(word: String, pos: Pos) -> Result<Sexp, SyntaxError> {
    if let Some(kw) = word.strip_prefix(':') {
        if kw.is_empty() {
            return Err(SyntaxError::at(pos, "empty keyword"));
        }
        return Ok(Sexp::Keyword(kw.to_string(), pos));
    }
    let first = word.chars().next().unwrap_or(' ');
    let numeric_start = first.is_ascii_digit()
        || ((first == '-' || first == '+' || first == '.') && word.len() > 1);
    if numeric_start && is_decimal(&word) {
        return word
            .parse::<f64>()
            .map(|v| Sexp::Number(v, pos))
            .map_err(|_| SyntaxError::at(pos, format!("malformed number `{word}`")));
    }
    if first.is_ascii_digit() {
        return Err(SyntaxError::at(pos, format!("malformed number `{word}`")));
    }
    if numeric_start && word[1..].starts_with(|c: char| c.is_ascii_digit()) {
        return Err(SyntaxError::at(pos, format!("malformed number `{word}`")));
    }
    Ok(Sexp::Symbol(word, pos))
}

/// `[+-]?digits[.digits]` or `[+-]?.digits`
fn is_decimal(word: &str) -> bool {
    let body = word.strip_prefix(['-', '+']).unwrap_or(word);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let all_digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    match frac {
        None => !int.is_empty() && all_digits(int),
        Some(f) => all_digits(int) && all_digits(f) && !(int.is_empty() && f.is_empty()),
    }
}

/// Read every top-level form in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut lexer = Lexer::new(src);
    let mut out = Vec::new();
    while let Some(form) = lexer.read()? {
        out.push(form);
    }
    Ok(out)
}

/// Read exactly one top-level form.
pub fn read_one(src: &str) -> Result<Sexp, SyntaxError> {
    let mut lexer = Lexer::new(src);
    let Some(form) = lexer.read()? else {
        return Err(SyntaxError::at(lexer.pos(), "empty input"));
    };
    lexer.skip_trivia();
    if lexer.chars.peek().is_some() {
        return Err(SyntaxError::at(lexer.pos(), "trailing input after top-level form"));
    }
    Ok(form)
}

/// Keyword/value pairs following the head of a form, e.g. `:name "x" :lab "y"`.
///
/// Duplicate and unknown keywords are rejected.
pub struct Fields<'a> {
    entries: Vec<(&'a str, &'a Sexp, Pos)>,
    form_pos: Pos,
}

impl<'a> Fields<'a> {
    pub fn parse(items: &'a [Sexp], form_pos: Pos, allowed: &[&str]) -> Result<Self, SyntaxError> {
        let mut entries: Vec<(&'a str, &'a Sexp, Pos)> = Vec::new();
        let mut it = items.iter();
        while let Some(item) = it.next() {
            let Sexp::Keyword(key, kpos) = item else {
                return Err(SyntaxError::at(
                    item.pos(),
                    format!("expected keyword, found {}", item.describe()),
                ));
            };
            if !allowed.contains(&key.as_str()) {
                return Err(SyntaxError::at(*kpos, format!("unknown field `:{key}`")));
            }
            if entries.iter().any(|(k, _, _)| *k == key) {
                return Err(SyntaxError::at(*kpos, format!("duplicate field `:{key}`")));
            }
            let Some(value) = it.next() else {
                return Err(SyntaxError::at(*kpos, format!("missing value for `:{key}`")));
            };
            entries.push((key.as_str(), value, *kpos));
        }
        Ok(Fields { entries, form_pos })
    }

    pub fn get(&self, key: &str) -> Option<&'a Sexp> {
        self.entries
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, v, _)| *v)
    }

    pub fn require(&self, key: &str) -> Result<&'a Sexp, SyntaxError> {
        self.get(key)
            .ok_or_else(|| SyntaxError::at(self.form_pos, format!("missing required field `:{key}`")))
    }
}

/// Keyword, its numbers, and the keyword's position.
pub type NumericGroup<'a> = (&'a str, Vec<f64>, Pos);

/// Keyword followed by a fixed number of numbers, e.g. `:h 0.1 0.2`.
///
/// Returns a map keyword -> numbers, rejecting unknown or repeated keywords.
pub fn numeric_groups<'a>(
    items: &'a [Sexp],
    form_pos: Pos,
    spec: &[(&str, usize)],
) -> Result<Vec<NumericGroup<'a>>, SyntaxError> {
    let all: Vec<&str> = spec.iter().map(|(k, _)| *k).collect();
    numeric_groups_with(items, form_pos, spec, &all)
}

/// Like [`numeric_groups`], but only the keys in `required` must appear.
pub fn numeric_groups_with<'a>(
    items: &'a [Sexp],
    form_pos: Pos,
    spec: &[(&str, usize)],
    required: &[&str],
) -> Result<Vec<NumericGroup<'a>>, SyntaxError> {
    let mut out: Vec<NumericGroup<'a>> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let Sexp::Keyword(key, kpos) = &items[i] else {
            return Err(SyntaxError::at(
                items[i].pos(),
                format!("expected keyword, found {}", items[i].describe()),
            ));
        };
        let Some(&(_, arity)) = spec.iter().find(|(k, _)| *k == key) else {
            return Err(SyntaxError::at(*kpos, format!("unknown field `:{key}`")));
        };
        if out.iter().any(|(k, _, _)| *k == key) {
            return Err(SyntaxError::at(*kpos, format!("duplicate field `:{key}`")));
        }
        let mut vals = Vec::with_capacity(arity);
        for j in 0..arity {
            let Some(item) = items.get(i + 1 + j) else {
                return Err(SyntaxError::at(
                    *kpos,
                    format!("`:{key}` expects {arity} numbers, found {j}"),
                ));
            };
            vals.push(item.as_number()?);
        }
        out.push((key.as_str(), vals, *kpos));
        i += 1 + arity;
    }
    for key in required {
        if !out.iter().any(|(k, _, _)| k == key) {
            return Err(SyntaxError::at(form_pos, format!("missing required field `:{key}`")));
        }
    }
    Ok(out)
}

/// Quote a string for output, escaping `"` and `\`.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Shortest decimal text that reads back to the same `f64`.
pub fn number(v: f64) -> String {
    if v == 0.0 {
        // fold -0 into 0
        return "0".to_string();
    }
    format!("{v}")
}
