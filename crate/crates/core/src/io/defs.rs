//! Line grammar for indicator definitions:
//!
//! ```text
//! out_id = FORMULA[@scope](in_1, in_2[, ..][, n]) [=> published]   # comment
//! ```
//!
//! `@scope` is required for SHARE, HHI and HHI_PCT and refused elsewhere. A
//! trailing integer is only accepted as CAGR's year count. The optional
//! published value (`26.95%`, `11.73x`, `6.5pp`, `530`) is what the audit
//! checks the computed value against.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use crate::concentration::Scope;
use crate::error::DefinitionParseError;
use crate::formula::{Arity, FormulaId};
use crate::indicator::{Declared, IndicatorDef};

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    path: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &str, line: usize, path: &'a str) -> Self {
        Self {
            chars: text.char_indices().collect(),
            pos: 0,
            line,
            path,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, column: usize, message: impl Into<String>) -> DefinitionParseError {
        DefinitionParseError {
            path: self.path.to_string(),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DefinitionParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of line".to_string(), |f| format!("`{f}`"));
            Err(self.error(self.column(), format!("expected `{c}`, found {found}")))
        }
    }

    /// Identifier or integer token; returns (text, start column).
    fn word(&mut self) -> Result<(String, usize), DefinitionParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-') {
            self.pos += 1;
        }
        if self.pos == start {
            let found = self.peek().map_or("end of line".to_string(), |f| format!("`{f}`"));
            return Err(self.error(start + 1, format!("expected a name, found {found}")));
        }
        Ok((self.chars[start..self.pos].iter().map(|(_, c)| c).collect(), start + 1))
    }

    fn rest(&mut self) -> (String, usize) {
        self.skip_ws();
        let start = self.pos;
        self.pos = self.chars.len();
        (
            self.chars[start..].iter().map(|(_, c)| c).collect::<String>().trim_end().to_string(),
            start + 1,
        )
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(code, _)| code)
}

fn is_identifier(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

fn parse_line(
    text: &str,
    line: usize,
    path: &str,
    known: Option<&BTreeSet<String>>,
) -> Result<IndicatorDef, DefinitionParseError> {
    let mut cur = Cursor::new(text, line, path);
    let (id, id_col) = cur.word()?;
    if !is_identifier(&id) {
        return Err(cur.error(id_col, format!("`{id}` is not a valid output id")));
    }
    cur.expect('=')?;
    let (name, name_col) = cur.word()?;
    let formula: FormulaId = name.parse().map_err(|m: String| cur.error(name_col, m))?;

    let scope = if cur.eat('@') {
        let (s, col) = cur.word()?;
        Some(s.parse::<Scope>().map_err(|m| cur.error(col, m))?)
    } else {
        None
    };
    match (formula.is_concentration(), scope) {
        (true, None) => {
            return Err(cur.error(
                name_col,
                format!("{formula} needs a declared denominator scope, e.g. {formula}@regional"),
            ))
        }
        (false, Some(_)) => {
            return Err(cur.error(name_col, format!("{formula} does not take a scope")))
        }
        _ => {}
    }

    cur.expect('(')?;
    let mut args: Vec<(String, usize)> = Vec::new();
    if !cur.eat(')') {
        loop {
            args.push(cur.word()?);
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
    }

    let mut years = None;
    if let Some((last, col)) = args.last().cloned() {
        if last.chars().all(|c| c.is_ascii_digit()) {
            if !formula.takes_years() {
                return Err(cur.error(col, format!("{formula} does not take a year count")));
            }
            let n: u32 = last
                .parse()
                .map_err(|_| cur.error(col, format!("`{last}` is not a year count")))?;
            if n == 0 {
                return Err(cur.error(col, "year count must be at least 1"));
            }
            years = Some(n);
            args.pop();
        }
    }
    let ok = match formula.arity() {
        Arity::Exactly(k) => args.len() == k,
        Arity::AtLeast(k) => args.len() >= k,
    };
    if !ok {
        let expected = match formula.arity() {
            Arity::Exactly(k) => format!("{k}"),
            Arity::AtLeast(k) => format!("at least {k}"),
        };
        return Err(cur.error(
            name_col,
            format!("{formula} takes {expected} inputs, got {}", args.len()),
        ));
    }
    let mut distinct = HashSet::new();
    for (i, (arg, col)) in args.iter().enumerate() {
        if !is_identifier(arg) {
            return Err(cur.error(*col, format!("`{arg}` is not a valid input id")));
        }
        // SHARE repeats its member inside the group; nothing else may repeat.
        let repeat_ok = formula == FormulaId::Share && i > 0 && *arg == args[0].0;
        if !distinct.insert(arg.as_str()) && !repeat_ok {
            return Err(cur.error(*col, format!("input `{arg}` is listed twice")));
        }
        if let Some(known) = known {
            if !known.contains(arg) {
                return Err(cur.error(*col, format!("unknown input id `{arg}`")));
            }
        }
    }

    let declared = if cur.eat('=') {
        cur.expect('>')?;
        let (raw, col) = cur.rest();
        if raw.is_empty() {
            return Err(cur.error(col, "missing published value after `=>`"));
        }
        Some(Declared::parse(&raw).map_err(|m| cur.error(col, m))?)
    } else {
        None
    };
    cur.skip_ws();
    if let Some(c) = cur.peek() {
        return Err(cur.error(cur.column(), format!("unexpected `{c}`")));
    }

    Ok(IndicatorDef {
        id,
        formula,
        scope,
        inputs: args.into_iter().map(|(a, _)| a).collect(),
        years,
        declared,
        line,
    })
}

/// Parses definitions. With `known`, every input id must be one of them and
/// no output id may shadow one.
pub fn parse_indicator_defs_str(
    text: &str,
    path: &str,
    known: Option<&BTreeSet<String>>,
) -> Result<Vec<IndicatorDef>, DefinitionParseError> {
    let mut defs: Vec<IndicatorDef> = Vec::new();
    let mut outputs = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let code = strip_comment(raw.strip_suffix('\r').unwrap_or(raw));
        if code.trim().is_empty() {
            continue;
        }
        let def = parse_line(code, i + 1, path, known)?;
        let id_col = code.find(def.id.as_str()).unwrap_or(0) + 1;
        let clash = |message: String| DefinitionParseError {
            path: path.to_string(),
            line: i + 1,
            column: id_col,
            message,
        };
        if !outputs.insert(def.id.clone()) {
            return Err(clash(format!("output `{}` is defined twice", def.id)));
        }
        if known.is_some_and(|k| k.contains(&def.id)) {
            return Err(clash(format!("output `{}` shadows a source id", def.id)));
        }
        defs.push(def);
    }
    Ok(defs)
}

pub fn parse_indicator_defs(
    path: &Path,
    known: Option<&BTreeSet<String>>,
) -> Result<Vec<IndicatorDef>, DefinitionParseError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| DefinitionParseError {
        path: label.clone(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    parse_indicator_defs_str(&text, &label, known)
}
