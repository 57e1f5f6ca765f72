//! Structural row/column labels.
//!
//! Text form: atoms are plain strings with `\`, `@`, `(` and `)` escaped by a
//! backslash; a tagged label is `inner@tag`, left-associative, and a tag that
//! is itself tagged is wrapped in parentheses (`y@(1@2)`).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Atom(String),
    Tagged(Box<Label>, Box<Label>),
}

impl Label {
    pub fn atom(s: impl Into<String>) -> Self {
        Label::Atom(s.into())
    }

    /// The column label `(inner, index)` produced by concatenation.
    pub fn tagged(inner: Label, index: Label) -> Self {
        Label::Tagged(Box::new(inner), Box::new(index))
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Label::Atom(s) => Some(s),
            Label::Tagged(..) => None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let segments = split_top_level(s)?;
        let mut it = segments.into_iter();
        let first = parse_segment(it.next().unwrap_or_default().as_str())?;
        it.try_fold(first, |acc, seg| Ok(Label::tagged(acc, parse_segment(&seg)?)))
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::atom(s)
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::Atom(s)
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Label::parse(s)
    }
}

fn escape_atom(s: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for ch in s.chars() {
        if matches!(ch, '\\' | '@' | '(' | ')') {
            write!(f, "\\")?;
        }
        write!(f, "{ch}")?;
    }
    Ok(())
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(s) => escape_atom(s, f),
            Label::Tagged(inner, index) => {
                write!(f, "{inner}@")?;
                match index.as_ref() {
                    Label::Atom(s) => escape_atom(s, f),
                    tagged => write!(f, "({tagged})"),
                }
            }
        }
    }
}

/// Split on unescaped `@` outside parentheses; escapes are kept verbatim.
fn split_top_level(s: &str) -> Result<Vec<String>> {
    let mut out = vec![String::new()];
    let mut depth = 0usize;
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => {
                let next = chars
                    .next()
                    .ok_or_else(|| Error::Parse(format!("dangling escape in label `{s}`")))?;
                let cur = out.last_mut().unwrap();
                cur.push('\\');
                cur.push(next);
            }
            '(' => {
                depth += 1;
                out.last_mut().unwrap().push(ch);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse(format!("unbalanced `)` in label `{s}`")))?;
                out.last_mut().unwrap().push(ch);
            }
            '@' if depth == 0 => out.push(String::new()),
            _ => out.last_mut().unwrap().push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in label `{s}`")));
    }
    Ok(out)
}

fn parse_segment(seg: &str) -> Result<Label> {
    if let Some(body) = seg.strip_prefix('(') {
        let body = body
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("bad parenthesised label `{seg}`")))?;
        return Label::parse(body);
    }
    let mut atom = String::with_capacity(seg.len());
    let mut chars = seg.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => atom.push(chars.next().unwrap_or('\\')),
            '(' | ')' => return Err(Error::Parse(format!("unescaped parenthesis in `{seg}`"))),
            _ => atom.push(ch),
        }
    }
    Ok(Label::Atom(atom))
}
