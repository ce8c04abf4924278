use std::fmt;

use thiserror::Error;

use super::{Formula, Modality};
use crate::algebra::TruthValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based line, set only by [`parse_corpus`].
    pub line: Option<usize>,
    /// Byte offset within the line.
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}, column {}: {}", self.pos + 1, self.message),
            None => write!(f, "column {}: {}", self.pos + 1, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    Const(TruthValue),
    Modal(Modality, u32),
    Not,
    And,
    Or,
    Arrow,
    Iff,
    LParen,
    RParen,
}

fn err(pos: usize, message: impl Into<String>) -> ParseError {
    ParseError { line: None, pos, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &src[i..];
        let tok = if rest.starts_with("<->") {
            i += 3;
            Tok::Iff
        } else if rest.starts_with("->") {
            i += 2;
            Tok::Arrow
        } else if rest.starts_with("[]") || rest.starts_with("<>") {
            let m_box = rest.starts_with("[]");
            i += 2;
            let inv = bytes.get(i) == Some(&b'-');
            if inv {
                i += 1;
            }
            if bytes.get(i) != Some(&b'_') {
                return Err(err(i, "expected `_` and an index after modality"));
            }
            i += 1;
            let digits = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let index = src[digits..i].parse::<u32>().map_err(|_| err(digits, "expected a modality index"))?;
            let m = match (m_box, inv) {
                (true, false) => Modality::Box,
                (false, false) => Modality::Diamond,
                (true, true) => Modality::BoxInv,
                (false, true) => Modality::DiamondInv,
            };
            Tok::Modal(m, index)
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'/') {
                i += 1;
            }
            let text = &src[start..i];
            let value = text.parse::<TruthValue>().map_err(|e| err(start, format!("malformed constant: {e}")))?;
            Tok::Const(value)
        } else if c.is_ascii_lowercase() {
            while i < bytes.len() && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Var(src[start..i].to_string())
        } else {
            i += 1;
            match c {
                b'!' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(err(start, format!("unexpected character `{ch}`")));
                }
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return Err(err(pos, "unexpected end of input"));
        };
        self.at += 1;
        match tok {
            Tok::Not => Ok(Formula::negation(self.unary()?)),
            Tok::Modal(m, i) => Ok(Formula::modal(m, i, self.unary()?)),
            Tok::Var(p) => Ok(Formula::Var(p)),
            Tok::Const(t) => Ok(Formula::Const(t)),
            Tok::LParen => {
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(err(self.pos(), "expected `)`"));
                }
                Ok(inner)
            }
            other => Err(err(pos, format!("unexpected {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::And => "`&`",
        Tok::Or => "`|`",
        Tok::Arrow => "`->`",
        Tok::Iff => "`<->`",
        Tok::RParen => "`)`",
        _ => "token",
    }
}

/// Parses one formula. Precedence, tightest first: `!` and modalities, `&`,
/// `|`, `->` (right-associative), `<->`.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, end: src.len() };
    let f = p.iff()?;
    if p.at < p.toks.len() {
        return Err(err(p.pos(), "trailing input"));
    }
    Ok(f)
}

/// One formula per line; `#` starts a comment, blank lines are skipped.
pub fn parse_corpus(src: &str) -> Result<Vec<Formula>, ParseError> {
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let text = line.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        out.push(parse(text).map_err(|e| ParseError { line: Some(n + 1), ..e })?);
    }
    Ok(out)
}
