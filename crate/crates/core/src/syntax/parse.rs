//! Text front end for terms and formulas.
//!
//! ```text
//! term    := VAR | NAME '(' term (',' term)* ')' | NAME
//! formula := or ('->' formula)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' unary | ('exists' | 'forall') VAR unary | '(' formula ')' | atom
//! atom    := REL '(' term (',' term)* ')' | term '=' term
//! ```
//!
//! `x<n>` is the variable with index n. The display spellings `y<n>`,
//! `z<n>`, `w<n>`, `v<n>`, `u<n>` and `d<n>` are mapped to fresh indices
//! above every explicit `x` index in the same input, one index per spelling.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::formula::{Atom, Formula, Quantifier};
use super::signature::{is_variable_name, Signature, SymbolKind};
use super::term::{Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { name: String, pos: Position },
    #[error("{pos}: `{name}` takes {expected} argument(s) but {found} given")]
    Arity { name: String, expected: usize, found: usize, pos: Position },
    #[error("{pos}: {msg}")]
    Syntax { msg: String, pos: Position },
    #[error("{pos}: unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: String, pos: Position },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::UnknownSymbol { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::UnexpectedEnd { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    And,
    Or,
    Arrow,
    Not,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Not => f.write_str("`~`"),
            Tok::Equals => f.write_str("`=`"),
        }
    }
}

fn position_of(text: &str, offset: usize) -> Position {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    Position { offset, line, column }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'~' => Tok::Not,
            b'=' => Tok::Equals,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_' || bytes[i + 1] == b'\'')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    msg: format!("unexpected character `{ch}`"),
                    pos: position_of(text, start),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    Ok(out)
}

/// Index of an `x<n>` token, or the letter/number pair of a display spelling.
enum VarName {
    Indexed(u32),
    Named(u8, u32),
}

fn classify_var(name: &str) -> Option<Result<VarName, String>> {
    if !is_variable_name(name) {
        return None;
    }
    let digits = &name[1..];
    if digits.len() > 1 && digits.starts_with('0') {
        return Some(Err(format!("variable `{name}` has a leading zero")));
    }
    let number: u32 = match digits.parse() {
        Ok(n) if n >= 1 => n,
        _ => return Some(Err(format!("variable `{name}` needs an index of at least 1"))),
    };
    Some(Ok(match name.as_bytes()[0] {
        b'x' => VarName::Indexed(number),
        letter => VarName::Named(letter, number),
    }))
}

struct Parser<'a> {
    text: &'a str,
    sig: &'a Signature,
    toks: Vec<(Tok, usize)>,
    at: usize,
    named: HashMap<(u8, u32), u32>,
    next_fresh: u32,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, sig: &'a Signature) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        let mut max_index = 0;
        for (tok, _) in &toks {
            if let Tok::Ident(name) = tok {
                if let Some(Ok(VarName::Indexed(n))) = classify_var(name) {
                    max_index = max_index.max(n);
                }
            }
        }
        Ok(Parser { text, sig, toks, at: 0, named: HashMap::new(), next_fresh: max_index + 1 })
    }

    fn pos(&self, offset: usize) -> Position {
        position_of(self.text, offset)
    }

    fn here(&self) -> Position {
        let offset = self.toks.get(self.at).map_or(self.text.len(), |(_, o)| *o);
        self.pos(offset)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, off)) => {
                Err(ParseError::Syntax { msg: format!("expected {what}, found {t}"), pos: self.pos(off) })
            }
            None => Err(ParseError::UnexpectedEnd { expected: what.to_string(), pos: self.here() }),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some((t, off)) => {
                Err(ParseError::Syntax { msg: format!("unexpected {t} after end of expression"), pos: self.pos(*off) })
            }
        }
    }

    fn variable(&mut self, name: &str, off: usize) -> Result<Option<Var>, ParseError> {
        let Some(class) = classify_var(name) else { return Ok(None) };
        match class.map_err(|msg| ParseError::Syntax { msg, pos: self.pos(off) })? {
            VarName::Indexed(n) => Ok(Some(Var::new(n))),
            VarName::Named(letter, number) => {
                let fresh = &mut self.next_fresh;
                let index = *self.named.entry((letter, number)).or_insert_with(|| {
                    let i = *fresh;
                    *fresh += 1;
                    i
                });
                Ok(Some(Var::named(index, letter, number)))
            }
        }
    }

    fn args(&mut self, name: &str, off: usize, expected: usize) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.bump() {
                    Some((Tok::Comma, _)) => continue,
                    Some((Tok::RParen, _)) => break,
                    Some((t, o)) => {
                        return Err(ParseError::Syntax {
                            msg: format!("expected `,` or `)`, found {t}"),
                            pos: self.pos(o),
                        })
                    }
                    None => return Err(ParseError::UnexpectedEnd { expected: "`,` or `)`".into(), pos: self.here() }),
                }
            }
        }
        if args.len() != expected {
            return Err(ParseError::Arity { name: name.to_string(), expected, found: args.len(), pos: self.pos(off) });
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, off) = match self.bump() {
            Some(t) => t,
            None => return Err(ParseError::UnexpectedEnd { expected: "a term".into(), pos: self.here() }),
        };
        let Tok::Ident(name) = tok else {
            return Err(ParseError::Syntax { msg: format!("expected a term, found {tok}"), pos: self.pos(off) });
        };
        if let Some(v) = self.variable(&name, off)? {
            return Ok(Term::Var(v));
        }
        match self.sig.kind(&name) {
            Some(SymbolKind::Function(arity)) => {
                let args = self.args(&name, off, arity)?;
                Ok(Term::App(self.sig.symbol(&name).unwrap(), args))
            }
            Some(SymbolKind::Relation(_)) => {
                Err(ParseError::Syntax { msg: format!("relation `{name}` used as a term"), pos: self.pos(off) })
            }
            None if name == "exists" || name == "forall" => {
                Err(ParseError::Syntax { msg: format!("expected a term, found `{name}`"), pos: self.pos(off) })
            }
            None => Err(ParseError::UnknownSymbol { name, pos: self.pos(off) }),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(Formula::disjunction(parts))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::conjunction(parts))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(kw)) if kw == "exists" || kw == "forall" => {
                let q = if kw == "exists" { Quantifier::Exists } else { Quantifier::Forall };
                self.bump();
                let var = match self.bump() {
                    Some((Tok::Ident(name), off)) => match self.variable(&name, off)? {
                        Some(v) => v,
                        None => {
                            return Err(ParseError::Syntax {
                                msg: format!("`{name}` is not a variable and cannot be quantified"),
                                pos: self.pos(off),
                            })
                        }
                    },
                    Some((t, off)) => {
                        return Err(ParseError::Syntax {
                            msg: format!("expected a variable after `{q}`, found {t}"),
                            pos: self.pos(off),
                        })
                    }
                    None => {
                        return Err(ParseError::UnexpectedEnd {
                            expected: format!("a variable after `{q}`"),
                            pos: self.here(),
                        })
                    }
                };
                let body = self.unary()?;
                Ok(q.bind(var, body))
            }
            Some(Tok::Ident(name)) if self.sig.relation_arity(name).is_some() => {
                let name = name.clone();
                let (_, off) = self.bump().unwrap();
                let arity = self.sig.relation_arity(&name).unwrap();
                let args = self.args(&name, off, arity)?;
                Ok(Formula::Atom(Atom::Rel(self.sig.symbol(&name).unwrap(), args)))
            }
            Some(_) => {
                let lhs = self.term()?;
                self.expect(Tok::Equals, "`=`")?;
                let rhs = self.term()?;
                Ok(Formula::eq(lhs, rhs))
            }
            None => Err(ParseError::UnexpectedEnd { expected: "a formula".into(), pos: self.here() }),
        }
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Whitespace-separated sequence of terms, as used by certificate lines.
pub fn parse_terms(text: &str, sig: &Signature) -> Result<Vec<Term>, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.term()?);
    }
    Ok(out)
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}
