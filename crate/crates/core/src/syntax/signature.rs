use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Interned symbol name shared between terms, formulas and structures.
pub type Symbol = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("`{0}` is not a valid symbol name")]
    BadName(String),
    #[error("relation `{0}` must have arity at least 1")]
    NullaryRelation(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Function(usize),
    Relation(usize),
}

/// A finite first-order signature. Equality is built in and never declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    functions: Vec<(Symbol, usize)>,
    relations: Vec<(Symbol, usize)>,
    lookup: HashMap<Symbol, (SymbolKind, usize)>,
}

/// Variable spelling: `x<n>` or one of the display letters followed by digits.
pub(crate) const DISPLAY_LETTERS: &[u8] = b"duvwyz";

pub(crate) fn is_variable_name(name: &str) -> bool {
    let bytes = name.as_bytes();
    bytes.len() >= 2
        && (bytes[0] == b'x' || DISPLAY_LETTERS.contains(&bytes[0]))
        && bytes[1..].iter().all(u8::is_ascii_digit)
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_name(&self, name: &str) -> Result<(), SignatureError> {
        if !is_identifier(name) || is_variable_name(name) || name == "exists" || name == "forall" {
            return Err(SignatureError::BadName(name.to_string()));
        }
        if self.lookup.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        self.check_name(name)?;
        let sym: Symbol = name.into();
        self.lookup.insert(sym.clone(), (SymbolKind::Function(arity), self.functions.len()));
        self.functions.push((sym, arity));
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        self.check_name(name)?;
        if arity == 0 {
            return Err(SignatureError::NullaryRelation(name.to_string()));
        }
        let sym: Symbol = name.into();
        self.lookup.insert(sym.clone(), (SymbolKind::Relation(arity), self.relations.len()));
        self.relations.push((sym, arity));
        Ok(())
    }

    /// Builder used heavily by tests and examples.
    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.add_function(name, arity).expect("valid function symbol");
        self
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Self {
        self.add_relation(name, arity).expect("valid relation symbol");
        self
    }

    pub fn functions(&self) -> &[(Symbol, usize)] {
        &self.functions
    }

    pub fn relations(&self) -> &[(Symbol, usize)] {
        &self.relations
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        self.lookup.get(name).map(|(k, _)| *k)
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        match self.lookup.get(name) {
            Some((SymbolKind::Function(a), _)) => Some(*a),
            _ => None,
        }
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        match self.lookup.get(name) {
            Some((SymbolKind::Relation(a), _)) => Some(*a),
            _ => None,
        }
    }

    /// Position of a function symbol in declaration order.
    pub fn function_index(&self, name: &str) -> Option<usize> {
        match self.lookup.get(name) {
            Some((SymbolKind::Function(_), i)) => Some(*i),
            _ => None,
        }
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        match self.lookup.get(name) {
            Some((SymbolKind::Relation(_), i)) => Some(*i),
            _ => None,
        }
    }

    /// Returns the shared symbol handle for a declared name.
    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.lookup.get_key_value(name).map(|(k, _)| k.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty() && self.relations.is_empty()
    }

    /// Adds every symbol of `other`; identical redeclarations are accepted.
    pub fn merge(&mut self, other: &Signature) -> Result<(), SignatureError> {
        for (name, arity) in &other.functions {
            match self.kind(name) {
                Some(SymbolKind::Function(a)) if a == *arity => {}
                Some(_) => return Err(SignatureError::Duplicate(name.to_string())),
                None => self.add_function(name, *arity)?,
            }
        }
        for (name, arity) in &other.relations {
            match self.kind(name) {
                Some(SymbolKind::Relation(a)) if a == *arity => {}
                Some(_) => return Err(SignatureError::Duplicate(name.to_string())),
                None => self.add_relation(name, *arity)?,
            }
        }
        Ok(())
    }

    /// Parses `fun name arity` / `rel name arity` lines. Blank lines and `#`
    /// comments are skipped; any other line is an error.
    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let mut sig = Signature::new();
        for (no, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            sig.parse_decl(line).map_err(|msg| SignatureError::Line { line: no + 1, msg })?;
        }
        Ok(sig)
    }

    /// Tries to read one declaration line. Returns `Ok(false)` when the line
    /// is not a declaration at all, so callers can mix declarations with
    /// other content.
    pub fn try_parse_decl(&mut self, line: &str) -> Result<bool, String> {
        let first = line.split_whitespace().next();
        if first != Some("fun") && first != Some("rel") {
            return Ok(false);
        }
        self.parse_decl(line).map(|_| true)
    }

    fn parse_decl(&mut self, line: &str) -> Result<(), String> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [kind, name, arity] = parts.as_slice() else {
            return Err(format!("expected `fun NAME ARITY` or `rel NAME ARITY`, got `{line}`"));
        };
        let arity: usize = arity.parse().map_err(|_| format!("bad arity `{arity}`"))?;
        let res = match *kind {
            "fun" => self.add_function(name, arity),
            "rel" => self.add_relation(name, arity),
            other => return Err(format!("unknown declaration kind `{other}`")),
        };
        res.map_err(|e| e.to_string())
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in &self.functions {
            writeln!(f, "fun {name} {arity}")?;
        }
        for (name, arity) in &self.relations {
            writeln!(f, "rel {name} {arity}")?;
        }
        Ok(())
    }
}
