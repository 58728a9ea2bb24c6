use std::fmt;

use thiserror::Error;

use crate::syntax::{strip_comment, Signature, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe must have at least one element")]
    EmptyUniverse,
    #[error("no table given for `{0}`")]
    MissingTable(String),
    #[error("`{0}` is not in the signature")]
    UnknownSymbol(String),
    #[error("table for `{name}` has {found} entries, expected {expected}")]
    TableLength { name: String, expected: usize, found: usize },
    #[error("table for `{name}` contains {value}, outside the universe of size {size}")]
    OutOfRange { name: String, value: usize, size: usize },
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

/// A finite structure over `{0, .., size-1}` with total tables for every
/// symbol of its signature. Tables are row-major, first argument most
/// significant. Equality is identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    sig: Signature,
    size: usize,
    functions: Vec<Vec<usize>>,
    relations: Vec<Vec<bool>>,
}

pub(crate) fn table_len(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}

impl FiniteStructure {
    /// Builds a structure from named tables. Every symbol needs a table.
    pub fn new(
        sig: Signature,
        size: usize,
        functions: Vec<(&str, Vec<usize>)>,
        relations: Vec<(&str, Vec<bool>)>,
    ) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let mut fun_tables: Vec<Option<Vec<usize>>> = vec![None; sig.functions().len()];
        let mut rel_tables: Vec<Option<Vec<bool>>> = vec![None; sig.relations().len()];
        for (name, table) in functions {
            let i = sig.function_index(name).ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
            fun_tables[i] = Some(table);
        }
        for (name, table) in relations {
            let i = sig.relation_index(name).ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
            rel_tables[i] = Some(table);
        }
        let functions = sig
            .functions()
            .iter()
            .zip(fun_tables)
            .map(|((name, _), t)| t.ok_or_else(|| StructureError::MissingTable(name.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let relations = sig
            .relations()
            .iter()
            .zip(rel_tables)
            .map(|((name, _), t)| t.ok_or_else(|| StructureError::MissingTable(name.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_tables(sig, size, functions, relations)
    }

    /// Tables in signature declaration order.
    pub fn from_tables(
        sig: Signature,
        size: usize,
        functions: Vec<Vec<usize>>,
        relations: Vec<Vec<bool>>,
    ) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        for ((name, arity), table) in sig.functions().iter().zip(&functions) {
            let expected = table_len(size, *arity);
            if table.len() != expected {
                return Err(StructureError::TableLength { name: name.to_string(), expected, found: table.len() });
            }
            if let Some(&value) = table.iter().find(|&&v| v >= size) {
                return Err(StructureError::OutOfRange { name: name.to_string(), value, size });
            }
        }
        for ((name, arity), table) in sig.relations().iter().zip(&relations) {
            let expected = table_len(size, *arity);
            if table.len() != expected {
                return Err(StructureError::TableLength { name: name.to_string(), expected, found: table.len() });
            }
        }
        if functions.len() != sig.functions().len() {
            return Err(StructureError::MissingTable(format!("function #{}", functions.len())));
        }
        if relations.len() != sig.relations().len() {
            return Err(StructureError::MissingTable(format!("relation #{}", relations.len())));
        }
        Ok(FiniteStructure { sig, size, functions, relations })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn offset(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    /// Applies the function with declaration index `fun`.
    pub fn apply(&self, fun: usize, args: &[usize]) -> usize {
        self.functions[fun][self.offset(args)]
    }

    pub fn holds(&self, rel: usize, args: &[usize]) -> bool {
        self.relations[rel][self.offset(args)]
    }

    pub fn function_table(&self, fun: usize) -> &[usize] {
        &self.functions[fun]
    }

    pub fn relation_table(&self, rel: usize) -> &[bool] {
        &self.relations[rel]
    }

    /// Reads the algebra file format:
    ///
    /// ```text
    /// universe 2
    /// fun meet : 0 0 0 1
    /// rel P : 01
    /// ```
    ///
    /// Arities come from `sig` when the symbol is declared there, from a
    /// `fun NAME ARITY` line in the file, or are inferred from the table
    /// length.
    pub fn parse(text: &str, sig: Option<&Signature>) -> Result<Self, StructureError> {
        let mut declared = sig.cloned().unwrap_or_default();
        let mut size = None;
        let mut funs: Vec<(String, Vec<usize>, usize)> = Vec::new();
        let mut rels: Vec<(String, Vec<bool>, usize)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let err = |msg: String| StructureError::Line { line: line_no, msg };
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("universe") {
                let n: usize = rest.trim().parse().map_err(|_| err(format!("bad universe size `{}`", rest.trim())))?;
                if n == 0 {
                    return Err(StructureError::EmptyUniverse);
                }
                size = Some(n);
                continue;
            }
            let Some((head, body)) = line.split_once(':') else {
                declared.try_parse_decl(line).map_err(err).and_then(|ok| {
                    if ok {
                        Ok(())
                    } else {
                        Err(err(format!("unrecognised line `{line}`")))
                    }
                })?;
                continue;
            };
            let n = size.ok_or_else(|| err("`universe` must come before the tables".into()))?;
            let mut head = head.split_whitespace();
            let (kind, name) = match (head.next(), head.next(), head.next()) {
                (Some(k), Some(name), None) => (k, name.to_string()),
                _ => return Err(err(format!("expected `fun NAME : ...` or `rel NAME : ...`, got `{line}`"))),
            };
            match kind {
                "fun" => {
                    let table = body
                        .split_whitespace()
                        .map(|v| v.parse::<usize>().map_err(|_| err(format!("bad table entry `{v}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    let arity = match declared.kind(&name) {
                        Some(SymbolKind::Function(a)) => a,
                        Some(_) => return Err(err(format!("`{name}` is declared as a relation"))),
                        None => {
                            infer_arity(n, table.len()).ok_or_else(|| err(format!("cannot infer arity of `{name}`")))?
                        }
                    };
                    funs.push((name, table, arity));
                }
                "rel" => {
                    let table = body
                        .chars()
                        .filter(|c| !c.is_whitespace())
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            other => Err(err(format!("bad bit `{other}`"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let arity = match declared.kind(&name) {
                        Some(SymbolKind::Relation(a)) => a,
                        Some(_) => return Err(err(format!("`{name}` is declared as a function"))),
                        None => infer_arity(n, table.len())
                            .filter(|&a| a > 0)
                            .ok_or_else(|| err(format!("cannot infer arity of `{name}`")))?,
                    };
                    rels.push((name, table, arity));
                }
                other => return Err(err(format!("unknown table kind `{other}`"))),
            }
        }
        let size = size.ok_or_else(|| StructureError::MissingTable("universe".into()))?;
        let mut sig = declared;
        for (name, _, arity) in &funs {
            if sig.kind(name).is_none() {
                sig.add_function(name, *arity).map_err(|e| StructureError::Line { line: 0, msg: e.to_string() })?;
            }
        }
        for (name, _, arity) in &rels {
            if sig.kind(name).is_none() {
                sig.add_relation(name, *arity).map_err(|e| StructureError::Line { line: 0, msg: e.to_string() })?;
            }
        }
        FiniteStructure::new(
            sig,
            size,
            funs.iter().map(|(n, t, _)| (n.as_str(), t.clone())).collect(),
            rels.iter().map(|(n, t, _)| (n.as_str(), t.clone())).collect(),
        )
    }
}

fn infer_arity(size: usize, len: usize) -> Option<usize> {
    if size == 1 {
        return None;
    }
    (0..=16).find(|&a| table_len(size, a) == len)
}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe {}", self.size)?;
        for ((name, _), table) in self.sig.functions().iter().zip(&self.functions) {
            write!(f, "fun {name} :")?;
            for v in table {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        for ((name, _), table) in self.sig.relations().iter().zip(&self.relations) {
            write!(f, "rel {name} : ")?;
            for &b in table {
                f.write_str(if b { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Every structure of the given size over `sig`, in odometer order.
pub fn all_structures(sig: &Signature, size: usize) -> AllStructures {
    let mut radices = Vec::new();
    for (_, arity) in sig.functions() {
        radices.extend(std::iter::repeat_n(size, table_len(size, *arity)));
    }
    for (_, arity) in sig.relations() {
        radices.extend(std::iter::repeat_n(2, table_len(size, *arity)));
    }
    let done = size == 0;
    AllStructures { sig: sig.clone(), size, digits: vec![0; radices.len()], radices, done }
}

pub struct AllStructures {
    sig: Signature,
    size: usize,
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl AllStructures {
    /// Number of structures the iterator yields in total, if it fits.
    pub fn total(&self) -> Option<u128> {
        self.radices.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
    }
}

impl Iterator for AllStructures {
    type Item = FiniteStructure;

    fn next(&mut self) -> Option<FiniteStructure> {
        if self.done {
            return None;
        }
        let mut at = 0;
        let mut functions = Vec::new();
        for (_, arity) in self.sig.functions() {
            let n = table_len(self.size, *arity);
            functions.push(self.digits[at..at + n].to_vec());
            at += n;
        }
        let mut relations = Vec::new();
        for (_, arity) in self.sig.relations() {
            let n = table_len(self.size, *arity);
            relations.push(self.digits[at..at + n].iter().map(|&d| d == 1).collect());
            at += n;
        }
        let out = FiniteStructure { sig: self.sig.clone(), size: self.size, functions, relations };
        // advance
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}
