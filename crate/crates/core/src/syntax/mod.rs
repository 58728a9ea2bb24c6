//! Signatures, terms, formulas and their text syntax.

mod formula;
mod parse;
mod signature;
mod term;

pub use formula::{Atom, Formula, Quantifier, SubstitutionError};
pub use parse::{parse_formula, parse_term, parse_terms, ParseError, Position};
pub use signature::{Signature, SignatureError, Symbol, SymbolKind};
pub use term::{Label, Term, Var};

pub(crate) use signature::strip_comment;
