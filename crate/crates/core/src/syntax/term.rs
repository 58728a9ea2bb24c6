use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use super::signature::Symbol;

/// How a variable is printed. Identity is the index alone; the label only
/// preserves the spelling used in source text (`y1`, `z2`, dummy `d1`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Indexed,
    Named { letter: u8, number: u32 },
}

/// The variable `x_index`.
#[derive(Debug, Clone, Copy)]
pub struct Var {
    index: u32,
    label: Label,
}

impl Var {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        Var { index, label: Label::Indexed }
    }

    pub fn named(index: u32, letter: u8, number: u32) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        Var { index, label: Label::Named { letter, number } }
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn label(self) -> Label {
        self.label
    }

    /// Same variable printed as `x<index>`.
    pub fn plain(self) -> Self {
        Var::new(self.index)
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index.cmp(&other.index)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Label::Indexed => write!(f, "x{}", self.index),
            Label::Named { letter, number } => write!(f, "{}{}", letter as char, number),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(index: u32) -> Term {
        Term::Var(Var::new(index))
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn for_each_var(&self, visit: &mut impl FnMut(Var)) {
        match self {
            Term::Var(v) => visit(*v),
            Term::App(_, args) => args.iter().for_each(|a| a.for_each_var(visit)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v);
        });
        out
    }

    pub fn contains_var(&self, var: Var) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(var)),
        }
    }

    /// Largest variable index occurring in the term, 0 for ground terms.
    pub fn max_var_index(&self) -> u32 {
        let mut max = 0;
        self.for_each_var(&mut |v| max = max.max(v.index()));
        max
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// Simultaneous substitution. Unmapped variables are left alone.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or(Term::Var(*v)),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(map)).collect()),
        }
    }

    /// All subterms, the term itself included, in post-order.
    pub fn subterms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        if let Term::App(_, args) = self {
            for a in args {
                a.subterms(out);
            }
        }
        out.push(self);
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) if args.is_empty() => write!(f, "{name}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
