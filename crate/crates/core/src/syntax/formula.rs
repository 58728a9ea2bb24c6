use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::signature::Symbol;
use super::term::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Rel(Symbol, Vec<Term>),
    Eq(Term, Term),
}

impl Atom {
    pub fn rel(name: &str, args: Vec<Term>) -> Atom {
        Atom::Rel(name.into(), args)
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Rel(_, args) => args.iter().collect(),
            Atom::Eq(a, b) => vec![a, b],
        }
    }

    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Atom {
        match self {
            Atom::Rel(r, args) => Atom::Rel(r.clone(), args.iter().map(|a| a.substitute(map)).collect()),
            Atom::Eq(a, b) => Atom::Eq(a.substitute(map), b.substitute(map)),
        }
    }

    pub fn for_each_var(&self, visit: &mut impl FnMut(Var)) {
        for t in self.terms() {
            t.for_each_var(visit);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Rel(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }

    pub fn bind(self, var: Var, body: Formula) -> Formula {
        match self {
            Quantifier::Exists => Formula::Exists(var, Box::new(body)),
            Quantifier::Forall => Formula::Forall(var, Box::new(body)),
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        })
    }
}

/// First-order formula. `And`/`Or` are n-ary; the parser only builds them
/// with two or more operands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("substituting for {var} would capture {binder} under its quantifier")]
    Capture { var: Var, binder: Var },
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::rel(name, args))
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    /// Disjunction that collapses to its only operand when there is one.
    pub fn disjunction(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        }
    }

    pub fn conjunction(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    /// Splits a quantifier node into its parts.
    pub fn as_quantified(&self) -> Option<(Quantifier, Var, &Formula)> {
        match self {
            Formula::Exists(v, b) => Some((Quantifier::Exists, *v, b)),
            Formula::Forall(v, b) => Some((Quantifier::Forall, *v, b)),
            _ => None,
        }
    }

    /// Quantifier-free.
    pub fn is_open(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) => f.is_open(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_open),
            Formula::Implies(a, b) => a.is_open() && b.is_open(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Built from atoms with `&`, `|` and quantifiers only.
    pub fn is_positive(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(_) | Formula::Implies(..) => false,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_positive),
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.is_positive(),
        }
    }

    /// A block of quantifiers followed by an open matrix.
    pub fn is_prenex(&self) -> bool {
        match self.as_quantified() {
            Some((_, _, body)) => body.is_prenex(),
            None => self.is_open(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(a) => a.for_each_var(&mut |v| {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                bound.push(*v);
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Variables bound by some quantifier, in pre-order.
    pub fn bound_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Some((_, v, _)) = f.as_quantified() {
                out.push(v);
            }
        });
        out
    }

    /// Every variable occurrence, bound or free, plus binders.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Atom(a) => a.for_each_var(&mut |v| {
                out.insert(v);
            }),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(*v);
            }
            _ => {}
        });
        out
    }

    pub fn max_var_index(&self) -> u32 {
        self.all_vars().iter().next_back().map_or(0, |v| v.index())
    }

    /// Pre-order traversal of all subformulas.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Atom(_) => {}
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.walk(visit),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.walk(visit)),
            Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Distinct atoms in first-occurrence order.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out: Vec<&Atom> = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Atom(a) = f {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        });
        out
    }

    /// Simultaneous substitution on free occurrences. Fails instead of
    /// renaming when an image term would be captured by a binder.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Result<Formula, SubstitutionError> {
        Ok(match self {
            Formula::Atom(a) => Formula::Atom(a.substitute(map)),
            Formula::Not(f) => Formula::not(f.substitute(map)?),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map)).collect::<Result<_, _>>()?),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map)?, b.substitute(map)?),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let inner: BTreeMap<Var, Term> =
                    map.iter().filter(|(k, _)| *k != v).map(|(k, t)| (*k, t.clone())).collect();
                if !inner.is_empty() {
                    let free = body.free_vars();
                    for (k, t) in &inner {
                        if free.contains(k) && t.contains_var(*v) {
                            return Err(SubstitutionError::Capture { var: *k, binder: *v });
                        }
                    }
                }
                let body = if inner.is_empty() { (**body).clone() } else { body.substitute(&inner)? };
                let (q, _, _) = self.as_quantified().unwrap();
                q.bind(*v, body)
            }
        })
    }

    /// Renames binders so that they avoid `avoid`, the free variables of the
    /// formula, and each other. Binders already satisfying this are kept.
    pub fn rename_bound(&self, avoid: &BTreeSet<Var>) -> Formula {
        let mut taken: BTreeSet<Var> = avoid.clone();
        taken.extend(self.free_vars());
        let mut next = self.max_var_index().max(avoid.iter().next_back().map_or(0, |v| v.index())) + 1;
        self.rename_inner(&mut taken, &mut next)
    }

    fn rename_inner(&self, taken: &mut BTreeSet<Var>, next: &mut u32) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.rename_inner(taken, next)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_inner(taken, next)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_inner(taken, next)).collect()),
            Formula::Implies(a, b) => {
                let a = a.rename_inner(taken, next);
                Formula::implies(a, b.rename_inner(taken, next))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let (q, _, _) = self.as_quantified().unwrap();
                if taken.insert(*v) {
                    return q.bind(*v, body.rename_inner(taken, next));
                }
                let fresh = Var::new(*next);
                *next += 1;
                taken.insert(fresh);
                let map = BTreeMap::from([(*v, Term::Var(fresh))]);
                let renamed = body.substitute(&map).expect("fresh variable cannot be captured");
                q.bind(fresh, renamed.rename_inner(taken, next))
            }
        }
    }

    /// Universal closure over the free variables in increasing index order.
    pub fn universal_closure(&self) -> Formula {
        self.free_vars().into_iter().rev().fold(self.clone(), |acc, v| Formula::forall(v, acc))
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(_) => 2,
            Formula::And(_) => 3,
            _ => 4,
        }
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => {
                f.write_str("~")?;
                write_operand(f, inner, 4)
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let (q, _, _) = self.as_quantified().unwrap();
                write!(f, "{q} {v} ")?;
                write_operand(f, body, 4)
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let (sep, min) = if matches!(self, Formula::And(_)) { (" & ", 4) } else { (" | ", 3) };
                for (i, c) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write_operand(f, c, min)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(" -> ")?;
                write_operand(f, b, 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: u32) -> Formula {
        Formula::rel("P", vec![Term::var(i)])
    }

    #[test]
    fn substitute_open() {
        let f = Formula::implies(p(1), p(2));
        let map = BTreeMap::from([(Var::new(1), Term::var(5)), (Var::new(2), Term::var(6))]);
        assert_eq!(f.substitute(&map).unwrap().to_string(), "P(x5) -> P(x6)");
    }

    #[test]
    fn substitute_detects_capture() {
        // forall x2 P(x1) with x1 := x2
        let f = Formula::forall(Var::new(2), p(1));
        let map = BTreeMap::from([(Var::new(1), Term::var(2))]);
        assert_eq!(f.substitute(&map), Err(SubstitutionError::Capture { var: Var::new(1), binder: Var::new(2) }));
    }

    #[test]
    fn substitute_respects_shadowing() {
        // forall x1 P(x1): x1 is bound, nothing to replace and no capture
        let f = Formula::forall(Var::new(1), p(1));
        let map = BTreeMap::from([(Var::new(1), Term::var(7))]);
        assert_eq!(f.substitute(&map).unwrap(), f);
    }

    #[test]
    fn substitute_twice_swaps_back() {
        let f = Formula::And(vec![p(1), Formula::rel("Q", vec![Term::var(2)])]);
        let swap = BTreeMap::from([(Var::new(1), Term::var(2)), (Var::new(2), Term::var(1))]);
        let once = f.substitute(&swap).unwrap();
        assert_eq!(once.to_string(), "P(x2) & Q(x1)");
        assert_eq!(once.substitute(&swap).unwrap(), f);
    }

    #[test]
    fn rename_bound_avoids_and_separates() {
        let f = Formula::forall(Var::new(1), p(1));
        let g = f.rename_bound(&BTreeSet::from([Var::new(1)]));
        let Formula::Forall(v, body) = &g else { panic!() };
        assert_ne!(v.index(), 1);
        assert_eq!(**body, p(v.index()));

        let open = Formula::implies(p(1), p(2));
        assert_eq!(open.rename_bound(&BTreeSet::from([Var::new(1)])), open);

        // forall x1 (P(x1) & exists x1 P(x1)) has a repeated binder
        let nested = Formula::forall(Var::new(1), Formula::And(vec![p(1), Formula::exists(Var::new(1), p(1))]));
        let renamed = nested.rename_bound(&BTreeSet::new());
        let binders = renamed.bound_vars();
        assert_eq!(binders.len(), 2);
        assert_ne!(binders[0], binders[1]);
    }

    #[test]
    fn display_parenthesizes_minimally() {
        let f = Formula::Or(vec![Formula::And(vec![p(1), p(2)]), Formula::implies(p(3), p(4))]);
        assert_eq!(f.to_string(), "P(x1) & P(x2) | (P(x3) -> P(x4))");
        let g = Formula::not(Formula::eq(Term::var(1), Term::var(2)));
        assert_eq!(g.to_string(), "~x1 = x2");
        let h = Formula::implies(Formula::implies(p(1), p(2)), p(3));
        assert_eq!(h.to_string(), "(P(x1) -> P(x2)) -> P(x3)");
    }

    #[test]
    fn closure_and_free_vars() {
        let f = Formula::exists(Var::new(2), Formula::implies(p(1), p(2)));
        assert_eq!(f.free_vars(), BTreeSet::from([Var::new(1)]));
        assert!(f.universal_closure().is_sentence());
        assert!(!f.is_open());
        assert!(f.is_prenex());
        assert!(!Formula::And(vec![p(1), f]).is_prenex());
    }
}
