//! Validity of open formulas with uninterpreted functions, relations and
//! equality. Free variables are read as constants.
//!
//! Satisfiability is decided by searching truth assignments to the atoms and
//! keeping only those whose literals are consistent under congruence closure.

use std::collections::HashMap;

use crate::syntax::{Atom, Formula, Symbol, Term};

/// A decision procedure for satisfiability of open formulas.
pub trait GroundBackend: Sync {
    fn satisfiable(&self, f: &Formula) -> bool;
}

/// Atom-assignment search with congruence closure.
#[derive(Debug, Clone, Copy, Default)]
pub struct Enumeration;

impl GroundBackend for Enumeration {
    fn satisfiable(&self, f: &Formula) -> bool {
        let mut solver = Solver::new(f);
        let mut partial = vec![None; solver.atoms.len()];
        solver.search(&mut partial)
    }
}

/// Hypotheses and a goal over shared free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundProblem {
    pub hypotheses: Vec<Formula>,
    pub goal: Formula,
}

impl GroundProblem {
    pub fn new(hypotheses: Vec<Formula>, goal: Formula) -> Self {
        GroundProblem { hypotheses, goal }
    }

    /// `(h1 & .. & hn) -> goal`, or the goal alone without hypotheses.
    pub fn formula(&self) -> Formula {
        if self.hypotheses.is_empty() {
            self.goal.clone()
        } else {
            Formula::implies(Formula::conjunction(self.hypotheses.clone()), self.goal.clone())
        }
    }

    /// The goal's atoms are searched first.
    pub fn entailed_with(&self, backend: &impl GroundBackend) -> bool {
        assert!(
            self.goal.is_open() && self.hypotheses.iter().all(Formula::is_open),
            "ground formulas are quantifier-free"
        );
        let mut parts = vec![Formula::not(self.goal.clone())];
        parts.extend(self.hypotheses.iter().cloned());
        !backend.satisfiable(&Formula::conjunction(parts))
    }
}

pub fn valid_with(goal: &Formula, backend: &impl GroundBackend) -> bool {
    assert!(goal.is_open(), "ground formulas are quantifier-free");
    !backend.satisfiable(&Formula::not(goal.clone()))
}

/// True iff `goal` holds in every structure under every assignment.
pub fn is_valid(goal: &Formula) -> bool {
    valid_with(goal, &Enumeration)
}

/// True iff every structure and assignment satisfying the hypotheses
/// satisfies the goal.
pub fn entails(p: &GroundProblem) -> bool {
    p.entailed_with(&Enumeration)
}

/// True iff no disequality is forced by the congruence closure of the
/// equalities.
pub fn cc_consistent(equalities: &[(Term, Term)], disequalities: &[(Term, Term)]) -> bool {
    let mut cc = Congruence::default();
    let eqs: Vec<(usize, usize)> = equalities.iter().map(|(a, b)| (cc.intern(a), cc.intern(b))).collect();
    let diseqs: Vec<(usize, usize)> = disequalities.iter().map(|(a, b)| (cc.intern(a), cc.intern(b))).collect();
    for (a, b) in eqs {
        cc.union(a, b);
    }
    cc.close();
    diseqs.into_iter().all(|(a, b)| cc.find(a) != cc.find(b))
}

/// Union-find over an interned subterm universe, closed under congruence.
#[derive(Debug, Clone, Default)]
pub struct Congruence {
    ids: HashMap<Term, usize>,
    nodes: Vec<Option<(Symbol, Vec<usize>)>>,
    parent: Vec<usize>,
}

impl Congruence {
    /// Adds `t` and its subterms; returns the node of `t`.
    pub fn intern(&mut self, t: &Term) -> usize {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let node = match t {
            Term::Var(_) => None,
            Term::App(f, args) => Some((f.clone(), args.iter().map(|a| self.intern(a)).collect())),
        };
        let id = self.nodes.len();
        self.nodes.push(node);
        self.parent.push(id);
        self.ids.insert(t.clone(), id);
        id
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Merges applications with equal symbols and congruent arguments until
    /// nothing changes.
    pub fn close(&mut self) {
        loop {
            let mut table: HashMap<(Symbol, Vec<usize>), usize> = HashMap::new();
            let mut merged = false;
            for id in 0..self.nodes.len() {
                let Some((f, args)) = self.nodes[id].clone() else { continue };
                let key = (f, args.into_iter().map(|a| self.find(a)).collect());
                match table.get(&key) {
                    Some(&other) => merged |= self.union(id, other),
                    None => {
                        table.insert(key, id);
                    }
                }
            }
            if !merged {
                return;
            }
        }
    }

    pub fn congruent(&mut self, a: &Term, b: &Term) -> bool {
        match (self.ids.get(a).copied(), self.ids.get(b).copied()) {
            (Some(x), Some(y)) => self.find(x) == self.find(y),
            _ => a == b,
        }
    }
}

enum Node {
    Atom(usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, partial: &[Option<bool>]) -> Option<bool> {
        match self {
            Node::Atom(i) => partial[*i],
            Node::Not(a) => a.eval(partial).map(|v| !v),
            Node::And(parts) => {
                let mut all = Some(true);
                for p in parts {
                    match p.eval(partial) {
                        Some(false) => return Some(false),
                        None => all = None,
                        Some(true) => {}
                    }
                }
                all
            }
            Node::Or(parts) => {
                let mut any = Some(false);
                for p in parts {
                    match p.eval(partial) {
                        Some(true) => return Some(true),
                        None => any = None,
                        Some(false) => {}
                    }
                }
                any
            }
            Node::Implies(a, b) => match (a.eval(partial), b.eval(partial)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
        }
    }
}

/// Atom literal in interned form.
enum Lit {
    Eq(usize, usize),
    Rel(Symbol, Vec<usize>),
}

struct Solver {
    root: Node,
    atoms: Vec<Lit>,
    base: Congruence,
}

impl Solver {
    fn new(f: &Formula) -> Self {
        let mut index: HashMap<Atom, usize> = HashMap::new();
        let mut atoms = Vec::new();
        let mut base = Congruence::default();
        let root = compile(f, &mut index, &mut atoms, &mut base);
        Solver { root, atoms, base }
    }

    fn search(&mut self, partial: &mut Vec<Option<bool>>) -> bool {
        match self.root.eval(partial) {
            Some(false) => return false,
            Some(true) => return self.consistent(partial),
            None => {}
        }
        if !self.consistent(partial) {
            return false;
        }
        let next = partial.iter().position(Option::is_none).expect("undetermined formula has a free atom");
        for value in [true, false] {
            partial[next] = Some(value);
            if self.search(partial) {
                return true;
            }
        }
        partial[next] = None;
        false
    }

    fn consistent(&self, partial: &[Option<bool>]) -> bool {
        let mut cc = self.base.clone();
        for (lit, value) in self.atoms.iter().zip(partial) {
            if let (Lit::Eq(a, b), Some(true)) = (lit, value) {
                cc.union(*a, *b);
            }
        }
        cc.close();
        let mut rels: HashMap<(&Symbol, Vec<usize>), bool> = HashMap::new();
        for (lit, value) in self.atoms.iter().zip(partial) {
            let Some(value) = *value else { continue };
            match lit {
                Lit::Eq(a, b) => {
                    if !value && cc.find(*a) == cc.find(*b) {
                        return false;
                    }
                }
                Lit::Rel(r, args) => {
                    let key = (r, args.iter().map(|a| cc.find(*a)).collect());
                    if *rels.entry(key).or_insert(value) != value {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn compile(f: &Formula, index: &mut HashMap<Atom, usize>, atoms: &mut Vec<Lit>, cc: &mut Congruence) -> Node {
    match f {
        Formula::Atom(a) => {
            let i = *index.entry(a.clone()).or_insert_with(|| {
                atoms.push(match a {
                    Atom::Eq(s, t) => Lit::Eq(cc.intern(s), cc.intern(t)),
                    Atom::Rel(r, args) => Lit::Rel(r.clone(), args.iter().map(|t| cc.intern(t)).collect()),
                });
                atoms.len() - 1
            });
            Node::Atom(i)
        }
        Formula::Not(a) => Node::Not(Box::new(compile(a, index, atoms, cc))),
        Formula::And(parts) => Node::And(parts.iter().map(|p| compile(p, index, atoms, cc)).collect()),
        Formula::Or(parts) => Node::Or(parts.iter().map(|p| compile(p, index, atoms, cc)).collect()),
        Formula::Implies(a, b) => {
            Node::Implies(Box::new(compile(a, index, atoms, cc)), Box::new(compile(b, index, atoms, cc)))
        }
        Formula::Exists(..) | Formula::Forall(..) => panic!("ground formulas are quantifier-free"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term, Signature};

    fn sig() -> Signature {
        Signature::new().with_function("f", 1).with_function("a", 0).with_function("b", 0).with_relation("P", 1)
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &sig()).unwrap()
    }

    #[test]
    fn validity() {
        assert!(is_valid(&f("(P(x1) -> P(x2)) | (P(x2) -> P(x3))")));
        assert!(!is_valid(&f("P(x1)")));
        assert!(is_valid(&f("x1 = x1")));
        assert!(!is_valid(&f("x1 = x2")));
        assert!(is_valid(&f("x1 = x2 -> f(x1) = f(x2)")));
        assert!(is_valid(&f("x1 = x2 & P(x1) -> P(x2)")));
        assert!(!is_valid(&f("f(x1) = f(x2) -> x1 = x2")));
    }

    #[test]
    fn entailment() {
        assert!(entails(&GroundProblem::new(vec![f("P(x1)")], f("P(x1)"))));
        assert!(entails(&GroundProblem::new(vec![f("f(x1) = x2"), f("x1 = x3")], f("f(x3) = x2"))));
        assert!(!entails(&GroundProblem::new(vec![], f("P(x1)"))));
        assert!(entails(&GroundProblem::new(vec![f("f(a) = a")], f("f(f(f(a))) = a"))));
    }

    #[test]
    fn closure() {
        assert!(!cc_consistent(&[(t("a"), t("b"))], &[(t("a"), t("b"))]));
        assert!(!cc_consistent(&[(t("a"), t("b"))], &[(t("f(a)"), t("f(b)"))]));
        assert!(cc_consistent(&[], &[(t("a"), t("b"))]));
        assert!(!cc_consistent(&[(t("f(a)"), t("a"))], &[(t("f(f(a))"), t("a"))]));
    }

    #[test]
    fn monotone_under_extra_disjunct() {
        let g = f("P(x1) | ~P(x1)");
        assert!(is_valid(&g));
        assert!(is_valid(&Formula::disjunction(vec![g, f("x1 = x2")])));
    }
}
