//! Tarskian satisfaction over finite structures.
//!
//! Formulas are compiled once against a signature (symbol names resolved to
//! table indices, variables to value slots) and then evaluated against any
//! number of structures over that signature.

use std::collections::BTreeMap;

use thiserror::Error;

use super::structure::FiniteStructure;
use crate::syntax::{Atom, Formula, Signature, Term, Var};

pub type Assignment = BTreeMap<Var, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value assigned to {0}")]
    Unassigned(Var),
    #[error("value {value} for {var} is outside the universe")]
    OutOfRange { var: Var, value: usize },
    #[error("`{0}` is not in the structure's signature")]
    UnknownSymbol(String),
    #[error("`{name}` applied to {found} arguments, expected {expected}")]
    Arity { name: String, expected: usize, found: usize },
}

#[derive(Debug, Clone)]
enum CTerm {
    Slot(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Debug, Clone)]
enum CFormula {
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Exists(usize, Box<CFormula>),
    Forall(usize, Box<CFormula>),
}

/// A formula compiled for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Evaluator {
    free: Vec<Var>,
    slots: usize,
    root: CFormula,
}

struct Compiler<'a> {
    sig: &'a Signature,
    scope: Vec<(Var, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn slot(&self, v: Var) -> usize {
        self.scope.iter().rev().find(|(w, _)| *w == v).map(|(_, s)| *s).expect("free variables are pre-scoped")
    }

    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        match t {
            Term::Var(v) => Ok(CTerm::Slot(self.slot(*v))),
            Term::App(f, args) => {
                let idx = self.sig.function_index(f).ok_or_else(|| EvalError::UnknownSymbol(f.to_string()))?;
                let expected = self.sig.functions()[idx].1;
                if expected != args.len() {
                    return Err(EvalError::Arity { name: f.to_string(), expected, found: args.len() });
                }
                Ok(CTerm::App(idx, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula, EvalError> {
        Ok(match f {
            Formula::Atom(Atom::Rel(r, args)) => {
                let idx = self.sig.relation_index(r).ok_or_else(|| EvalError::UnknownSymbol(r.to_string()))?;
                let expected = self.sig.relations()[idx].1;
                if expected != args.len() {
                    return Err(EvalError::Arity { name: r.to_string(), expected, found: args.len() });
                }
                CFormula::Rel(idx, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
            }
            Formula::Atom(Atom::Eq(a, b)) => CFormula::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(g) => CFormula::Not(Box::new(self.formula(g)?)),
            Formula::And(gs) => CFormula::And(gs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => CFormula::Or(gs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((*v, slot));
                let body = Box::new(self.formula(body)?);
                self.scope.pop();
                if matches!(f, Formula::Exists(..)) {
                    CFormula::Exists(slot, body)
                } else {
                    CFormula::Forall(slot, body)
                }
            }
        })
    }
}

fn term_value(s: &FiniteStructure, t: &CTerm, vals: &[usize]) -> usize {
    match t {
        CTerm::Slot(i) => vals[*i],
        CTerm::App(f, args) => {
            let mut buf = [0usize; 8];
            if args.len() <= buf.len() {
                for (slot, a) in buf.iter_mut().zip(args) {
                    *slot = term_value(s, a, vals);
                }
                s.apply(*f, &buf[..args.len()])
            } else {
                let v: Vec<usize> = args.iter().map(|a| term_value(s, a, vals)).collect();
                s.apply(*f, &v)
            }
        }
    }
}

fn holds(s: &FiniteStructure, f: &CFormula, vals: &mut [usize]) -> bool {
    match f {
        CFormula::Rel(r, args) => {
            let v: Vec<usize> = args.iter().map(|a| term_value(s, a, vals)).collect();
            s.holds(*r, &v)
        }
        CFormula::Eq(a, b) => term_value(s, a, vals) == term_value(s, b, vals),
        CFormula::Not(g) => !holds(s, g, vals),
        CFormula::And(gs) => gs.iter().all(|g| holds(s, g, vals)),
        CFormula::Or(gs) => gs.iter().any(|g| holds(s, g, vals)),
        CFormula::Implies(a, b) => !holds(s, a, vals) || holds(s, b, vals),
        CFormula::Exists(slot, body) => (0..s.size()).any(|a| {
            vals[*slot] = a;
            holds(s, body, vals)
        }),
        CFormula::Forall(slot, body) => (0..s.size()).all(|a| {
            vals[*slot] = a;
            holds(s, body, vals)
        }),
    }
}

impl Evaluator {
    pub fn new(sig: &Signature, f: &Formula) -> Result<Self, EvalError> {
        let free: Vec<Var> = f.free_vars().into_iter().collect();
        let mut c = Compiler { sig, scope: free.iter().enumerate().map(|(i, v)| (*v, i)).collect(), slots: free.len() };
        let root = c.formula(f)?;
        Ok(Evaluator { free, slots: c.slots, root })
    }

    /// Free variables in increasing index order; `eval_values` expects one
    /// value per entry in this order.
    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }

    pub fn eval_values(&self, s: &FiniteStructure, values: &[usize]) -> bool {
        debug_assert_eq!(values.len(), self.free.len());
        let mut vals = vec![0; self.slots.max(1)];
        vals[..values.len()].copy_from_slice(values);
        holds(s, &self.root, &mut vals)
    }

    pub fn eval(&self, s: &FiniteStructure, asg: &Assignment) -> Result<bool, EvalError> {
        let mut vals = vec![0; self.slots.max(1)];
        for (i, v) in self.free.iter().enumerate() {
            let value = *asg.get(v).ok_or(EvalError::Unassigned(*v))?;
            if value >= s.size() {
                return Err(EvalError::OutOfRange { var: *v, value });
            }
            vals[i] = value;
        }
        Ok(holds(s, &self.root, &mut vals))
    }

    /// True iff the formula holds under every assignment of its free variables.
    pub fn holds_universally(&self, s: &FiniteStructure) -> bool {
        self.find_counterexample(s).is_none()
    }

    /// First assignment (in odometer order over the free variables) that
    /// falsifies the formula.
    pub fn find_counterexample(&self, s: &FiniteStructure) -> Option<Vec<usize>> {
        let n = self.free.len();
        let mut vals = vec![0; self.slots.max(1)];
        loop {
            if !holds(s, &self.root, &mut vals) {
                return Some(vals[..n].to_vec());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return None;
                }
                vals[i] += 1;
                if vals[i] < s.size() {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
        }
    }
}

/// Truth value of `f` in `s` under `asg`.
pub fn eval(s: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    Evaluator::new(s.signature(), f)?.eval(s, asg)
}

/// The universal closure of `f` holds in `s`.
pub fn holds_universally(s: &FiniteStructure, f: &Formula) -> Result<bool, EvalError> {
    Ok(Evaluator::new(s.signature(), f)?.holds_universally(s))
}

/// Value of a term under an assignment.
pub fn eval_term(s: &FiniteStructure, t: &Term, asg: &Assignment) -> Result<usize, EvalError> {
    let free: Vec<Var> = t.vars().into_iter().collect();
    let c = Compiler {
        sig: s.signature(),
        scope: free.iter().enumerate().map(|(i, v)| (*v, i)).collect(),
        slots: free.len(),
    };
    let ct = c.term(t)?;
    let mut vals = Vec::with_capacity(free.len());
    for v in &free {
        let value = *asg.get(v).ok_or(EvalError::Unassigned(*v))?;
        if value >= s.size() {
            return Err(EvalError::OutOfRange { var: *v, value });
        }
        vals.push(value);
    }
    Ok(term_value(s, &ct, &vals))
}
