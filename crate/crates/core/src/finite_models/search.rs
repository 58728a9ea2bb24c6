//! Term searches over a finite stand-in for a quasivariety: a list of finite
//! structures together with their direct products.
//!
//! The positive-formula search looks for terms `t1(x1), .., tk(x1..xk)` and a
//! disjunct `alpha_j` with `alpha_j(t1, x2, .., tk, x(k+1))` true under all
//! assignments. The definability search looks for a single term computing a
//! function presented by a positive formula.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::eval::{EvalError, Evaluator};
use super::product::product;
use super::structure::FiniteStructure;
use crate::normal_forms::{to_alternating, AlternatingPrenex, Conjunction, NormalFormError};
use crate::syntax::{Formula, Signature, Term, Var};

/// Largest product the searches build when re-checking a witness.
pub const MAX_PRODUCT_SIZE: usize = 16;

const MAX_CANDIDATES: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no structures given")]
    NoStructures,
    #[error("structures do not share one signature")]
    SignatureMismatch,
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("formula has free variables besides the quantified ones: {0}")]
    HasParameters(String),
    #[error("formula is not positive")]
    NotPositive,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("witness fails in a product of the given structures")]
    ProductCheckFailed,
}

fn common_signature(structures: &[FiniteStructure]) -> Result<&Signature, SearchError> {
    let first = structures.first().ok_or(SearchError::NoStructures)?;
    if structures.iter().any(|s| s.signature() != first.signature()) {
        return Err(SearchError::SignatureMismatch);
    }
    Ok(first.signature())
}

/// A term with its value table: for each structure, the value under every
/// assignment of `x1..xn` in odometer order (`x1` most significant).
#[derive(Debug, Clone)]
struct Valued {
    term: Term,
    depth: usize,
    values: Vec<usize>,
}

/// Terms over `x1..xn` up to `depth`, one per distinct value table on the
/// given structures, in order of depth, then symbol order, then arguments.
pub fn distinct_terms(structures: &[FiniteStructure], n: usize, depth: usize) -> Result<Vec<Term>, SearchError> {
    Ok(enumerate_valued(structures, n, depth)?.into_iter().map(|v| v.term).collect())
}

fn enumerate_valued(structures: &[FiniteStructure], n: usize, depth: usize) -> Result<Vec<Valued>, SearchError> {
    let sig = common_signature(structures)?;
    // offsets of each structure's block inside a value table
    let mut blocks = Vec::new();
    let mut total = 0;
    for s in structures {
        let len = s.size().pow(n as u32);
        blocks.push((total, len));
        total += len;
    }
    let var_table = |i: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(total);
        for s in structures {
            let size = s.size();
            for p in 0..size.pow(n as u32) {
                // digit i of p, most significant first
                out.push(p / size.pow((n - 1 - i) as u32) % size);
            }
        }
        out
    };
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut all: Vec<Valued> = Vec::new();
    let mut push = |all: &mut Vec<Valued>, v: Valued| {
        if !seen.contains_key(&v.values) {
            seen.insert(v.values.clone(), all.len());
            all.push(v);
        }
    };
    for i in 0..n {
        push(&mut all, Valued { term: Term::var(i as u32 + 1), depth: 0, values: var_table(i) });
    }
    for (fi, (name, arity)) in sig.functions().iter().enumerate() {
        if *arity == 0 {
            let values = structures
                .iter()
                .zip(&blocks)
                .flat_map(|(s, (_, len))| std::iter::repeat_n(s.apply(fi, &[]), *len))
                .collect();
            push(&mut all, Valued { term: Term::App(name.clone(), vec![]), depth: 0, values });
        }
    }
    for d in 1..=depth {
        let existing = all.len();
        for (fi, (name, arity)) in sig.functions().iter().enumerate() {
            if *arity == 0 || existing == 0 {
                continue;
            }
            let mut idx = vec![0usize; *arity];
            'tuples: loop {
                if idx.iter().any(|&i| all[i].depth + 1 == d) && idx.iter().all(|&i| all[i].depth < d) {
                    let mut values = Vec::with_capacity(total);
                    let mut args = vec![0; *arity];
                    for (s, (start, len)) in structures.iter().zip(&blocks) {
                        for p in *start..start + len {
                            for (slot, &i) in args.iter_mut().zip(&idx) {
                                *slot = all[i].values[p];
                            }
                            values.push(s.apply(fi, &args));
                        }
                    }
                    let term = Term::App(name.clone(), idx.iter().map(|&i| all[i].term.clone()).collect());
                    push(&mut all, Valued { term, depth: d, values });
                    if all.len() >= MAX_CANDIDATES {
                        break 'tuples;
                    }
                }
                let mut pos = *arity;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < existing {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
    }
    Ok(all)
}

/// Witness for a positive alternating sentence: disjunct `conjunct`
/// (1-based) instantiated with `y_j := terms[j-1]` and `z_j := x(j+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveWitness {
    pub conjunct: usize,
    pub terms: Vec<Term>,
    pub instance: Formula,
    /// Products of at most two input structures on which `instance` was
    /// re-checked.
    pub products_checked: usize,
}

/// Looks for `j0` and terms `t_j(x1..xj)` of depth at most `depth` such that
/// `alpha_j0(t1, x2, .., tk, x(k+1))` holds under all assignments in every
/// structure. A witness is re-checked on all products of at most two of the
/// structures with at most [`MAX_PRODUCT_SIZE`] elements.
pub fn corollary3_search(
    structures: &[FiniteStructure],
    target: &AlternatingPrenex,
    depth: usize,
) -> Result<Option<PositiveWitness>, SearchError> {
    let params = target.params();
    if !params.is_empty() {
        let names: Vec<String> = params.iter().map(|v| v.to_string()).collect();
        return Err(SearchError::HasParameters(names.join(", ")));
    }
    let conjuncts = target.dnf()?;
    search_conjuncts(structures, target.ys(), target.zs(), &conjuncts, depth)
}

/// Same search on an explicit list of conjunctions over `ys`/`zs`.
pub fn search_conjuncts(
    structures: &[FiniteStructure],
    ys: &[Var],
    zs: &[Var],
    conjuncts: &[Conjunction],
    depth: usize,
) -> Result<Option<PositiveWitness>, SearchError> {
    let sig = common_signature(structures)?;
    let k = ys.len();
    let candidates: Vec<Vec<Term>> = (1..=k).map(|j| distinct_terms(structures, j, depth)).collect::<Result<_, _>>()?;
    let formulas: Vec<Formula> = conjuncts.iter().map(Conjunction::to_formula).collect();
    if candidates.iter().any(Vec::is_empty) || formulas.is_empty() {
        return Ok(None);
    }
    let mut idx = vec![0usize; k];
    loop {
        let mut map = BTreeMap::new();
        for j in 0..k {
            map.insert(ys[j], candidates[j][idx[j]].clone());
            map.insert(zs[j], Term::var(j as u32 + 2));
        }
        for (ci, alpha) in formulas.iter().enumerate() {
            let instance = alpha.substitute(&map).expect("conjunctions are open");
            let ev = Evaluator::new(sig, &instance)?;
            if structures.iter().all(|s| ev.holds_universally(s)) {
                let products_checked = check_products(structures, &ev)?;
                let terms = idx.iter().enumerate().map(|(j, &i)| candidates[j][i].clone()).collect();
                return Ok(Some(PositiveWitness { conjunct: ci + 1, terms, instance, products_checked }));
            }
        }
        // odometer, last position fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn check_products(structures: &[FiniteStructure], ev: &Evaluator) -> Result<usize, SearchError> {
    let mut checked = 0;
    for i in 0..structures.len() {
        for j in i..structures.len() {
            if structures[i].size() * structures[j].size() > MAX_PRODUCT_SIZE {
                continue;
            }
            let p =
                product(&[structures[i].clone(), structures[j].clone()]).map_err(|_| SearchError::SignatureMismatch)?;
            if !ev.holds_universally(p.structure()) {
                return Err(SearchError::ProductCheckFailed);
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Witness for a positive prenex sentence of arbitrary prefix: each
/// quantified variable of the input is bound to a term (existentials) or to
/// a variable (universals, renumbered left to right from `x1`, or from `x2`
/// when a term uses the spare variable `x1`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixWitness {
    pub conjunct: usize,
    pub bindings: Vec<(Var, Term)>,
    pub instance: Formula,
}

/// Positive sentences whose prefix is not alternating: pad with
/// [`to_alternating`], search, then drop the padding positions.
pub fn positive_prefix_search(
    structures: &[FiniteStructure],
    sentence: &Formula,
    depth: usize,
) -> Result<Option<PrefixWitness>, SearchError> {
    if !sentence.is_positive() {
        return Err(SearchError::NotPositive);
    }
    let alt = to_alternating(sentence);
    let Some(found) = corollary3_search(structures, &alt, depth)? else { return Ok(None) };
    // x1 is the spare variable of t1, x(j+1) stands for z_j. Universals
    // start at x2 when a kept term uses the spare variable.
    let spare_used = (0..alt.k()).any(|j| !alt.is_dummy(alt.ys()[j]) && found.terms[j].contains_var(Var::new(1)));
    let offset = spare_used as u32;
    let mut rank = 0;
    let mut sigma = BTreeMap::from([(Var::new(1), Term::var(1))]);
    for (j, z) in alt.zs().iter().enumerate() {
        let target = if alt.is_dummy(*z) {
            1
        } else {
            rank += 1;
            rank + offset
        };
        sigma.insert(Var::new(j as u32 + 2), Term::var(target));
    }
    let mut bindings = Vec::new();
    rank = 0;
    for j in 0..alt.k() {
        let (y, z) = (alt.ys()[j], alt.zs()[j]);
        if !alt.is_dummy(y) {
            bindings.push((y, found.terms[j].substitute(&sigma)));
        }
        if !alt.is_dummy(z) {
            rank += 1;
            bindings.push((z, Term::var(rank + offset)));
        }
    }
    let instance = found.instance.substitute(&sigma).expect("instance is open");
    let sig = common_signature(structures)?;
    let ev = Evaluator::new(sig, &instance)?;
    debug_assert!(structures.iter().all(|s| ev.holds_universally(s)));
    Ok(Some(PrefixWitness { conjunct: found.conjunct, bindings, instance }))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefinabilityError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("defining formula is not positive")]
    NotPositive,
    #[error("{0} is free in the defining formula but is neither an input nor the output")]
    StrayVariable(Var),
    #[error("not functional in structure #{structure}: inputs {inputs:?} relate to both {first} and {second}")]
    NotFunctional { structure: usize, inputs: Vec<usize>, first: usize, second: usize },
    #[error("not total in structure #{structure}: inputs {inputs:?} relate to no output")]
    NotTotal { structure: usize, inputs: Vec<usize> },
}

/// The function family a formula `phi(v1..vn, w)` defines on each structure.
#[derive(Debug, Clone)]
pub struct DefinedFunctionFamily {
    phi: Formula,
    inputs: Vec<Var>,
    output: Var,
    /// Per structure, `f(a)` for every input tuple `a` in odometer order.
    tables: Vec<Vec<usize>>,
}

impl DefinedFunctionFamily {
    /// Computes the induced tables, checking that every input tuple has
    /// exactly one output.
    pub fn new(
        structures: &[FiniteStructure],
        phi: &Formula,
        inputs: &[Var],
        output: Var,
    ) -> Result<Self, DefinabilityError> {
        let sig = common_signature(structures)?;
        if !phi.is_positive() {
            return Err(DefinabilityError::NotPositive);
        }
        if let Some(stray) = phi.free_vars().into_iter().find(|v| *v != output && !inputs.contains(v)) {
            return Err(DefinabilityError::StrayVariable(stray));
        }
        let ev = Evaluator::new(sig, phi).map_err(SearchError::from)?;
        let order: Vec<Var> = ev.free_vars().to_vec();
        let n = inputs.len();
        let mut tables = Vec::new();
        for (si, s) in structures.iter().enumerate() {
            let mut table = Vec::new();
            for p in 0..s.size().pow(n as u32) {
                let a: Vec<usize> = (0..n).map(|i| p / s.size().pow((n - 1 - i) as u32) % s.size()).collect();
                let mut found: Option<usize> = None;
                for b in 0..s.size() {
                    let values: Vec<usize> = order
                        .iter()
                        .map(|v| if *v == output { b } else { a[inputs.iter().position(|u| u == v).unwrap()] })
                        .collect();
                    if ev.eval_values(s, &values) {
                        if let Some(first) = found {
                            return Err(DefinabilityError::NotFunctional {
                                structure: si,
                                inputs: a,
                                first,
                                second: b,
                            });
                        }
                        found = Some(b);
                    }
                }
                match found {
                    Some(b) => table.push(b),
                    None => return Err(DefinabilityError::NotTotal { structure: si, inputs: a }),
                }
            }
            tables.push(table);
        }
        Ok(DefinedFunctionFamily { phi: phi.clone(), inputs: inputs.to_vec(), output, tables })
    }

    pub fn formula(&self) -> &Formula {
        &self.phi
    }

    /// `f_A(a)` on structure `structure`; `a` indexed in odometer order.
    pub fn value(&self, structure: usize, inputs_index: usize) -> usize {
        self.tables[structure][inputs_index]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    /// `phi(x1..xn, t)`: the defining formula with the inputs renamed to
    /// `x1..xn` and the output replaced by `t`.
    pub fn instance(&self, t: &Term) -> Formula {
        let avoid = (1..=self.inputs.len() as u32).map(Var::new).chain(t.vars()).collect();
        let phi = self.phi.rename_bound(&avoid);
        let mut map: BTreeMap<Var, Term> =
            self.inputs.iter().enumerate().map(|(i, v)| (*v, Term::var(i as u32 + 1))).collect();
        map.insert(self.output, t.clone());
        phi.substitute(&map).expect("binders renamed apart from the image terms")
    }
}

/// Looks for a term `t(x1..xn)` of depth at most `depth` with
/// `f_A(a) = t^A(a)` on every structure and every input tuple.
pub fn corollary5_search(
    structures: &[FiniteStructure],
    phi: &Formula,
    inputs: &[Var],
    output: Var,
    depth: usize,
) -> Result<Option<Term>, DefinabilityError> {
    let family = DefinedFunctionFamily::new(structures, phi, inputs, output)?;
    let wanted: Vec<usize> = family.tables.concat();
    let found =
        enumerate_valued(structures, inputs.len(), depth)?.into_iter().find(|v| v.values == wanted).map(|v| v.term);
    if let Some(t) = &found {
        let sig = common_signature(structures)?;
        let ev = Evaluator::new(sig, &family.instance(t)).map_err(SearchError::from)?;
        debug_assert!(structures.iter().all(|s| ev.holds_universally(s)));
    }
    Ok(found)
}
