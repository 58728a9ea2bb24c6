//! Search for Herbrand certificates of an alternating sentence over a
//! universal theory.
//!
//! Stages `(N, depth, instance depth)` are visited in order of their sum.
//! A stage tries every set of `N` tuples whose deepest term has exactly the
//! stage depth, with every sound function onto `2..=D+1` (where `D` is the
//! number of prefixes) and the axiom instances over a bounded term universe.
//! The ground solver decides each candidate.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::expansion::{
    check_bounds, check_trace, derive_lemma1, normalize_certificate, AxiomInstance, BoundsError, CertificateError,
    DerivationTrace, HerbrandCertificate, NormalizedCertificate, TraceError,
};
use crate::ground_solver::{entails, GroundProblem};
use crate::normal_forms::{split_prefix, to_prenex, AlternatingPrenex};
use crate::sound_fn::{prefix_closure, validate_sound, SoundnessError, TuplePrefixMap};
use crate::syntax::{parse_formula, strip_comment, Formula, Quantifier, Signature, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("axiom {index} is not universal: {axiom}")]
    NotUniversal { index: usize, axiom: String },
    #[error("theory line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance of axiom {axiom}: {msg}")]
    BadInstance { axiom: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
struct Axiom {
    closed: Formula,
    vars: Vec<Var>,
    matrix: Formula,
}

/// Axioms `forall x1 .. xn alpha` with `alpha` open. Open input formulas are
/// closed universally.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UniversalTheory {
    axioms: Vec<Axiom>,
}

impl UniversalTheory {
    pub fn new(axioms: Vec<Formula>) -> Result<Self, TheoryError> {
        let mut out = Vec::new();
        for (index, f) in axioms.into_iter().enumerate() {
            let closed = f.universal_closure();
            let prenex = to_prenex(&closed);
            let (prefix, matrix) = split_prefix(&prenex);
            if prefix.iter().any(|(q, _)| *q != Quantifier::Forall) {
                return Err(TheoryError::NotUniversal { index, axiom: closed.to_string() });
            }
            let mut vars = Vec::new();
            for (_, v) in prefix {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            out.push(Axiom { closed, vars, matrix: matrix.clone() });
        }
        Ok(UniversalTheory { axioms: out })
    }

    /// One axiom per nonempty line; `#` starts a comment.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self, TheoryError> {
        let mut axioms = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let f = parse_formula(line, sig).map_err(|e| TheoryError::Parse { line: no + 1, msg: e.to_string() })?;
            axioms.push(f);
        }
        UniversalTheory::new(axioms)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Formula> {
        self.axioms.iter().map(|a| &a.closed)
    }

    /// Number of universal variables of axiom `i`.
    pub fn arity(&self, i: usize) -> usize {
        self.axioms[i].vars.len()
    }

    /// The open formula an instance denotes.
    pub fn instance(&self, a: &AxiomInstance) -> Result<Formula, TheoryError> {
        let axiom = self
            .axioms
            .get(a.axiom)
            .ok_or_else(|| TheoryError::BadInstance { axiom: a.axiom, msg: "no such axiom".into() })?;
        if axiom.vars.len() != a.terms.len() {
            return Err(TheoryError::BadInstance {
                axiom: a.axiom,
                msg: format!("expected {} terms, found {}", axiom.vars.len(), a.terms.len()),
            });
        }
        let map: BTreeMap<Var, Term> = axiom.vars.iter().copied().zip(a.terms.iter().cloned()).collect();
        Ok(axiom.matrix.substitute(&map).expect("axiom matrices are open"))
    }
}

/// Limits for [`prove`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_n: usize,
    pub max_depth: usize,
    pub max_instance_depth: usize,
    /// Cap on axiom instances in one ground problem.
    pub max_instances: usize,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_n: 4,
            max_depth: 3,
            max_instance_depth: 1,
            max_instances: 64,
            time_limit: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stage {
    pub n: usize,
    pub depth: usize,
    pub instance_depth: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub stages_completed: usize,
    pub last_stage: Option<Stage>,
    pub tuple_sets: u64,
    pub kappa_candidates: u64,
    pub ground_checks: u64,
    pub timed_out: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProverResult {
    Proved(NormalizedCertificate, DerivationTrace),
    Unknown(SearchStats),
}

impl ProverResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProverResult::Proved(..))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("target has free variables: {0}")]
    Parameters(String),
    #[error("could not start worker threads: {0}")]
    Threads(String),
}

/// Function symbols of the given formulas in order of first occurrence.
pub fn function_signature<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Signature {
    let mut sig = Signature::new();
    let mut seen = HashSet::new();
    fn visit(t: &Term, sig: &mut Signature, seen: &mut HashSet<Symbol>) {
        if let Term::App(f, args) = t {
            for a in args {
                visit(a, sig, seen);
            }
            if seen.insert(f.clone()) {
                sig.add_function(f, args.len()).expect("names come from parsed formulas");
            }
        }
    }
    for f in formulas {
        for atom in f.atoms() {
            for t in atom.terms() {
                visit(t, &mut sig, &mut seen);
            }
        }
    }
    sig
}

/// Terms over `x1..x_vars` of depth at most `depth`, grouped by size.
struct TermsBySize {
    funcs: Vec<(Symbol, usize)>,
    vars: u32,
    depth: usize,
    /// `(term, depth)` for each size, index 0 unused
    by_size: Vec<Vec<(Term, usize)>>,
}

impl TermsBySize {
    fn new(sig: &Signature, vars: u32, depth: usize) -> Self {
        TermsBySize { funcs: sig.functions().to_vec(), vars, depth, by_size: vec![Vec::new()] }
    }

    fn max_size(&self) -> usize {
        let arity = self.funcs.iter().map(|f| f.1).max().unwrap_or(0);
        (0..self.depth).fold(1, |s, _| 1 + arity * s)
    }

    fn size(&mut self, s: usize) -> &[(Term, usize)] {
        while self.by_size.len() <= s {
            let n = self.by_size.len();
            let mut level = Vec::new();
            if n == 1 {
                level.extend((1..=self.vars).map(|i| (Term::var(i), 0)));
                for (f, a) in &self.funcs {
                    if *a == 0 {
                        level.push((Term::App(f.clone(), vec![]), 0));
                    }
                }
            } else {
                for (f, a) in self.funcs.clone() {
                    if a == 0 || a > n - 1 {
                        continue;
                    }
                    for parts in compositions(n - 1, a) {
                        let lists: Vec<&Vec<(Term, usize)>> = parts.iter().map(|&p| &self.by_size[p]).collect();
                        for_each_product(&lists, &mut |args| {
                            let d = 1 + args.iter().map(|(_, d)| *d).max().unwrap_or(0);
                            if d <= self.depth {
                                level.push((Term::App(f.clone(), args.iter().map(|(t, _)| t.clone()).collect()), d));
                            }
                        });
                    }
                }
            }
            self.by_size.push(level);
        }
        &self.by_size[s]
    }
}

/// Ways of writing `total` as `parts` positive summands, lexicographically.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn for_each_product<'a, T>(lists: &[&'a Vec<T>], visit: &mut impl FnMut(&[&'a T])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut current: Vec<&T> = lists.iter().map(|l| &l[0]).collect();
    loop {
        visit(&current);
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                current[pos] = &lists[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            current[pos] = &lists[pos][0];
        }
    }
}

/// `k`-tuples of terms over `x1..x_kN` of depth at most `depth`, by total
/// size; within a size, by the sizes of the components and then by the
/// order of the components. Variables precede constants, which precede
/// applications, with symbols in signature order.
pub struct TupleStream {
    terms: TermsBySize,
    k: usize,
    size: usize,
    max_total: usize,
    buffer: std::vec::IntoIter<(Vec<Term>, usize)>,
}

impl TupleStream {
    fn with_depths(&mut self) -> Option<(Vec<Term>, usize)> {
        loop {
            if let Some(next) = self.buffer.next() {
                return Some(next);
            }
            if self.size > self.max_total || self.k == 0 {
                return None;
            }
            let s = self.size;
            self.size += 1;
            let mut level = Vec::new();
            for parts in compositions(s, self.k) {
                for &p in &parts {
                    self.terms.size(p);
                }
                let lists: Vec<&Vec<(Term, usize)>> = parts.iter().map(|&p| &self.terms.by_size[p]).collect();
                for_each_product(&lists, &mut |row| {
                    let d = row.iter().map(|(_, d)| *d).max().unwrap_or(0);
                    level.push((row.iter().map(|(t, _)| t.clone()).collect(), d));
                });
            }
            self.buffer = level.into_iter();
        }
    }
}

impl Iterator for TupleStream {
    type Item = Vec<Term>;

    fn next(&mut self) -> Option<Vec<Term>> {
        self.with_depths().map(|(t, _)| t)
    }
}

pub fn enumerate_tuples(sig: &Signature, k: usize, n: usize, depth: usize) -> TupleStream {
    let terms = TermsBySize::new(sig, (k * n) as u32, depth);
    let max_total = k * terms.max_size();
    TupleStream { terms, k, size: k, max_total, buffer: Vec::new().into_iter() }
}

/// Every bijection from the prefixes onto `2..=D+1` that increases along
/// prefix chains and exceeds the variables of each last term. Stops early
/// when `visit` returns `true`.
fn sound_assignments(tuples: &[Vec<Term>], visit: &mut impl FnMut(&TuplePrefixMap<u64>) -> bool) -> bool {
    let prefixes = prefix_closure(tuples);
    let parent: Vec<Option<usize>> = prefixes
        .iter()
        .map(|p| (p.len() > 1).then(|| prefixes.iter().position(|q| q[..] == p[..p.len() - 1]).unwrap()))
        .collect();
    let bound: Vec<u64> = prefixes.iter().map(|p| p.last().unwrap().max_var_index() as u64).collect();
    let mut values: Vec<Option<u64>> = vec![None; prefixes.len()];

    fn go(
        next: u64,
        prefixes: &[Vec<Term>],
        parent: &[Option<usize>],
        bound: &[u64],
        values: &mut Vec<Option<u64>>,
        k: usize,
        visit: &mut impl FnMut(&TuplePrefixMap<u64>) -> bool,
    ) -> bool {
        if values.iter().all(Option::is_some) {
            let mut map = TuplePrefixMap::new(k);
            for (p, v) in prefixes.iter().zip(values.iter()) {
                map.insert(p.clone(), v.unwrap());
            }
            return visit(&map);
        }
        for i in 0..prefixes.len() {
            let ready = values[i].is_none() && parent[i].is_none_or(|p| values[p].is_some()) && bound[i] < next;
            if ready {
                values[i] = Some(next);
                if go(next + 1, prefixes, parent, bound, values, k, visit) {
                    return true;
                }
                values[i] = None;
            }
        }
        false
    }

    let k = tuples.first().map_or(0, Vec::len);
    go(2, &prefixes, &parent, &bound, &mut values, k, visit)
}

struct Context<'a> {
    theory: &'a UniversalTheory,
    target: &'a AlternatingPrenex,
    funcs: Signature,
    budget: &'a SearchBudget,
    kappa_candidates: AtomicU64,
    ground_checks: AtomicU64,
}

impl Context<'_> {
    /// Axiom instances over the variables of `goal` and the subterms of
    /// `goal`, up to the instance depth.
    fn instances(&self, goal: &Formula, depth: usize) -> Vec<AxiomInstance> {
        let mut universe: Vec<Term> = Vec::new();
        let mut seen = HashSet::new();
        let vars: BTreeSet<Var> = goal.free_vars();
        let var_list: Vec<Term> =
            if vars.is_empty() { vec![Term::var(1)] } else { vars.iter().map(|v| Term::var(v.index())).collect() };
        // terms over the goal's variables, smallest first
        let mut by_depth: Vec<Term> = var_list.clone();
        by_depth.extend(self.funcs.functions().iter().filter(|f| f.1 == 0).map(|f| Term::App(f.0.clone(), vec![])));
        for _ in 0..depth {
            let mut next = by_depth.clone();
            for (f, a) in self.funcs.functions() {
                if *a == 0 {
                    continue;
                }
                let lists: Vec<&Vec<Term>> = (0..*a).map(|_| &by_depth).collect();
                for_each_product(&lists, &mut |args| {
                    next.push(Term::App(f.clone(), args.iter().map(|t| (*t).clone()).collect()));
                });
            }
            by_depth = next;
        }
        let mut sub = Vec::new();
        for atom in goal.atoms() {
            for t in atom.terms() {
                t.subterms(&mut sub);
            }
        }
        for t in by_depth.into_iter().chain(sub.into_iter().cloned()) {
            if seen.insert(t.clone()) {
                universe.push(t);
            }
        }
        let mut out = Vec::new();
        for axiom in 0..self.theory.len() {
            let arity = self.theory.arity(axiom);
            let lists: Vec<&Vec<Term>> = (0..arity).map(|_| &universe).collect();
            if arity == 0 {
                out.push(AxiomInstance { axiom, terms: vec![] });
                continue;
            }
            for_each_product(&lists, &mut |row| {
                if out.len() < self.budget.max_instances {
                    out.push(AxiomInstance { axiom, terms: row.iter().map(|t| (*t).clone()).collect() });
                }
            });
        }
        out.truncate(self.budget.max_instances);
        out
    }

    fn entailed(&self, instances: &[AxiomInstance], goal: &Formula) -> bool {
        self.ground_checks.fetch_add(1, Ordering::Relaxed);
        let hyps = instances.iter().map(|a| self.theory.instance(a).expect("generated instances fit")).collect();
        entails(&GroundProblem::new(hyps, goal.clone()))
    }

    /// Tries every sound function for `tuples`.
    fn try_tuples(
        &self,
        tuples: &[Vec<Term>],
        instance_depth: usize,
    ) -> Option<(TuplePrefixMap<u64>, Vec<AxiomInstance>)> {
        let mut found = None;
        sound_assignments(tuples, &mut |kappa| {
            self.kappa_candidates.fetch_add(1, Ordering::Relaxed);
            let cert = HerbrandCertificate::new(self.target.clone(), tuples.to_vec(), kappa.clone())
                .expect("enumerated assignments are sound");
            let goal = cert.instantiate_all();
            let mut instances = if self.theory.is_empty() { Vec::new() } else { self.instances(&goal, instance_depth) };
            if !self.entailed(&instances, &goal) {
                return false;
            }
            let mut i = 0;
            while i < instances.len() && instances.len() <= 64 {
                let mut fewer = instances.clone();
                fewer.remove(i);
                if self.entailed(&fewer, &goal) {
                    instances = fewer;
                } else {
                    i += 1;
                }
            }
            found = Some((kappa.clone(), instances));
            true
        });
        found
    }
}

/// All `size`-subsets of `0..=last` containing `last`, increasing.
fn subsets_with_last(last: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    let choose = size - 1;
    let mut idx: Vec<usize> = (0..choose).collect();
    let mut done = choose > last;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut out = idx.clone();
        out.push(last);
        // advance to the next combination of `choose` out of `0..last`
        let mut pos = choose;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            if idx[pos] < last - choose + pos {
                idx[pos] += 1;
                for j in pos + 1..choose {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

fn stages(budget: &SearchBudget, with_theory: bool) -> Vec<Stage> {
    let max_a = if with_theory { budget.max_instance_depth } else { 0 };
    let mut out = Vec::new();
    for n in 1..=budget.max_n {
        for depth in 0..=budget.max_depth {
            for instance_depth in 0..=max_a {
                out.push(Stage { n, depth, instance_depth });
            }
        }
    }
    out.sort_by_key(|s| (s.n + s.depth + s.instance_depth, s.n, s.depth));
    out
}

const BATCH: usize = 64;

/// Searches with the global thread pool.
pub fn prove(
    theory: &UniversalTheory,
    target: &AlternatingPrenex,
    budget: &SearchBudget,
) -> Result<ProverResult, ProveError> {
    search(theory, target, budget)
}

/// Searches on a dedicated pool of `jobs` worker threads.
pub fn prove_with_jobs(
    theory: &UniversalTheory,
    target: &AlternatingPrenex,
    budget: &SearchBudget,
    jobs: usize,
) -> Result<ProverResult, ProveError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ProveError::Threads(e.to_string()))?;
    pool.install(|| search(theory, target, budget))
}

fn search(
    theory: &UniversalTheory,
    target: &AlternatingPrenex,
    budget: &SearchBudget,
) -> Result<ProverResult, ProveError> {
    let params = target.params();
    if !params.is_empty() {
        let names: Vec<String> = params.iter().map(Var::to_string).collect();
        return Err(ProveError::Parameters(names.join(", ")));
    }
    let start = Instant::now();
    let deadline = start + budget.time_limit;
    let funcs = function_signature(std::iter::once(target.matrix()).chain(theory.axioms()));
    let ctx = Context {
        theory,
        target,
        funcs,
        budget,
        kappa_candidates: AtomicU64::new(0),
        ground_checks: AtomicU64::new(0),
    };
    let k = target.k();
    let mut stats = SearchStats::default();
    for stage in stages(budget, !theory.is_empty()) {
        stats.last_stage = Some(stage);
        let mut stream = enumerate_tuples(&ctx.funcs, k, stage.n, stage.depth);
        let mut seen: Vec<(Vec<Term>, usize)> = Vec::new();
        let mut pending: Vec<Vec<usize>> = Vec::new();
        let mut exhausted = false;
        loop {
            while pending.len() < BATCH && !exhausted {
                match stream.with_depths() {
                    Some(t) => {
                        seen.push(t);
                        let last = seen.len() - 1;
                        for set in subsets_with_last(last, stage.n) {
                            if set.iter().map(|&i| seen[i].1).max() != Some(stage.depth) {
                                continue;
                            }
                            let tuples: Vec<Vec<Term>> = set.iter().map(|&i| seen[i].0.clone()).collect();
                            let d = prefix_closure(&tuples).len() as u32;
                            if tuples.iter().flatten().all(|t| t.max_var_index() <= d) {
                                pending.push(set);
                            }
                        }
                    }
                    None => exhausted = true,
                }
            }
            if pending.is_empty() {
                break;
            }
            if Instant::now() >= deadline {
                stats.timed_out = true;
                break;
            }
            let batch = std::mem::take(&mut pending);
            stats.tuple_sets += batch.len() as u64;
            let hit = batch.par_iter().find_map_first(|set| {
                let tuples: Vec<Vec<Term>> = set.iter().map(|&i| seen[i].0.clone()).collect();
                ctx.try_tuples(&tuples, stage.instance_depth).map(|(kappa, inst)| (tuples, kappa, inst))
            });
            if let Some((tuples, kappa, instances)) = hit {
                let cert = HerbrandCertificate::new(target.clone(), tuples, kappa)
                    .expect("sound by construction")
                    .with_instances(instances);
                let normalized = normalize_certificate(&cert);
                let trace = derive_lemma1(&normalized);
                debug_assert_eq!(
                    verify_certificate(theory, &normalized, Some(&trace)),
                    Ok(Verified { trace_checked: true })
                );
                return Ok(ProverResult::Proved(normalized, trace));
            }
        }
        if stats.timed_out {
            break;
        }
        stats.stages_completed += 1;
    }
    stats.kappa_candidates = ctx.kappa_candidates.load(Ordering::Relaxed);
    stats.ground_checks = ctx.ground_checks.load(Ordering::Relaxed);
    stats.elapsed = start.elapsed();
    Ok(ProverResult::Unknown(stats))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Kappa(#[from] SoundnessError<u64>),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Instance(#[from] TheoryError),
    #[error("ground entailment fails")]
    Entailment,
    #[error("trace rejected: {0}")]
    Trace(#[from] TraceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verified {
    pub trace_checked: bool,
}

/// Re-checks soundness, the bounds, ground entailment from the recorded
/// instances, and the trace when one is given.
pub fn verify_certificate(
    theory: &UniversalTheory,
    cert: &HerbrandCertificate,
    trace: Option<&DerivationTrace>,
) -> Result<Verified, VerifyError> {
    validate_sound(cert.kappa().map().clone(), cert.tuples())?;
    check_bounds(cert)?;
    let hyps = cert.instances().iter().map(|a| theory.instance(a)).collect::<Result<Vec<_>, _>>()?;
    if !entails(&GroundProblem::new(hyps, cert.instantiate_all())) {
        return Err(VerifyError::Entailment);
    }
    if let Some(trace) = trace {
        check_trace(cert, trace)?;
    }
    Ok(Verified { trace_checked: trace.is_some() })
}
