//! Sound functions on finite sets of term tuples.
//!
//! A map `kappa` from the nonempty prefixes of a tuple set is sound when it is
//! (i) injective, (ii) strictly increasing along each prefix chain, and
//! (iii) `m < kappa(t1..tj)` whenever `x_m` occurs in `tj`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::syntax::{parse_terms, Signature, Term};

/// Values a sound function may take.
pub trait KappaValue: Ord + Clone + fmt::Debug + fmt::Display + From<u32> + FromStr + Send + Sync {}

impl<N: Ord + Clone + fmt::Debug + fmt::Display + From<u32> + FromStr + Send + Sync> KappaValue for N {}

/// A finite map from nonempty tuple prefixes of length at most `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuplePrefixMap<N = u64> {
    k: usize,
    entries: BTreeMap<Vec<Term>, N>,
}

impl<N: KappaValue> TuplePrefixMap<N> {
    pub fn new(k: usize) -> Self {
        TuplePrefixMap { k, entries: BTreeMap::new() }
    }

    /// The map `prefix -> value(prefix)` on the prefix closure of `tuples`.
    pub fn from_fn(k: usize, tuples: &[Vec<Term>], mut value: impl FnMut(&[Term]) -> N) -> Self {
        let mut map = TuplePrefixMap::new(k);
        for p in prefix_closure(tuples) {
            let v = value(&p);
            map.insert(p, v);
        }
        map
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn insert(&mut self, prefix: Vec<Term>, value: N) -> Option<N> {
        self.entries.insert(prefix, value)
    }

    pub fn get(&self, prefix: &[Term]) -> Option<&N> {
        self.entries.get(prefix)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Term>, &N)> {
        self.entries.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Vec<Term>> {
        self.entries.keys()
    }

    /// Every value set, in increasing order without repeats.
    pub fn image(&self) -> BTreeSet<N> {
        self.entries.values().cloned().collect()
    }

    /// One `kappa <j> <t1> .. <tj> -> <n>` line per prefix, shortest first.
    pub fn to_lines(&self) -> Vec<String> {
        let mut keys: Vec<&Vec<Term>> = self.entries.keys().collect();
        keys.sort_by_key(|p| p.len());
        keys.into_iter()
            .map(|p| {
                let terms: Vec<String> = p.iter().map(Term::to_string).collect();
                format!("kappa {} {} -> {}", p.len(), terms.join(" "), self.entries[p])
            })
            .collect()
    }
}

/// Reads one `kappa` line; returns the prefix and its value.
pub fn parse_kappa_line<N: KappaValue>(line: &str, sig: &Signature) -> Result<(Vec<Term>, N), String> {
    let rest = line.trim().strip_prefix("kappa").ok_or("expected `kappa`")?;
    let (lhs, value) = rest.rsplit_once("->").ok_or("expected `->`")?;
    let lhs = lhs.trim();
    let (len, terms) = lhs.split_once(char::is_whitespace).ok_or("expected prefix length and terms")?;
    let len: usize = len.parse().map_err(|_| format!("bad prefix length `{len}`"))?;
    let prefix = parse_terms(terms, sig).map_err(|e| e.to_string())?;
    if prefix.len() != len {
        return Err(format!("prefix has {} terms, header says {len}", prefix.len()));
    }
    let value = value.trim().parse::<N>().map_err(|_| format!("bad value `{}`", value.trim()))?;
    Ok((prefix, value))
}

/// All nonempty prefixes of `tuples`: shorter first, then in order of first
/// occurrence, without repeats.
pub fn prefix_closure(tuples: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let k = tuples.iter().map(Vec::len).max().unwrap_or(0);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for j in 1..=k {
        for t in tuples.iter().filter(|t| t.len() >= j) {
            if seen.insert(&t[..j]) {
                out.push(t[..j].to_vec());
            }
        }
    }
    out
}

/// The three defining conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Injective,
    Increasing,
    VariableBound,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Injective => "(i)",
            Condition::Increasing => "(ii)",
            Condition::VariableBound => "(iii)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation<N> {
    Collision { first: Vec<Term>, second: Vec<Term>, value: N },
    NotIncreasing { shorter: Vec<Term>, longer: Vec<Term>, values: (N, N) },
    VariableTooLarge { prefix: Vec<Term>, var: u32, value: N },
}

impl<N> Violation<N> {
    pub fn condition(&self) -> Condition {
        match self {
            Violation::Collision { .. } => Condition::Injective,
            Violation::NotIncreasing { .. } => Condition::Increasing,
            Violation::VariableTooLarge { .. } => Condition::VariableBound,
        }
    }
}

fn show(prefix: &[Term]) -> String {
    let parts: Vec<String> = prefix.iter().map(Term::to_string).collect();
    format!("({})", parts.join(", "))
}

impl<N: fmt::Display> fmt::Display for Violation<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.condition())?;
        match self {
            Violation::Collision { first, second, value } => {
                write!(f, "{} and {} both map to {value}", show(first), show(second))
            }
            Violation::NotIncreasing { shorter, longer, values: (a, b) } => {
                write!(f, "{} -> {a} is not below {} -> {b}", show(shorter), show(longer))
            }
            Violation::VariableTooLarge { prefix, var, value } => {
                write!(f, "x{var} occurs in the last term of {} but {var} >= {value}", show(prefix))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SoundnessError<N: fmt::Debug + fmt::Display> {
    #[error("tuple of length {len} in a set of {k}-tuples")]
    TupleLength { len: usize, k: usize },
    #[error("domain differs from the prefix set: {missing} missing, {extra} extra")]
    DomainMismatch { missing: usize, extra: usize },
    #[error("not sound: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Violations(Vec<Violation<N>>),
}

impl<N: fmt::Debug + fmt::Display> SoundnessError<N> {
    /// Violated conditions, in report order.
    pub fn conditions(&self) -> Vec<Condition> {
        match self {
            SoundnessError::Violations(vs) => vs.iter().map(Violation::condition).collect(),
            _ => Vec::new(),
        }
    }
}

/// A prefix map checked to be sound for its tuple set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundFunction<N = u64> {
    map: TuplePrefixMap<N>,
}

impl<N: KappaValue> SoundFunction<N> {
    pub fn map(&self) -> &TuplePrefixMap<N> {
        &self.map
    }

    pub fn into_map(self) -> TuplePrefixMap<N> {
        self.map
    }

    pub fn get(&self, prefix: &[Term]) -> Option<&N> {
        self.map.get(prefix)
    }

    pub fn k(&self) -> usize {
        self.map.k
    }

    pub fn image(&self) -> BTreeSet<N> {
        self.map.image()
    }
}

impl<N: KappaValue> std::ops::Index<&[Term]> for SoundFunction<N> {
    type Output = N;

    fn index(&self, prefix: &[Term]) -> &N {
        self.map.get(prefix).expect("prefix outside the domain")
    }
}

/// Certifies `map` as a sound function for `tuples`, or reports every
/// violated condition with witnessing prefixes.
pub fn validate_sound<N: KappaValue>(
    map: TuplePrefixMap<N>,
    tuples: &[Vec<Term>],
) -> Result<SoundFunction<N>, SoundnessError<N>> {
    if let Some(t) = tuples.iter().find(|t| t.len() != map.k) {
        return Err(SoundnessError::TupleLength { len: t.len(), k: map.k });
    }
    let closure = prefix_closure(tuples);
    let wanted: BTreeSet<&Vec<Term>> = closure.iter().collect();
    let missing = wanted.iter().filter(|p| !map.entries.contains_key(**p)).count();
    let extra = map.entries.keys().filter(|p| !wanted.contains(p)).count();
    if missing + extra > 0 {
        return Err(SoundnessError::DomainMismatch { missing, extra });
    }
    let mut violations = Vec::new();
    let mut owner: BTreeMap<&N, &Vec<Term>> = BTreeMap::new();
    for p in &closure {
        let value = &map.entries[p];
        if let Some(first) = owner.get(value) {
            violations.push(Violation::Collision { first: (*first).clone(), second: p.clone(), value: value.clone() });
        } else {
            owner.insert(value, p);
        }
        if p.len() > 1 {
            let parent = &map.entries[&p[..p.len() - 1]];
            if parent >= value {
                violations.push(Violation::NotIncreasing {
                    shorter: p[..p.len() - 1].to_vec(),
                    longer: p.clone(),
                    values: (parent.clone(), value.clone()),
                });
            }
        }
        let last = p.last().expect("prefixes are nonempty");
        for v in last.vars() {
            if N::from(v.index()) >= *value {
                violations.push(Violation::VariableTooLarge {
                    prefix: p.clone(),
                    var: v.index(),
                    value: value.clone(),
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(SoundFunction { map })
    } else {
        Err(SoundnessError::Violations(violations))
    }
}

/// Greedy sound function: prefixes by length, then order of first
/// occurrence, each getting the least value above every value used so far
/// and every variable index in its last term. Values start at 2.
pub fn compact_sound(tuples: &[Vec<Term>]) -> SoundFunction<u64> {
    let k = tuples.first().map_or(0, Vec::len);
    let mut used = 1u64;
    let map = TuplePrefixMap::from_fn(k, tuples, |p| {
        let bound = p.last().map_or(0, Term::max_var_index) as u64;
        used = (used + 1).max(bound + 1);
        used
    });
    validate_sound(map, tuples).expect("greedy assignment is sound")
}

fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GodelError {
    #[error("function symbol `{0}` is not in the signature")]
    UnknownSymbol(String),
    #[error("code exponent exceeds 2^32")]
    TooLarge,
}

/// Injective code of a term with `m < beta(t)` whenever `x_m` occurs in `t`.
/// Variables are `pair(0, m)`; applications are `pair(1 + symbol index,
/// list code of the arguments)`, where the empty list is 0 and `a :: rest`
/// is `1 + pair(code a, code rest)`.
pub fn godel_beta(t: &Term, sig: &Signature) -> Result<BigUint, GodelError> {
    match t {
        Term::Var(v) => Ok(pair(&BigUint::ZERO, &BigUint::from(v.index()))),
        Term::App(f, args) => {
            let index = sig.function_index(f).ok_or_else(|| GodelError::UnknownSymbol(f.to_string()))?;
            let mut list = BigUint::ZERO;
            for a in args.iter().rev() {
                list = pair(&godel_beta(a, sig)?, &list) + 1u32;
            }
            Ok(pair(&BigUint::from(index + 1), &list))
        }
    }
}

/// The first `n` primes.
pub fn first_primes(n: usize) -> Vec<u32> {
    let mut primes: Vec<u32> = Vec::with_capacity(n);
    let mut c = 2u32;
    while primes.len() < n {
        if primes.iter().take_while(|p| *p * *p <= c).all(|p| !c.is_multiple_of(*p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// `2^beta(t1) * 3^beta(t2) * .. * p_j^beta(tj)`.
pub fn godel_kappa(prefix: &[Term], sig: &Signature) -> Result<BigUint, GodelError> {
    let mut out = BigUint::from(1u32);
    for (p, t) in first_primes(prefix.len()).into_iter().zip(prefix) {
        let e = u32::try_from(godel_beta(t, sig)?).map_err(|_| GodelError::TooLarge)?;
        out *= BigUint::from(p).pow(e);
    }
    Ok(out)
}
