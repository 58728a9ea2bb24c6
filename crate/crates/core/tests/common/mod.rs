#![allow(dead_code)]

use std::collections::BTreeMap;

use herbrand::expansion::HerbrandCertificate;
use herbrand::normal_forms::AlternatingPrenex;
use herbrand::sound_fn::{prefix_closure, TuplePrefixMap};
use herbrand::syntax::{Formula, Signature, Term, Var};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Signatures with at most two symbols.
pub fn small_signatures() -> Vec<Signature> {
    vec![
        Signature::new().with_relation("P", 1).with_function("f", 1),
        Signature::new().with_relation("R", 2),
        Signature::new().with_relation("P", 1).with_function("c", 0),
        Signature::new().with_function("f", 1),
    ]
}

pub fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, leaves: &[Term], depth: usize) -> Term {
    let funcs = sig.functions();
    if depth == 0 || funcs.is_empty() || rng.gen_bool(0.5) {
        let constants: Vec<Term> = funcs.iter().filter(|f| f.1 == 0).map(|f| Term::App(f.0.clone(), vec![])).collect();
        if !constants.is_empty() && rng.gen_bool(0.2) {
            return constants.choose(rng).unwrap().clone();
        }
        return leaves.choose(rng).unwrap().clone();
    }
    let (f, a) = funcs.choose(rng).unwrap().clone();
    Term::App(f, (0..a).map(|_| random_term(rng, sig, leaves, depth - 1)).collect())
}

pub fn random_atom(rng: &mut ChaCha8Rng, sig: &Signature, leaves: &[Term], depth: usize) -> Formula {
    let rels = sig.relations();
    if rels.is_empty() || rng.gen_bool(0.3) {
        return Formula::eq(random_term(rng, sig, leaves, depth), random_term(rng, sig, leaves, depth));
    }
    let (r, a) = rels.choose(rng).unwrap().clone();
    Formula::Atom(herbrand::syntax::Atom::Rel(r, (0..a).map(|_| random_term(rng, sig, leaves, depth)).collect()))
}

/// Open formula built from `atoms` atoms with all connectives.
pub fn random_open(rng: &mut ChaCha8Rng, sig: &Signature, leaves: &[Term], atoms: usize, depth: usize) -> Formula {
    if atoms <= 1 {
        let a = random_atom(rng, sig, leaves, depth);
        return if rng.gen_bool(0.3) { Formula::not(a) } else { a };
    }
    let left = rng.gen_range(1..atoms);
    let a = random_open(rng, sig, leaves, left, depth);
    let b = random_open(rng, sig, leaves, atoms - left, depth);
    let f = match rng.gen_range(0..3) {
        0 => Formula::And(vec![a, b]),
        1 => Formula::Or(vec![a, b]),
        _ => Formula::implies(a, b),
    };
    if rng.gen_bool(0.15) {
        Formula::not(f)
    } else {
        f
    }
}

/// Base sentence `exists y1 forall z1 .. exists yk forall zk phi` with the
/// quantified variables at indices `101..`.
pub fn random_base(rng: &mut ChaCha8Rng, sig: &Signature, k: usize) -> AlternatingPrenex {
    let ys: Vec<Var> = (0..k).map(|j| Var::named(101 + 2 * j as u32, b'y', j as u32 + 1)).collect();
    let zs: Vec<Var> = (0..k).map(|j| Var::named(102 + 2 * j as u32, b'z', j as u32 + 1)).collect();
    let leaves: Vec<Term> = ys.iter().chain(&zs).map(|v| Term::Var(*v)).collect();
    let atoms = rng.gen_range(1..=3);
    let matrix = random_open(rng, sig, &leaves, atoms, 1);
    AlternatingPrenex::new(ys, zs, matrix).unwrap()
}

/// A random sound function: prefixes get values in a random order that
/// respects chains, each above its predecessor by a random gap and above
/// the variables of its last term.
pub fn random_kappa(rng: &mut ChaCha8Rng, tuples: &[Vec<Term>], max_gap: u64) -> TuplePrefixMap<u64> {
    let prefixes = prefix_closure(tuples);
    let k = tuples[0].len();
    let mut values: BTreeMap<Vec<Term>, u64> = BTreeMap::new();
    let mut last = 1u64;
    while values.len() < prefixes.len() {
        let ready: Vec<&Vec<Term>> = prefixes
            .iter()
            .filter(|p| !values.contains_key(*p) && (p.len() == 1 || values.contains_key(&p[..p.len() - 1])))
            .collect();
        let p = (*ready.choose(rng).unwrap()).clone();
        let floor = p.last().unwrap().max_var_index() as u64;
        last = (last + 1 + rng.gen_range(0..=max_gap)).max(floor + 1);
        values.insert(p, last);
    }
    let mut map = TuplePrefixMap::new(k);
    for (p, v) in values {
        map.insert(p, v);
    }
    map
}

pub struct CertParams {
    pub max_k: usize,
    pub max_n: usize,
    pub vars: u32,
    pub max_gap: u64,
}

pub fn random_certificate(rng: &mut ChaCha8Rng, sig: &Signature, p: &CertParams) -> HerbrandCertificate {
    let k = rng.gen_range(1..=p.max_k);
    let n = rng.gen_range(1..=p.max_n);
    let base = random_base(rng, sig, k);
    let leaves: Vec<Term> = (1..=p.vars).map(Term::var).collect();
    let mut tuples: Vec<Vec<Term>> = Vec::new();
    for _ in 0..n {
        // share prefixes now and then
        let t: Vec<Term> = match tuples.choose(rng) {
            Some(prev) if rng.gen_bool(0.3) => {
                let keep = rng.gen_range(1..=k);
                let mut t = prev[..keep].to_vec();
                t.extend((keep..k).map(|_| random_term(rng, sig, &leaves, 1)));
                t
            }
            _ => (0..k).map(|_| random_term(rng, sig, &leaves, 1)).collect(),
        };
        tuples.push(t);
    }
    let kappa = random_kappa(rng, &tuples, p.max_gap);
    HerbrandCertificate::new(base, tuples, kappa).unwrap()
}

/// Random formula with quantifiers and free variables among `x1..x3`.
pub fn random_formula(rng: &mut ChaCha8Rng, sig: &Signature, quantifiers: usize, atoms: usize) -> Formula {
    let pool: Vec<Var> = (1..=3).map(Var::new).collect();
    fn go(rng: &mut ChaCha8Rng, sig: &Signature, pool: &[Var], q: usize, atoms: usize) -> Formula {
        if q > 0 && rng.gen_bool(0.5) {
            let v = *pool.choose(rng).unwrap();
            let body = go(rng, sig, pool, q - 1, atoms);
            return if rng.gen_bool(0.5) { Formula::exists(v, body) } else { Formula::forall(v, body) };
        }
        if atoms <= 1 {
            let leaves: Vec<Term> = pool.iter().map(|v| Term::Var(*v)).collect();
            let a = random_atom(rng, sig, &leaves, 0);
            return if rng.gen_bool(0.3) { Formula::not(a) } else { a };
        }
        let left = rng.gen_range(1..atoms);
        let (ql, qr) = if q == 0 {
            (0, 0)
        } else {
            let l = rng.gen_range(0..=q);
            (l, q - l)
        };
        let a = go(rng, sig, pool, ql, left);
        let b = go(rng, sig, pool, qr, atoms - left);
        let f = match rng.gen_range(0..3) {
            0 => Formula::And(vec![a, b]),
            1 => Formula::Or(vec![a, b]),
            _ => Formula::implies(a, b),
        };
        if rng.gen_bool(0.2) {
            Formula::not(f)
        } else {
            f
        }
    }
    go(rng, sig, &pool, quantifiers, atoms)
}
