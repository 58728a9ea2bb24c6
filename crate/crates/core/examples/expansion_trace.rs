//! Herbrand instances of the drinker sentence and the derivation that
//! recovers the sentence from their disjunction.

use herbrand::expansion::{check_trace, derive_lemma1, HerbrandCertificate};
use herbrand::ground_solver::is_valid;
use herbrand::normal_forms::to_alternating;
use herbrand::syntax::{parse_formula, parse_terms, Signature};

fn main() {
    let sig = Signature::new().with_relation("P", 1);
    let base = to_alternating(&parse_formula("exists y1 forall z1 (P(y1) -> P(z1))", &sig).unwrap());
    let tuples = vec![parse_terms("x1", &sig).unwrap(), parse_terms("x2", &sig).unwrap()];
    let cert = HerbrandCertificate::with_compact_kappa(base, tuples).unwrap();

    for i in 0..cert.n() {
        println!("instance {}: {}", i + 1, cert.instantiate(i));
    }
    let disjunction = cert.instantiate_all();
    println!("disjunction: {disjunction}");
    println!("valid: {}", is_valid(&disjunction));

    let trace = derive_lemma1(&cert);
    for step in &trace.steps {
        println!("{step}");
    }
    println!("trace checks: {:?}", check_trace(&cert, &trace));

    let mut broken = trace.clone();
    broken.steps.swap(0, 1);
    println!("reordered trace: {}", check_trace(&cert, &broken).unwrap_err());
}
