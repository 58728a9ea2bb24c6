//! Positive sentences and definable functions over a finite algebra: the
//! two-element meet-semilattice.

use herbrand::finite_models::{corollary3_search, corollary5_search, product, Evaluator, FiniteStructure};
use herbrand::normal_forms::to_alternating;
use herbrand::syntax::{parse_formula, Formula, Signature, Var};

fn var(f: &Formula, name: &str) -> Var {
    f.free_vars().into_iter().find(|v| v.to_string() == name).expect("variable occurs")
}

fn main() {
    let sig = Signature::new().with_function("meet", 2);
    let a = FiniteStructure::new(sig.clone(), 2, vec![("meet", vec![0, 0, 0, 1])], vec![]).unwrap();
    let square = product(&[a.clone(), a.clone()]).unwrap().into_structure();
    print!("{a}");

    let comm = parse_formula("exists y1 forall z1 meet(y1,z1) = meet(z1,y1)", &sig).unwrap();
    match corollary3_search(std::slice::from_ref(&a), &to_alternating(&comm), 2).unwrap() {
        Some(w) => {
            let ev = Evaluator::new(&sig, &w.instance).unwrap();
            println!("conjunct {} with t1 = {}: {}", w.conjunct, w.terms[0], w.instance);
            println!("holds in A: {}, in A x A: {}", ev.holds_universally(&a), ev.holds_universally(&square));
        }
        None => println!("no witness"),
    }

    let phi = parse_formula("w1 = meet(v1,v1)", &sig).unwrap();
    let t = corollary5_search(std::slice::from_ref(&a), &phi, &[var(&phi, "v1")], var(&phi, "w1"), 2).unwrap();
    match t {
        Some(t) => println!("w1 = meet(v1,v1) is defined by {t}"),
        None => println!("w1 = meet(v1,v1): no term"),
    }

    let bad = parse_formula("exists y1 meet(w1,y1) = v1", &sig).unwrap();
    match corollary5_search(&[a], &bad, &[var(&bad, "v1")], var(&bad, "w1"), 2) {
        Ok(t) => println!("unexpected term {t:?}"),
        Err(e) => println!("exists y1 meet(w1,y1) = v1: {e}"),
    }
}
