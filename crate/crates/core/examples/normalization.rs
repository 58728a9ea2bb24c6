//! Renumbering a certificate so that its variables and sound-function
//! values fit the tight bounds.

use herbrand::expansion::{check_bounds, normalize_certificate, HerbrandCertificate};
use herbrand::ground_solver::is_valid;
use herbrand::normal_forms::to_alternating;
use herbrand::sound_fn::TuplePrefixMap;
use herbrand::syntax::{parse_formula, parse_terms, Signature};

fn main() {
    let sig = Signature::new().with_relation("P", 1);
    let base = to_alternating(&parse_formula("exists y1 forall z1 (P(y1) -> P(z1))", &sig).unwrap());
    let tuples = vec![parse_terms("x4", &sig).unwrap(), parse_terms("x9", &sig).unwrap()];
    let mut kappa = TuplePrefixMap::new(1);
    kappa.insert(tuples[0].clone(), 9);
    kappa.insert(tuples[1].clone(), 20);
    let cert = HerbrandCertificate::new(base, tuples, kappa).unwrap();
    println!("before: {}  bounds: {:?}", cert.instantiate_all(), check_bounds(&cert).map_err(|e| e.to_string()));

    let norm = normalize_certificate(&cert);
    println!("after:  {}  bounds: {:?}", norm.instantiate_all(), check_bounds(&norm).map_err(|e| e.to_string()));
    println!("still valid: {}", is_valid(&norm.instantiate_all()));
    for line in norm.kappa().map().to_lines() {
        println!("{line}");
    }
}
