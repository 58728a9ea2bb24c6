//! Writing a certificate file, reading it back and rejecting a tampered copy.

use herbrand::expansion::{derive_lemma1, read_certificate, write_certificate, HerbrandCertificate};
use herbrand::normal_forms::to_alternating;
use herbrand::prover::{verify_certificate, UniversalTheory};
use herbrand::syntax::{parse_formula, parse_terms, Signature};

fn main() {
    let sig = Signature::new().with_function("f", 1).with_relation("P", 1);
    let base = to_alternating(&parse_formula("exists y1 forall z1 exists y2 forall z2 y2 = f(z1)", &sig).unwrap());
    let cert = HerbrandCertificate::with_compact_kappa(base, vec![parse_terms("x1 f(x2)", &sig).unwrap()]).unwrap();
    let text = write_certificate(&cert, &sig, Some(&derive_lemma1(&cert)));
    print!("{text}");

    let theory = UniversalTheory::new(Vec::new()).unwrap();
    let file = read_certificate(&text).unwrap();
    let back = file.certificate().unwrap();
    println!("round trip equal: {}", back == cert);
    println!("check: {:?}", verify_certificate(&theory, &back, file.trace.as_ref()));

    let tampered = read_certificate(&text.replace("tuple x1 f(x2)", "tuple x1 f(x1)")).unwrap();
    match tampered.certificate() {
        Ok(c) => println!("tampered: {}", verify_certificate(&theory, &c, tampered.trace.as_ref()).unwrap_err()),
        Err(e) => println!("tampered: {e}"),
    }
}
