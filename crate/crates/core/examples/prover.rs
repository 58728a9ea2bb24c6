//! Searching for certificates, with and without a universal theory, and
//! re-checking what was found.

use std::time::Duration;

use herbrand::expansion::write_certificate;
use herbrand::normal_forms::to_alternating;
use herbrand::prover::{prove, verify_certificate, ProverResult, SearchBudget, UniversalTheory};
use herbrand::syntax::{parse_formula, Signature};

fn main() {
    let sig = Signature::new().with_function("f", 1).with_relation("P", 1);
    let budget = SearchBudget { time_limit: Duration::from_secs(5), ..SearchBudget::default() };
    let jobs = [
        ("", "exists y1 forall z1 (P(y1) -> P(z1))"),
        ("forall x1 (P(x1) -> P(f(x1)))", "exists y1 forall z1 (P(y1) -> P(f(f(y1))))"),
        ("", "exists y1 forall z1 (P(y1) & ~P(z1))"),
    ];
    for (axioms, target) in jobs {
        let theory = UniversalTheory::parse(axioms, &sig).unwrap();
        let alt = to_alternating(&parse_formula(target, &sig).unwrap());
        println!("== {target}");
        match prove(&theory, &alt, &budget).unwrap() {
            ProverResult::Proved(cert, trace) => {
                print!("{}", write_certificate(&cert, &sig, Some(&trace)));
                println!("verified: {:?}", verify_certificate(&theory, &cert, Some(&trace)));
            }
            ProverResult::Unknown(stats) => {
                println!("unknown after {} stages and {} tuple sets", stats.stages_completed, stats.tuple_sets);
            }
        }
    }
}
