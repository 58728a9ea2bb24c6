//! Ground validity and entailment with equality.

use herbrand::ground_solver::{cc_consistent, entails, is_valid, GroundProblem};
use herbrand::syntax::{parse_formula, parse_term, Signature};

fn main() {
    let sig = Signature::new().with_function("f", 1).with_function("a", 0).with_relation("P", 1);
    let f = |s: &str| parse_formula(s, &sig).unwrap();
    let t = |s: &str| parse_term(s, &sig).unwrap();

    for text in ["x1 = x2 -> f(x1) = f(x2)", "f(x1) = f(x2) -> x1 = x2", "(P(x1) -> P(x2)) | (P(x2) -> P(x3))"] {
        println!("{text:45} valid: {}", is_valid(&f(text)));
    }

    let problem = GroundProblem::new(vec![f("f(f(f(a))) = a"), f("f(f(f(f(f(a))))) = a")], f("f(a) = a"));
    println!("f^3(a)=a, f^5(a)=a |- f(a)=a: {}", entails(&problem));

    println!("a=f(a) with f(f(a))!=a consistent: {}", cc_consistent(&[(t("a"), t("f(a)"))], &[(t("f(f(a))"), t("a"))]));
}
