//! Prenex and alternating forms of a few formulas.

use herbrand::normal_forms::{to_alternating, to_prenex};
use herbrand::syntax::{parse_formula, Signature};

fn main() {
    let sig = Signature::new().with_relation("P", 1).with_relation("R", 2);
    for text in [
        "exists y1 forall z1 (P(y1) -> P(z1))",
        "(forall x1 P(x1)) -> exists x2 P(x2)",
        "forall x1 forall x2 exists x3 (R(x1,x3) & R(x2,x3))",
        "P(x1) | ~P(x1)",
    ] {
        let f = parse_formula(text, &sig).expect("example formulas parse");
        let alt = to_alternating(&f);
        println!("input        {f}");
        println!("prenex       {}", to_prenex(&f));
        println!("alternating  {alt}  (k = {}, {} padding binders)", alt.k(), alt.dummies().len());
        println!();
    }
}
