//! Checking, breaking and building sound functions.

use herbrand::sound_fn::{compact_sound, godel_kappa, validate_sound, TuplePrefixMap};
use herbrand::syntax::{parse_terms, Signature};

fn main() {
    let sig = Signature::new().with_function("f", 1).with_function("g", 2);
    let tuples =
        vec![parse_terms("g(x1,x3) f(x1) f(x6)", &sig).unwrap(), parse_terms("g(x1,x3) g(x2,x9) f(x2)", &sig).unwrap()];

    let mut kappa = TuplePrefixMap::new(3);
    for (t, values) in tuples.iter().zip([[4u64, 5, 7], [4, 10, 11]]) {
        for j in 1..=3 {
            kappa.insert(t[..j].to_vec(), values[j - 1]);
        }
    }
    println!("hand-written: {:?}", validate_sound(kappa.clone(), &tuples).map(|k| k.image()));

    kappa.insert(tuples[1][..2].to_vec(), 5);
    match validate_sound(kappa, &tuples) {
        Ok(_) => println!("unexpectedly sound"),
        Err(e) => println!("after collision: {e}"),
    }

    let compact = compact_sound(&tuples);
    for line in compact.map().to_lines() {
        println!("{line}");
    }

    let small = vec![parse_terms("x1 f(x2)", &sig).unwrap(), parse_terms("x2 x1", &sig).unwrap()];
    let godel = TuplePrefixMap::from_fn(2, &small, |p| godel_kappa(p, &sig).unwrap());
    for line in godel.to_lines() {
        println!("{line}");
    }
    println!("prime-power coding sound: {}", validate_sound(godel, &small).is_ok());
}
