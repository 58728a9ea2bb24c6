//! Herbrand certificates: instances and their disjunction, derivation
//! traces for the induction that turns a valid disjunction into the
//! sentence, renumbering into the bounded shape, and the file format.

mod certificate;
mod format;
mod normalize;
mod trace;

pub use certificate::{instantiate, instantiate_all, AxiomInstance, CertificateError, HerbrandCertificate};
pub use format::{read_certificate, write_certificate, CertificateFile, FormatError};
pub use normalize::{check_bounds, normalize_certificate, BoundsError, NormalizedCertificate};
pub use trace::{check_trace, derive_lemma1, truncated_disjunct, DerivationTrace, TraceError, TraceStep};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_forms::to_alternating;
    use crate::sound_fn::TuplePrefixMap;
    use crate::syntax::{parse_formula, parse_terms, Signature, Term};

    fn sig() -> Signature {
        Signature::new().with_function("f", 1).with_function("c", 0).with_relation("P", 1).with_relation("R", 2)
    }

    fn cert(formula: &str, rows: &[(&str, &[u64])]) -> HerbrandCertificate {
        let sig = sig();
        let base = to_alternating(&parse_formula(formula, &sig).unwrap());
        let mut tuples = Vec::new();
        let mut kappa = TuplePrefixMap::new(base.k());
        for (terms, values) in rows {
            let t = parse_terms(terms, &sig).unwrap();
            for (j, v) in values.iter().enumerate() {
                kappa.insert(t[..=j].to_vec(), *v);
            }
            tuples.push(t);
        }
        HerbrandCertificate::new(base, tuples, kappa).unwrap()
    }

    fn drinker() -> HerbrandCertificate {
        cert("exists y1 forall z1 (P(y1) -> P(z1))", &[("x1", &[2]), ("x2", &[3])])
    }

    #[test]
    fn instances() {
        let c = drinker();
        assert_eq!(c.instantiate(0).to_string(), "P(x1) -> P(x2)");
        assert_eq!(c.instantiate_all().to_string(), "(P(x1) -> P(x2)) | (P(x2) -> P(x3))");
        let c = cert("exists y1 forall z1 y1 = y1", &[("c", &[2])]);
        assert_eq!(c.instantiate_all().to_string(), "c = c");
        let c = cert("exists y1 forall z1 exists y2 forall z2 (R(y1,z1) | R(y2,z2))", &[("x1 f(x2)", &[2, 3])]);
        assert_eq!(c.instantiate(0).to_string(), "R(x1,x2) | R(f(x2),x3)");
    }

    #[test]
    fn drinker_trace() {
        let c = drinker();
        let trace = derive_lemma1(&c);
        let shown: Vec<String> = trace.steps.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, vec!["step 1,1 -> 1,0 r 3 I 2 e 2", "step 1,0 -> 0,0 r 2 I 1 e 1"]);
        assert_eq!(check_trace(&c, &trace), Ok(()));
    }

    #[test]
    fn shared_prefix_collapses_together() {
        let c = cert("exists y1 forall z1 exists y2 forall z2 R(y1,z2)", &[("x1 x1", &[2, 3]), ("x1 x2", &[2, 4])]);
        let trace = derive_lemma1(&c);
        let last = trace.steps.last().unwrap();
        assert_eq!(last.active, vec![1, 2]);
        assert_eq!(last.after, vec![0, 0]);
        assert_eq!(check_trace(&c, &trace), Ok(()));
    }

    #[test]
    fn mutated_traces_rejected() {
        let c = drinker();
        let good = derive_lemma1(&c);
        let mut t = good.clone();
        t.steps[0].r = 2;
        assert!(matches!(check_trace(&c, &t), Err(TraceError::NotMaximal { step: 1, max: 3 })));
        let mut t = good.clone();
        t.steps.swap(0, 1);
        assert!(check_trace(&c, &t).is_err());
        let mut t = good.clone();
        t.steps.pop();
        assert_eq!(check_trace(&c, &t), Err(TraceError::Unfinished));
        let mut t = good;
        t.steps[1].active = vec![1, 2];
        assert!(matches!(check_trace(&c, &t), Err(TraceError::WrongActiveSet { step: 2 })));
    }

    #[test]
    fn empty_trace_needs_no_steps() {
        let c = drinker();
        assert_eq!(truncated_disjunct(&c, 0, 1).to_string(), "P(x1) -> P(x2)");
        let zero = truncated_disjunct(&c, 0, 0);
        assert!(zero.is_sentence());
    }

    #[test]
    fn normalized_drinker_unchanged() {
        let c = drinker();
        assert_eq!(normalize_certificate(&c).certificate(), &c);
    }

    #[test]
    fn stray_variable_goes_to_x1() {
        let c = cert("exists y1 forall z1 R(y1,z1)", &[("f(x5)", &[6]), ("x1", &[4])]);
        let n = normalize_certificate(&c);
        let tuples: Vec<String> = n.tuples().iter().map(|t| t[0].to_string()).collect();
        assert_eq!(tuples, vec!["f(x1)", "x1"]);
        assert_eq!(n.kappa_at(0, 1), 3);
        assert_eq!(n.kappa_at(1, 1), 2);
    }

    #[test]
    fn colliding_prefixes_take_least_value() {
        let c = cert("exists y1 forall z1 R(y1,z1)", &[("x5", &[6]), ("x3", &[4])]);
        let n = normalize_certificate(&c);
        assert_eq!(n.tuples(), &[vec![Term::var(1)], vec![Term::var(1)]]);
        assert_eq!(n.kappa().map().len(), 1);
        assert_eq!(n.kappa_at(0, 1), 2);
    }

    #[test]
    fn identified_z_variables_propagate_into_terms() {
        let c = cert("exists y1 forall z1 exists y2 forall z2 R(y2,z2)", &[("x1 x1", &[3, 7]), ("x2 x5", &[5, 10])]);
        let n = normalize_certificate(&c);
        let rows: Vec<String> = n.tuples().iter().map(|t| format!("{} {}", t[0], t[1])).collect();
        assert_eq!(rows, vec!["x1 x1", "x1 x2"]);
        let values: Vec<u64> = n.kappa().image().into_iter().collect();
        assert_eq!(values, vec![2, 3, 4]);
        assert_eq!(n.instantiate_all().to_string(), "R(x1,x3) | R(x2,x4)");
    }

    #[test]
    fn value_one_is_shifted_away() {
        let c = cert("exists y1 forall z1 R(y1,z1)", &[("c", &[1])]);
        let n = normalize_certificate(&c);
        assert_eq!(n.kappa_at(0, 1), 2);
    }

    #[test]
    fn file_roundtrip() {
        let c = drinker();
        let trace = derive_lemma1(&c);
        let text = write_certificate(&c, &sig(), Some(&trace));
        let back = read_certificate(&text).unwrap();
        assert_eq!(back.trace.as_ref(), Some(&trace));
        let again = back.certificate().unwrap();
        assert_eq!(write_certificate(&again, &back.signature, back.trace.as_ref()), text);
        assert_eq!(again.instantiate_all(), c.instantiate_all());
        assert!(text.starts_with("herbrand-cert v1\nfun f 1\n"));
    }
}
