use std::collections::{BTreeMap, BTreeSet};
use std::ops::Deref;

use thiserror::Error;

use super::certificate::{AxiomInstance, HerbrandCertificate};
use crate::sound_fn::{prefix_closure, TuplePrefixMap};
use crate::syntax::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("x{index} occurs in a tuple but the bound is x{bound}")]
    TermVariable { index: u32, bound: usize },
    #[error("Im(kappa) lower bound: value {0} is below 2")]
    KappaBelow(u64),
    #[error("Im(kappa) upper bound: value {value} exceeds {bound}")]
    KappaAbove { value: u64, bound: usize },
}

/// A certificate whose tuples use only `x1..x_kN` and whose sound function
/// takes values in `2..=kN+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedCertificate(HerbrandCertificate);

impl NormalizedCertificate {
    pub fn new(cert: HerbrandCertificate) -> Result<Self, BoundsError> {
        check_bounds(&cert)?;
        Ok(NormalizedCertificate(cert))
    }

    pub fn certificate(&self) -> &HerbrandCertificate {
        &self.0
    }

    pub fn into_certificate(self) -> HerbrandCertificate {
        self.0
    }
}

impl Deref for NormalizedCertificate {
    type Target = HerbrandCertificate;

    fn deref(&self) -> &HerbrandCertificate {
        &self.0
    }
}

/// Checks the variable and value bounds `kN` and `2..=kN+1`.
pub fn check_bounds(cert: &HerbrandCertificate) -> Result<(), BoundsError> {
    let bound = cert.k() * cert.n();
    for v in cert.kappa().image() {
        if v < 2 {
            return Err(BoundsError::KappaBelow(v));
        }
        if v > bound as u64 + 1 {
            return Err(BoundsError::KappaAbove { value: v, bound: bound + 1 });
        }
    }
    for t in cert.tuples().iter().flatten() {
        let index = t.max_var_index();
        if index as usize > bound {
            return Err(BoundsError::TermVariable { index, bound });
        }
    }
    Ok(())
}

fn apply(rho: &BTreeMap<Var, Term>, tuples: &[Vec<Term>]) -> Vec<Vec<Term>> {
    tuples.iter().map(|t| t.iter().map(|s| s.substitute(rho)).collect()).collect()
}

/// Rewrites `cert` into the bounded shape by a substitution applied to the
/// whole disjunction (and to the recorded axiom instances), so validity and
/// entailment carry over.
///
/// Variables outside `Im(kappa)` become `x1`. Prefixes that then coincide
/// keep the least of their values and their `z` variables are identified,
/// repeated until no new prefixes coincide. The surviving values are then
/// renumbered in order onto `2, 3, ..`.
pub fn normalize_certificate(cert: &HerbrandCertificate) -> NormalizedCertificate {
    let mut tuples = cert.tuples().to_vec();
    let mut kappa: BTreeMap<Vec<Term>, u64> = cert.kappa().map().iter().map(|(p, v)| (p.clone(), *v)).collect();
    let mut instances = cert.instances().to_vec();

    // keep x1 free of z variables
    if kappa.values().any(|&v| v == 1) {
        let shift: BTreeMap<Var, Term> = (1..=cert.max_index()).map(|i| (Var::new(i), Term::var(i + 1))).collect();
        kappa = kappa.into_iter().map(|(p, v)| (p.iter().map(|t| t.substitute(&shift)).collect(), v + 1)).collect();
        tuples = apply(&shift, &tuples);
        instances = instances.iter().map(|a| a.substitute(&shift)).collect();
    }

    let image: BTreeSet<u64> = kappa.values().copied().collect();
    let prefixes = prefix_closure(&tuples);
    let mut all_vars = BTreeSet::new();
    for t in tuples.iter().flatten() {
        all_vars.extend(t.vars());
    }
    for a in &instances {
        for t in &a.terms {
            all_vars.extend(t.vars());
        }
    }
    let x1 = Term::var(1);
    let mut rho: BTreeMap<Var, Term> = BTreeMap::new();
    for v in &all_vars {
        if !image.contains(&(v.index() as u64)) {
            rho.insert(*v, x1.clone());
        }
    }
    let lambda = loop {
        // least value among prefixes with equal images
        let mut least: BTreeMap<Vec<Term>, u64> = BTreeMap::new();
        for p in &prefixes {
            let img: Vec<Term> = p.iter().map(|t| t.substitute(&rho)).collect();
            let v = kappa[p];
            least.entry(img).and_modify(|w| *w = (*w).min(v)).or_insert(v);
        }
        let mut next = rho.clone();
        for p in &prefixes {
            let img: Vec<Term> = p.iter().map(|t| t.substitute(&rho)).collect();
            let (from, to) = (kappa[p], least[&img]);
            if from != to {
                next.insert(Var::new(from as u32), Term::var(to as u32));
            }
        }
        if next == rho {
            break least;
        }
        rho = next;
    };

    let order: Vec<u64> = lambda.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let rank = |v: u64| order.binary_search(&v).expect("value in J") as u64 + 2;
    let mut rename: BTreeMap<Var, Term> = BTreeMap::new();
    for &v in &order {
        rename.insert(Var::new(v as u32), Term::var(rank(v) as u32));
    }
    let finish = |t: &Term| t.substitute(&rho).substitute(&rename);
    let new_tuples: Vec<Vec<Term>> = tuples.iter().map(|t| t.iter().map(finish).collect()).collect();
    let mut mu = TuplePrefixMap::new(cert.k());
    for (img, v) in &lambda {
        mu.insert(img.iter().map(|t| t.substitute(&rename)).collect(), rank(*v));
    }
    let new_instances: Vec<AxiomInstance> = instances
        .iter()
        .map(|a| AxiomInstance { axiom: a.axiom, terms: a.terms.iter().map(finish).collect() })
        .collect();
    let out = cert.replace(new_tuples, mu, new_instances).expect("the identified prefixes carry a sound function");
    NormalizedCertificate::new(out).expect("renumbered values are within the bounds")
}
