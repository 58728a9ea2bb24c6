use std::collections::BTreeMap;

use thiserror::Error;

use crate::normal_forms::AlternatingPrenex;
use crate::sound_fn::{compact_sound, validate_sound, SoundFunction, SoundnessError, TuplePrefixMap};
use crate::syntax::{Formula, Term, Var};

/// Axiom number `axiom` (0-based) with its universal variables replaced by
/// `terms`, in quantifier order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxiomInstance {
    pub axiom: usize,
    pub terms: Vec<Term>,
}

impl AxiomInstance {
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> AxiomInstance {
        AxiomInstance { axiom: self.axiom, terms: self.terms.iter().map(|t| t.substitute(map)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("a certificate needs at least one tuple")]
    NoTuples,
    #[error("tuple #{index} has {len} terms, expected {k}")]
    TupleLength { index: usize, len: usize, k: usize },
    #[error("base formula has free variables: {0}")]
    Parameters(String),
    #[error(transparent)]
    Kappa(#[from] SoundnessError<u64>),
    #[error("kappa value {0} is not a variable index")]
    KappaOutOfRange(u64),
}

/// Tuples `t_1..t_N` in `T^k` with a sound function for them, over an
/// alternating base sentence. Axiom instances are recorded for theories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandCertificate {
    base: AlternatingPrenex,
    tuples: Vec<Vec<Term>>,
    kappa: SoundFunction<u64>,
    instances: Vec<AxiomInstance>,
}

impl HerbrandCertificate {
    pub fn new(
        base: AlternatingPrenex,
        tuples: Vec<Vec<Term>>,
        kappa: TuplePrefixMap<u64>,
    ) -> Result<Self, CertificateError> {
        check_shape(&base, &tuples)?;
        let kappa = validate_sound(kappa, &tuples)?;
        if let Some(&bad) = kappa.image().iter().find(|v| **v == 0 || **v > u32::MAX as u64) {
            return Err(CertificateError::KappaOutOfRange(bad));
        }
        Ok(HerbrandCertificate { base, tuples, kappa, instances: Vec::new() })
    }

    /// Certificate with the greedy sound function.
    pub fn with_compact_kappa(base: AlternatingPrenex, tuples: Vec<Vec<Term>>) -> Result<Self, CertificateError> {
        check_shape(&base, &tuples)?;
        let kappa = compact_sound(&tuples);
        Ok(HerbrandCertificate { base, tuples, kappa, instances: Vec::new() })
    }

    pub fn with_instances(mut self, instances: Vec<AxiomInstance>) -> Self {
        self.instances = instances;
        self
    }

    pub fn base(&self) -> &AlternatingPrenex {
        &self.base
    }

    pub fn tuples(&self) -> &[Vec<Term>] {
        &self.tuples
    }

    pub fn n(&self) -> usize {
        self.tuples.len()
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    pub fn kappa(&self) -> &SoundFunction<u64> {
        &self.kappa
    }

    pub fn instances(&self) -> &[AxiomInstance] {
        &self.instances
    }

    /// `kappa(t_i1..t_ij)` for 0-based `i` and `1 <= j <= k`.
    pub fn kappa_at(&self, i: usize, j: usize) -> u64 {
        self.kappa[&self.tuples[i][..j]]
    }

    /// The variable standing for `z_j` in instance `i`.
    pub fn z_var(&self, i: usize, j: usize) -> Var {
        Var::new(self.kappa_at(i, j) as u32)
    }

    /// The map `y_j := t_ij, z_j := x_kappa(t_i1..t_ij)` for `j <= m`,
    /// keyed by the variables of `base`.
    pub(crate) fn bindings(&self, base: &AlternatingPrenex, i: usize, m: usize) -> BTreeMap<Var, Term> {
        let mut map = BTreeMap::new();
        for j in 0..m {
            map.insert(base.ys()[j], self.tuples[i][j].clone());
            map.insert(base.zs()[j], Term::Var(self.z_var(i, j + 1)));
        }
        map
    }

    /// Instance `i` (0-based) of the matrix.
    pub fn instantiate(&self, i: usize) -> Formula {
        let map = self.bindings(&self.base, i, self.k());
        self.base.matrix().substitute(&map).expect("the matrix is open")
    }

    /// The disjunction of all instances in tuple order.
    pub fn instantiate_all(&self) -> Formula {
        Formula::disjunction((0..self.n()).map(|i| self.instantiate(i)).collect())
    }

    /// Largest variable index occurring in tuples or as a kappa value.
    pub fn max_index(&self) -> u32 {
        let terms = self.tuples.iter().flatten().map(Term::max_var_index).max().unwrap_or(0);
        let kappa = self.kappa.image().last().copied().unwrap_or(0) as u32;
        terms.max(kappa)
    }

    /// Replaces the tuples and the sound function, keeping base and
    /// instances.
    pub(crate) fn replace(
        &self,
        tuples: Vec<Vec<Term>>,
        kappa: TuplePrefixMap<u64>,
        instances: Vec<AxiomInstance>,
    ) -> Result<Self, CertificateError> {
        Ok(HerbrandCertificate::new(self.base.clone(), tuples, kappa)?.with_instances(instances))
    }
}

fn check_shape(base: &AlternatingPrenex, tuples: &[Vec<Term>]) -> Result<(), CertificateError> {
    if tuples.is_empty() {
        return Err(CertificateError::NoTuples);
    }
    let params = base.params();
    if !params.is_empty() {
        let names: Vec<String> = params.iter().map(Var::to_string).collect();
        return Err(CertificateError::Parameters(names.join(", ")));
    }
    for (index, t) in tuples.iter().enumerate() {
        if t.len() != base.k() {
            return Err(CertificateError::TupleLength { index, len: t.len(), k: base.k() });
        }
    }
    Ok(())
}

/// Instance `i` (0-based) of the certificate's matrix.
pub fn instantiate(cert: &HerbrandCertificate, i: usize) -> Formula {
    cert.instantiate(i)
}

pub fn instantiate_all(cert: &HerbrandCertificate) -> Formula {
    cert.instantiate_all()
}
