//! Prenex and alternating `exists/forall` normal forms.
//!
//! [`to_alternating`] produces the canonical shape
//! `exists y1 forall z1 ... exists yk forall zk matrix` by prenexing and then
//! padding the prefix with vacuous quantifiers over fresh variables.
//! [`AlternatingPrenex::truncate`] strips the first `m` quantifier pairs,
//! leaving `y1, z1, .., ym, zm` free.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Atom, Formula, Label, Quantifier, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("truncation level {m} is outside 0..={k}")]
    TruncationOutOfRange { m: usize, k: usize },
    #[error("matrix is not positive: {0}")]
    NotPositive(String),
    #[error("matrix must be quantifier-free")]
    MatrixNotOpen,
    #[error("quantified variables must be pairwise distinct")]
    RepeatedVariable,
    #[error("need at least one quantifier pair and as many y's as z's")]
    BadShape,
}

/// `exists y1 forall z1 ... exists yk forall zk matrix` with `k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingPrenex {
    ys: Vec<Var>,
    zs: Vec<Var>,
    matrix: Formula,
    dummies: BTreeSet<Var>,
}

impl AlternatingPrenex {
    pub fn new(ys: Vec<Var>, zs: Vec<Var>, matrix: Formula) -> Result<Self, NormalFormError> {
        Self::with_dummies(ys, zs, matrix, BTreeSet::new())
    }

    pub(crate) fn with_dummies(
        ys: Vec<Var>,
        zs: Vec<Var>,
        matrix: Formula,
        dummies: BTreeSet<Var>,
    ) -> Result<Self, NormalFormError> {
        if ys.is_empty() || ys.len() != zs.len() {
            return Err(NormalFormError::BadShape);
        }
        if !matrix.is_open() {
            return Err(NormalFormError::MatrixNotOpen);
        }
        let distinct: BTreeSet<Var> = ys.iter().chain(&zs).copied().collect();
        if distinct.len() != 2 * ys.len() {
            return Err(NormalFormError::RepeatedVariable);
        }
        Ok(AlternatingPrenex { ys, zs, matrix, dummies })
    }

    pub fn k(&self) -> usize {
        self.ys.len()
    }

    /// Existential variables `y1..yk`.
    pub fn ys(&self) -> &[Var] {
        &self.ys
    }

    /// Universal variables `z1..zk`.
    pub fn zs(&self) -> &[Var] {
        &self.zs
    }

    pub fn matrix(&self) -> &Formula {
        &self.matrix
    }

    /// Quantified variables introduced as padding; none occur in the matrix.
    pub fn dummies(&self) -> &BTreeSet<Var> {
        &self.dummies
    }

    pub fn is_dummy(&self, v: Var) -> bool {
        self.dummies.contains(&v)
    }

    /// Free variables of the matrix other than the quantified ones.
    pub fn params(&self) -> BTreeSet<Var> {
        let mut free = self.matrix.free_vars();
        for v in self.ys.iter().chain(&self.zs) {
            free.remove(v);
        }
        free
    }

    /// The quantifier prefix in order, `(Exists, y1), (Forall, z1), ...`.
    pub fn prefix(&self) -> Vec<(Quantifier, Var)> {
        self.ys.iter().zip(&self.zs).flat_map(|(y, z)| [(Quantifier::Exists, *y), (Quantifier::Forall, *z)]).collect()
    }

    /// The formula with quantifier pairs `m+1..k` still in place; `m = k`
    /// is the bare matrix and `m = 0` the whole sentence.
    pub fn truncate(&self, m: usize) -> Result<Formula, NormalFormError> {
        let k = self.k();
        if m > k {
            return Err(NormalFormError::TruncationOutOfRange { m, k });
        }
        let mut f = self.matrix.clone();
        for j in (m..k).rev() {
            f = Formula::exists(self.ys[j], Formula::forall(self.zs[j], f));
        }
        Ok(f)
    }

    pub fn sentence(&self) -> Formula {
        self.truncate(0).expect("0 is always in range")
    }

    /// Same shape with every quantified variable moved to a fresh index
    /// strictly above `floor`. Display labels are kept.
    pub fn rename_apart(&self, floor: u32) -> AlternatingPrenex {
        let mut next = floor.max(self.matrix.max_var_index()) + 1;
        let mut map = std::collections::BTreeMap::new();
        let mut fresh = |v: Var| {
            let w = match v.label() {
                Label::Indexed => Var::new(next),
                Label::Named { letter, number } => Var::named(next, letter, number),
            };
            next += 1;
            map.insert(v, crate::syntax::Term::Var(w));
            w
        };
        let ys: Vec<Var> = self.ys.iter().map(|v| fresh(*v)).collect();
        let zs: Vec<Var> = self.zs.iter().map(|v| fresh(*v)).collect();
        let dummies = self
            .dummies
            .iter()
            .map(|d| match &map[d] {
                crate::syntax::Term::Var(w) => *w,
                _ => unreachable!(),
            })
            .collect();
        let matrix = self.matrix.substitute(&map).expect("matrix is open");
        AlternatingPrenex { ys, zs, matrix, dummies }
    }

    /// Disjunctive normal form of a positive matrix.
    pub fn dnf(&self) -> Result<Vec<Conjunction>, NormalFormError> {
        to_prenex_dnf_matrix(self)
    }
}

impl fmt::Display for AlternatingPrenex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sentence())
    }
}

/// Prenex form. Prenex input with distinct binders is returned unchanged;
/// otherwise binders are first made distinct and then pulled out left to
/// right.
pub fn to_prenex(f: &Formula) -> Formula {
    if f.is_prenex() {
        let bound = f.bound_vars();
        if bound.iter().collect::<BTreeSet<_>>().len() == bound.len() {
            return f.clone();
        }
    }
    let renamed = f.rename_bound(&BTreeSet::new());
    let (prefix, matrix) = pull(&renamed);
    prefix.into_iter().rev().fold(matrix, |acc, (q, v)| q.bind(v, acc))
}

fn flip(prefix: Vec<(Quantifier, Var)>) -> Vec<(Quantifier, Var)> {
    prefix.into_iter().map(|(q, v)| (q.dual(), v)).collect()
}

// Requires pairwise distinct binders that are nowhere free.
fn pull(f: &Formula) -> (Vec<(Quantifier, Var)>, Formula) {
    match f {
        Formula::Atom(_) => (Vec::new(), f.clone()),
        Formula::Not(g) => {
            let (p, m) = pull(g);
            (flip(p), Formula::not(m))
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let mut prefix = Vec::new();
            let mut parts = Vec::new();
            for g in gs {
                let (p, m) = pull(g);
                prefix.extend(p);
                parts.push(m);
            }
            let matrix = if matches!(f, Formula::And(_)) { Formula::And(parts) } else { Formula::Or(parts) };
            (prefix, matrix)
        }
        Formula::Implies(a, b) => {
            let (pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            let mut prefix = flip(pa);
            prefix.extend(pb);
            (prefix, Formula::implies(ma, mb))
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let (q, _, _) = f.as_quantified().unwrap();
            let (p, m) = pull(body);
            let mut prefix = vec![(q, *v)];
            prefix.extend(p);
            (prefix, m)
        }
    }
}

/// Splits a prenex formula into its prefix and matrix.
pub fn split_prefix(f: &Formula) -> (Vec<(Quantifier, Var)>, &Formula) {
    let mut prefix = Vec::new();
    let mut cur = f;
    while let Some((q, v, body)) = cur.as_quantified() {
        prefix.push((q, v));
        cur = body;
    }
    (prefix, cur)
}

/// Alternating form with the fewest quantifier pairs for the prenex prefix
/// read left to right. Missing positions are filled by vacuous binders over
/// fresh variables printed `d1, d2, ..`.
pub fn to_alternating(f: &Formula) -> AlternatingPrenex {
    let prenex = to_prenex(f);
    let (prefix, matrix) = split_prefix(&prenex);
    let mut next_index = prenex.max_var_index() + 1;
    let mut next_label = prenex
        .all_vars()
        .iter()
        .filter_map(|v| match v.label() {
            Label::Named { letter: b'd', number } => Some(number),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        + 1;
    let mut dummies = BTreeSet::new();
    let mut fresh = || {
        let v = Var::named(next_index, b'd', next_label);
        next_index += 1;
        next_label += 1;
        dummies.insert(v);
        v
    };
    let (mut ys, mut zs) = (Vec::new(), Vec::new());
    for (q, v) in prefix {
        let expect_exists = ys.len() == zs.len();
        match (q, expect_exists) {
            (Quantifier::Exists, true) => ys.push(v),
            (Quantifier::Forall, false) => zs.push(v),
            (Quantifier::Forall, true) => {
                ys.push(fresh());
                zs.push(v);
            }
            (Quantifier::Exists, false) => {
                zs.push(fresh());
                ys.push(v);
            }
        }
    }
    if ys.len() > zs.len() {
        zs.push(fresh());
    }
    if ys.is_empty() {
        ys.push(fresh());
        zs.push(fresh());
    }
    AlternatingPrenex::with_dummies(ys, zs, matrix.clone(), dummies).expect("prenex binders are distinct")
}

/// A conjunction of atomic formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conjunction(pub Vec<Atom>);

impl Conjunction {
    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conjunction(self.0.iter().cloned().map(Formula::Atom).collect())
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Disjunctive normal form of a positive open formula.
pub fn positive_dnf(f: &Formula) -> Result<Vec<Conjunction>, NormalFormError> {
    match f {
        Formula::Atom(a) => Ok(vec![Conjunction(vec![a.clone()])]),
        Formula::Or(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(positive_dnf(g)?);
            }
            Ok(out)
        }
        Formula::And(gs) => {
            let mut acc = vec![Conjunction(Vec::new())];
            for g in gs {
                let part = positive_dnf(g)?;
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut atoms = a.0.clone();
                        atoms.extend(b.0.iter().cloned());
                        next.push(Conjunction(atoms));
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        other => Err(NormalFormError::NotPositive(other.to_string())),
    }
}

/// `alpha_1 | .. | alpha_n` for the matrix of `p`, which must be positive.
pub fn to_prenex_dnf_matrix(p: &AlternatingPrenex) -> Result<Vec<Conjunction>, NormalFormError> {
    positive_dnf(p.matrix())
}
