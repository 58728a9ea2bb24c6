use std::fmt;

use thiserror::Error;

use super::certificate::HerbrandCertificate;
use crate::syntax::{Formula, Var};

/// One induction step: from the levels `before`, generalize `x_r` and
/// introduce the quantifier pair at level `m_e`, lowering every level in
/// `active`. Disjunct indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub before: Vec<usize>,
    pub r: u64,
    pub active: Vec<usize>,
    pub representative: usize,
    pub after: Vec<usize>,
}

/// Steps from `m_i = k` for all `i` down to all levels zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} -> {} r {} I {} e {}",
            join(&self.before),
            join(&self.after),
            self.r,
            join(&self.active),
            self.representative
        )
    }
}

impl TraceStep {
    /// Reads the line format written by `Display`.
    pub fn parse(line: &str) -> Result<TraceStep, String> {
        let words: Vec<&str> = line.split_whitespace().collect();
        let shape = ["step", "", "->", "", "r", "", "I", "", "e", ""];
        if words.len() != shape.len() || shape.iter().zip(&words).any(|(s, w)| !s.is_empty() && s != w) {
            return Err(format!("malformed trace step `{line}`"));
        }
        let list = |s: &str| -> Result<Vec<usize>, String> {
            s.split(',').map(|x| x.parse().map_err(|_| format!("bad number `{x}`"))).collect()
        };
        Ok(TraceStep {
            before: list(words[1])?,
            after: list(words[3])?,
            r: words[5].parse().map_err(|_| format!("bad r `{}`", words[5]))?,
            active: list(words[7])?,
            representative: words[9].parse().map_err(|_| format!("bad e `{}`", words[9]))?,
        })
    }
}

fn levels_and_values(cert: &HerbrandCertificate, m: &[usize]) -> Vec<Option<u64>> {
    m.iter().enumerate().map(|(i, &mi)| (mi > 0).then(|| cert.kappa_at(i, mi))).collect()
}

/// The trace of the induction on `sum m_i`, starting from `m_i = k` and
/// always choosing the least index of the maximal set.
pub fn derive_lemma1(cert: &HerbrandCertificate) -> DerivationTrace {
    let mut m = vec![cert.k(); cert.n()];
    let mut steps = Vec::new();
    loop {
        let values = levels_and_values(cert, &m);
        let Some(r) = values.iter().flatten().max().copied() else { break };
        let active: Vec<usize> = (0..m.len()).filter(|&i| values[i] == Some(r)).map(|i| i + 1).collect();
        let before = m.clone();
        for &i in &active {
            m[i - 1] -= 1;
        }
        steps.push(TraceStep { before, r, representative: active[0], active, after: m.clone() });
    }
    DerivationTrace { steps }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("step {step}: levels do not continue from the previous state")]
    StateMismatch { step: usize },
    #[error("step {step}: level vector has the wrong length")]
    Malformed { step: usize },
    #[error("step {step}: r not maximal (the maximum is {max})")]
    NotMaximal { step: usize, max: u64 },
    #[error("step {step}: r = {r} is not attained by an active prefix")]
    NotAttained { step: usize, r: u64 },
    #[error("step {step}: I is not the set of disjuncts attaining r")]
    WrongActiveSet { step: usize },
    #[error("step {step}: e is not the least element of I")]
    WrongRepresentative { step: usize },
    #[error("step {step}: disjuncts in I do not share the prefix of e")]
    PrefixMismatch { step: usize },
    #[error("step {step}: levels after the step are not those of I lowered by one")]
    WrongUpdate { step: usize },
    #[error("step {step}: sum of levels does not decrease")]
    NotDecreasing { step: usize },
    #[error("step {step}: x{r} occurs free in disjunct {disjunct} outside I")]
    FreeOutside { step: usize, r: u64, disjunct: usize },
    #[error("step {step}: x{r} occurs in a term of the prefix of e")]
    FreeInPrefix { step: usize, r: u64 },
    #[error("trace ends before every level reaches zero")]
    Unfinished,
}

/// Re-checks every step of `trace` against `cert`, including the side
/// conditions on `x_r`.
pub fn check_trace(cert: &HerbrandCertificate, trace: &DerivationTrace) -> Result<(), TraceError> {
    let k = cert.k();
    let base = cert.base().rename_apart(cert.max_index());
    let mut m = vec![k; cert.n()];
    for (s, st) in trace.steps.iter().enumerate() {
        let step = s + 1;
        if st.before.len() != m.len() || st.after.len() != m.len() {
            return Err(TraceError::Malformed { step });
        }
        if st.before != m {
            return Err(TraceError::StateMismatch { step });
        }
        let values = levels_and_values(cert, &m);
        let max = values.iter().flatten().max().copied().ok_or(TraceError::StateMismatch { step })?;
        if st.r < max {
            return Err(TraceError::NotMaximal { step, max });
        }
        if st.r > max {
            return Err(TraceError::NotAttained { step, r: st.r });
        }
        let active: Vec<usize> = (0..m.len()).filter(|&i| values[i] == Some(max)).map(|i| i + 1).collect();
        if st.active != active {
            return Err(TraceError::WrongActiveSet { step });
        }
        if st.representative != active[0] {
            return Err(TraceError::WrongRepresentative { step });
        }
        let e = st.representative - 1;
        let prefix = &cert.tuples()[e][..m[e]];
        if active.iter().any(|&i| m[i - 1] != m[e] || &cert.tuples()[i - 1][..m[i - 1]] != prefix) {
            return Err(TraceError::PrefixMismatch { step });
        }
        let xr = Var::new(st.r as u32);
        for i in (0..m.len()).filter(|i| !active.contains(&(i + 1))) {
            if disjunct(cert, &base, i, m[i]).free_vars().contains(&xr) {
                return Err(TraceError::FreeOutside { step, r: st.r, disjunct: i + 1 });
            }
        }
        if prefix.iter().any(|t| t.contains_var(xr)) {
            return Err(TraceError::FreeInPrefix { step, r: st.r });
        }
        let mut next = m.clone();
        for &i in &active {
            next[i - 1] -= 1;
        }
        if st.after != next {
            return Err(TraceError::WrongUpdate { step });
        }
        if next.iter().sum::<usize>() >= m.iter().sum::<usize>() {
            return Err(TraceError::NotDecreasing { step });
        }
        m = next;
    }
    if m.iter().any(|&mi| mi > 0) {
        return Err(TraceError::Unfinished);
    }
    Ok(())
}

/// Disjunct `i` at level `m`: pairs `m+1..k` quantified, the first `m`
/// instantiated.
pub fn truncated_disjunct(cert: &HerbrandCertificate, i: usize, m: usize) -> Formula {
    disjunct(cert, &cert.base().rename_apart(cert.max_index()), i, m)
}

fn disjunct(cert: &HerbrandCertificate, base: &crate::normal_forms::AlternatingPrenex, i: usize, m: usize) -> Formula {
    let f = base.truncate(m).expect("levels are at most k");
    f.substitute(&cert.bindings(base, i, m)).expect("bound variables are renamed apart")
}
