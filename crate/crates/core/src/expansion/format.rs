use std::collections::BTreeSet;

use thiserror::Error;

use super::certificate::{AxiomInstance, CertificateError, HerbrandCertificate};
use super::trace::{DerivationTrace, TraceStep};
use crate::normal_forms::{split_prefix, AlternatingPrenex};
use crate::sound_fn::{parse_kappa_line, TuplePrefixMap};
use crate::syntax::{parse_formula, parse_terms, strip_comment, Label, Quantifier, Signature, Term};

const HEADER: &str = "herbrand-cert v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

/// A parsed certificate file. The sound function is not yet validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateFile {
    pub signature: Signature,
    pub base: AlternatingPrenex,
    pub tuples: Vec<Vec<Term>>,
    pub kappa: TuplePrefixMap<u64>,
    pub instances: Vec<AxiomInstance>,
    pub trace: Option<DerivationTrace>,
}

impl CertificateFile {
    pub fn certificate(&self) -> Result<HerbrandCertificate, CertificateError> {
        Ok(HerbrandCertificate::new(self.base.clone(), self.tuples.clone(), self.kappa.clone())?
            .with_instances(self.instances.clone()))
    }
}

pub fn write_certificate(cert: &HerbrandCertificate, sig: &Signature, trace: Option<&DerivationTrace>) -> String {
    let mut out = vec![HEADER.to_string()];
    let decls = sig.to_string();
    out.extend(decls.lines().map(str::to_string));
    out.push(format!("formula {}", cert.base()));
    out.push(format!("n {}", cert.n()));
    for t in cert.tuples() {
        let terms: Vec<String> = t.iter().map(|s| s.to_string()).collect();
        out.push(format!("tuple {}", terms.join(" ")));
    }
    out.extend(cert.kappa().map().to_lines());
    for a in cert.instances() {
        let mut line = format!("instance {}", a.axiom);
        for t in &a.terms {
            line.push(' ');
            line.push_str(&t.to_string());
        }
        out.push(line);
    }
    if let Some(trace) = trace {
        out.push("trace".to_string());
        out.extend(trace.steps.iter().map(TraceStep::to_string));
    }
    out.push(String::new());
    out.join("\n")
}

fn alternating(sentence: &crate::syntax::Formula) -> Result<AlternatingPrenex, String> {
    let (prefix, matrix) = split_prefix(sentence);
    let (mut ys, mut zs) = (Vec::new(), Vec::new());
    for (i, (q, v)) in prefix.iter().enumerate() {
        match (q, i % 2) {
            (Quantifier::Exists, 0) => ys.push(*v),
            (Quantifier::Forall, 1) => zs.push(*v),
            _ => return Err("formula must have the shape exists y1 forall z1 .. exists yk forall zk".into()),
        }
    }
    let free = matrix.free_vars();
    let dummies: BTreeSet<_> = ys
        .iter()
        .chain(&zs)
        .filter(|v| matches!(v.label(), Label::Named { letter: b'd', .. }) && !free.contains(v))
        .copied()
        .collect();
    AlternatingPrenex::with_dummies(ys, zs, matrix.clone(), dummies).map_err(|e| e.to_string())
}

pub fn read_certificate(text: &str) -> Result<CertificateFile, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let err = |line: usize, msg: String| FormatError { line, msg };
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((no, other)) => return Err(err(no, format!("expected `{HEADER}`, found `{other}`"))),
        None => return Err(err(0, "empty certificate".into())),
    }
    let mut sig = Signature::new();
    let (no, formula_text) = loop {
        let (no, line) = lines.next().ok_or_else(|| err(0, "missing `formula` line".into()))?;
        if let Some(rest) = line.strip_prefix("formula ") {
            break (no, rest);
        }
        match sig.try_parse_decl(line) {
            Ok(true) => {}
            Ok(false) => return Err(err(no, format!("expected a declaration or `formula`, found `{line}`"))),
            Err(msg) => return Err(err(no, msg)),
        }
    };
    let sentence = parse_formula(formula_text, &sig).map_err(|e| err(no, e.to_string()))?;
    let base = alternating(&sentence).map_err(|m| err(no, m))?;
    let (no, line) = lines.next().ok_or_else(|| err(0, "missing `n` line".into()))?;
    let n: usize = line
        .strip_prefix("n ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| err(no, format!("expected `n <count>`, found `{line}`")))?;
    let mut tuples = Vec::with_capacity(n);
    let mut kappa = TuplePrefixMap::new(base.k());
    let mut instances = Vec::new();
    let mut trace: Option<DerivationTrace> = None;
    let mut last = no;
    for (no, line) in lines {
        last = no;
        if let Some(t) = trace.as_mut() {
            t.steps.push(TraceStep::parse(line).map_err(|m| err(no, m))?);
        } else if line == "trace" {
            trace = Some(DerivationTrace::default());
        } else if let Some(rest) = line.strip_prefix("tuple ") {
            tuples.push(parse_terms(rest, &sig).map_err(|e| err(no, e.to_string()))?);
        } else if line.starts_with("kappa ") {
            let (p, v) = parse_kappa_line::<u64>(line, &sig).map_err(|m| err(no, m))?;
            if kappa.insert(p, v).is_some() {
                return Err(err(no, "prefix listed twice".into()));
            }
        } else if let Some(rest) = line.strip_prefix("instance") {
            let rest = rest.trim();
            let (idx, terms) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let axiom = idx.parse().map_err(|_| err(no, format!("bad axiom index `{idx}`")))?;
            let terms = parse_terms(terms, &sig).map_err(|e| err(no, e.to_string()))?;
            instances.push(AxiomInstance { axiom, terms });
        } else {
            return Err(err(no, format!("unexpected line `{line}`")));
        }
    }
    if tuples.len() != n {
        return Err(err(last, format!("header says {n} tuples, found {}", tuples.len())));
    }
    Ok(CertificateFile { signature: sig, base, tuples, kappa, instances, trace })
}
