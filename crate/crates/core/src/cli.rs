//! The `herbrand` command line. Exit codes: 0 success, 1 an honest negative
//! answer (unknown, not found, rejected), 2 a usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::expansion::{
    derive_lemma1, normalize_certificate, read_certificate, write_certificate, HerbrandCertificate,
};
use crate::finite_models::{corollary5_search, positive_prefix_search, DefinabilityError, FiniteStructure};
use crate::normal_forms::{to_alternating, to_prenex};
use crate::prover::{prove_with_jobs, verify_certificate, ProverResult, SearchBudget, UniversalTheory};
use crate::sound_fn::{compact_sound, godel_kappa, parse_kappa_line, validate_sound, TuplePrefixMap};
use crate::syntax::{parse_formula, parse_terms, Formula, Signature, Term, Var};

#[derive(Parser, Debug)]
#[command(name = "herbrand", version, about = "Herbrand certificates for alternating first-order sentences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the prenex and alternating forms of a formula.
    Normalize { formula: PathBuf },
    /// Check or build sound functions for tuple files.
    Soundfn {
        #[command(subcommand)]
        action: SoundfnAction,
    },
    /// Print the instances and disjunction of a certificate.
    Expand {
        certificate: PathBuf,
        /// Renumber first and print the result as a certificate file.
        #[arg(long)]
        normalize: bool,
        /// Include the derivation trace.
        #[arg(long)]
        trace: bool,
    },
    /// Search for a certificate of a sentence over a universal theory.
    Prove {
        formula: PathBuf,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a certificate file.
    Check {
        certificate: PathBuf,
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Find a uniformly true instance of a positive sentence in finite algebras.
    Cor3 {
        formula: PathBuf,
        #[arg(long = "algebra", required = false)]
        algebras: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Find a term defining the function given by a positive formula.
    Defterm {
        formula: PathBuf,
        #[arg(long = "algebra", required = false)]
        algebras: Vec<PathBuf>,
        /// Input variables by name, comma separated.
        #[arg(long, default_value = "v1", value_delimiter = ',')]
        inputs: Vec<String>,
        #[arg(long, default_value = "w1")]
        output: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SoundfnAction {
    /// Validate the `kappa` lines of a file against its `tuple` lines.
    Check { file: PathBuf },
    /// Print a sound function for the `tuple` lines of a file.
    Make {
        file: PathBuf,
        /// Use the prime-power coding instead of the compact assignment.
        #[arg(long)]
        godel: bool,
    },
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 1)]
    instance_depth: usize,
    #[arg(long, default_value_t = 64)]
    max_instances: usize,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SearchBudget, Failure> {
        if !self.timeout.is_finite() || self.timeout < 0.0 {
            return Err(Failure::Usage(format!("bad timeout {}", self.timeout)));
        }
        Ok(SearchBudget {
            max_n: self.max_n,
            max_depth: self.max_depth,
            max_instance_depth: self.instance_depth,
            max_instances: self.max_instances,
            time_limit: Duration::from_secs_f64(self.timeout),
        })
    }
}

enum Failure {
    /// Exit 1.
    Negative(String),
    /// Exit 2.
    Usage(String),
}

type CmdResult = Result<String, Failure>;

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Normalize { formula } => normalize(&formula),
        Command::Soundfn { action: SoundfnAction::Check { file } } => soundfn_check(&file),
        Command::Soundfn { action: SoundfnAction::Make { file, godel } } => soundfn_make(&file, godel),
        Command::Expand { certificate, normalize, trace } => expand(&certificate, normalize, trace),
        Command::Prove { formula, theory, budget, output } => {
            prove(&formula, theory.as_deref(), &budget, output.as_deref(), err)
        }
        Command::Check { certificate, theory } => check(&certificate, theory.as_deref()),
        Command::Cor3 { formula, algebras, depth } => cor3(&formula, &algebras, depth),
        Command::Defterm { formula, algebras, inputs, output, depth } => {
            defterm(&formula, &algebras, &inputs, &output, depth)
        }
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Negative(text)) => {
            let _ = out.write_all(text.as_bytes());
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Declarations and the remaining non-empty lines of a file.
struct Document {
    sig: Signature,
    body: Vec<(usize, String)>,
}

fn read_document(path: &Path, sig: Signature) -> Result<Document, Failure> {
    let text = read(path)?;
    let mut doc = Document { sig, body: Vec::new() };
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if redeclares(&doc.sig, line) {
            continue;
        }
        let declared = doc
            .sig
            .try_parse_decl(line)
            .map_err(|msg| Failure::Usage(format!("{}:{}: {msg}", path.display(), no + 1)))?;
        if !declared {
            doc.body.push((no + 1, line.to_string()));
        }
    }
    Ok(doc)
}

/// A declaration repeating one already in `sig`, as when a theory file and a
/// formula file both declare their symbols.
fn redeclares(sig: &Signature, line: &str) -> bool {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let [kind, name, arity] = parts.as_slice() else { return false };
    let Ok(arity) = arity.parse::<usize>() else { return false };
    match *kind {
        "fun" => sig.function_arity(name) == Some(arity),
        "rel" => sig.relation_arity(name) == Some(arity),
        _ => false,
    }
}

fn formula_of(path: &Path, doc: &Document) -> Result<Formula, Failure> {
    let text: Vec<&str> = doc.body.iter().map(|(_, l)| l.as_str()).collect();
    if text.is_empty() {
        return Err(Failure::Usage(format!("{}: no formula", path.display())));
    }
    parse_formula(&text.join(" "), &doc.sig).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn theory_of(path: Option<&Path>, sig: Signature) -> Result<(UniversalTheory, Signature), Failure> {
    let Some(path) = path else { return Ok((UniversalTheory::new(Vec::new()).expect("empty theory"), sig)) };
    let doc = read_document(path, sig)?;
    let mut axioms = Vec::new();
    for (no, line) in &doc.body {
        let f = parse_formula(line, &doc.sig).map_err(|e| Failure::Usage(format!("{}:{no}: {e}", path.display())))?;
        axioms.push(f);
    }
    let theory = UniversalTheory::new(axioms).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok((theory, doc.sig))
}

fn normalize(path: &Path) -> CmdResult {
    let doc = read_document(path, Signature::new())?;
    let f = formula_of(path, &doc)?;
    let alt = to_alternating(&f);
    let mut out = format!("k {}\nprenex {}\nalternating {}\nmatrix {}\n", alt.k(), to_prenex(&f), alt, alt.matrix());
    if !alt.dummies().is_empty() {
        let names: Vec<String> = alt.dummies().iter().map(Var::to_string).collect();
        out.push_str(&format!("dummies {}\n", names.join(" ")));
    }
    Ok(out)
}

/// Declarations, `tuple` lines and numbered `kappa` lines.
type TupleFile = (Signature, Vec<Vec<Term>>, Vec<(usize, String)>);

fn read_tuples(path: &Path) -> Result<TupleFile, Failure> {
    let doc = read_document(path, Signature::new())?;
    let mut tuples: Vec<Vec<Term>> = Vec::new();
    let mut kappa = Vec::new();
    for (no, line) in doc.body {
        let bad = |msg: String| Failure::Usage(format!("{}:{no}: {msg}", path.display()));
        if let Some(rest) = line.strip_prefix("tuple ") {
            let t = parse_terms(rest, &doc.sig).map_err(|e| bad(e.to_string()))?;
            if tuples.first().is_some_and(|first| first.len() != t.len()) || t.is_empty() {
                return Err(bad("tuples must be non-empty and of equal length".into()));
            }
            tuples.push(t);
        } else if line.starts_with("kappa ") {
            kappa.push((no, line));
        } else {
            return Err(bad(format!("expected `tuple` or `kappa`, found `{line}`")));
        }
    }
    if tuples.is_empty() {
        return Err(Failure::Usage(format!("{}: no tuples", path.display())));
    }
    Ok((doc.sig, tuples, kappa))
}

fn soundfn_check(path: &Path) -> CmdResult {
    let (sig, tuples, lines) = read_tuples(path)?;
    let mut map = TuplePrefixMap::<BigUint>::new(tuples[0].len());
    for (no, line) in lines {
        let (prefix, value) = parse_kappa_line::<BigUint>(&line, &sig)
            .map_err(|e| Failure::Usage(format!("{}:{no}: {e}", path.display())))?;
        map.insert(prefix, value);
    }
    match validate_sound(map, &tuples) {
        Ok(f) => Ok(format!("sound: {} prefixes\n", f.map().len())),
        Err(e) => Err(Failure::Negative(format!("not sound: {e}\n"))),
    }
}

fn soundfn_make(path: &Path, godel: bool) -> CmdResult {
    let (sig, tuples, _) = read_tuples(path)?;
    let lines = if godel {
        let mut failure = None;
        let map = TuplePrefixMap::from_fn(tuples[0].len(), &tuples, |p| {
            godel_kappa(p, &sig).unwrap_or_else(|e| {
                failure.get_or_insert(e.to_string());
                BigUint::default()
            })
        });
        if let Some(msg) = failure {
            return Err(Failure::Usage(msg));
        }
        map.to_lines()
    } else {
        compact_sound(&tuples).map().to_lines()
    };
    Ok(lines.iter().map(|l| format!("{l}\n")).collect())
}

/// A certificate from a file; without `kappa` lines the compact sound
/// function is used.
fn load_certificate(path: &Path) -> Result<(crate::expansion::CertificateFile, HerbrandCertificate), Failure> {
    let text = read(path)?;
    let file = read_certificate(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cert = if file.kappa.is_empty() {
        HerbrandCertificate::with_compact_kappa(file.base.clone(), file.tuples.clone())
            .map(|c| c.with_instances(file.instances.clone()))
    } else {
        file.certificate()
    };
    let cert = cert.map_err(|e| Failure::Negative(format!("rejected: {e}\n")))?;
    Ok((file, cert))
}

fn expand(path: &Path, normalize: bool, with_trace: bool) -> CmdResult {
    let (file, cert) = load_certificate(path)?;
    if normalize {
        let norm = normalize_certificate(&cert);
        let trace = with_trace.then(|| derive_lemma1(&norm));
        return Ok(write_certificate(&norm, &file.signature, trace.as_ref()));
    }
    let mut out = String::new();
    for i in 0..cert.n() {
        out.push_str(&format!("instance {} {}\n", i + 1, cert.instantiate(i)));
    }
    out.push_str(&format!("disjunction {}\n", cert.instantiate_all()));
    if with_trace {
        for step in &derive_lemma1(&cert).steps {
            out.push_str(&format!("{step}\n"));
        }
    }
    Ok(out)
}

fn prove(
    formula: &Path,
    theory: Option<&Path>,
    budget: &BudgetArgs,
    output: Option<&Path>,
    err: &mut dyn Write,
) -> CmdResult {
    let doc = read_document(formula, Signature::new())?;
    let (theory, sig) = theory_of(theory, doc.sig.clone())?;
    let doc = Document { sig, body: doc.body };
    let target = to_alternating(&formula_of(formula, &doc)?.universal_closure());
    let result = prove_with_jobs(&theory, &target, &budget.budget()?, jobs(budget.jobs))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    match result {
        ProverResult::Proved(cert, trace) => {
            let text = write_certificate(&cert, &doc.sig, Some(&trace));
            match output {
                Some(p) => {
                    fs::write(p, &text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                    Ok(format!("proved: N={} written to {}\n", cert.n(), p.display()))
                }
                None => Ok(text),
            }
        }
        ProverResult::Unknown(stats) => {
            let frontier = stats
                .last_stage
                .map(|s| format!("N={} depth={} instance depth={}", s.n, s.depth, s.instance_depth))
                .unwrap_or_else(|| "none".into());
            let _ = writeln!(
                err,
                "stages completed {}, last stage {frontier}, tuple sets {}, kappa candidates {}, ground checks {}, timed out {}",
                stats.stages_completed, stats.tuple_sets, stats.kappa_candidates, stats.ground_checks, stats.timed_out
            );
            Err(Failure::Negative("unknown\n".into()))
        }
    }
}

/// `0` means one worker per available core.
fn jobs(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn check(path: &Path, theory: Option<&Path>) -> CmdResult {
    let (file, cert) = load_certificate(path)?;
    if file.kappa.is_empty() {
        return Err(Failure::Negative("rejected: no kappa lines\n".into()));
    }
    let (theory, _) = theory_of(theory, file.signature.clone())?;
    match verify_certificate(&theory, &cert, file.trace.as_ref()) {
        Ok(v) if v.trace_checked => Ok("accepted: kappa, bounds, entailment and trace checked\n".into()),
        Ok(_) => Ok("accepted without trace: kappa, bounds and entailment checked only\n".into()),
        Err(e) => Err(Failure::Negative(format!("rejected: {e}\n"))),
    }
}

/// The algebras, and the formula parsed over their signature.
fn algebra_job(formula: &Path, algebras: &[PathBuf]) -> Result<(Vec<FiniteStructure>, Formula), Failure> {
    if algebras.is_empty() {
        return Err(Failure::Usage("at least one --algebra is required".into()));
    }
    let doc = read_document(formula, Signature::new())?;
    let mut structures: Vec<FiniteStructure> = Vec::new();
    for path in algebras {
        let sig = structures.last().map_or(&doc.sig, |s| s.signature());
        let s = FiniteStructure::parse(&read(path)?, Some(sig))
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        structures.push(s);
    }
    let doc = Document { sig: structures[0].signature().clone(), body: doc.body };
    let f = formula_of(formula, &doc)?;
    Ok((structures, f))
}

fn cor3(formula: &Path, algebras: &[PathBuf], depth: usize) -> CmdResult {
    let (structures, f) = algebra_job(formula, algebras)?;
    let found = positive_prefix_search(&structures, &f.universal_closure(), depth)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let Some(w) = found else { return Err(Failure::Negative("NOT FOUND\n".into())) };
    let mut out = format!("conjunct {}\n", w.conjunct);
    for (v, t) in &w.bindings {
        out.push_str(&format!("{v} := {t}\n"));
    }
    out.push_str(&format!("instance {}\n", w.instance));
    Ok(out)
}

fn defterm(formula: &Path, algebras: &[PathBuf], inputs: &[String], output: &str, depth: usize) -> CmdResult {
    let (structures, f) = algebra_job(formula, algebras)?;
    let free = f.free_vars();
    let lookup = |name: &str| {
        free.iter()
            .find(|v| v.to_string() == name)
            .copied()
            .ok_or_else(|| Failure::Usage(format!("`{name}` is not a free variable of the formula")))
    };
    let ins = inputs.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
    let out_var = lookup(output)?;
    match corollary5_search(&structures, &f, &ins, out_var, depth) {
        Ok(Some(t)) => Ok(format!("{t}\n")),
        Ok(None) => Err(Failure::Negative("NOT FOUND\n".into())),
        Err(DefinabilityError::NotFunctional { structure, inputs, first, second }) => {
            let vals: Vec<String> = inputs.iter().map(usize::to_string).collect();
            Err(Failure::Usage(format!(
                "not functional in algebra {}: inputs ({}) give {output}={first} and {output}={second}",
                structure + 1,
                vals.join(","),
            )))
        }
        Err(e) => Err(Failure::Usage(e.to_string())),
    }
}
