mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use common::*;
use herbrand::expansion::{
    check_bounds, check_trace, derive_lemma1, normalize_certificate, AxiomInstance, HerbrandCertificate, TraceStep,
};
use herbrand::finite_models::{
    all_structures, corollary3_search, corollary5_search, eval_term, product, DefinabilityError, Evaluator,
    FiniteStructure,
};
use herbrand::ground_solver::{entails, GroundProblem};
use herbrand::normal_forms::{to_alternating, to_prenex};
use herbrand::prover::{prove, verify_certificate, ProverResult, SearchBudget, UniversalTheory};
use herbrand::sound_fn::{godel_beta, godel_kappa, validate_sound, Condition, TuplePrefixMap};
use herbrand::syntax::{parse_formula, parse_terms, Atom, Formula, Signature, Term, Var};
use num_bigint::BigUint;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sound_function_fidelity() -> Outcome {
    let sig = Signature::new()
        .with_function("t1", 2)
        .with_function("t2", 1)
        .with_function("t3", 1)
        .with_function("s1", 2)
        .with_function("s2", 2)
        .with_function("s3", 1);
    let t = parse_terms("t1(x1,x3) t2(x1) t3(x6)", &sig).unwrap();
    let s = parse_terms("s1(x1,x3) s2(x2,x9) s3(x2)", &sig).unwrap();
    let tuples = vec![t.clone(), s.clone()];
    let mut map = TuplePrefixMap::new(3);
    for (tuple, values) in [(&t, [4u64, 5, 7]), (&s, [6, 10, 11])] {
        for j in 1..=3 {
            map.insert(tuple[..j].to_vec(), values[j - 1]);
        }
    }
    validate_sound(map.clone(), &tuples).map_err(|e| format!("example rejected: {e}"))?;
    let mutations: [(&[Term], u64, Condition); 3] = [
        (&s[..2], 5, Condition::Injective),
        (&s[..3], 9, Condition::Increasing),
        (&t[..1], 3, Condition::VariableBound),
    ];
    let mut named = Vec::new();
    for (prefix, value, cond) in mutations {
        let mut m = map.clone();
        m.insert(prefix.to_vec(), value);
        match validate_sound(m, &tuples) {
            Ok(_) => return Err(format!("mutation to {value} accepted")),
            Err(e) if e.conditions().contains(&cond) => named.push(cond.to_string()),
            Err(e) => return Err(format!("mutation to {value} rejected for the wrong reason: {e}")),
        }
    }
    Ok(format!("example accepted; mutations rejected naming {}", named.join(" ")))
}

/// Independent code for terms of depth <= 1.
fn beta_oracle(t: &Term, sig: &Signature) -> u128 {
    fn pair(a: u128, b: u128) -> u128 {
        (a + b) * (a + b + 1) / 2 + b
    }
    match t {
        Term::Var(v) => pair(0, v.index() as u128),
        Term::App(f, args) => {
            let mut list = 0;
            for a in args.iter().rev() {
                list = 1 + pair(beta_oracle(a, sig), list);
            }
            pair(1 + sig.function_index(f).unwrap() as u128, list)
        }
    }
}

fn godel_law() -> Outcome {
    let sig = Signature::new().with_function("c", 0).with_function("f", 1).with_function("g", 2);
    let leaves: Vec<Term> = (1..=3).map(Term::var).collect();
    let primes = [2u32, 3, 5];
    let mut rng = rng(2);
    for _ in 0..200 {
        let len = rng.gen_range(1..=3);
        let prefix: Vec<Term> = (0..len).map(|_| random_term(&mut rng, &sig, &leaves, 1)).collect();
        let mut want = BigUint::from(1u32);
        for (p, t) in primes.iter().zip(&prefix) {
            let b = beta_oracle(t, &sig);
            ensure(godel_beta(t, &sig).unwrap() == BigUint::from(b), format!("beta({t}) differs"))?;
            want *= BigUint::from(*p).pow(b as u32);
        }
        let got = godel_kappa(&prefix, &sig).map_err(|e| e.to_string())?;
        ensure(got == want, "kappa differs from the product formula")?;
    }
    for _ in 0..50 {
        let tuples: Vec<Vec<Term>> =
            (0..3).map(|_| (0..2).map(|_| random_term(&mut rng, &sig, &leaves, 1)).collect()).collect();
        let map = TuplePrefixMap::from_fn(2, &tuples, |p| godel_kappa(p, &sig).unwrap());
        validate_sound(map, &tuples).map_err(|e| format!("restriction rejected: {e}"))?;
    }
    Ok("200 prefixes match the product formula; 50 restrictions sound".into())
}

struct CertSample {
    sig: Signature,
    cert: HerbrandCertificate,
}

fn lemma_certificates(count: usize, seed: u64) -> Vec<CertSample> {
    let sigs = small_signatures();
    let mut rng = rng(seed);
    let params = CertParams { max_k: 3, max_n: 3, vars: 3, max_gap: 1 };
    let mut out = Vec::new();
    while out.len() < count {
        let sig = sigs[rng.gen_range(0..sigs.len())].clone();
        let cert = random_certificate(&mut rng, &sig, &params);
        if cert.instantiate_all().free_vars().len() <= 7 {
            out.push(CertSample { sig, cert });
        }
    }
    out
}

fn lemma_semantic_soundness() -> Outcome {
    let samples = lemma_certificates(300, 3);
    let mut models = 0u64;
    for (i, CertSample { sig, cert }) in samples.iter().enumerate() {
        let psi = Evaluator::new(sig, &cert.instantiate_all()).unwrap();
        let sentence = Evaluator::new(sig, &cert.base().sentence()).unwrap();
        for size in 1..=3 {
            for s in all_structures(sig, size) {
                if psi.holds_universally(&s) {
                    models += 1;
                    ensure(sentence.eval_values(&s, &[]), format!("certificate {i}: counterexample of size {size}"))?;
                }
            }
        }
    }
    Ok(format!("300 certificates, {models} models of the disjunction, 0 counterexamples"))
}

fn mutations(trace: &[TraceStep], n: usize) -> Vec<Vec<TraceStep>> {
    let mut out = Vec::new();
    for s in 0..trace.len() {
        let step = &trace[s];
        let mut push = |f: &dyn Fn(&mut TraceStep)| {
            let mut t = trace.to_vec();
            f(&mut t[s]);
            out.push(t);
        };
        push(&|st| st.r -= 1);
        push(&|st| st.r += 1);
        if step.active.len() > 1 {
            push(&|st| {
                st.active.pop();
            });
        } else if n > 1 {
            let extra = (1..=n).find(|i| !step.active.contains(i)).unwrap();
            push(&|st| {
                st.active.push(extra);
                st.active.sort();
            });
        }
        let other = step.active.get(1).copied().unwrap_or(if step.representative < n {
            step.representative + 1
        } else {
            step.representative - 1
        });
        if other >= 1 && other != step.representative {
            push(&|st| st.representative = other);
        }
        if s + 1 < trace.len() {
            let mut t = trace.to_vec();
            t.swap(s, s + 1);
            out.push(t);
        }
    }
    out
}

fn trace_round_trip() -> Outcome {
    let samples = lemma_certificates(300, 4);
    let (mut total, mut rejected) = (0, 0);
    for (i, CertSample { cert, .. }) in samples.iter().enumerate() {
        let trace = derive_lemma1(cert);
        check_trace(cert, &trace).map_err(|e| format!("certificate {i}: derived trace rejected: {e}"))?;
        for steps in mutations(&trace.steps, cert.n()) {
            total += 1;
            let mut t = trace.clone();
            t.steps = steps;
            if check_trace(cert, &t).is_err() {
                rejected += 1;
            }
        }
    }
    ensure(rejected == total, format!("{rejected}/{total} mutations rejected"))?;
    Ok(format!("300 traces accepted; {rejected}/{total} mutations rejected"))
}

fn prover_suite() -> Outcome {
    let sig = Signature::new().with_function("f", 1).with_relation("P", 1);
    let budget = SearchBudget {
        max_n: 4,
        max_depth: 3,
        max_instance_depth: 1,
        max_instances: 64,
        time_limit: Duration::from_secs(10),
    };
    let valid = [
        ("", "exists y1 forall z1 (P(y1) -> P(z1))"),
        ("forall x1 P(x1)", "exists y1 forall z1 P(y1)"),
        ("", "exists y1 forall z1 y1 = y1"),
        ("forall x1 (P(x1) -> P(f(x1)))", "exists y1 forall z1 (P(y1) -> P(f(f(y1))))"),
        ("", "exists y1 forall z1 exists y2 forall z2 y2 = f(z1)"),
        ("forall x1 f(x1) = x1", "exists y1 forall z1 f(f(y1)) = y1"),
    ];
    let mut notes = Vec::new();
    let structures: Vec<FiniteStructure> = (1..=3).flat_map(|n| all_structures(&sig, n)).collect();
    for (i, (axioms, target)) in valid.iter().enumerate() {
        let theory = UniversalTheory::parse(axioms, &sig).unwrap();
        let target_f = parse_formula(target, &sig).unwrap();
        let alt = to_alternating(&target_f);
        let started = Instant::now();
        let ProverResult::Proved(cert, trace) = prove(&theory, &alt, &budget).unwrap() else {
            return Err(format!("target {} not proved", i + 1));
        };
        let took = started.elapsed();
        verify_certificate(&theory, &cert, Some(&trace)).map_err(|e| format!("target {}: {e}", i + 1))?;
        check_bounds(&cert).map_err(|e| format!("target {}: {e}", i + 1))?;
        if i == 0 {
            let image: Vec<u64> = cert.kappa().image().into_iter().collect();
            ensure(cert.n() == 2 && image == [2, 3], format!("drinker: N={} image {image:?}", cert.n()))?;
        }
        if i == 1 {
            ensure(cert.n() == 1, "universal instance needs N=1")?;
        }
        let axiom_evs: Vec<Evaluator> = theory.axioms().map(|a| Evaluator::new(&sig, a).unwrap()).collect();
        let target_ev = Evaluator::new(&sig, &target_f).unwrap();
        for s in &structures {
            if axiom_evs.iter().all(|a| a.eval_values(s, &[])) {
                ensure(target_ev.eval_values(s, &[]), format!("target {} fails in a model", i + 1))?;
            }
        }
        notes.push(format!("N={} in {:.2}s", cert.n(), took.as_secs_f64()));
    }
    let unsat = [
        ("", "exists y1 forall z1 (P(y1) & ~P(z1))"),
        ("", "exists y1 forall z1 ~(z1 = z1)"),
        ("forall x1 ~P(f(x1))", "exists y1 forall z1 P(f(y1))"),
    ];
    let small = SearchBudget { time_limit: Duration::from_secs(3), ..budget };
    let mut explored = 0;
    for (axioms, target) in unsat {
        let theory = UniversalTheory::parse(axioms, &sig).unwrap();
        let alt = to_alternating(&parse_formula(target, &sig).unwrap());
        match prove(&theory, &alt, &small).unwrap() {
            ProverResult::Unknown(stats) => explored += stats.tuple_sets,
            ProverResult::Proved(..) => return Err(format!("unsatisfiable `{target}` proved")),
        }
    }
    Ok(format!("6/6 proved ({}); 3/3 unsatisfiable targets Unknown after {explored} tuple sets", notes.join(", ")))
}

/// Values of subterms as a partition, relations free on classes: every
/// structure restricted to the denotations of the subterms has this shape.
fn oracle_entails(hyps: &[Formula], goal: &Formula) -> bool {
    let mut universe: Vec<Term> = Vec::new();
    for f in hyps.iter().chain([goal]) {
        for a in f.atoms() {
            for t in a.terms() {
                let mut sub = Vec::new();
                t.subterms(&mut sub);
                for s in sub {
                    if !universe.contains(s) {
                        universe.push(s.clone());
                    }
                }
            }
        }
    }
    let n = universe.len();
    let index: HashMap<Term, usize> = universe.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut block = vec![0usize; n];
    loop {
        // consistency of function applications
        let mut ok = true;
        'outer: for i in 0..n {
            for j in 0..n {
                if let (Term::App(f, a), Term::App(g, b)) = (&universe[i], &universe[j]) {
                    if f == g
                        && a.iter().zip(b).all(|(x, y)| block[index[x]] == block[index[y]])
                        && block[i] != block[j]
                    {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            let mut keys: Vec<(String, Vec<usize>)> = Vec::new();
            for f in hyps.iter().chain([goal]) {
                for a in f.atoms() {
                    if let Atom::Rel(r, args) = a {
                        let key = (r.to_string(), args.iter().map(|t| block[index[t]]).collect());
                        if !keys.contains(&key) {
                            keys.push(key);
                        }
                    }
                }
            }
            for bits in 0..(1u32 << keys.len()) {
                let value = |a: &Atom| -> bool {
                    match a {
                        Atom::Eq(s, t) => block[index[s]] == block[index[t]],
                        Atom::Rel(r, args) => {
                            let key = (r.to_string(), args.iter().map(|t| block[index[t]]).collect::<Vec<_>>());
                            bits >> keys.iter().position(|k| *k == key).unwrap() & 1 == 1
                        }
                    }
                };
                fn ev(f: &Formula, value: &dyn Fn(&Atom) -> bool) -> bool {
                    match f {
                        Formula::Atom(a) => value(a),
                        Formula::Not(g) => !ev(g, value),
                        Formula::And(gs) => gs.iter().all(|g| ev(g, value)),
                        Formula::Or(gs) => gs.iter().any(|g| ev(g, value)),
                        Formula::Implies(a, b) => !ev(a, value) || ev(b, value),
                        _ => unreachable!(),
                    }
                }
                if hyps.iter().all(|h| ev(h, &value)) && !ev(goal, &value) {
                    return false;
                }
            }
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return true;
            }
            i -= 1;
            let max_before = block[..i].iter().max().copied().unwrap_or(0);
            if block[i] <= max_before {
                block[i] += 1;
                for b in block.iter_mut().skip(i + 1) {
                    *b = 0;
                }
                break;
            }
        }
    }
}

fn ground_oracle() -> Outcome {
    let sigs = [
        Signature::new().with_function("f", 1).with_relation("P", 1),
        Signature::new().with_function("g", 2).with_relation("P", 1),
        Signature::new().with_function("f", 1).with_function("g", 2),
    ];
    let leaves: Vec<Term> = (1..=3).map(Term::var).collect();
    let mut rng = rng(6);
    let (mut done, mut yes, mut spot) = (0, 0, 0);
    while done < 500 {
        let sig = &sigs[rng.gen_range(0..sigs.len())];
        let hyps: Vec<Formula> = (0..rng.gen_range(0..=2))
            .map(|_| {
                let atoms = rng.gen_range(1..=2);
                random_open(&mut rng, sig, &leaves, atoms, 1)
            })
            .collect();
        let atoms = rng.gen_range(1..=3);
        let goal = random_open(&mut rng, sig, &leaves, atoms, 1);
        let mut subterms = BTreeSet::new();
        for f in hyps.iter().chain([&goal]) {
            for a in f.atoms() {
                for t in a.terms() {
                    let mut sub = Vec::new();
                    t.subterms(&mut sub);
                    subterms.extend(sub.into_iter().cloned());
                }
            }
        }
        if subterms.len() > 6 {
            continue;
        }
        done += 1;
        let got = entails(&GroundProblem::new(hyps.clone(), goal.clone()));
        let want = oracle_entails(&hyps, &goal);
        ensure(got == want, format!("problem {done}: solver {got}, oracle {want}: {hyps:?} |- {goal}"))?;
        yes += got as usize;
        if done <= 100 {
            // genuine structures of size <= 2 never refute an entailment
            let imp = GroundProblem::new(hyps, goal).formula();
            let ev = Evaluator::new(sig, &imp).unwrap();
            for size in 1..=2 {
                for s in all_structures(sig, size) {
                    spot += 1;
                    ensure(!got || ev.holds_universally(&s), format!("problem {done}: refuted on size {size}"))?;
                }
            }
        }
    }
    Ok(format!("500/500 agree ({yes} entailed); {spot} structure spot checks"))
}

fn normalization_contract() -> Outcome {
    let sig = Signature::new().with_relation("P", 1).with_function("f", 1);
    let theory = UniversalTheory::parse("forall x1 (P(x1) -> P(f(x1)))", &sig).unwrap();
    let mut rng = rng(7);
    let params = CertParams { max_k: 3, max_n: 3, vars: 6, max_gap: 3 };
    let leaves: Vec<Term> = (1..=6).map(Term::var).collect();
    let (mut valid, mut changed) = (0, 0);
    for i in 0..200 {
        let mut cert = random_certificate(&mut rng, &sig, &params);
        if rng.gen_bool(0.5) {
            // drinker-shaped matrix, often valid for random tuples
            let b = cert.base();
            let (y, z) = (b.ys()[0], b.zs()[rng.gen_range(0..b.k())]);
            let matrix = Formula::implies(
                Formula::rel("P", vec![Term::Var(y)]),
                Formula::rel("P", vec![Term::app("f", vec![Term::Var(z)])]),
            );
            let base =
                herbrand::normal_forms::AlternatingPrenex::new(b.ys().to_vec(), b.zs().to_vec(), matrix).unwrap();
            cert = HerbrandCertificate::new(base, cert.tuples().to_vec(), cert.kappa().map().clone()).unwrap();
        }
        let instances: Vec<AxiomInstance> = (0..rng.gen_range(0..=3))
            .map(|_| AxiomInstance { axiom: 0, terms: vec![random_term(&mut rng, &sig, &leaves, 1)] })
            .collect();
        let cert = cert.with_instances(instances);
        let norm = normalize_certificate(&cert);
        check_bounds(&norm).map_err(|e| format!("certificate {i}: {e}"))?;
        let problem = |c: &HerbrandCertificate| {
            let hyps = c.instances().iter().map(|a| theory.instance(a).unwrap()).collect();
            GroundProblem::new(hyps, c.instantiate_all())
        };
        if entails(&problem(&cert)) {
            valid += 1;
            ensure(entails(&problem(&norm)), format!("certificate {i}: entailment lost"))?;
        }
        changed += (norm.certificate() != &cert) as usize;
    }
    ensure(valid > 0, "no entailed certificate generated")?;
    Ok(format!("200 within bounds ({changed} rewritten); {valid} entailed originals stay entailed"))
}

fn semilattice() -> FiniteStructure {
    let sig = Signature::new().with_function("meet", 2);
    FiniteStructure::new(sig, 2, vec![("meet", vec![0, 0, 0, 1])], vec![]).unwrap()
}

fn corollary3_desk() -> Outcome {
    let s = semilattice();
    let f = parse_formula("exists y1 forall z1 meet(y1,z1) = meet(z1,y1)", s.signature()).unwrap();
    let w = corollary3_search(std::slice::from_ref(&s), &to_alternating(&f), 2)
        .map_err(|e| e.to_string())?
        .ok_or("no witness found")?;
    let ev = Evaluator::new(s.signature(), &w.instance).unwrap();
    ensure(ev.holds_universally(&s), "instance fails in the algebra")?;
    let p = product(&[s.clone(), s.clone()]).unwrap();
    ensure(p.structure().size() <= 16 && ev.holds_universally(p.structure()), "instance fails in the square")?;
    Ok(format!("j0={}, t1={}, instance {} holds in A and A x A", w.conjunct, w.terms[0], w.instance))
}

fn corollary5_desk() -> Outcome {
    let s = semilattice();
    let sig = s.signature().clone();
    let phi = parse_formula("w1 = meet(v1,v1)", &sig).unwrap();
    let named = |f: &Formula, n: &str| f.free_vars().into_iter().find(|v| v.to_string() == n).unwrap();
    let (v, w) = (named(&phi, "v1"), named(&phi, "w1"));
    let t = corollary5_search(std::slice::from_ref(&s), &phi, &[v], w, 2)
        .map_err(|e| e.to_string())?
        .ok_or("no term found")?;
    let ev = Evaluator::new(&sig, &phi).unwrap();
    for a in 0..s.size() {
        let value = eval_term(&s, &t, &BTreeMap::from([(Var::new(1), a)])).unwrap();
        let order = ev.free_vars();
        let holds =
            |b: usize| ev.eval_values(&s, &order.iter().map(|x| if *x == v { a } else { b }).collect::<Vec<_>>());
        let defined: Vec<usize> = (0..s.size()).filter(|&b| holds(b)).collect();
        ensure(defined == [value], format!("f({a}) = {defined:?} but t gives {value}"))?;
    }
    let bad = parse_formula("exists y1 meet(w1,y1) = v1", &sig).unwrap();
    let (v, w) = (named(&bad, "v1"), named(&bad, "w1"));
    match corollary5_search(std::slice::from_ref(&s), &bad, &[v], w, 2) {
        Err(DefinabilityError::NotFunctional { inputs, first, second, .. }) => {
            let ev = Evaluator::new(&sig, &bad).unwrap();
            let order = ev.free_vars().to_vec();
            let at = |b: usize| order.iter().map(|x| if *x == v { inputs[0] } else { b }).collect::<Vec<_>>();
            ensure(
                ev.eval_values(&s, &at(first)) && ev.eval_values(&s, &at(second)) && first != second,
                "bad witness",
            )?;
            Ok(format!(
                "t = {t} matches pointwise; non-functional case rejected at v={}, w={first}, w'={second}",
                inputs[0]
            ))
        }
        other => Err(format!("non-functional formula not rejected: {other:?}")),
    }
}

fn normal_form_equivalence() -> Outcome {
    let runs = [
        (Signature::new().with_relation("R", 2), 200),
        (Signature::new().with_relation("P", 1).with_function("f", 1), 100),
    ];
    let mut rng = rng(10);
    let mut checks = 0u64;
    for (sig, count) in runs {
        let structures: Vec<FiniteStructure> = (1..=3).flat_map(|n| all_structures(&sig, n)).collect();
        for i in 0..count {
            let q = rng.gen_range(0..=4);
            let atoms = rng.gen_range(1..=6);
            let f = random_formula(&mut rng, &sig, q, atoms);
            let prenex = to_prenex(&f);
            let alt = to_alternating(&f).sentence();
            let free = f.free_vars();
            ensure(
                prenex.free_vars() == free && alt.free_vars() == free,
                format!("formula {i}: free variables changed"),
            )?;
            let evs: Vec<Evaluator> = [&f, &prenex, &alt].iter().map(|g| Evaluator::new(&sig, g).unwrap()).collect();
            for s in &structures {
                let n = free.len();
                for code in 0..s.size().pow(n as u32) {
                    let values: Vec<usize> = (0..n).map(|j| code / s.size().pow(j as u32) % s.size()).collect();
                    let v0 = evs[0].eval_values(s, &values);
                    checks += 1;
                    ensure(
                        evs[1].eval_values(s, &values) == v0 && evs[2].eval_values(s, &values) == v0,
                        format!("formula {i} `{f}` disagrees with its normal forms"),
                    )?;
                }
            }
        }
    }
    Ok(format!("300 formulas agree in all three forms ({checks} evaluations)"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("sound-function fidelity", sound_function_fidelity),
        ("Godel kappa law", godel_law),
        ("expansion semantic soundness", lemma_semantic_soundness),
        ("trace round trip", trace_round_trip),
        ("prover soundness and completeness smoke", prover_suite),
        ("ground-solver oracle equivalence", ground_oracle),
        ("normalization contract", normalization_contract),
        ("positive formulas at desk scale", corollary3_desk),
        ("term definability at desk scale", corollary5_desk),
        ("normal-form equivalence", normal_form_equivalence),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, run)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
                    (out, start.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (outcome, took))) in criteria.iter().zip(results).enumerate() {
        let secs = took.as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
