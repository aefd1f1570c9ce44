use asymod_core::atomic::{
    check_sym, cut_free_provable_atomic, cut_redundancy_vs_confluence, provable_atomic_asym, provable_atomic_sym,
    reduce_symmetric_atomic, AtomicAnswer, PairCertificate, PairReason,
};
use asymod_core::elim::{eliminate_cuts_atomic_asym, eliminate_cuts_full, EliminationResult, StepEvent, StepPolicy};
use asymod_core::generate::default_universe;
use asymod_core::kernel::{check_proof, FailureKind, Proof};
use asymod_core::rewrite::{
    confluent, locally_confluent, terminating, AnalysisVerdict, Budget, ConversionSequence, RewriteSystem,
};
use asymod_core::suites::{run_suite, Suite, SuiteConfig};
use asymod_core::syntax::{parse_policy, parse_problem, ProblemFile};
use asymod_core::term::{Position, Prop, Term};
use serde_json::json;

use crate::report::{Input, Outcome, RunReport, Witness};

/// Cap on the ground terms added to a problem's own terms by `analyze`.
pub const UNIVERSE_CAP: usize = 64;
pub const DEFAULT_STEPS: usize = 1_000;

#[derive(Debug)]
pub struct UsageError(pub String);

type Run = Result<RunReport, UsageError>;

pub fn load(path: &str) -> Result<(ProblemFile, Input), UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{path}: {e}")))?;
    let problem = parse_problem(&text).map_err(|e| UsageError(format!("{path}:{e}")))?;
    Ok((problem, Input::new(path, &text)))
}

fn need<'a, T>(x: Option<&'a T>, what: &str) -> Result<&'a T, UsageError> {
    x.ok_or_else(|| UsageError(format!("the problem file has no {what}")))
}

pub fn check(path: &str, budget: Budget, witnesses: bool) -> Run {
    let (problem, input) = load(path)?;
    if problem.proof.is_none() && problem.symproof.is_none() {
        return Err(UsageError("the problem file has no proof or symproof block".into()));
    }
    let system = &problem.system;
    let mut report = RunReport::new("check", Some(input), budget);
    let (mut valid, mut undetermined) = (true, false);
    let mut details = serde_json::Map::new();
    if let Some(proof) = &problem.proof {
        let r = check_proof(system, proof, budget);
        report.line(format!("proof: {} nodes, {}", r.nodes, if r.valid { "valid" } else { "invalid" }));
        for f in &r.failures {
            report.line(format!("  {f}"));
        }
        valid &= r.valid;
        undetermined |= !r.failures.is_empty() && r.failures.iter().all(|f| f.kind == FailureKind::Budget);
        if witnesses {
            for (path, ws) in &r.witnesses {
                for w in ws {
                    let mut wit = Witness::reduction(system, &w.derivation);
                    wit.description = format!("at {path}: {}", wit.description);
                    report.witnesses.push(wit);
                }
            }
        }
        let failures: Vec<_> = r
            .failures
            .iter()
            .map(|f| json!({"path": asymod_core::kernel::path_string(&f.path), "tag": f.tag, "kind": f.kind, "explanation": f.explanation}))
            .collect();
        details.insert("proof".into(), json!({"valid": r.valid, "nodes": r.nodes, "failures": failures}));
    }
    if let Some(sym) = &problem.symproof {
        let r = check_sym(system, sym, budget);
        report.line(format!("symproof: {}", if r.valid { "valid" } else { "invalid" }));
        for f in &r.failures {
            report.line(format!("  {f}"));
        }
        valid &= r.valid;
        details.insert("symproof".into(), json!({"valid": r.valid, "failures": r.failures}));
    }
    report.details = serde_json::Value::Object(details);
    match (valid, undetermined) {
        (true, _) => report.conclude("valid", Outcome::Success),
        (false, true) => report.conclude("unknown", Outcome::Unknown),
        (false, false) => report.conclude("invalid", Outcome::Refuted),
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Sym,
    Asym,
    Cutfree,
}

fn certificate(c: &PairCertificate) -> Witness {
    let list = |ps: &[Prop]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
    let why = match &c.reason {
        PairReason::Skeleton => "different predicate symbols".to_string(),
        PairReason::Class { of, class } => format!("the conversion class of {of} is {{{}}}", list(class)),
        PairReason::Reducts { left, right } => {
            format!("reducts {{{}}} and {{{}}} are complete and disjoint", list(left), list(right))
        }
    };
    Witness::note("certificate", format!("{} / {}: {why}", c.left, c.right))
}

fn answer<P>(report: &mut RunReport, a: &AtomicAnswer<P>, witness: impl Fn(&P) -> Witness) {
    match a {
        AtomicAnswer::Provable(p) => {
            report.witnesses.push(witness(p));
            report.conclude("provable", Outcome::Success);
        }
        AtomicAnswer::NotProvable(certs) => {
            report.witnesses.extend(certs.iter().map(certificate));
            report.conclude("not-provable", Outcome::Refuted);
        }
        AtomicAnswer::Unknown(reason) => {
            report.line(reason.clone());
            report.conclude("unknown", Outcome::Unknown);
        }
    }
}

pub fn prove_atomic(path: &str, mode: Mode, budget: Budget) -> Run {
    let (problem, input) = load(path)?;
    let goal = need(problem.goal(), "sequent")?.clone();
    let system = &problem.system;
    let mut report = RunReport::new("prove-atomic", Some(input), budget);
    report.line(format!("sequent: {goal}"));
    let not_atomic = |e: asymod_core::atomic::NonAtomic| UsageError(e.to_string());
    let proof_details = |p: &Proof| json!({"cuts": p.cut_count(), "cut_free": p.is_cut_free()});
    match mode {
        Mode::Sym => {
            let a = provable_atomic_sym(system, &goal, budget).map_err(not_atomic)?;
            answer(&mut report, &a, |p| Witness::sym_proof("symmetric proof", system, p));
            report.details = json!({"mode": "sym"});
        }
        Mode::Asym | Mode::Cutfree => {
            let a = if mode == Mode::Asym {
                provable_atomic_asym(system, &goal, budget)
            } else {
                cut_free_provable_atomic(system, &goal, budget)
            }
            .map_err(not_atomic)?;
            answer(&mut report, &a, |p| Witness::proof("proof", format!("{} cut(s)", p.cut_count()), system, p));
            let mode = if mode == Mode::Asym { "asym" } else { "cutfree" };
            report.details = json!({"mode": mode, "proof": a.proof().map(proof_details)});
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    SymAtomic,
    Newman,
    Full,
}

fn policy(problem: &ProblemFile, spec: Option<&str>) -> Result<StepPolicy, UsageError> {
    match spec {
        None | Some("rule-order") => Ok(StepPolicy::rule_order()),
        Some("scripted") => need(problem.policy.as_ref(), "policy block").cloned(),
        Some(file) => {
            let text = std::fs::read_to_string(file).map_err(|e| UsageError(format!("{file}: {e}")))?;
            parse_policy(&text, problem.signature()).map_err(|e| UsageError(format!("{file}:{e}")))
        }
    }
}

pub fn eliminate(path: &str, engine: Engine, policy_spec: Option<&str>, steps: Option<usize>, budget: Budget) -> Run {
    let (problem, input) = load(path)?;
    let system = &problem.system;
    let mut report = RunReport::new("eliminate", Some(input), budget);
    if engine == Engine::SymAtomic {
        let proof = need(problem.symproof.as_ref(), "symproof block")?;
        let r = reduce_symmetric_atomic(proof);
        report.line(format!("{} step(s), one cut removed per step", r.steps));
        report.witnesses.push(Witness::sym_proof("cut-free symmetric proof", system, &r.proof));
        report.details = json!({"engine": "sym-atomic", "result": "cut-free", "steps": r.steps});
        report.conclude("cut-free", Outcome::Success);
        return Ok(report);
    }
    let proof = need(problem.proof.as_ref(), "proof block")?;
    let policy = policy(&problem, policy_spec)?;
    let steps = steps.unwrap_or(DEFAULT_STEPS);
    report.step_budget = Some(steps);
    let run = match engine {
        Engine::Newman => eliminate_cuts_atomic_asym(system, proof, &policy, steps, budget),
        _ => eliminate_cuts_full(system, proof, &policy, steps, budget),
    };
    let engine_name = if engine == Engine::Newman { "newman" } else { "full" };
    let result = match run {
        Ok(r) => r,
        Err(e) => {
            report.line(e.to_string());
            report.details = json!({"engine": engine_name, "result": "rejected"});
            report.conclude("rejected", Outcome::Refuted);
            return Ok(report);
        }
    };
    let trace = result.trace();
    report.line(format!("{} step(s); cuts before: {}, after: {}", trace.steps.len(), proof.cut_count(), result.proof().cut_count()));
    let reason = match &result {
        EliminationResult::CutFree { .. } => None,
        EliminationResult::Failed { reason, .. } | EliminationResult::BudgetExhausted { reason, .. } => {
            report.line(reason.clone());
            Some(reason.clone())
        }
    };
    for s in &trace.steps {
        if let StepEvent::Stuck { source, left, right } = &s.event {
            report.witnesses.push(Witness::note("divergence", format!("{left} <-1 {source} ->1 {right}")));
        }
    }
    report.witnesses.push(Witness::proof("proof", format!("{} proof", result.label()), system, result.proof()));
    report.details = json!({
        "engine": engine_name,
        "result": result.label(),
        "reason": reason,
        "steps": trace.steps.len(),
        "cuts_before": proof.cut_count(),
        "cuts_after": result.proof().cut_count(),
        "policy": policy,
    });
    report.trace = Some(trace.clone());
    match result {
        EliminationResult::CutFree { .. } => report.conclude("cut-free", Outcome::Success),
        EliminationResult::Failed { .. } => report.conclude("failed", Outcome::Refuted),
        EliminationResult::BudgetExhausted { .. } => report.conclude("budget-exhausted", Outcome::Unknown),
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    LocalConfluence,
    Confluence,
    Termination,
    Equivalence,
}

/// `system` with a fresh unary predicate, and `seq` lifted under it, so
/// that term reductions become checkable proofs.
fn lift(system: &RewriteSystem, seq: &ConversionSequence<Term>) -> (RewriteSystem, ConversionSequence<Prop>) {
    let sig = system.signature();
    let fresh = (0..)
        .map(|i| if i == 0 { "R".to_string() } else { format!("R{i}") })
        .find(|n| sig.predicate_arity(n).is_none() && sig.function_arity(n).is_none())
        .expect("some name is free");
    let mut sig = sig.clone();
    sig.add_predicate(&fresh, 1).expect("fresh predicate");
    let lifted = RewriteSystem::new(sig, system.rules().to_vec()).expect("same rules");
    let seq = seq.map(|t| Prop::atom(&fresh, vec![t.clone()]), &Position(vec![0]));
    (lifted, seq)
}

fn term_reduction(system: &RewriteSystem, seq: &ConversionSequence<Term>) -> Witness {
    let (lifted, props) = lift(system, seq);
    let mut w = Witness::reduction(&lifted, &props);
    w.description = format!("{} ->* {}", seq.first(), seq.last());
    w.derivation = Some(seq.render_detailed(system));
    w
}

fn verdict<W>(report: &mut RunReport, v: &AnalysisVerdict<W>) {
    match v {
        AnalysisVerdict::Holds(c) => {
            report.line(format!("covered {} seed(s), {} object(s)", c.checked, c.objects));
            report.details = json!({"coverage": c});
            report.conclude("holds", Outcome::Success);
        }
        AnalysisVerdict::Fails(_) => report.conclude("fails", Outcome::Refuted),
        AnalysisVerdict::Unknown(reason) => {
            report.line(reason.clone());
            report.conclude("unknown", Outcome::Unknown);
        }
    }
}

pub fn analyze(path: &str, check: Check, depth: usize, budget: Budget) -> Run {
    let (problem, input) = load(path)?;
    let system = &problem.system;
    let props: Vec<Prop> = problem.goal().map(|s| s.gamma.iter().chain(&s.delta).cloned().collect()).unwrap_or_default();
    let universe = default_universe(system, &props, depth, UNIVERSE_CAP);
    let mut report = RunReport::new("analyze", Some(input), budget);
    let names: Vec<String> = universe.iter().map(|t| t.to_string()).collect();
    report.line(format!("universe: {} term(s)", universe.len()));
    match check {
        Check::LocalConfluence => {
            let v = locally_confluent(system, budget);
            verdict(&mut report, &v);
            if let Some(w) = v.witness() {
                let p = &w.pair;
                let mut wit = Witness::note("critical-pair", format!("{} <- {} -> {}", p.left, p.source, p.right));
                wit.derivation = Some(p.peak().render_detailed(system));
                report.witnesses.push(wit);
                report.details = json!({"source": p.source.to_string(), "left": p.left.to_string(), "right": p.right.to_string()});
            }
        }
        Check::Confluence => {
            let v = confluent(system, &universe, budget);
            verdict(&mut report, &v);
            if let Some(w) = v.witness() {
                report.line(format!("{} and {} have no common reduct", w.left, w.right));
                report.witnesses.push(term_reduction(system, &w.left_derivation));
                report.witnesses.push(term_reduction(system, &w.right_derivation));
                report.details = json!({"seed": w.seed.to_string(), "left": w.left.to_string(), "right": w.right.to_string()});
            }
        }
        Check::Termination => {
            let v = terminating(system, &universe, budget);
            verdict(&mut report, &v);
            if let Some(c) = v.witness() {
                let mut w = term_reduction(system, &c.derivation);
                w.kind = "cycle".to_string();
                report.line(format!("cycle: {}", c.derivation.render()));
                let cycle: Vec<String> = c.derivation.objects().iter().map(|t| t.to_string()).collect();
                report.details = json!({"cycle": cycle});
                report.witnesses.push(w);
            }
        }
        Check::Equivalence => {
            let r = cut_redundancy_vs_confluence(system, &universe, budget);
            report.line(format!(
                "carrier: {} term(s), {} convertible pair(s); cut redundant: {:?}, confluent: {:?}",
                r.carrier.len(),
                r.pairs_checked,
                r.cut_redundant,
                r.confluent
            ));
            if let Some(reason) = &r.reason {
                report.line(reason.clone());
            }
            if let (Some((t, u)), Some(p)) = (&r.cut_witness, &r.witness_proof) {
                let what = format!("{}({t}) |- {}({u}) needs a cut", r.predicate, r.predicate);
                report.witnesses.push(Witness::proof("proof", what, system, p));
            }
            if let Some(w) = &r.confluence_witness {
                report.witnesses.push(term_reduction(system, &w.left_derivation));
                report.witnesses.push(term_reduction(system, &w.right_derivation));
            }
            report.details = json!({
                "carrier": r.carrier.len(),
                "pairs_checked": r.pairs_checked,
                "cut_redundant": r.cut_redundant,
                "confluent": r.confluent,
                "agree": r.agree(),
                "witness_proof_valid": r.witness_proof_valid,
            });
            match r.agree() {
                Some(true) => report.conclude("agree", Outcome::Success),
                Some(false) => report.conclude("disagree", Outcome::Refuted),
                None => report.conclude("unknown", Outcome::Unknown),
            }
        }
    }
    if let serde_json::Value::Object(m) = &mut report.details {
        m.insert("universe".into(), json!(names));
    }
    Ok(report)
}

pub fn random_test(suite: Suite, count: usize, seed: u64) -> Run {
    let config = SuiteConfig::new(count, seed);
    let r = run_suite(suite, &config);
    let mut report = RunReport::new("random-test", None, config.budget);
    report.line(format!(
        "{}: {} system(s): {} checked, {} outside the hypotheses, {} incomplete",
        r.suite, r.systems, r.checked, r.vacuous, r.incomplete
    ));
    report.line(format!("{} proof(s), {} elimination step(s), {} violation(s)", r.proofs_checked, r.steps_taken, r.violations.len()));
    for v in &r.violations {
        report.witnesses.push(Witness::note("violation", format!("seed {}: {} [{}]", v.seed, v.description, v.rules.join("; "))));
    }
    let ok = r.ok();
    report.details = serde_json::to_value(&r).expect("suite reports serialize");
    if ok {
        report.conclude("pass", Outcome::Success);
    } else {
        report.conclude("violations", Outcome::Refuted);
    }
    Ok(report)
}
