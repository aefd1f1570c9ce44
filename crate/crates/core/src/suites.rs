//! Property suites over randomly generated ground systems.
//!
//! Each suite draws `count` systems from consecutive seeds, skips those
//! whose reduct closures do not finish within budget, and reports every
//! violation with the seed that produced it. Systems are processed in
//! parallel; the report lists them in seed order.

use std::collections::BTreeMap;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::atomic::{
    check_sym, cut_redundancy_vs_confluence, forward_carrier, proof_from_conversion, provable_atomic_asym, reduce_symmetric_atomic,
    AtomicAnswer, SymProof,
};
use crate::elim::{
    eliminate_cuts_atomic_asym, instrument_measure, step_bound, EliminationResult, StepEvent, StepPolicy,
};
use crate::generate::{generate_random_system, generator_signature, ground_terms, GenParams, PREDICATE};
use crate::kernel::{check_proof, Proof, Rule, Sequent};
use crate::rewrite::{
    confluent, ConvStep, ConversionSequence, Direction, locally_confluent, terminating, AnalysisVerdict, Budget, RewriteSystem, Rewriter};
use crate::term::{Position, Prop, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Local confluence and termination give confluence, and the splitting
    /// procedure succeeds with a decreasing cut multiset.
    Newman,
    /// Cut redundancy on atomic sequents coincides with confluence.
    Equivalence,
    /// Under local confluence the splitting step never gets stuck.
    LocalConfluence,
    /// Under termination the splitting procedure ends within its bound.
    Termination,
    /// Symmetric atomic reduction takes one step per cut.
    Symmetric,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Newman, Suite::Equivalence, Suite::LocalConfluence, Suite::Termination, Suite::Symmetric];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Newman => "newman",
            Suite::Equivalence => "equivalence",
            Suite::LocalConfluence => "local-confluence",
            Suite::Termination => "termination",
            Suite::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub count: usize,
    pub seed: u64,
    pub budget: Budget,
    pub params: GenParams,
    /// Depth of the ground universe seeding every analysis.
    pub universe_depth: usize,
    /// Convertible pairs turned into proofs per system.
    pub max_pairs: usize,
    /// Step budget for runs that are not expected to terminate.
    pub open_steps: usize,
}

impl SuiteConfig {
    pub fn new(count: usize, seed: u64) -> Self {
        SuiteConfig {
            count,
            seed,
            budget: Budget { max_objects: 2_000, max_depth: 64 },
            params: GenParams::default(),
            universe_depth: 3,
            max_pairs: 40,
            open_steps: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub rules: Vec<String>,
    pub description: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub first_seed: u64,
    pub systems: usize,
    /// Systems for which the suite's hypotheses held and every check ran.
    pub checked: usize,
    /// Systems outside the suite's hypotheses.
    pub vacuous: usize,
    /// Systems dropped because a closure or a check ran out of budget.
    pub incomplete: usize,
    pub proofs_checked: usize,
    pub steps_taken: usize,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

enum Status {
    Checked { proofs: usize, steps: usize },
    Vacuous,
    Incomplete,
}

struct SystemResult {
    status: Status,
    violations: Vec<String>,
}

impl SystemResult {
    fn status(status: Status) -> Self {
        SystemResult { status, violations: Vec::new() }
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> SuiteReport {
    let seeds: Vec<u64> = (0..config.count as u64).map(|i| config.seed.wrapping_add(i)).collect();
    let results: Vec<(u64, RewriteSystem, SystemResult)> = seeds
        .par_iter()
        .map(|&seed| {
            let system = generate_random_system(seed, config.params);
            let result = run_one(suite, &system, seed, config);
            (seed, system, result)
        })
        .collect();
    let mut report =
        SuiteReport { suite: suite.name().to_string(), first_seed: config.seed, systems: seeds.len(), ..Default::default() };
    for (seed, system, result) in results {
        match result.status {
            Status::Checked { proofs, steps } => {
                report.checked += 1;
                report.proofs_checked += proofs;
                report.steps_taken += steps;
            }
            Status::Vacuous => report.vacuous += 1,
            Status::Incomplete => report.incomplete += 1,
        }
        let rules: Vec<String> = system.rules().iter().map(|r| r.to_string()).collect();
        for description in result.violations {
            report.violations.push(Violation { seed, rules: rules.clone(), description });
        }
    }
    report
}

fn run_one(suite: Suite, system: &RewriteSystem, seed: u64, config: &SuiteConfig) -> SystemResult {
    let universe = ground_terms(&generator_signature(), config.universe_depth, usize::MAX);
    match suite {
        Suite::Equivalence => return equivalence(system, &universe, config),
        Suite::Symmetric => return symmetric(system, &universe, seed, config),
        _ => {}
    }
    let Some(carrier) = forward_carrier(system, &universe, config.budget) else {
        return SystemResult::status(Status::Incomplete);
    };
    match suite {
        Suite::Newman => newman(system, &carrier, seed, config),
        Suite::LocalConfluence => local_confluence(system, &carrier, seed, config),
        _ => termination(system, &carrier, seed, config),
    }
}

fn atom(t: &Term) -> Prop {
    Prop::atom(PREDICATE, vec![t.clone()])
}

fn equivalence(system: &RewriteSystem, universe: &[Term], config: &SuiteConfig) -> SystemResult {
    let report = cut_redundancy_vs_confluence(system, universe, config.budget);
    let Some(agree) = report.agree() else {
        return SystemResult::status(Status::Incomplete);
    };
    let mut out = SystemResult::status(Status::Checked { proofs: report.pairs_checked, steps: 0 });
    if !agree {
        out.violations.push(format!(
            "cut redundancy is {:?} but confluence is {:?}",
            report.cut_redundant, report.confluent
        ));
    }
    if report.witness_proof_valid == Some(false) {
        out.violations.push("the witness proof with cuts does not check".to_string());
    }
    out
}

/// Proofs of atomic sequents `P(t) ⊢ P(u)` over the carrier: one per
/// convertible pair from a shortest conversion, and one per carrier term
/// from a random walk through `->1` and `<-1`, whose peaks become cuts.
/// Proofs with cuts come first; at most `max` are returned.
pub fn synthesized_proofs(
    system: &RewriteSystem,
    carrier: &[Term],
    seed: u64,
    max: usize,
    budget: Budget,
) -> Option<Vec<Proof>> {
    let mut with_cuts = Vec::new();
    let mut without = Vec::new();
    let mut push = |p: Proof| if p.is_cut_free() { without.push(p) } else { with_cuts.push(p) };
    for p in random_walk_proofs(system, carrier, seed, budget) {
        push(p);
    }
    let mut rw = Rewriter::<Prop>::new(system, budget);
    let mut pairs = 0;
    'pairs: for (i, t) in carrier.iter().enumerate() {
        for u in &carrier[i + 1..] {
            if pairs >= max {
                break 'pairs;
            }
            if rw.convertible(&atom(t), &atom(u)).sequence().is_none() {
                continue;
            }
            pairs += 1;
            let s = Sequent::new(vec![atom(t)], vec![atom(u)]);
            match provable_atomic_asym(system, &s, budget).expect("atomic sequent") {
                AtomicAnswer::Provable(p) => push(p),
                AtomicAnswer::NotProvable(_) => {}
                AtomicAnswer::Unknown(_) => return None,
            }
        }
    }
    drop(push);
    with_cuts.extend(without);
    with_cuts.truncate(max);
    Some(with_cuts)
}

fn random_walk_proofs(system: &RewriteSystem, carrier: &[Term], seed: u64, budget: Budget) -> Vec<Proof> {
    let mut rw = Rewriter::<Prop>::new(system, budget);
    let props: Vec<Prop> = carrier.iter().map(atom).collect();
    // carrier is closed under ->1, so its predecessor edges are all found here
    let mut preds: BTreeMap<Prop, Vec<(Prop, usize, Position)>> = BTreeMap::new();
    for v in &props {
        for r in rw.one_step(v).iter() {
            preds.entry(r.object.clone()).or_default().push((v.clone(), r.rule, r.position.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11c);
    let mut out = Vec::new();
    for start in &props {
        let mut seq = ConversionSequence::single(start.clone());
        for _ in 0..rng.random_range(2..=8) {
            let here = seq.last().clone();
            let fwd = rw.one_step(&here);
            let back = preds.get(&here).map(Vec::as_slice).unwrap_or(&[]);
            if fwd.is_empty() && back.is_empty() {
                break;
            }
            let k = rng.random_range(0..fwd.len() + back.len());
            if k < fwd.len() {
                let r = &fwd[k];
                let step = ConvStep { direction: Direction::Forward, rule: r.rule, position: r.position.clone() };
                seq.push(step, r.object.clone());
            } else {
                let (v, rule, position) = &back[k - fwd.len()];
                let step = ConvStep { direction: Direction::Backward, rule: *rule, position: position.clone() };
                seq.push(step, v.clone());
            }
        }
        let (a, b) = (seq.first().clone(), seq.last().clone());
        let s = Sequent::new(vec![a.clone()], vec![b.clone()]);
        out.push(proof_from_conversion(system, &s, &a, &b, &seq).expect("walk follows the rules"));
    }
    out
}

/// Runs the splitting procedure on `proof` and checks what every run must
/// satisfy: the end sequent is kept, every intermediate proof and the
/// final one check, and no cut is stuck when `stuck_allowed` is false.
fn run_and_check(
    system: &RewriteSystem,
    proof: &Proof,
    steps: usize,
    stuck_allowed: bool,
    budget: Budget,
    violations: &mut Vec<String>,
) -> Option<EliminationResult> {
    let result = match eliminate_cuts_atomic_asym(system, proof, &StepPolicy::rule_order(), steps, budget) {
        Ok(r) => r,
        Err(e) => {
            violations.push(format!("elimination of {} rejected the proof: {e}", proof.conclusion));
            return None;
        }
    };
    if result.proof().conclusion != proof.conclusion {
        violations.push(format!("elimination changed the end sequent {}", proof.conclusion));
    }
    let report = check_proof(system, result.proof(), budget);
    if !report.valid {
        violations.push(format!("the proof left by elimination of {} does not check", proof.conclusion));
    }
    if !stuck_allowed && result.trace().steps.iter().any(|s| matches!(s.event, StepEvent::Stuck { .. })) {
        violations.push(format!("a step got stuck while eliminating cuts from {}", proof.conclusion));
    }
    Some(result)
}

fn newman(system: &RewriteSystem, carrier: &[Term], seed: u64, config: &SuiteConfig) -> SystemResult {
    let lc = locally_confluent(system, config.budget);
    let term = terminating(system, carrier, config.budget);
    if matches!(lc, AnalysisVerdict::Unknown(_)) || matches!(term, AnalysisVerdict::Unknown(_)) {
        return SystemResult::status(Status::Incomplete);
    }
    if !(lc.holds() && term.holds()) {
        return SystemResult::status(Status::Vacuous);
    }
    let mut violations = Vec::new();
    match confluent(system, carrier, config.budget) {
        AnalysisVerdict::Holds(_) => {}
        AnalysisVerdict::Fails(w) => violations.push(format!("not confluent: {} <- {} -> {}", w.left, w.seed, w.right)),
        AnalysisVerdict::Unknown(_) => return SystemResult::status(Status::Incomplete),
    }
    let Some(proofs) = synthesized_proofs(system, carrier, seed, config.max_pairs, config.budget) else {
        return SystemResult::status(Status::Incomplete);
    };
    let mut steps = 0;
    for proof in &proofs {
        let bound = match step_bound(system, proof, config.budget) {
            Ok(b) => b,
            Err(_) => return SystemResult::status(Status::Incomplete),
        };
        let Some(result) = run_and_check(system, proof, bound, false, config.budget, &mut violations) else { continue };
        steps += result.trace().steps.len();
        match &result {
            EliminationResult::CutFree { proof: out, .. } => {
                if let Rule::Axiom { common } = &out.rule {
                    let mut rw = Rewriter::<Prop>::new(system, config.budget);
                    let reaches = |rw: &mut Rewriter<'_, Prop>, p: &Prop| matches!(rw.reduces_to(p, common), crate::rewrite::ReachAnswer::Yes(_));
                    let (a, b) = (&proof.conclusion.gamma[0], &proof.conclusion.delta[0]);
                    if !(reaches(&mut rw, a) && reaches(&mut rw, b)) {
                        violations.push(format!("axiom on {common} is not a common reduct for {}", proof.conclusion));
                    }
                }
            }
            other => violations.push(format!("elimination on {} ended {}", proof.conclusion, other.label())),
        }
        match instrument_measure(system, result.trace(), config.budget) {
            Ok(m) if m.ok() => {}
            Ok(m) => violations.push(format!("cut multiset did not decrease: {}", m.violations[0].reason)),
            Err(_) => violations.push("no reduction ordering on the trace carrier".to_string()),
        }
    }
    SystemResult { status: Status::Checked { proofs: proofs.len(), steps }, violations }
}

fn local_confluence(system: &RewriteSystem, carrier: &[Term], seed: u64, config: &SuiteConfig) -> SystemResult {
    match locally_confluent(system, config.budget) {
        AnalysisVerdict::Holds(_) => {}
        AnalysisVerdict::Fails(_) => return SystemResult::status(Status::Vacuous),
        AnalysisVerdict::Unknown(_) => return SystemResult::status(Status::Incomplete),
    }
    let Some(proofs) = synthesized_proofs(system, carrier, seed, config.max_pairs, config.budget) else {
        return SystemResult::status(Status::Incomplete);
    };
    let mut violations = Vec::new();
    let mut steps = 0;
    for proof in &proofs {
        if let Some(r) = run_and_check(system, proof, config.open_steps, false, config.budget, &mut violations) {
            steps += r.trace().steps.len();
        }
    }
    SystemResult { status: Status::Checked { proofs: proofs.len(), steps }, violations }
}

fn termination(system: &RewriteSystem, carrier: &[Term], seed: u64, config: &SuiteConfig) -> SystemResult {
    match terminating(system, carrier, config.budget) {
        AnalysisVerdict::Holds(_) => {}
        AnalysisVerdict::Fails(_) => return SystemResult::status(Status::Vacuous),
        AnalysisVerdict::Unknown(_) => return SystemResult::status(Status::Incomplete),
    }
    let Some(proofs) = synthesized_proofs(system, carrier, seed, config.max_pairs, config.budget) else {
        return SystemResult::status(Status::Incomplete);
    };
    let mut violations = Vec::new();
    let mut steps = 0;
    for proof in &proofs {
        let bound = match step_bound(system, proof, config.budget) {
            Ok(b) => b,
            Err(_) => return SystemResult::status(Status::Incomplete),
        };
        // non-confluent systems may fail, but never run past the bound
        let Some(r) = run_and_check(system, proof, bound, true, config.budget, &mut violations) else { continue };
        steps += r.trace().steps.len();
        if matches!(r, EliminationResult::BudgetExhausted { .. }) {
            violations.push(format!("no result within {bound} steps for {}", proof.conclusion));
        }
        match instrument_measure(system, r.trace(), config.budget) {
            Ok(m) if m.ok() => {}
            Ok(m) => violations.push(format!("cut multiset did not decrease: {}", m.violations[0].reason)),
            Err(_) => violations.push("no reduction ordering on the trace carrier".to_string()),
        }
    }
    SystemResult { status: Status::Checked { proofs: proofs.len(), steps }, violations }
}

/// A valid symmetric proof of `P(t) ⊢ P(u)` with `cuts` cuts, each on a
/// member of the conversion class of `P(t)`.
pub fn random_sym_proof(rng: &mut ChaCha8Rng, class: &[Prop], cuts: usize) -> SymProof {
    fn build(rng: &mut ChaCha8Rng, class: &[Prop], s: Sequent, cuts: usize) -> SymProof {
        if cuts == 0 {
            let a = s.gamma[rng.random_range(0..s.gamma.len())].clone();
            let b = s.delta[rng.random_range(0..s.delta.len())].clone();
            return SymProof::axiom(s, a, b);
        }
        let c = class[rng.random_range(0..class.len())].clone();
        let on_left = rng.random_range(0..cuts);
        let l = build(rng, class, s.with_right(c.clone()), on_left);
        let r = build(rng, class, s.with_left(c.clone()), cuts - 1 - on_left);
        SymProof::cut(s, c.clone(), c, l, r)
    }
    let t = class[rng.random_range(0..class.len())].clone();
    let u = class[rng.random_range(0..class.len())].clone();
    build(rng, class, Sequent::new(vec![t], vec![u]), cuts)
}

const SYM_CLASS_OBJECTS: usize = 64;

fn symmetric(system: &RewriteSystem, carrier: &[Term], seed: u64, config: &SuiteConfig) -> SystemResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    // any explored part of the class will do: its members are convertible,
    // and a small part keeps conversions short enough to re-check
    let mut rw = Rewriter::<Prop>::new(system, Budget::objects(SYM_CLASS_OBJECTS));
    let t = &carrier[rng.random_range(0..carrier.len())];
    let class = rw.conversion_class(&atom(t));
    let cuts = rng.random_range(1..=5);
    let proof = random_sym_proof(&mut rng, &class.elements, cuts);
    let mut violations = Vec::new();
    if !check_sym(system, &proof, config.budget).valid {
        violations.push(format!("generated proof of {} does not check", proof.conclusion));
    }
    let reduced = reduce_symmetric_atomic(&proof);
    if reduced.steps != cuts {
        violations.push(format!("{} steps for {cuts} cuts", reduced.steps));
    }
    if !matches!(reduced.proof.rule, crate::atomic::SymRule::Axiom { .. }) || !reduced.proof.premises.is_empty() {
        violations.push("the result is not a single axiom".to_string());
    }
    if reduced.proof.conclusion != proof.conclusion {
        violations.push("the end sequent changed".to_string());
    }
    if !check_sym(system, &reduced.proof, config.budget).valid {
        violations.push(format!("reduced proof of {} does not check", proof.conclusion));
    }
    SystemResult { status: Status::Checked { proofs: 1, steps: reduced.steps }, violations }
}
