use thiserror::Error;

use crate::kernel::{check_proof, multiset_minus, same_skeleton, Proof, Rule};
use crate::rewrite::{Budget, DerivationHeights, HeightError, Joinability, ReachAnswer, RewriteSystem, Rewriter};
use crate::term::Prop;

use super::policy::StepPolicy;
use super::trace::{Collapse, EliminationResult, ReductionTrace, StepEvent, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElimError {
    #[error("the node is not a cut")]
    NotACut,
    #[error("the premises of the cut still contain cuts")]
    PremisesNotCutFree,
    #[error("the premises do not fit the cut rule")]
    Malformed,
    #[error("{0} is not atomic")]
    NonAtomic(Prop),
    #[error("the input proof does not check: {0}")]
    Invalid(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Result of one step on a single cut.
#[derive(Debug, Clone)]
pub enum StepOutcome {
    /// The cut was replaced by an axiom.
    ReducedToAxiom { proof: Proof, event: StepEvent },
    /// The cut was replaced by two cuts on one-step reducts.
    SplitIntoTwoCuts { proof: Proof, event: StepEvent },
    Stuck { source: Prop, left: Prop, right: Prop },
    /// Some reduction or joinability query ran out of budget.
    Undetermined { reason: String },
}

impl StepOutcome {
    pub fn event(&self) -> StepEvent {
        match self {
            StepOutcome::ReducedToAxiom { event, .. } | StepOutcome::SplitIntoTwoCuts { event, .. } => event.clone(),
            StepOutcome::Stuck { source, left, right } => {
                StepEvent::Stuck { source: source.clone(), left: left.clone(), right: right.clone() }
            }
            StepOutcome::Undetermined { reason } => StepEvent::Undetermined { reason: reason.clone() },
        }
    }

    pub fn proof(&self) -> Option<&Proof> {
        match self {
            StepOutcome::ReducedToAxiom { proof, .. } | StepOutcome::SplitIntoTwoCuts { proof, .. } => Some(proof),
            _ => None,
        }
    }
}

/// The two propositions a cut node actually cuts: the extra one on the
/// right of its left premise and on the left of its right premise.
pub(crate) fn cut_pair(node: &Proof) -> Result<(Prop, Prop), ElimError> {
    let s = &node.conclusion;
    let [l, r] = node.premises.as_slice() else { return Err(ElimError::Malformed) };
    let c1 = multiset_minus(&l.conclusion.delta, &s.delta).filter(|d| d.len() == 1).ok_or(ElimError::Malformed)?;
    let c2 = multiset_minus(&r.conclusion.gamma, &s.gamma).filter(|d| d.len() == 1).ok_or(ElimError::Malformed)?;
    Ok((c1[0].clone(), c2[0].clone()))
}

/// One elimination step on an atomic cut whose premises are cut-free.
pub fn newman_step(system: &RewriteSystem, node: &Proof, policy: &StepPolicy, budget: Budget) -> Result<StepOutcome, ElimError> {
    let mut rw = Rewriter::new(system, budget);
    step_with(&mut rw, node, policy)
}

fn joined_pair(rw: &mut Rewriter<'_, Prop>, gamma: &[Prop], delta: &[Prop], unknown: &mut bool) -> Option<StepEvent> {
    for a in gamma {
        for e in delta {
            if !same_skeleton(a, e) {
                continue;
            }
            match rw.joinable(a, e) {
                Joinability::Joinable(j) => {
                    return Some(StepEvent::Joined { left: a.clone(), right: e.clone(), common: j.common })
                }
                Joinability::Disjoint => {}
                Joinability::Unknown => *unknown = true,
            }
        }
    }
    None
}

// First member of `side` sharing a reduct with `c`, with that reduct.
fn first_join(rw: &mut Rewriter<'_, Prop>, side: &[Prop], c: &Prop) -> Option<(Prop, Prop)> {
    side.iter()
        .filter(|x| same_skeleton(x, c))
        .find_map(|x| rw.joinable(x, c).join().map(|j| (x.clone(), j.common.clone())))
}

pub(crate) fn step_with(
    rw: &mut Rewriter<'_, Prop>,
    node: &Proof,
    policy: &StepPolicy,
) -> Result<StepOutcome, ElimError> {
    let Rule::Cut { cut: c } = &node.rule else { return Err(ElimError::NotACut) };
    if !node.premises.iter().all(Proof::is_cut_free) {
        return Err(ElimError::PremisesNotCutFree);
    }
    if !c.is_atomic() {
        return Err(ElimError::NonAtomic(c.clone()));
    }
    let s = &node.conclusion;
    let (c1, c2) = cut_pair(node)?;
    let mut unknown = false;
    let axiom = |common: Prop| Proof::axiom(s.clone(), common);

    if !policy.no_shortcut {
        if let Some(event) = joined_pair(rw, &s.gamma, &s.delta, &mut unknown) {
            let StepEvent::Joined { common, .. } = &event else { unreachable!() };
            return Ok(StepOutcome::ReducedToAxiom { proof: axiom(common.clone()), event });
        }
    }
    let (Some((_, b)), Some((_, d))) = (first_join(rw, &s.gamma, &c1), first_join(rw, &s.delta, &c2)) else {
        // the premise axioms relate two context propositions after all
        if let Some(event) = joined_pair(rw, &s.gamma, &s.delta, &mut unknown) {
            let StepEvent::Joined { common, .. } = &event else { unreachable!() };
            return Ok(StepOutcome::ReducedToAxiom { proof: axiom(common.clone()), event });
        }
        return Ok(StepOutcome::Undetermined {
            reason: format!("no context proposition was found to join {c1} or {c2}"),
        });
    };
    if &b == c {
        let event = StepEvent::Collapsed { side: Collapse::LeftIsCut, common: d.clone() };
        return Ok(StepOutcome::ReducedToAxiom { proof: axiom(d), event });
    }
    if &d == c {
        let event = StepEvent::Collapsed { side: Collapse::RightIsCut, common: b.clone() };
        return Ok(StepOutcome::ReducedToAxiom { proof: axiom(b), event });
    }

    let reducts = rw.one_step(c);
    let mut towards = |target: &Prop, unknown: &mut bool| -> Vec<Prop> {
        let mut out: Vec<Prop> = Vec::new();
        for r in reducts.iter() {
            if out.contains(&r.object) {
                continue;
            }
            match rw.reduces_to(&r.object, target) {
                ReachAnswer::Yes(_) => out.push(r.object.clone()),
                ReachAnswer::No => {}
                ReachAnswer::Unknown => *unknown = true,
            }
        }
        out
    };
    let firsts = towards(&b, &mut unknown);
    let seconds = towards(&d, &mut unknown);

    let mut script_ignored = false;
    let mut pairs: Vec<(Prop, Prop, bool)> = Vec::new();
    if let Some(entry) = policy.lookup(c) {
        if firsts.contains(&entry.first) && seconds.contains(&entry.second) {
            pairs.push((entry.first.clone(), entry.second.clone(), true));
        } else {
            script_ignored = true;
        }
    }
    if pairs.is_empty() {
        for x in &firsts {
            for y in &seconds {
                pairs.push((x.clone(), y.clone(), false));
            }
        }
    }

    let mut disjoint = None;
    for (x, y, scripted) in pairs {
        match rw.joinable(&x, &y) {
            Joinability::Joinable(j) => {
                let event = StepEvent::Split {
                    first: x.clone(),
                    second: y.clone(),
                    joiner: j.common.clone(),
                    scripted,
                    script_ignored,
                };
                let proof = two_cuts(node, &x, &y, b, j.common, d);
                return Ok(StepOutcome::SplitIntoTwoCuts { proof, event });
            }
            Joinability::Disjoint => {
                disjoint.get_or_insert((x, y));
            }
            Joinability::Unknown => unknown = true,
        }
    }
    match disjoint {
        Some((left, right)) if !unknown => Ok(StepOutcome::Stuck { source: c.clone(), left, right }),
        _ if unknown => Ok(StepOutcome::Undetermined {
            reason: format!("reduction queries around {c} exceeded the budget"),
        }),
        _ => Err(ElimError::Internal(format!("{c} has no one-step reduct towards {b} and {d}"))),
    }
}

/// `Γ ⊢ C'1, C'2, Δ` and `Γ, C'1 ⊢ C'2, Δ` cut on `C'1`, the result and
/// `Γ, C'2 ⊢ Δ` cut on `C'2`.
fn two_cuts(node: &Proof, first: &Prop, second: &Prop, b: Prop, joiner: Prop, d: Prop) -> Proof {
    let s = &node.conclusion;
    let mid = s.with_right(second.clone());
    let upper = Proof::cut(
        mid.clone(),
        first.clone(),
        Proof::axiom(mid.with_right(first.clone()), b),
        Proof::axiom(mid.with_left(first.clone()), joiner),
    );
    Proof::cut(s.clone(), second.clone(), upper, Proof::axiom(s.with_left(second.clone()), d))
}

fn require_atomic_proof(proof: &Proof) -> Result<(), ElimError> {
    let mut bad = None;
    proof.visit(&mut |_, p| {
        let annotated = match &p.rule {
            Rule::Axiom { common } => Some(common),
            Rule::Cut { cut } => Some(cut),
            _ => None,
        };
        if bad.is_none() {
            bad = p.conclusion.props().chain(annotated).find(|q| !q.is_atomic()).cloned();
        }
    });
    match bad {
        Some(p) => Err(ElimError::NonAtomic(p)),
        None => Ok(()),
    }
}

pub(crate) fn require_valid(system: &RewriteSystem, proof: &Proof, budget: Budget) -> Result<(), ElimError> {
    let report = check_proof(system, proof, budget);
    match report.failures.first() {
        Some(f) => Err(ElimError::Invalid(f.to_string())),
        None => Ok(()),
    }
}

/// Repeats [`newman_step`] on the highest cut until the proof is cut-free,
/// a step is stuck, or `step_budget` steps have been taken.
pub fn eliminate_cuts_atomic_asym(
    system: &RewriteSystem,
    proof: &Proof,
    policy: &StepPolicy,
    step_budget: usize,
    budget: Budget,
) -> Result<EliminationResult, ElimError> {
    require_atomic_proof(proof)?;
    require_valid(system, proof, budget)?;
    let mut rw = Rewriter::new(system, budget);
    let mut trace = ReductionTrace { initial_cuts: proof.cut_propositions(), ..Default::default() };
    Ok(run_atomic(&mut rw, proof.clone(), policy, step_budget, &mut trace))
}

pub(crate) fn run_atomic(
    rw: &mut Rewriter<'_, Prop>,
    mut proof: Proof,
    policy: &StepPolicy,
    step_budget: usize,
    trace: &mut ReductionTrace,
) -> EliminationResult {
    loop {
        let Some(path) = proof.highest_cut() else {
            return EliminationResult::CutFree { proof, trace: std::mem::take(trace) };
        };
        if trace.steps.len() >= step_budget {
            let reason = format!("step budget of {step_budget} exhausted with {} cuts left", proof.cut_count());
            return EliminationResult::BudgetExhausted { proof, trace: std::mem::take(trace), reason };
        }
        let node = proof.at(&path).expect("path from highest_cut");
        let Rule::Cut { cut } = &node.rule else { unreachable!("highest_cut returns cuts") };
        let cut = cut.clone();
        let outcome = match step_with(rw, node, policy) {
            Ok(o) => o,
            Err(e) => StepOutcome::Undetermined { reason: e.to_string() },
        };
        let event = outcome.event();
        if let Some(p) = outcome.proof() {
            *proof.at_mut(&path).expect("same path") = p.clone();
        }
        let index = trace.steps.len() + 1;
        trace.steps.push(TraceStep { index, path, cut, event, cuts_after: proof.cut_propositions() });
        match outcome {
            StepOutcome::ReducedToAxiom { .. } | StepOutcome::SplitIntoTwoCuts { .. } => {}
            StepOutcome::Stuck { source, left, right } => {
                let reason = format!("{left} <-1 {source} ->1 {right} has no common reduct");
                return EliminationResult::Failed { proof, trace: std::mem::take(trace), reason };
            }
            StepOutcome::Undetermined { reason } => {
                return EliminationResult::BudgetExhausted { proof, trace: std::mem::take(trace), reason };
            }
        }
    }
}

/// An upper bound on the number of steps for a terminating system: a cut
/// on `C` with longest derivation `h` from `C` costs at most `2^(h+1) - 1`
/// steps, since a split replaces it by two cuts of height below `h`.
pub fn step_bound(system: &RewriteSystem, proof: &Proof, budget: Budget) -> Result<usize, HeightError<Prop>> {
    let mut heights = DerivationHeights::new(system, budget);
    let mut total = 0usize;
    for c in proof.cut_propositions() {
        let h = heights.height(&c)?;
        let cost = 1usize.checked_shl((h + 1) as u32).map_or(usize::MAX, |x| x - 1);
        total = total.saturating_add(cost);
    }
    Ok(total)
}
