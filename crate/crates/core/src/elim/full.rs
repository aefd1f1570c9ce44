use std::collections::BTreeSet;

use crate::kernel::{valid_readings, Proof, Resolved, Rule, Sequent, Side};
use crate::rewrite::{Budget, Joinability, RewriteSystem, Rewriter};
use crate::term::{Name, Prop, Term};

use super::newman::{cut_pair, eliminate_cuts_atomic_asym, require_valid, step_with, ElimError, StepOutcome};
use super::ops::{contract_duplicates, minus, proof_vars, remove_one, rename_eigenvariable, subst_proof, weaken};
use super::policy::StepPolicy;
use super::trace::{EliminationResult, MixEvent, ReductionTrace, StepEvent, TraceStep};

/// Cut elimination for the whole calculus.
///
/// Axioms on compound propositions are first expanded into atomic ones.
/// Then the highest cut is treated repeatedly: an atomic cut between two
/// axioms goes through the splitting step, any other cut is pushed upwards
/// through both premises at once, tracking every occurrence that descends
/// from the cut proposition, until it meets the rules introducing it.
/// Proofs without compound propositions are handed to
/// [`eliminate_cuts_atomic_asym`] unchanged.
pub fn eliminate_cuts_full(
    system: &RewriteSystem,
    proof: &Proof,
    policy: &StepPolicy,
    step_budget: usize,
    budget: Budget,
) -> Result<EliminationResult, ElimError> {
    if is_atomic_proof(proof) {
        return eliminate_cuts_atomic_asym(system, proof, policy, step_budget, budget);
    }
    require_valid(system, proof, budget)?;
    let mut avoid = proof_vars(proof);
    let sig = system.signature();
    avoid.extend(sig.functions().map(|(f, _)| f.clone()));
    avoid.extend(sig.predicates().map(|(p, _)| p.clone()));
    let mut engine = Engine { system, rw: Rewriter::new(system, budget), avoid, events: Vec::new() };

    let mut trace = ReductionTrace::default();
    let mut proof = match engine.expand_axioms(proof, &mut trace.expanded_axioms) {
        Ok(p) => p,
        Err(e) => {
            let reason = format!("axiom expansion: {e}");
            return Ok(EliminationResult::BudgetExhausted { proof: proof.clone(), trace, reason });
        }
    };
    trace.initial_cuts = proof.cut_propositions();
    loop {
        let Some(path) = proof.highest_cut() else {
            return Ok(EliminationResult::CutFree { proof, trace });
        };
        if trace.steps.len() >= step_budget {
            let reason = format!("step budget of {step_budget} exhausted with {} cuts left", proof.cut_count());
            return Ok(EliminationResult::BudgetExhausted { proof, trace, reason });
        }
        let node = proof.at(&path).expect("path from highest_cut").clone();
        let Rule::Cut { cut } = &node.rule else { unreachable!("highest_cut returns cuts") };
        let index = trace.steps.len() + 1;
        let axioms = node.premises.iter().all(|p| matches!(p.rule, Rule::Axiom { .. }));
        if cut.is_atomic() && axioms {
            let outcome = step_with(&mut engine.rw, &node, policy)?;
            let event = outcome.event();
            if let Some(p) = outcome.proof() {
                *proof.at_mut(&path).expect("same path") = p.clone();
            }
            let cuts_after = proof.cut_propositions();
            trace.steps.push(TraceStep { index, path, cut: cut.clone(), event, cuts_after });
            match outcome {
                StepOutcome::Stuck { source, left, right } => {
                    let reason = format!("{left} <-1 {source} ->1 {right} has no common reduct");
                    return Ok(EliminationResult::Failed { proof, trace, reason });
                }
                StepOutcome::Undetermined { reason } => {
                    return Ok(EliminationResult::BudgetExhausted { proof, trace, reason });
                }
                _ => {}
            }
            continue;
        }
        let (c1, c2) = cut_pair(&node)?;
        engine.events.clear();
        let merged = match engine.mix(&node.premises[0], &[c1], &node.premises[1], &[c2], cut) {
            Ok(p) => p,
            Err(ElimError::Budget(reason)) => {
                return Ok(EliminationResult::BudgetExhausted { proof, trace, reason });
            }
            Err(e) => return Err(e),
        };
        *proof.at_mut(&path).expect("same path") = contract_duplicates(merged, &node.conclusion);
        let events = std::mem::take(&mut engine.events);
        let cuts_after = proof.cut_propositions();
        trace.steps.push(TraceStep { index, path, cut: cut.clone(), event: StepEvent::Pushed { events }, cuts_after });
    }
}

fn is_atomic_proof(p: &Proof) -> bool {
    let mut atomic = true;
    p.visit(&mut |_, n| {
        let annotated = match &n.rule {
            Rule::Axiom { common } => common.is_atomic(),
            Rule::Cut { cut } => cut.is_atomic(),
            _ => true,
        };
        atomic &= annotated && n.conclusion.is_atomic();
    });
    atomic
}

struct Engine<'r> {
    system: &'r RewriteSystem,
    rw: Rewriter<'r, Prop>,
    avoid: BTreeSet<Name>,
    events: Vec<MixEvent>,
}

/// The conclusion of a push: both contexts, without the tracked
/// occurrences.
fn merged(l: &Sequent, tl: &[Prop], r: &Sequent, tr: &[Prop]) -> Sequent {
    let mut gamma = l.gamma.clone();
    gamma.extend(minus(&r.gamma, tr));
    let mut delta = minus(&l.delta, tl);
    delta.extend(r.delta.iter().cloned());
    Sequent::new(gamma, delta)
}

fn without(s: &Sequent, side: Side, p: &Prop) -> Sequent {
    match side {
        Side::Left => Sequent::new(remove_one(&s.gamma, p), s.delta.clone()),
        Side::Right => Sequent::new(s.gamma.clone(), remove_one(&s.delta, p)),
    }
}

fn budget_error(what: String) -> ElimError {
    ElimError::Budget(format!("{what} undetermined"))
}

impl Engine<'_> {
    fn fresh(&mut self, base: &str, also: &BTreeSet<Name>) -> Name {
        let mut avoid = self.avoid.clone();
        avoid.extend(also.iter().cloned());
        let x = crate::term::fresh_name(base, &avoid);
        self.avoid.insert(x.clone());
        x
    }

    fn readings(&mut self, p: &Proof) -> Vec<Resolved> {
        valid_readings(self.system, &mut self.rw, p)
    }

    fn common(&mut self, a: &Prop, b: &Prop) -> Result<Prop, ElimError> {
        match self.rw.joinable(a, b) {
            Joinability::Joinable(j) => Ok(j.common),
            Joinability::Disjoint => Err(ElimError::Internal(format!("{a} and {b} have no common reduct"))),
            Joinability::Unknown => Err(budget_error(format!("joinability of {a} and {b}"))),
        }
    }

    fn expand_axioms(&mut self, p: &Proof, count: &mut usize) -> Result<Proof, ElimError> {
        if let Rule::Axiom { common } = &p.rule {
            if common.is_atomic() {
                return Ok(p.clone());
            }
            let readings = self.readings(p);
            let (a1, a2) = readings
                .iter()
                .find_map(|r| r.pair.clone())
                .ok_or_else(|| ElimError::Invalid(format!("axiom on {} does not check", p.conclusion)))?;
            *count += 1;
            return self.expand(&p.conclusion, &a1, &a2);
        }
        let premises = p.premises.iter().map(|q| self.expand_axioms(q, count)).collect::<Result<Vec<_>, _>>()?;
        Ok(Proof { premises, ..p.clone() })
    }

    /// A cut-free proof of `s` from `a1 ∈ Γ`, `a2 ∈ Δ` with a common
    /// reduct, using axioms on atoms only.
    fn expand(&mut self, s: &Sequent, a1: &Prop, a2: &Prop) -> Result<Proof, ElimError> {
        let node = |rule, s: &Sequent, premises| Proof::new(rule, s.clone(), premises);
        Ok(match (a1, a2) {
            (Prop::Bottom, _) => node(Rule::BottomLeft, s, vec![]),
            (Prop::And(l1, r1), Prop::And(l2, r2)) => {
                let ctx = without(s, Side::Right, a2);
                let mut branches = Vec::new();
                for (x2, x1) in [(l2, l1), (r2, r1)] {
                    let upper = without(&ctx.with_right((**x2).clone()), Side::Left, a1)
                        .with_left((**l1).clone())
                        .with_left((**r1).clone());
                    let inner = self.expand(&upper, x1, x2)?;
                    let rule = Rule::AndLeft { left: (**l1).clone(), right: (**r1).clone() };
                    branches.push(node(rule, &ctx.with_right((**x2).clone()), vec![inner]));
                }
                node(Rule::AndRight { left: (**l2).clone(), right: (**r2).clone() }, s, branches)
            }
            (Prop::Or(l1, r1), Prop::Or(l2, r2)) => {
                let ctx = without(s, Side::Left, a1);
                let mut branches = Vec::new();
                for (x1, x2) in [(l1, l2), (r1, r2)] {
                    let lower = ctx.with_left((**x1).clone());
                    let upper = without(&lower, Side::Right, a2).with_right((**r2).clone()).with_right((**l2).clone());
                    let inner = self.expand(&upper, x1, x2)?;
                    let rule = Rule::OrRight { left: (**l2).clone(), right: (**r2).clone() };
                    branches.push(node(rule, &lower, vec![inner]));
                }
                node(Rule::OrLeft { left: (**l1).clone(), right: (**r1).clone() }, s, branches)
            }
            (Prop::Implies(l1, r1), Prop::Implies(l2, r2)) => {
                let mid = without(s, Side::Right, a2).with_left((**l2).clone()).with_right((**r2).clone());
                let ctx = without(&mid, Side::Left, a1);
                let first = self.expand(&ctx.with_right((**l1).clone()), l2, l1)?;
                let second = self.expand(&ctx.with_left((**r1).clone()), r1, r2)?;
                let imp_left = node(Rule::ImpLeft { left: (**l1).clone(), right: (**r1).clone() }, &mid, vec![first, second]);
                node(Rule::ImpRight { left: (**l2).clone(), right: (**r2).clone() }, s, vec![imp_left])
            }
            (Prop::Forall(h1, b1), Prop::Forall(_, b2)) => {
                let y = self.fresh(&h1.0, &s.free_vars());
                let v = Term::Var(y.clone());
                let (o1, o2) = (b1.open(&v), b2.open(&v));
                let mid = without(s, Side::Right, a2).with_right(o2.clone());
                let upper = without(&mid, Side::Left, a1).with_left(o1.clone());
                let inner = self.expand(&upper, &o1, &o2)?;
                let left = node(Rule::ForallLeft { var: y.clone(), body: o1, term: v }, &mid, vec![inner]);
                node(Rule::ForallRight { var: y, body: o2 }, s, vec![left])
            }
            (Prop::Exists(h1, b1), Prop::Exists(_, b2)) => {
                let y = self.fresh(&h1.0, &s.free_vars());
                let v = Term::Var(y.clone());
                let (o1, o2) = (b1.open(&v), b2.open(&v));
                let mid = without(s, Side::Left, a1).with_left(o1.clone());
                let upper = without(&mid, Side::Right, a2).with_right(o2.clone());
                let inner = self.expand(&upper, &o1, &o2)?;
                let right = node(Rule::ExistsRight { var: y.clone(), body: o2, term: v }, &mid, vec![inner]);
                node(Rule::ExistsLeft { var: y, body: o1 }, s, vec![right])
            }
            (Prop::Atom(..), Prop::Atom(..)) => {
                let common = self.common(a1, a2)?;
                Proof::axiom(s.clone(), common)
            }
            _ => return Err(ElimError::Internal(format!("{a1} and {a2} differ in shape"))),
        })
    }

    /// From `l` proving `ΓL ⊢ tl, ΔL` and `r` proving `ΓR, tr ⊢ ΔR`, where
    /// every tracked occurrence is a reduct of `c`, builds a proof of
    /// `ΓL, ΓR ⊢ ΔL, ΔR`.
    fn mix(&mut self, l: &Proof, tl: &[Prop], r: &Proof, tr: &[Prop], c: &Prop) -> Result<Proof, ElimError> {
        let target = merged(&l.conclusion, tl, &r.conclusion, tr);
        let l_rest = minus(&l.conclusion.delta, tl);
        let r_rest = minus(&r.conclusion.gamma, tr);
        if tl.is_empty() {
            return Ok(weaken(l.clone(), &r_rest, &r.conclusion.delta));
        }
        if tr.is_empty() {
            return Ok(weaken(r.clone(), &l.conclusion.gamma, &l_rest));
        }
        let lr = self.readings(l);
        let rr = self.readings(r);
        if lr.is_empty() || rr.is_empty() {
            return Err(ElimError::Internal(format!("no valid reading while pushing a cut on {c}")));
        }

        // an axiom or bottom of one side that does not touch the tracked
        // occurrences closes the merged sequent on its own
        for (p, readings, ctx_left, ctx_right) in
            [(l, &lr, &l.conclusion.gamma, &l_rest), (r, &rr, &r_rest, &r.conclusion.delta)]
        {
            match &p.rule {
                Rule::Axiom { common } => {
                    if readings.iter().any(|x| x.pair.as_ref().is_some_and(|(a, b)| ctx_left.contains(a) && ctx_right.contains(b))) {
                        self.events.push(MixEvent::ContextAxiom { common: common.clone() });
                        return Ok(Proof::axiom(target, common.clone()));
                    }
                }
                Rule::BottomLeft => {
                    if readings.iter().any(|x| x.principal.as_ref().is_some_and(|(_, a)| ctx_left.contains(a))) {
                        return Ok(Proof::new(Rule::BottomLeft, target, vec![]));
                    }
                }
                _ => {}
            }
        }

        if let Some(p) = self.push_left(l, tl, r, tr, c, &lr, &l_rest, &r_rest, &target)? {
            return Ok(p);
        }
        if let Some(p) = self.push_right(l, tl, r, tr, c, &rr, &l_rest, &r_rest, &target)? {
            return Ok(p);
        }
        self.principal(l, tl, r, tr, c, &lr, &rr, target)
    }

    // The last rule of `l` acts on its context, or is a weakening or
    // contraction of a tracked occurrence: move the cut above it.
    #[allow(clippy::too_many_arguments)]
    fn push_left(
        &mut self,
        l: &Proof,
        tl: &[Prop],
        r: &Proof,
        tr: &[Prop],
        c: &Prop,
        readings: &[Resolved],
        l_rest: &[Prop],
        r_rest: &[Prop],
        target: &Sequent,
    ) -> Result<Option<Proof>, ElimError> {
        if matches!(l.rule, Rule::Axiom { .. } | Rule::BottomLeft) {
            return Ok(None);
        }
        if matches!(l.rule, Rule::Cut { .. }) {
            return Err(ElimError::PremisesNotCutFree);
        }
        // a principal occurrence equal to a tracked one is read as tracked,
        // so that key cases are found
        let context = readings.iter().find(|x| match &x.principal {
            Some((Side::Left, _)) => true,
            Some((Side::Right, f)) => l_rest.contains(f) && !tl.contains(f),
            None => false,
        });
        if context.is_some() {
            let mut node = l.clone();
            if let Some(y) = eigen(&l.rule) {
                let clash = r_rest.iter().chain(&r.conclusion.delta).any(|q| q.free_vars().contains(y));
                if clash {
                    node = rename_eigenvariable(&node, &y.clone(), &mut self.avoid);
                }
            }
            let premises = node
                .premises
                .iter()
                .map(|q| self.mix(q, tl, r, tr, c))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Some(Proof::new(node.rule.clone(), target.clone(), premises)));
        }
        let Some((_, f)) = readings.iter().find_map(|x| x.principal.clone()) else { return Ok(None) };
        match &l.rule {
            Rule::WeakRight => {
                let rest = remove_one(tl, &f);
                Ok(Some(self.mix(&l.premises[0], &rest, r, tr, c)?))
            }
            Rule::ContrRight { first, second, .. } => {
                let mut more = remove_one(tl, &f);
                more.extend([first.clone(), second.clone()]);
                Ok(Some(self.mix(&l.premises[0], &more, r, tr, c)?))
            }
            _ => Ok(None),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push_right(
        &mut self,
        l: &Proof,
        tl: &[Prop],
        r: &Proof,
        tr: &[Prop],
        c: &Prop,
        readings: &[Resolved],
        l_rest: &[Prop],
        r_rest: &[Prop],
        target: &Sequent,
    ) -> Result<Option<Proof>, ElimError> {
        if matches!(r.rule, Rule::Axiom { .. } | Rule::BottomLeft) {
            return Ok(None);
        }
        if matches!(r.rule, Rule::Cut { .. }) {
            return Err(ElimError::PremisesNotCutFree);
        }
        let context = readings.iter().find(|x| match &x.principal {
            Some((Side::Right, _)) => true,
            Some((Side::Left, g)) => r_rest.contains(g) && !tr.contains(g),
            None => false,
        });
        if context.is_some() {
            let mut node = r.clone();
            if let Some(y) = eigen(&r.rule) {
                let clash = l.conclusion.gamma.iter().chain(l_rest).any(|q| q.free_vars().contains(y));
                if clash {
                    node = rename_eigenvariable(&node, &y.clone(), &mut self.avoid);
                }
            }
            let premises = node
                .premises
                .iter()
                .map(|q| self.mix(l, tl, q, tr, c))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Some(Proof::new(node.rule.clone(), target.clone(), premises)));
        }
        let Some((_, g)) = readings.iter().find_map(|x| x.principal.clone()) else { return Ok(None) };
        match &r.rule {
            Rule::WeakLeft => {
                let rest = remove_one(tr, &g);
                Ok(Some(self.mix(l, tl, &r.premises[0], &rest, c)?))
            }
            Rule::ContrLeft { first, second, .. } => {
                let mut more = remove_one(tr, &g);
                more.extend([first.clone(), second.clone()]);
                Ok(Some(self.mix(l, tl, &r.premises[0], &more, c)?))
            }
            _ => Ok(None),
        }
    }

    // Both last rules act on tracked occurrences.
    #[allow(clippy::too_many_arguments)]
    fn principal(
        &mut self,
        l: &Proof,
        tl: &[Prop],
        r: &Proof,
        tr: &[Prop],
        c: &Prop,
        lr: &[Resolved],
        rr: &[Resolved],
        target: Sequent,
    ) -> Result<Proof, ElimError> {
        if let (Rule::Axiom { .. }, Rule::Axiom { .. }) = (&l.rule, &r.rule) {
            let (a, f) = lr
                .iter()
                .find_map(|x| x.pair.clone().filter(|(_, f)| tl.contains(f)))
                .ok_or_else(|| ElimError::Internal("left axiom reading".into()))?;
            let (g, e) = rr
                .iter()
                .find_map(|x| x.pair.clone().filter(|(g, _)| tr.contains(g)))
                .ok_or_else(|| ElimError::Internal("right axiom reading".into()))?;
            let joined = match self.rw.joinable(&a, &e) {
                Joinability::Joinable(j) => Some(j.common),
                Joinability::Disjoint => None,
                Joinability::Unknown => return Err(budget_error(format!("joinability of {a} and {e}"))),
            };
            if let Some(common) = joined {
                self.events.push(MixEvent::AtomicJoin { left: a, right: e, common: common.clone() });
                return Ok(Proof::axiom(target, common));
            }
            let (Rule::Axiom { common: bl }, Rule::Axiom { common: br }) = (&l.rule, &r.rule) else { unreachable!() };
            self.events.push(MixEvent::AtomicCut { cut: c.clone() });
            let left = Proof::axiom(target.with_right(f), bl.clone());
            let right = Proof::axiom(target.with_left(g), br.clone());
            return Ok(Proof::cut(target, c.clone(), left, right));
        }

        let f = lr
            .iter()
            .find_map(|x| x.principal.clone().filter(|(s, f)| *s == Side::Right && tl.contains(f)))
            .map(|(_, f)| f)
            .ok_or_else(|| ElimError::Internal(format!("left premise does not introduce {c}")))?;
        let g = rr
            .iter()
            .find_map(|x| x.principal.clone().filter(|(s, g)| *s == Side::Left && tr.contains(g)))
            .map(|(_, g)| g)
            .ok_or_else(|| ElimError::Internal(format!("right premise does not introduce {c}")))?;
        let tl1 = remove_one(tl, &f);
        let tr1 = remove_one(tr, &g);

        let (cuts, proof) = match (&l.rule, &r.rule, c) {
            (Rule::AndRight { .. }, Rule::AndLeft { right: b1, .. }, Prop::And(ca, cb)) => {
                let x2 = self.mix(&l.premises[0], &tl1, r, tr, c)?;
                let x3 = self.mix(&l.premises[1], &tl1, r, tr, c)?;
                let x1 = self.mix(l, tl, &r.premises[0], &tr1, c)?;
                let upper = target.with_left(b1.clone());
                let cut_a = Proof::cut(upper, (**ca).clone(), weaken(x2, &[b1.clone()], &[]), x1);
                (vec![(**ca).clone(), (**cb).clone()], Proof::cut(target, (**cb).clone(), x3, cut_a))
            }
            (Rule::OrRight { right: b2, .. }, Rule::OrLeft { .. }, Prop::Or(ca, cb)) => {
                let x = self.mix(&l.premises[0], &tl1, r, tr, c)?;
                let y1 = self.mix(l, tl, &r.premises[0], &tr1, c)?;
                let y2 = self.mix(l, tl, &r.premises[1], &tr1, c)?;
                let upper = target.with_right(b2.clone());
                let cut_a = Proof::cut(upper, (**ca).clone(), x, weaken(y1, &[], &[b2.clone()]));
                (vec![(**ca).clone(), (**cb).clone()], Proof::cut(target, (**cb).clone(), cut_a, y2))
            }
            (Rule::ImpRight { right: b2, .. }, Rule::ImpLeft { .. }, Prop::Implies(ca, cb)) => {
                let x = self.mix(&l.premises[0], &tl1, r, tr, c)?;
                let y1 = self.mix(l, tl, &r.premises[0], &tr1, c)?;
                let y2 = self.mix(l, tl, &r.premises[1], &tr1, c)?;
                let upper = target.with_right(b2.clone());
                let cut_a = Proof::cut(upper, (**ca).clone(), weaken(y1, &[], &[b2.clone()]), x);
                (vec![(**ca).clone(), (**cb).clone()], Proof::cut(target, (**cb).clone(), cut_a, y2))
            }
            (Rule::ForallRight { var: y, .. }, Rule::ForallLeft { term: t, .. }, Prop::Forall(_, body)) => {
                let rho = subst_proof(&l.premises[0], y, t, &mut self.avoid);
                let x = self.mix(&rho, &tl1, r, tr, c)?;
                let z = self.mix(l, tl, &r.premises[0], &tr1, c)?;
                let inst = body.open(t);
                (vec![inst.clone()], Proof::cut(target, inst, x, z))
            }
            (Rule::ExistsRight { term: t, .. }, Rule::ExistsLeft { var: y, .. }, Prop::Exists(_, body)) => {
                let x = self.mix(&l.premises[0], &tl1, r, tr, c)?;
                let rho = subst_proof(&r.premises[0], y, t, &mut self.avoid);
                let z = self.mix(l, tl, &rho, &tr1, c)?;
                let inst = body.open(t);
                (vec![inst.clone()], Proof::cut(target, inst, x, z))
            }
            _ => {
                return Err(ElimError::Internal(format!(
                    "{} against {} on {c} is not a key case",
                    l.rule.tag(),
                    r.rule.tag()
                )))
            }
        };
        self.events.push(MixEvent::KeyCase { connective: c.connective(), cuts });
        Ok(proof)
    }
}

fn eigen(rule: &Rule) -> Option<&Name> {
    match rule {
        Rule::ForallRight { var, .. } | Rule::ExistsLeft { var, .. } => Some(var),
        _ => None,
    }
}
