use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::kernel::{check_proof, Proof, Sequent};
use crate::rewrite::{
    canonical_order, confluent, AnalysisVerdict, Budget, ConfluenceWitness, ConvStep, ConversionSequence, Direction,
    RewriteSystem, Rewriter,
};
use crate::term::{fresh_name, Position, Prop, Term};

use super::asym::{cut_free_with, proof_from_conversion};
use super::AtomicAnswer;

/// Both sides of the equivalence on one carrier.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    /// The forward closure of the universe.
    pub carrier: Vec<Term>,
    pub predicate: String,
    /// Convertible pairs `t, u` whose sequent `P(t) ⊢ P(u)` was examined.
    pub pairs_checked: usize,
    /// `None` when undetermined within budget.
    pub cut_redundant: Option<bool>,
    pub confluent: Option<bool>,
    /// A convertible pair without a cut-free proof.
    pub cut_witness: Option<(Term, Term)>,
    /// A proof with cuts of the witness sequent, checked by the kernel.
    pub witness_proof: Option<Proof>,
    pub witness_proof_valid: Option<bool>,
    pub confluence_witness: Option<ConfluenceWitness<Term>>,
    pub reason: Option<String>,
}

impl EquivalenceReport {
    pub fn agree(&self) -> Option<bool> {
        Some(self.cut_redundant? == self.confluent?)
    }
}

/// The universe closed under `->1`, or `None` when it exceeds the budget.
pub fn forward_carrier(system: &RewriteSystem, universe: &[Term], budget: Budget) -> Option<Vec<Term>> {
    let mut rw = Rewriter::new(system, budget);
    let mut all = BTreeSet::new();
    for t in universe {
        let set = rw.reducts(t);
        if !set.is_complete() {
            return None;
        }
        all.extend(set.elements().iter().cloned());
        if all.len() > budget.max_objects {
            return None;
        }
    }
    let all: Vec<Term> = all.into_iter().collect();
    Some(canonical_order(&all))
}

fn predicate_for(system: &RewriteSystem) -> String {
    let sig = system.signature();
    if matches!(sig.predicate_arity("P"), None | Some(1)) {
        return "P".to_string();
    }
    let avoid = sig.predicates().map(|(p, _)| p.clone()).collect();
    fresh_name("P", &avoid).to_string()
}

/// Compares "every convertible pair of the carrier has a cut-free proof of
/// `P(t) ⊢ P(u)`" with "the system is confluent on the carrier". The
/// carrier is closed under reduction, so convertibility is decided inside
/// it, as connectivity of the rewrite graph.
pub fn cut_redundancy_vs_confluence(system: &RewriteSystem, universe: &[Term], budget: Budget) -> EquivalenceReport {
    let predicate = predicate_for(system);
    let mut report = EquivalenceReport {
        carrier: Vec::new(),
        predicate: predicate.clone(),
        pairs_checked: 0,
        cut_redundant: None,
        confluent: None,
        cut_witness: None,
        witness_proof: None,
        witness_proof_valid: None,
        confluence_witness: None,
        reason: None,
    };
    let Some(carrier) = forward_carrier(system, universe, budget) else {
        report.reason = Some("reduct closure of the universe exceeded the budget".to_string());
        return report;
    };
    report.carrier = carrier.clone();
    let graph = RewriteGraph::new(system, &carrier, budget);

    let atom = |t: &Term| Prop::atom(&predicate, vec![t.clone()]);
    let mut rw = Rewriter::<Prop>::new(system, budget);
    let mut redundant = Some(true);
    'pairs: for (i, t) in carrier.iter().enumerate() {
        for u in &carrier[i + 1..] {
            if graph.component[t] != graph.component[u] {
                continue;
            }
            report.pairs_checked += 1;
            let seq = Sequent::new(vec![atom(t)], vec![atom(u)]);
            match cut_free_with(&mut rw, &seq).expect("atomic") {
                AtomicAnswer::Provable(_) => {}
                AtomicAnswer::NotProvable(_) => {
                    redundant = Some(false);
                    report.cut_witness = Some((t.clone(), u.clone()));
                    let conv = graph.path(t, u).map(&atom, &Position(vec![0]));
                    let proof = proof_from_conversion(system, &seq, &atom(t), &atom(u), &conv)
                        .expect("graph paths are valid conversions");
                    let sys = with_predicate(system, &predicate);
                    report.witness_proof_valid = Some(check_proof(&sys, &proof, budget).valid);
                    report.witness_proof = Some(proof);
                    break 'pairs;
                }
                AtomicAnswer::Unknown(r) => {
                    redundant = None;
                    report.reason.get_or_insert(r);
                }
            }
        }
    }
    report.cut_redundant = redundant;
    match confluent(system, &carrier, budget) {
        AnalysisVerdict::Holds(_) => report.confluent = Some(true),
        AnalysisVerdict::Fails(w) => {
            report.confluent = Some(false);
            report.confluence_witness = Some(w);
        }
        AnalysisVerdict::Unknown(r) => {
            report.reason.get_or_insert(r);
        }
    }
    report
}

/// The system with `predicate/1` declared, so kernel checks accept atoms
/// built on it.
pub(crate) fn with_predicate(system: &RewriteSystem, predicate: &str) -> RewriteSystem {
    let mut sig = system.signature().clone();
    if sig.predicate_arity(predicate).is_none() {
        sig.add_predicate(predicate, 1).expect("fresh predicate");
    }
    system.with_signature(sig).expect("same rules")
}

/// Undirected one-step graph on a reduction-closed carrier.
struct RewriteGraph {
    component: BTreeMap<Term, usize>,
    // neighbour, rule, position, whether the edge goes forward from the key
    edges: BTreeMap<Term, Vec<(Term, usize, Position, bool)>>,
}

impl RewriteGraph {
    fn new(system: &RewriteSystem, carrier: &[Term], budget: Budget) -> Self {
        let mut rw = Rewriter::<Term>::new(system, budget);
        let mut edges: BTreeMap<Term, Vec<(Term, usize, Position, bool)>> = BTreeMap::new();
        for t in carrier {
            for r in rw.one_step(t).iter() {
                edges.entry(t.clone()).or_default().push((r.object.clone(), r.rule, r.position.clone(), true));
                edges.entry(r.object.clone()).or_default().push((t.clone(), r.rule, r.position.clone(), false));
            }
        }
        let mut component = BTreeMap::new();
        for (n, t) in carrier.iter().enumerate() {
            if component.contains_key(t) {
                continue;
            }
            let mut queue = VecDeque::from([t.clone()]);
            component.insert(t.clone(), n);
            while let Some(x) = queue.pop_front() {
                for (y, ..) in edges.get(&x).into_iter().flatten() {
                    if !component.contains_key(y) {
                        component.insert(y.clone(), n);
                        queue.push_back(y.clone());
                    }
                }
            }
        }
        RewriteGraph { component, edges }
    }

    /// Shortest conversion from `t` to `u` inside the carrier.
    fn path(&self, t: &Term, u: &Term) -> ConversionSequence<Term> {
        let mut parent: BTreeMap<Term, Option<(Term, usize, Position, bool)>> = BTreeMap::new();
        parent.insert(t.clone(), None);
        let mut queue = VecDeque::from([t.clone()]);
        while let Some(x) = queue.pop_front() {
            if &x == u {
                break;
            }
            for (y, rule, pos, forward) in self.edges.get(&x).into_iter().flatten() {
                if !parent.contains_key(y) {
                    parent.insert(y.clone(), Some((x.clone(), *rule, pos.clone(), *forward)));
                    queue.push_back(y.clone());
                }
            }
        }
        let mut rev = Vec::new();
        let mut cur = u.clone();
        while let Some(Some((p, rule, pos, forward))) = parent.get(&cur) {
            let direction = if *forward { Direction::Forward } else { Direction::Backward };
            rev.push((ConvStep { direction, rule: *rule, position: pos.clone() }, cur.clone()));
            cur = p.clone();
        }
        let mut seq = ConversionSequence::single(t.clone());
        for (step, o) in rev.into_iter().rev() {
            seq.push(step, o);
        }
        seq
    }
}
