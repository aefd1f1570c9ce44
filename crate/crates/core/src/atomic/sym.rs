use std::fmt;

use crate::kernel::{path_string, same_skeleton, Sequent};
use crate::rewrite::{Budget, Convertibility, RewriteSystem, Rewriter};
use crate::term::Prop;

use super::{require_atomic, AtomicAnswer, NonAtomic, PairCertificate, PairReason};

/// Rules of the symmetric atomic fragment. Axiom and cut carry the pair of
/// propositions whose convertibility justifies them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymRule {
    /// `Γ, left ⊢ right, Δ` with `left ≡ right`.
    Axiom { left: Prop, right: Prop },
    /// Premises `Γ ⊢ left, Δ` and `Γ, right ⊢ Δ` with `left ≡ right`.
    Cut { left: Prop, right: Prop },
    ContrLeft,
    ContrRight,
    WeakLeft,
    WeakRight,
}

impl SymRule {
    pub fn tag(&self) -> &'static str {
        match self {
            SymRule::Axiom { .. } => "axiom",
            SymRule::Cut { .. } => "cut",
            SymRule::ContrLeft => "contr-left",
            SymRule::ContrRight => "contr-right",
            SymRule::WeakLeft => "weak-left",
            SymRule::WeakRight => "weak-right",
        }
    }

    fn arity(&self) -> usize {
        match self {
            SymRule::Axiom { .. } => 0,
            SymRule::Cut { .. } => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for SymRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymRule::Axiom { left, right } | SymRule::Cut { left, right } => {
                write!(f, "({left} == {right}) {}", self.tag())
            }
            _ => f.write_str(self.tag()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymProof {
    pub rule: SymRule,
    pub conclusion: Sequent,
    pub premises: Vec<SymProof>,
}

impl SymProof {
    pub fn axiom(conclusion: Sequent, left: Prop, right: Prop) -> Self {
        SymProof { rule: SymRule::Axiom { left, right }, conclusion, premises: vec![] }
    }

    pub fn cut(conclusion: Sequent, left: Prop, right: Prop, l: SymProof, r: SymProof) -> Self {
        SymProof { rule: SymRule::Cut { left, right }, conclusion, premises: vec![l, r] }
    }

    pub fn cut_count(&self) -> usize {
        usize::from(matches!(self.rule, SymRule::Cut { .. }))
            + self.premises.iter().map(SymProof::cut_count).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.cut_count() == 0
    }

    fn highest_cut(&self, path: &mut Vec<usize>) -> bool {
        for (i, p) in self.premises.iter().enumerate() {
            path.push(i);
            if p.highest_cut(path) {
                return true;
            }
            path.pop();
        }
        matches!(self.rule, SymRule::Cut { .. })
    }

    fn at_mut(&mut self, path: &[usize]) -> &mut SymProof {
        match path.split_first() {
            None => self,
            Some((i, rest)) => self.premises[*i].at_mut(rest),
        }
    }

    /// `A ∈ Γ`, `B ∈ Δ` with `A ≡ B`, read off the proof itself.
    pub fn convertible_pair(&self) -> (Prop, Prop) {
        match &self.rule {
            SymRule::Axiom { left, right } => (left.clone(), right.clone()),
            SymRule::ContrLeft | SymRule::ContrRight | SymRule::WeakLeft | SymRule::WeakRight => {
                self.premises[0].convertible_pair()
            }
            SymRule::Cut { .. } => {
                let (x1, y1) = self.premises[0].convertible_pair();
                let (x2, y2) = self.premises[1].convertible_pair();
                if self.conclusion.delta.contains(&y1) {
                    (x1, y1)
                } else if self.conclusion.gamma.contains(&x2) {
                    (x2, y2)
                } else {
                    // x1 ≡ y1 = C1 ≡ C2 = x2 ≡ y2
                    (x1, y2)
                }
            }
        }
    }

    pub fn render_indented(&self) -> String {
        fn go(p: &SymProof, depth: usize, out: &mut String) {
            out.push_str(&format!("{}{}  [{}]\n", "  ".repeat(depth), p.conclusion, p.rule));
            for q in &p.premises {
                go(q, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

#[derive(Debug, Clone)]
pub struct SymCheck {
    pub valid: bool,
    pub failures: Vec<String>,
}

/// Checks a symmetric atomic proof, deciding `≡` by bounded search.
pub fn check_sym(system: &RewriteSystem, proof: &SymProof, budget: Budget) -> SymCheck {
    let mut rw = Rewriter::new(system, budget);
    let mut failures = Vec::new();
    check_node(&mut rw, proof, &mut Vec::new(), &mut failures);
    SymCheck { valid: failures.is_empty(), failures }
}

fn check_node(rw: &mut Rewriter<'_, Prop>, p: &SymProof, path: &mut Vec<usize>, failures: &mut Vec<String>) {
    let at = path_string(path);
    let s = &p.conclusion;
    if let Err(e) = require_atomic(s) {
        failures.push(format!("at {at}: {e}"));
    }
    if p.premises.len() != p.rule.arity() {
        failures.push(format!("at {at}: {} expects {} premises", p.rule.tag(), p.rule.arity()));
        return;
    }
    let prem = |i: usize| &p.premises[i].conclusion;
    let mut convertible = |a: &Prop, b: &Prop, failures: &mut Vec<String>| match rw.convertible(a, b) {
        Convertibility::Convertible { .. } => {}
        Convertibility::NotConvertible => failures.push(format!("at {at}: {a} and {b} are not convertible")),
        Convertibility::Unknown => failures.push(format!("at {at}: convertibility of {a} and {b} undetermined")),
    };
    let shape_ok = match &p.rule {
        SymRule::Axiom { left, right } => {
            let ok = s.gamma.contains(left) && s.delta.contains(right);
            if ok {
                convertible(left, right, failures);
            }
            ok
        }
        SymRule::Cut { left, right } => {
            let ok = prem(0) == &s.with_right(left.clone()) && prem(1) == &s.with_left(right.clone());
            if ok {
                convertible(left, right, failures);
            }
            ok
        }
        SymRule::ContrLeft => (0..s.gamma.len()).any(|i| prem(0) == &s.with_left(s.gamma[i].clone())),
        SymRule::ContrRight => (0..s.delta.len()).any(|i| prem(0) == &s.with_right(s.delta[i].clone())),
        SymRule::WeakLeft => (0..s.gamma.len()).any(|i| prem(0) == &s.without_left(i)),
        SymRule::WeakRight => (0..s.delta.len()).any(|i| prem(0) == &s.without_right(i)),
    };
    if !shape_ok {
        let ps: Vec<String> = p.premises.iter().map(|q| q.conclusion.to_string()).collect();
        failures.push(format!("at {at}: premises [{}] do not fit {} for {s}", ps.join(" ; "), p.rule.tag()));
    }
    for (i, q) in p.premises.iter().enumerate() {
        path.push(i);
        check_node(rw, q, path, failures);
        path.pop();
    }
}

/// Some `A ∈ Γ`, `B ∈ Δ` with `A ≡ B` gives a one-axiom proof.
pub fn provable_atomic_sym(
    system: &RewriteSystem,
    s: &Sequent,
    budget: Budget,
) -> Result<AtomicAnswer<SymProof>, NonAtomic> {
    require_atomic(s)?;
    let mut rw = Rewriter::new(system, budget);
    let mut certificates = Vec::new();
    let mut unknown = None;
    for a in &s.gamma {
        for b in &s.delta {
            if !same_skeleton(a, b) {
                certificates.push(PairCertificate { left: a.clone(), right: b.clone(), reason: PairReason::Skeleton });
                continue;
            }
            match rw.convertible(a, b) {
                Convertibility::Convertible { .. } => {
                    return Ok(AtomicAnswer::Provable(SymProof::axiom(s.clone(), a.clone(), b.clone())));
                }
                Convertibility::NotConvertible => {
                    let class_a = rw.conversion_class(a);
                    let (of, class) = if class_a.complete {
                        (a.clone(), class_a.elements)
                    } else {
                        (b.clone(), rw.conversion_class(b).elements)
                    };
                    certificates.push(PairCertificate {
                        left: a.clone(),
                        right: b.clone(),
                        reason: PairReason::Class { of, class },
                    });
                }
                Convertibility::Unknown => {
                    unknown.get_or_insert_with(|| format!("convertibility of {a} and {b} undetermined"));
                }
            }
        }
    }
    Ok(match unknown {
        Some(reason) => AtomicAnswer::Unknown(reason),
        None => AtomicAnswer::NotProvable(certificates),
    })
}

#[derive(Debug, Clone)]
pub struct SymReduction {
    pub proof: SymProof,
    pub steps: usize,
}

/// Replaces the highest cut by an axiom until none is left. Each step
/// removes exactly one cut.
pub fn reduce_symmetric_atomic(proof: &SymProof) -> SymReduction {
    let mut proof = proof.clone();
    let mut steps = 0;
    loop {
        let mut path = Vec::new();
        if !proof.highest_cut(&mut path) {
            return SymReduction { proof, steps };
        }
        let node = proof.at_mut(&path);
        let (left, right) = node.convertible_pair();
        *node = SymProof::axiom(node.conclusion.clone(), left, right);
        steps += 1;
    }
}
