//! Structural operations on proof trees used by the elimination engines.

use std::collections::BTreeSet;

use crate::kernel::{multiset_minus, Proof, Rule, Sequent};
use crate::subst::Substitution;
use crate::term::{fresh_name, Name, Prop, Term};

/// Free variables of every sequent and annotation, plus all eigenvariables.
pub(crate) fn proof_vars(p: &Proof) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    p.visit(&mut |_, n| {
        out.extend(n.conclusion.free_vars());
        for q in annotation_props(&n.rule) {
            out.extend(q.free_vars());
        }
        match &n.rule {
            Rule::ForallLeft { var, term, .. } | Rule::ExistsRight { var, term, .. } => {
                out.insert(var.clone());
                out.extend(term.free_vars());
            }
            Rule::ForallRight { var, .. } | Rule::ExistsLeft { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        }
    });
    out
}

fn annotation_props(rule: &Rule) -> Vec<&Prop> {
    match rule {
        Rule::Axiom { common } => vec![common],
        Rule::Cut { cut } => vec![cut],
        Rule::ContrLeft { main, first, second } | Rule::ContrRight { main, first, second } => {
            vec![main, first, second]
        }
        Rule::ImpLeft { left, right }
        | Rule::ImpRight { left, right }
        | Rule::AndLeft { left, right }
        | Rule::AndRight { left, right }
        | Rule::OrLeft { left, right }
        | Rule::OrRight { left, right } => vec![left, right],
        Rule::ForallLeft { body, .. }
        | Rule::ExistsRight { body, .. }
        | Rule::ForallRight { body, .. }
        | Rule::ExistsLeft { body, .. } => vec![body],
        Rule::WeakLeft | Rule::WeakRight | Rule::BottomLeft => vec![],
    }
}

fn eigenvariable(rule: &Rule) -> Option<&Name> {
    match rule {
        Rule::ForallRight { var, .. } | Rule::ExistsLeft { var, .. } => Some(var),
        _ => None,
    }
}

fn rename(p: &Prop, from: &Name, to: &Name) -> Prop {
    Substitution::singleton(from.clone(), Term::Var(to.clone())).apply_prop(p)
}

/// Replaces the free variable `x` by `t` throughout `p`. Eigenvariables and
/// annotation binders that would capture `t` are renamed apart first, with
/// names drawn outside `avoid` (which is extended).
pub(crate) fn subst_proof(p: &Proof, x: &Name, t: &Term, avoid: &mut BTreeSet<Name>) -> Proof {
    let clashes = |z: &Name| z == x || t.occurs(z);
    if let Some(z) = eigenvariable(&p.rule).filter(|z| clashes(z)).cloned() {
        let renamed = rename_eigenvariable(p, &z, avoid);
        return subst_proof(&renamed, x, t, avoid);
    }
    let sigma = Substitution::singleton(x.clone(), t.clone());
    let prop = |q: &Prop| sigma.apply_prop(q);
    let mut rebind = |var: &Name, body: &Prop| -> (Name, Prop) {
        if clashes(var) {
            let fresh = fresh_name(var, avoid);
            avoid.insert(fresh.clone());
            let body = rename(body, var, &fresh);
            (fresh, sigma.apply_prop(&body))
        } else {
            (var.clone(), sigma.apply_prop(body))
        }
    };
    let rule = match &p.rule {
        Rule::Axiom { common } => Rule::Axiom { common: prop(common) },
        Rule::Cut { cut } => Rule::Cut { cut: prop(cut) },
        Rule::ContrLeft { main, first, second } => {
            Rule::ContrLeft { main: prop(main), first: prop(first), second: prop(second) }
        }
        Rule::ContrRight { main, first, second } => {
            Rule::ContrRight { main: prop(main), first: prop(first), second: prop(second) }
        }
        Rule::WeakLeft => Rule::WeakLeft,
        Rule::WeakRight => Rule::WeakRight,
        Rule::BottomLeft => Rule::BottomLeft,
        Rule::ImpLeft { left, right } => Rule::ImpLeft { left: prop(left), right: prop(right) },
        Rule::ImpRight { left, right } => Rule::ImpRight { left: prop(left), right: prop(right) },
        Rule::AndLeft { left, right } => Rule::AndLeft { left: prop(left), right: prop(right) },
        Rule::AndRight { left, right } => Rule::AndRight { left: prop(left), right: prop(right) },
        Rule::OrLeft { left, right } => Rule::OrLeft { left: prop(left), right: prop(right) },
        Rule::OrRight { left, right } => Rule::OrRight { left: prop(left), right: prop(right) },
        Rule::ForallLeft { var, body, term } => {
            let (var, body) = rebind(var, body);
            Rule::ForallLeft { var, body, term: sigma.apply(term) }
        }
        Rule::ExistsRight { var, body, term } => {
            let (var, body) = rebind(var, body);
            Rule::ExistsRight { var, body, term: sigma.apply(term) }
        }
        Rule::ForallRight { var, body } => Rule::ForallRight { var: var.clone(), body: prop(body) },
        Rule::ExistsLeft { var, body } => Rule::ExistsLeft { var: var.clone(), body: prop(body) },
    };
    let conclusion = Sequent::new(p.conclusion.gamma.iter().map(prop).collect(), p.conclusion.delta.iter().map(prop).collect());
    let premises = p.premises.iter().map(|q| subst_proof(q, x, t, avoid)).collect();
    Proof::new(rule, conclusion, premises)
}

/// Renames the eigenvariable `z` of the root rule to a fresh name. `z` is
/// not free in the conclusion's context, so only the premise changes.
pub(crate) fn rename_eigenvariable(p: &Proof, z: &Name, avoid: &mut BTreeSet<Name>) -> Proof {
    let fresh = fresh_name(z, avoid);
    avoid.insert(fresh.clone());
    let premises: Vec<Proof> =
        p.premises.iter().map(|q| subst_proof(q, z, &Term::Var(fresh.clone()), avoid)).collect();
    let rule = match &p.rule {
        Rule::ForallRight { body, .. } => Rule::ForallRight { var: fresh.clone(), body: rename(body, z, &fresh) },
        Rule::ExistsLeft { body, .. } => Rule::ExistsLeft { var: fresh.clone(), body: rename(body, z, &fresh) },
        other => other.clone(),
    };
    Proof::new(rule, p.conclusion.clone(), premises)
}

/// Adds `left` and `right` to the conclusion by weakenings.
pub(crate) fn weaken(mut p: Proof, left: &[Prop], right: &[Prop]) -> Proof {
    for a in left {
        let s = p.conclusion.with_left(a.clone());
        p = Proof::new(Rule::WeakLeft, s, vec![p]);
    }
    for b in right {
        let s = p.conclusion.with_right(b.clone());
        p = Proof::new(Rule::WeakRight, s, vec![p]);
    }
    p
}

/// `p` proves the end sequent with both sides doubled; contracts each
/// duplicate back, ending exactly at `end`.
pub(crate) fn contract_duplicates(mut p: Proof, end: &Sequent) -> Proof {
    for a in &end.gamma {
        let s = Sequent::new(remove_one(&p.conclusion.gamma, a), p.conclusion.delta.clone());
        p = Proof::new(Rule::ContrLeft { main: a.clone(), first: a.clone(), second: a.clone() }, s, vec![p]);
    }
    for b in &end.delta {
        let s = Sequent::new(p.conclusion.gamma.clone(), remove_one(&p.conclusion.delta, b));
        p = Proof::new(Rule::ContrRight { main: b.clone(), first: b.clone(), second: b.clone() }, s, vec![p]);
    }
    p.conclusion = end.clone();
    p
}

pub(crate) fn remove_one(ps: &[Prop], p: &Prop) -> Vec<Prop> {
    multiset_minus(ps, std::slice::from_ref(p)).expect("occurrence present")
}

pub(crate) fn minus(ps: &[Prop], sub: &[Prop]) -> Vec<Prop> {
    multiset_minus(ps, sub).expect("sub-multiset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::name;

    fn p(x: Term) -> Prop {
        Prop::atom("P", vec![x])
    }

    #[test]
    fn substitution_renames_capturing_eigenvariables() {
        // |- forall y. P(y), P(x) by forall-right with eigenvariable y
        let body = p(Term::var("y"));
        let s = Sequent::new(vec![], vec![Prop::forall("y", body.clone()), p(Term::var("x"))]);
        let prem = Proof::new(Rule::WeakRight, Sequent::new(vec![], vec![body.clone(), p(Term::var("x"))]), vec![]);
        let node = Proof::new(Rule::ForallRight { var: name("y"), body }, s, vec![prem]);
        let mut avoid = proof_vars(&node);
        let out = subst_proof(&node, &name("x"), &Term::var("y"), &mut avoid);
        let Rule::ForallRight { var, .. } = &out.rule else { panic!() };
        assert_ne!(var.as_ref(), "y");
        assert!(out.conclusion.delta.contains(&p(Term::var("y"))));
        let renamed = p(Term::Var(var.clone()));
        assert!(out.premises[0].conclusion.delta.contains(&renamed));
        assert!(out.premises[0].conclusion.delta.contains(&p(Term::var("y"))));
    }

    #[test]
    fn contraction_undoes_doubling() {
        let a = p(Term::constant("a"));
        let end = Sequent::new(vec![a.clone()], vec![a.clone()]);
        let doubled = Sequent::new(vec![a.clone(), a.clone()], vec![a.clone(), a.clone()]);
        let out = contract_duplicates(Proof::axiom(doubled, a.clone()), &end);
        assert_eq!(out.conclusion, end);
        assert_eq!(out.size(), 3);
    }
}
