use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::rewrite::{Budget, ConvStep, ConversionSequence, Direction, ReachAnswer, RewriteSystem, Rewriter};
use crate::subst::Substitution;
use crate::term::{Name, Prop, Term};

use super::proof::{Proof, Rule};
use super::sequent::{multiset_eq, multiset_minus, Sequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    PremiseCount,
    IllFormed,
    Shape,
    SideCondition,
    Eigenvariable,
    /// A side condition could be neither confirmed nor refuted.
    Budget,
    /// An embedded witness chain does not replay.
    Witness,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureKind::PremiseCount => "premise-count",
            FailureKind::IllFormed => "ill-formed",
            FailureKind::Shape => "shape",
            FailureKind::SideCondition => "side-condition",
            FailureKind::Eigenvariable => "eigenvariable",
            FailureKind::Budget => "budget",
            FailureKind::Witness => "witness",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub path: Vec<usize>,
    pub tag: &'static str,
    pub kind: FailureKind,
    pub explanation: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {} ({}): {}: {}", path_string(&self.path), self.tag, self.kind, self.explanation)
    }
}

/// A confirmed side condition `from ->* to`.
#[derive(Debug, Clone)]
pub struct SideWitness {
    pub from: Prop,
    pub to: Prop,
    pub derivation: ConversionSequence<Prop>,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub valid: bool,
    pub failures: Vec<Failure>,
    /// Keyed by node path, see [`path_string`].
    pub witnesses: BTreeMap<String, Vec<SideWitness>>,
    pub nodes: usize,
}

pub fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Checks every node of `proof`, collecting all failures.
pub fn check_proof(system: &RewriteSystem, proof: &Proof, budget: Budget) -> CheckReport {
    let mut rw = Rewriter::new(system, budget);
    let mut checker = Checker { system, rw: &mut rw, failures: Vec::new(), witnesses: BTreeMap::new() };
    let mut nodes = 0;
    proof.visit(&mut |path, node| {
        nodes += 1;
        checker.node(path, node);
    });
    CheckReport { valid: checker.failures.is_empty(), failures: checker.failures, witnesses: checker.witnesses, nodes }
}

/// One way of reading a node: which occurrence is principal, what the
/// premises must be, which reductions must hold.
struct Reading {
    premises: Vec<Sequent>,
    conditions: Vec<(Prop, Prop)>,
    eigen: Option<(Name, Sequent)>,
    principal: Option<(Side, Prop)>,
    pair: Option<(Prop, Prop)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A reading of a node under which it checks: the principal occurrence of
/// a connective or structural rule, or the related pair of an axiom.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub principal: Option<(Side, Prop)>,
    pub pair: Option<(Prop, Prop)>,
}

/// Every reading under which `node` is a correct inference, in candidate
/// order. Premise conclusions are compared, premises themselves are not
/// checked.
pub fn valid_readings(system: &RewriteSystem, rw: &mut Rewriter<'_, Prop>, node: &Proof) -> Vec<Resolved> {
    if node.premises.len() != node.rule.arity() {
        return Vec::new();
    }
    let mut checker = Checker { system, rw, failures: Vec::new(), witnesses: BTreeMap::new() };
    let mut out = Vec::new();
    for reading in readings(node) {
        if !checker.shape_ok(node, &reading) {
            continue;
        }
        if let Verdict::Ok(_) = checker.evaluate(node, &reading) {
            out.push(Resolved { principal: reading.principal, pair: reading.pair });
        }
    }
    out
}

enum Reach {
    Confirmed(ConversionSequence<Prop>),
    Refuted,
    Undetermined,
    BadWitness(String),
}

struct Checker<'a, 'r> {
    system: &'a RewriteSystem,
    rw: &'a mut Rewriter<'r, Prop>,
    failures: Vec<Failure>,
    witnesses: BTreeMap<String, Vec<SideWitness>>,
}

fn instantiate(var: &Name, body: &Prop, t: &Term) -> Prop {
    Substitution::singleton(var.clone(), t.clone()).apply_prop(body)
}

// Each quantifier or connective rule fixes one principal occurrence
// on one side; the rest is context.
fn left_readings(s: &Sequent, f: impl Fn(&Sequent, &Prop) -> Option<Reading>) -> Vec<Reading> {
    let mut seen: Vec<&Prop> = Vec::new();
    let mut out = Vec::new();
    for (i, p) in s.gamma.iter().enumerate() {
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        out.extend(f(&s.without_left(i), p).map(|mut r| {
            r.principal = Some((Side::Left, p.clone()));
            r
        }));
    }
    out
}

fn right_readings(s: &Sequent, f: impl Fn(&Sequent, &Prop) -> Option<Reading>) -> Vec<Reading> {
    let mut seen: Vec<&Prop> = Vec::new();
    let mut out = Vec::new();
    for (i, p) in s.delta.iter().enumerate() {
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        out.extend(f(&s.without_right(i), p).map(|mut r| {
            r.principal = Some((Side::Right, p.clone()));
            r
        }));
    }
    out
}

fn single(premise: Sequent, from: &Prop, to: Prop) -> Option<Reading> {
    Some(Reading { premises: vec![premise], conditions: vec![(from.clone(), to)], eigen: None, principal: None, pair: None })
}

fn readings(node: &Proof) -> Vec<Reading> {
    let s = &node.conclusion;
    let prem = |i: usize| &node.premises[i].conclusion;
    match &node.rule {
        Rule::Axiom { common } => {
            let mut out = Vec::new();
            for a1 in dedup(&s.gamma) {
                for a2 in dedup(&s.delta) {
                    out.push(Reading {
                        premises: vec![],
                        conditions: vec![(a1.clone(), common.clone()), (a2.clone(), common.clone())],
                        eigen: None,
                        principal: None,
                        pair: Some((a1.clone(), a2.clone())),
                    });
                }
            }
            out
        }
        Rule::Cut { cut } => {
            let (l, r) = (prem(0), prem(1));
            let c1 = multiset_minus(&l.delta, &s.delta).filter(|d| d.len() == 1);
            let c2 = multiset_minus(&r.gamma, &s.gamma).filter(|d| d.len() == 1);
            match (c1, c2) {
                (Some(c1), Some(c2)) => vec![Reading {
                    premises: vec![s.with_right(c1[0].clone()), s.with_left(c2[0].clone())],
                    conditions: vec![(cut.clone(), c1[0].clone()), (cut.clone(), c2[0].clone())],
                    eigen: None,
                    principal: None,
                    pair: None,
                }],
                _ => vec![],
            }
        }
        Rule::ContrLeft { main, first, second } => left_readings(s, |ctx, p| {
            (p == main).then(|| Reading {
                premises: vec![ctx.with_left(first.clone()).with_left(second.clone())],
                conditions: vec![(main.clone(), first.clone()), (main.clone(), second.clone())],
                eigen: None,
                principal: None,
                pair: None,
            })
        }),
        Rule::ContrRight { main, first, second } => right_readings(s, |ctx, p| {
            (p == main).then(|| Reading {
                premises: vec![ctx.with_right(second.clone()).with_right(first.clone())],
                conditions: vec![(main.clone(), first.clone()), (main.clone(), second.clone())],
                eigen: None,
                principal: None,
                pair: None,
            })
        }),
        Rule::WeakLeft => left_readings(s, |ctx, _| {
            Some(Reading { premises: vec![ctx.clone()], conditions: vec![], eigen: None, principal: None, pair: None })
        }),
        Rule::WeakRight => right_readings(s, |ctx, _| {
            Some(Reading { premises: vec![ctx.clone()], conditions: vec![], eigen: None, principal: None, pair: None })
        }),
        Rule::ImpLeft { left, right } => left_readings(s, |ctx, c| {
            Some(Reading {
                premises: vec![ctx.with_right(left.clone()), ctx.with_left(right.clone())],
                conditions: vec![(c.clone(), Prop::implies(left.clone(), right.clone()))],
                eigen: None,
                principal: None,
                pair: None,
            })
        }),
        Rule::ImpRight { left, right } => right_readings(s, |ctx, c| {
            single(ctx.with_left(left.clone()).with_right(right.clone()), c, Prop::implies(left.clone(), right.clone()))
        }),
        Rule::AndLeft { left, right } => left_readings(s, |ctx, c| {
            single(ctx.with_left(left.clone()).with_left(right.clone()), c, Prop::and(left.clone(), right.clone()))
        }),
        Rule::AndRight { left, right } => right_readings(s, |ctx, c| {
            Some(Reading {
                premises: vec![ctx.with_right(left.clone()), ctx.with_right(right.clone())],
                conditions: vec![(c.clone(), Prop::and(left.clone(), right.clone()))],
                eigen: None,
                principal: None,
                pair: None,
            })
        }),
        Rule::OrLeft { left, right } => left_readings(s, |ctx, c| {
            Some(Reading {
                premises: vec![ctx.with_left(left.clone()), ctx.with_left(right.clone())],
                conditions: vec![(c.clone(), Prop::or(left.clone(), right.clone()))],
                eigen: None,
                principal: None,
                pair: None,
            })
        }),
        Rule::OrRight { left, right } => right_readings(s, |ctx, c| {
            single(ctx.with_right(right.clone()).with_right(left.clone()), c, Prop::or(left.clone(), right.clone()))
        }),
        Rule::BottomLeft => left_readings(s, |_, c| {
            Some(Reading {
                premises: vec![],
                conditions: vec![(c.clone(), Prop::Bottom)],
                eigen: None,
                principal: None,
                pair: None,
            })
        }),
        Rule::ForallLeft { var, body, term } => left_readings(s, |ctx, b| {
            single(ctx.with_left(instantiate(var, body, term)), b, Prop::forall(var, body.clone()))
        }),
        Rule::ForallRight { var, body } => right_readings(s, |ctx, b| {
            Some(Reading {
                premises: vec![ctx.with_right(body.clone())],
                conditions: vec![(b.clone(), Prop::forall(var, body.clone()))],
                eigen: Some((var.clone(), ctx.clone())),
                principal: None,
                pair: None,
            })
        }),
        Rule::ExistsLeft { var, body } => left_readings(s, |ctx, b| {
            Some(Reading {
                premises: vec![ctx.with_left(body.clone())],
                conditions: vec![(b.clone(), Prop::exists(var, body.clone()))],
                eigen: Some((var.clone(), ctx.clone())),
                principal: None,
                pair: None,
            })
        }),
        Rule::ExistsRight { var, body, term } => right_readings(s, |ctx, b| {
            single(ctx.with_right(instantiate(var, body, term)), b, Prop::exists(var, body.clone()))
        }),
    }
}

fn dedup(ps: &[Prop]) -> Vec<&Prop> {
    let mut out: Vec<&Prop> = Vec::new();
    for p in ps {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Same connectives, predicate symbols and arities. Rewriting preserves
/// this skeleton, so differing skeletons refute `->*` outright.
pub fn same_skeleton(a: &Prop, b: &Prop) -> bool {
    match (a, b) {
        (Prop::Atom(p, xs), Prop::Atom(q, ys)) => p == q && xs.len() == ys.len(),
        (Prop::Bottom, Prop::Bottom) => true,
        (Prop::Implies(a1, a2), Prop::Implies(b1, b2))
        | (Prop::And(a1, a2), Prop::And(b1, b2))
        | (Prop::Or(a1, a2), Prop::Or(b1, b2)) => same_skeleton(a1, b1) && same_skeleton(a2, b2),
        (Prop::Forall(_, a), Prop::Forall(_, b)) | (Prop::Exists(_, a), Prop::Exists(_, b)) => same_skeleton(a, b),
        _ => false,
    }
}

enum Verdict {
    Ok(Vec<SideWitness>),
    Failed(Vec<(FailureKind, String)>),
}

impl Checker<'_, '_> {
    fn fail(&mut self, path: &[usize], node: &Proof, kind: FailureKind, explanation: String) {
        self.failures.push(Failure { path: path.to_vec(), tag: node.rule.tag(), kind, explanation });
    }

    fn node(&mut self, path: &[usize], node: &Proof) {
        if node.premises.len() != node.rule.arity() {
            let msg = format!("expected {} premises, found {}", node.rule.arity(), node.premises.len());
            self.fail(path, node, FailureKind::PremiseCount, msg);
            return;
        }
        if let Some(msg) = self.ill_formed(node) {
            self.fail(path, node, FailureKind::IllFormed, msg);
            return;
        }
        let candidates = readings(node);
        let mut first_failure: Option<Vec<(FailureKind, String)>> = None;
        for reading in &candidates {
            if !self.shape_ok(node, reading) {
                continue;
            }
            match self.evaluate(node, reading) {
                Verdict::Ok(ws) => {
                    if !ws.is_empty() {
                        self.witnesses.insert(path_string(path), ws);
                    }
                    return;
                }
                Verdict::Failed(fs) => {
                    // prefer a reading that only failed for lack of budget
                    let budget_only = fs.iter().all(|(k, _)| *k == FailureKind::Budget);
                    match &first_failure {
                        None => first_failure = Some(fs),
                        Some(prev) if budget_only && prev.iter().any(|(k, _)| *k != FailureKind::Budget) => {
                            first_failure = Some(fs)
                        }
                        _ => {}
                    }
                }
            }
        }
        match first_failure {
            Some(fs) => {
                for (kind, msg) in fs {
                    self.fail(path, node, kind, msg);
                }
            }
            None => {
                let premises: Vec<String> = node.premises.iter().map(|p| p.conclusion.to_string()).collect();
                let msg = format!(
                    "premises [{}] do not fit the {} schema for {}",
                    premises.join(" ; "),
                    node.rule.tag(),
                    node.conclusion
                );
                self.fail(path, node, FailureKind::Shape, msg);
            }
        }
    }

    fn shape_ok(&self, node: &Proof, reading: &Reading) -> bool {
        reading.premises.iter().zip(&node.premises).all(|(want, got)| {
            multiset_eq(&want.gamma, &got.conclusion.gamma) && multiset_eq(&want.delta, &got.conclusion.delta)
        })
    }

    fn ill_formed(&self, node: &Proof) -> Option<String> {
        let sig = self.system.signature();
        let mut props: Vec<&Prop> = node.conclusion.props().collect();
        let annotated: Vec<Prop>;
        match &node.rule {
            Rule::Axiom { common } => props.push(common),
            Rule::Cut { cut } => props.push(cut),
            Rule::ContrLeft { main, first, second } | Rule::ContrRight { main, first, second } => {
                props.extend([main, first, second])
            }
            Rule::ImpLeft { left, right }
            | Rule::ImpRight { left, right }
            | Rule::AndLeft { left, right }
            | Rule::AndRight { left, right }
            | Rule::OrLeft { left, right }
            | Rule::OrRight { left, right } => props.extend([left, right]),
            Rule::ForallLeft { var, body, term } | Rule::ExistsRight { var, body, term } => {
                if let Err(e) = sig.check_term(term) {
                    return Some(e.to_string());
                }
                annotated = vec![Prop::forall(var, body.clone())];
                props.extend(&annotated);
            }
            Rule::ForallRight { body, .. } | Rule::ExistsLeft { body, .. } => props.push(body),
            Rule::WeakLeft | Rule::WeakRight | Rule::BottomLeft => {}
        }
        props.into_iter().find_map(|p| sig.check_prop(p).err().map(|e| format!("{p}: {e}")))
    }

    fn evaluate(&mut self, node: &Proof, reading: &Reading) -> Verdict {
        let mut failures = Vec::new();
        let mut witnesses = Vec::new();
        if let Some((x, ctx)) = &reading.eigen {
            if ctx.free_vars().contains(x) {
                failures.push((FailureKind::Eigenvariable, format!("{x} is free in the context {ctx}")));
            }
        }
        for (from, to) in &reading.conditions {
            match self.reach(node, from, to) {
                Reach::Confirmed(derivation) => {
                    witnesses.push(SideWitness { from: from.clone(), to: to.clone(), derivation })
                }
                Reach::Refuted => failures.push((FailureKind::SideCondition, format!("{from} ->* {to} does not hold"))),
                Reach::Undetermined => failures.push((
                    FailureKind::Budget,
                    format!("{from} ->* {to} neither confirmed nor refuted within budget"),
                )),
                Reach::BadWitness(msg) => failures.push((FailureKind::Witness, msg)),
            }
        }
        if failures.is_empty() {
            Verdict::Ok(witnesses)
        } else {
            Verdict::Failed(failures)
        }
    }

    fn reach(&mut self, node: &Proof, from: &Prop, to: &Prop) -> Reach {
        if let Some(chain) = node
            .witnesses
            .iter()
            .find(|c| c.first() == Some(from) && c.last() == Some(to))
        {
            return self.replay(chain);
        }
        if !same_skeleton(from, to) {
            return Reach::Refuted;
        }
        match self.rw.reduces_to(from, to) {
            ReachAnswer::Yes(d) => Reach::Confirmed(d),
            ReachAnswer::No => Reach::Refuted,
            ReachAnswer::Unknown => Reach::Undetermined,
        }
    }

    fn replay(&mut self, chain: &[Prop]) -> Reach {
        let mut seq = ConversionSequence::single(chain[0].clone());
        for pair in chain.windows(2) {
            let steps = self.rw.one_step(&pair[0]);
            match steps.iter().find(|r| r.object == pair[1]) {
                Some(r) => seq.push(
                    ConvStep { direction: Direction::Forward, rule: r.rule, position: r.position.clone() },
                    pair[1].clone(),
                ),
                None => return Reach::BadWitness(format!("{} ->1 {} does not hold", pair[0], pair[1])),
            }
        }
        Reach::Confirmed(seq)
    }
}
