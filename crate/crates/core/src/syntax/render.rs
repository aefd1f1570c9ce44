use std::fmt::Write;

use crate::atomic::{SymProof, SymRule};
use crate::elim::StepPolicy;
use crate::kernel::{Proof, Rule};
use crate::rewrite::RewriteSystem;
use crate::term::Prop;

use super::ProblemFile;

/// Declarations and the rules block.
pub fn render_system(system: &RewriteSystem) -> String {
    let mut out = String::new();
    let decls = |it: Vec<(String, usize)>| it.iter().map(|(s, n)| format!("{s}/{n}")).collect::<Vec<_>>().join(", ");
    let sig = system.signature();
    let fs: Vec<_> = sig.functions().map(|(s, n)| (s.to_string(), n)).collect();
    let ps: Vec<_> = sig.predicates().map(|(s, n)| (s.to_string(), n)).collect();
    if !fs.is_empty() {
        let _ = writeln!(out, "sig {};", decls(fs));
    }
    if !ps.is_empty() {
        let _ = writeln!(out, "pred {};", decls(ps));
    }
    out.push_str("rules {\n");
    for r in system.rules() {
        let _ = writeln!(out, "  {r}");
    }
    out.push_str("}\n");
    out
}

pub fn render_problem(file: &ProblemFile) -> String {
    let mut out = render_system(&file.system);
    if let Some(s) = &file.sequent {
        let _ = writeln!(out, "sequent {s};");
    }
    if let Some(p) = &file.proof {
        out.push_str("proof\n");
        out.push_str(&render_proof(p));
    }
    if let Some(p) = &file.symproof {
        out.push_str("symproof\n");
        out.push_str(&render_sym_proof(p));
    }
    if let Some(p) = &file.policy {
        out.push_str("policy {\n");
        for line in render_policy(p).lines() {
            let _ = writeln!(out, "  {line}");
        }
        out.push_str("}\n");
    }
    out
}

fn annotations(rule: &Rule) -> String {
    let list = |xs: Vec<String>| format!(" {{{}}}", xs.join("; "));
    let p = |q: &Prop| q.to_string();
    match rule {
        Rule::Axiom { common } => list(vec![p(common)]),
        Rule::Cut { cut } => list(vec![p(cut)]),
        Rule::ContrLeft { main, first, second } | Rule::ContrRight { main, first, second } => {
            list(vec![p(main), p(first), p(second)])
        }
        Rule::WeakLeft | Rule::WeakRight | Rule::BottomLeft => String::new(),
        Rule::ImpLeft { left, right }
        | Rule::ImpRight { left, right }
        | Rule::AndLeft { left, right }
        | Rule::AndRight { left, right }
        | Rule::OrLeft { left, right }
        | Rule::OrRight { left, right } => list(vec![p(left), p(right)]),
        Rule::ForallLeft { var, body, term } | Rule::ExistsRight { var, body, term } => {
            list(vec![var.to_string(), p(body), term.to_string()])
        }
        Rule::ForallRight { var, body } | Rule::ExistsLeft { var, body } => list(vec![var.to_string(), p(body)]),
    }
}

/// One node per line, premises indented under their conclusion.
pub fn render_proof(proof: &Proof) -> String {
    fn go(p: &Proof, depth: usize, out: &mut String) {
        let _ = write!(out, "{}({}{}", "  ".repeat(depth), p.rule.tag(), annotations(&p.rule));
        if !p.witnesses.is_empty() {
            let chains: Vec<String> = p
                .witnesses
                .iter()
                .map(|c| c.iter().map(Prop::to_string).collect::<Vec<_>>().join(" -> "))
                .collect();
            let _ = write!(out, " [{}]", chains.join("; "));
        }
        let _ = write!(out, " ({})", p.conclusion);
        for q in &p.premises {
            out.push('\n');
            go(q, depth + 1, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    go(proof, 0, &mut out);
    out.push('\n');
    out
}

pub fn render_sym_proof(proof: &SymProof) -> String {
    fn go(p: &SymProof, depth: usize, out: &mut String) {
        let _ = write!(out, "{}({}", "  ".repeat(depth), p.rule.tag());
        if let SymRule::Axiom { left, right } | SymRule::Cut { left, right } = &p.rule {
            let _ = write!(out, " {{{left} == {right}}}");
        }
        let _ = write!(out, " ({})", p.conclusion);
        for q in &p.premises {
            out.push('\n');
            go(q, depth + 1, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    go(proof, 0, &mut out);
    out.push('\n');
    out
}

pub fn render_policy(policy: &StepPolicy) -> String {
    let mut out = String::new();
    if policy.no_shortcut {
        out.push_str("no-shortcut\n");
    }
    let wrap = |p: &Prop| if p.is_atomic() { p.to_string() } else { format!("({p})") };
    for s in &policy.splits {
        let _ = writeln!(out, "on {} split {} {}", wrap(&s.cut), wrap(&s.first), wrap(&s.second));
    }
    out
}
