use std::fmt;

use crate::term::{Name, Prop, Term};

use super::sequent::Sequent;

/// The inference at a proof node together with its annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Axiom { common: Prop },
    Cut { cut: Prop },
    ContrLeft { main: Prop, first: Prop, second: Prop },
    ContrRight { main: Prop, first: Prop, second: Prop },
    WeakLeft,
    WeakRight,
    ImpLeft { left: Prop, right: Prop },
    ImpRight { left: Prop, right: Prop },
    AndLeft { left: Prop, right: Prop },
    AndRight { left: Prop, right: Prop },
    OrLeft { left: Prop, right: Prop },
    OrRight { left: Prop, right: Prop },
    BottomLeft,
    ForallLeft { var: Name, body: Prop, term: Term },
    ForallRight { var: Name, body: Prop },
    ExistsLeft { var: Name, body: Prop },
    ExistsRight { var: Name, body: Prop, term: Term },
}

pub const RULE_TAGS: [&str; 17] = [
    "axiom",
    "cut",
    "contr-left",
    "contr-right",
    "weak-left",
    "weak-right",
    "imp-left",
    "imp-right",
    "and-left",
    "and-right",
    "or-left",
    "or-right",
    "bot-left",
    "forall-left",
    "forall-right",
    "exists-left",
    "exists-right",
];

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Axiom { .. } => "axiom",
            Rule::Cut { .. } => "cut",
            Rule::ContrLeft { .. } => "contr-left",
            Rule::ContrRight { .. } => "contr-right",
            Rule::WeakLeft => "weak-left",
            Rule::WeakRight => "weak-right",
            Rule::ImpLeft { .. } => "imp-left",
            Rule::ImpRight { .. } => "imp-right",
            Rule::AndLeft { .. } => "and-left",
            Rule::AndRight { .. } => "and-right",
            Rule::OrLeft { .. } => "or-left",
            Rule::OrRight { .. } => "or-right",
            Rule::BottomLeft => "bot-left",
            Rule::ForallLeft { .. } => "forall-left",
            Rule::ForallRight { .. } => "forall-right",
            Rule::ExistsLeft { .. } => "exists-left",
            Rule::ExistsRight { .. } => "exists-right",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Axiom { .. } | Rule::BottomLeft => 0,
            Rule::Cut { .. } | Rule::ImpLeft { .. } | Rule::AndRight { .. } | Rule::OrLeft { .. } => 2,
            _ => 1,
        }
    }

    pub fn is_structural(&self) -> bool {
        matches!(self, Rule::ContrLeft { .. } | Rule::ContrRight { .. } | Rule::WeakLeft | Rule::WeakRight)
    }

    pub fn is_logical(&self) -> bool {
        !self.is_structural() && !matches!(self, Rule::Axiom { .. } | Rule::Cut { .. })
    }
}

/// A derivation tree. `witnesses` optionally carries explicit forward
/// chains `X ->1 ... ->1 Y` for the node's side conditions; the checker
/// replays them instead of searching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<Proof>,
    pub witnesses: Vec<Vec<Prop>>,
}

impl Proof {
    pub fn new(rule: Rule, conclusion: Sequent, premises: Vec<Proof>) -> Self {
        Proof { rule, conclusion, premises, witnesses: Vec::new() }
    }

    pub fn axiom(conclusion: Sequent, common: Prop) -> Self {
        Proof::new(Rule::Axiom { common }, conclusion, vec![])
    }

    pub fn cut(conclusion: Sequent, cut: Prop, left: Proof, right: Proof) -> Self {
        Proof::new(Rule::Cut { cut }, conclusion, vec![left, right])
    }

    pub fn is_cut_free(&self) -> bool {
        !matches!(self.rule, Rule::Cut { .. }) && self.premises.iter().all(Proof::is_cut_free)
    }

    /// The annotations of all cut nodes, in pre-order.
    pub fn cut_propositions(&self) -> Vec<Prop> {
        let mut out = Vec::new();
        self.visit(&mut |_, p| {
            if let Rule::Cut { cut } = &p.rule {
                out.push(cut.clone());
            }
        });
        out
    }

    pub fn cut_count(&self) -> usize {
        self.cut_propositions().len()
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Proof::height).max().unwrap_or(0)
    }

    /// Pre-order traversal with the path of premise indices to each node.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&[usize], &'a Proof)) {
        fn go<'a>(p: &'a Proof, path: &mut Vec<usize>, f: &mut dyn FnMut(&[usize], &'a Proof)) {
            f(path, p);
            for (i, q) in p.premises.iter().enumerate() {
                path.push(i);
                go(q, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }

    pub fn at(&self, path: &[usize]) -> Option<&Proof> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get(*i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Proof> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get_mut(*i)?.at_mut(rest),
        }
    }

    /// The deepest cut whose premises are cut-free, leftmost first.
    pub fn highest_cut(&self) -> Option<Vec<usize>> {
        let mut found = None;
        self.visit(&mut |path, p| {
            if found.is_none() && matches!(p.rule, Rule::Cut { .. }) && p.premises.iter().all(Proof::is_cut_free) {
                found = Some(path.to_vec());
            }
        });
        found
    }

    /// Indented human-readable derivation, conclusion first.
    pub fn render_indented(&self) -> String {
        let mut out = String::new();
        self.visit(&mut |path, p| {
            let indent = "  ".repeat(path.len());
            out.push_str(&format!("{indent}{}  [{}]\n", p.conclusion, p.rule));
        });
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = self.tag();
        match self {
            Rule::Axiom { common } => write!(f, "({common}) {tag}"),
            Rule::Cut { cut } => write!(f, "({cut}) {tag}"),
            Rule::ContrLeft { main, first, second } | Rule::ContrRight { main, first, second } => {
                write!(f, "({main}; {first}; {second}) {tag}")
            }
            Rule::WeakLeft | Rule::WeakRight | Rule::BottomLeft => f.write_str(tag),
            Rule::ImpLeft { left, right }
            | Rule::ImpRight { left, right }
            | Rule::AndLeft { left, right }
            | Rule::AndRight { left, right }
            | Rule::OrLeft { left, right }
            | Rule::OrRight { left, right } => write!(f, "({left}; {right}) {tag}"),
            Rule::ForallLeft { var, body, term } | Rule::ExistsRight { var, body, term } => {
                write!(f, "({var}; {body}; {term}) {tag}")
            }
            Rule::ForallRight { var, body } | Rule::ExistsLeft { var, body } => write!(f, "({var}; {body}) {tag}"),
        }
    }
}
