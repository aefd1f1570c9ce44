use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{Name, Signature, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {0}: left-hand side is a variable")]
    VariableLhs(String),
    #[error("rule {rule}: variable `{var}` of the right-hand side does not occur on the left")]
    UnboundRhsVariable { rule: String, var: Name },
    #[error("rule {0}: de Bruijn index in a rule")]
    BoundInRule(String),
    #[error("rule {rule}: {source}")]
    IllFormed { rule: String, source: TermError },
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
}

/// An oriented pair `lhs -> rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
    pub name: Option<String>,
}

impl RewriteRule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        RewriteRule { lhs, rhs, name: None }
    }

    pub fn named(name: &str, lhs: Term, rhs: Term) -> Self {
        RewriteRule { lhs, rhs, name: Some(name.to_string()) }
    }

    /// Rules whose left side has variables missing from the right side.
    pub fn is_erasing(&self) -> bool {
        !self.lhs.free_vars().is_subset(&self.rhs.free_vars())
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{n}: ")?;
        }
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A signature together with an ordered list of rules. Construction
/// validates every rule, so a `RewriteSystem` value is always well formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteSystem {
    signature: Signature,
    rules: Vec<RewriteRule>,
}

impl RewriteSystem {
    pub fn new(signature: Signature, rules: Vec<RewriteRule>) -> Result<Self, RuleError> {
        let mut names = BTreeSet::new();
        for (i, r) in rules.iter().enumerate() {
            let label = r.name.clone().unwrap_or_else(|| format!("#{i}"));
            if let Some(n) = &r.name {
                if !names.insert(n.clone()) {
                    return Err(RuleError::DuplicateName(n.clone()));
                }
            }
            if matches!(r.lhs, Term::Var(_)) {
                return Err(RuleError::VariableLhs(label));
            }
            if has_bound(&r.lhs) || has_bound(&r.rhs) {
                return Err(RuleError::BoundInRule(label));
            }
            for side in [&r.lhs, &r.rhs] {
                signature
                    .check_term(side)
                    .map_err(|source| RuleError::IllFormed { rule: label.clone(), source })?;
            }
            let lhs_vars = r.lhs.free_vars();
            if let Some(v) = r.rhs.free_vars().into_iter().find(|v| !lhs_vars.contains(v)) {
                return Err(RuleError::UnboundRhsVariable { rule: label, var: v });
            }
        }
        Ok(RewriteSystem { signature, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> Option<&RewriteRule> {
        self.rules.get(index)
    }

    /// Display label: the rule's name, or its index.
    pub fn label(&self, index: usize) -> String {
        match self.rules.get(index).and_then(|r| r.name.clone()) {
            Some(n) => n,
            None => format!("#{index}"),
        }
    }

    pub fn rule_index(&self, label: &str) -> Option<usize> {
        if let Some(i) = self.rules.iter().position(|r| r.name.as_deref() == Some(label)) {
            return Some(i);
        }
        label.strip_prefix('#')?.parse().ok().filter(|i| *i < self.rules.len())
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(|r| r.lhs.is_ground())
    }

    pub fn has_erasing_rules(&self) -> bool {
        self.rules.iter().any(RewriteRule::is_erasing)
    }

    /// Same signature and rules plus `extra`.
    pub fn extended(&self, extra: Vec<RewriteRule>) -> Result<Self, RuleError> {
        let mut rules = self.rules.clone();
        rules.extend(extra);
        RewriteSystem::new(self.signature.clone(), rules)
    }

    pub fn with_signature(&self, signature: Signature) -> Result<Self, RuleError> {
        RewriteSystem::new(signature, self.rules.clone())
    }
}

fn has_bound(t: &Term) -> bool {
    match t {
        Term::Bound(_) => true,
        Term::Var(_) => false,
        Term::App(_, a) => a.iter().any(has_bound),
    }
}
