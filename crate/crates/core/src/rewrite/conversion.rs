use std::fmt;

use thiserror::Error;

use super::object::Object;
use super::system::RewriteSystem;
use crate::subst::match_pattern;
use crate::term::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// `C_i ->1 C_{i+1}`
    Forward,
    /// `C_i <-1 C_{i+1}`
    Backward,
}

/// One link of a conversion sequence. `rule` and `position` locate the redex
/// in whichever of the two neighbours is the reducing one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvStep {
    pub direction: Direction,
    pub rule: usize,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConversionError {
    #[error("step {index}: rule {rule} does not exist")]
    UnknownRule { index: usize, rule: usize },
    #[error("step {index}: no subterm at position {position}")]
    BadPosition { index: usize, position: Position },
    #[error("step {index}: rule {rule} does not match at position {position}")]
    NoMatch { index: usize, rule: usize, position: Position },
    #[error("step {index}: rewriting gives {got}, sequence says {expected}")]
    WrongResult { index: usize, got: String, expected: String },
    #[error("sequence has {objects} objects but {steps} steps")]
    Malformed { objects: usize, steps: usize },
}

/// `C_1, ..., C_n` with a recorded one-step rewrite between neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConversionSequence<O> {
    objects: Vec<O>,
    steps: Vec<ConvStep>,
}

impl<O: Object> ConversionSequence<O> {
    pub fn single(start: O) -> Self {
        ConversionSequence { objects: vec![start], steps: Vec::new() }
    }

    /// Unchecked construction; call [`validate`](Self::validate) before trusting it.
    pub fn from_parts(objects: Vec<O>, steps: Vec<ConvStep>) -> Result<Self, ConversionError> {
        if objects.is_empty() || objects.len() != steps.len() + 1 {
            return Err(ConversionError::Malformed { objects: objects.len(), steps: steps.len() });
        }
        Ok(ConversionSequence { objects, steps })
    }

    pub fn push(&mut self, step: ConvStep, next: O) {
        self.steps.push(step);
        self.objects.push(next);
    }

    pub fn objects(&self) -> &[O] {
        &self.objects
    }

    pub fn steps(&self) -> &[ConvStep] {
        &self.steps
    }

    pub fn first(&self) -> &O {
        &self.objects[0]
    }

    pub fn last(&self) -> &O {
        self.objects.last().expect("nonempty")
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_forward_only(&self) -> bool {
        self.steps.iter().all(|s| s.direction == Direction::Forward)
    }

    /// Replays every step against the rules.
    pub fn validate(&self, system: &RewriteSystem) -> Result<(), ConversionError> {
        if self.objects.len() != self.steps.len() + 1 {
            return Err(ConversionError::Malformed {
                objects: self.objects.len(),
                steps: self.steps.len(),
            });
        }
        for (index, step) in self.steps.iter().enumerate() {
            let (source, target) = match step.direction {
                Direction::Forward => (&self.objects[index], &self.objects[index + 1]),
                Direction::Backward => (&self.objects[index + 1], &self.objects[index]),
            };
            let got = apply_step(system, source, step.rule, &step.position).map_err(|e| e.at(index))?;
            if &got != target {
                return Err(ConversionError::WrongResult {
                    index,
                    got: got.to_string(),
                    expected: target.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Indices `i` with `C_{i-1} <-1 C_i ->1 C_{i+1}`.
    pub fn peaks(&self) -> Vec<usize> {
        (1..self.objects.len().saturating_sub(1))
            .filter(|&i| {
                self.steps[i - 1].direction == Direction::Backward
                    && self.steps[i].direction == Direction::Forward
            })
            .collect()
    }

    pub fn is_valley(&self) -> bool {
        // forward steps, then backward steps
        let first_back = self.steps.iter().position(|s| s.direction == Direction::Backward);
        match first_back {
            None => true,
            Some(k) => self.steps[k..].iter().all(|s| s.direction == Direction::Backward),
        }
    }

    /// For a valley, the object where the forward run ends.
    pub fn valley_bottom(&self) -> Option<&O> {
        if !self.is_valley() {
            return None;
        }
        let k = self
            .steps
            .iter()
            .take_while(|s| s.direction == Direction::Forward)
            .count();
        Some(&self.objects[k])
    }

    /// `C_0..=C_i` and `C_i..`.
    pub fn split_at(&self, i: usize) -> (Self, Self) {
        let left = ConversionSequence {
            objects: self.objects[..=i].to_vec(),
            steps: self.steps[..i].to_vec(),
        };
        let right = ConversionSequence {
            objects: self.objects[i..].to_vec(),
            steps: self.steps[i..].to_vec(),
        };
        (left, right)
    }

    pub fn reversed(&self) -> Self {
        let objects = self.objects.iter().rev().cloned().collect();
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| ConvStep {
                direction: match s.direction {
                    Direction::Forward => Direction::Backward,
                    Direction::Backward => Direction::Forward,
                },
                rule: s.rule,
                position: s.position.clone(),
            })
            .collect();
        ConversionSequence { objects, steps }
    }

    /// Appends `other`, whose first object must equal this sequence's last.
    pub fn concat(&self, other: &Self) -> Option<Self> {
        if self.last() != other.first() {
            return None;
        }
        let mut out = self.clone();
        out.objects.extend(other.objects[1..].iter().cloned());
        out.steps.extend(other.steps.iter().cloned());
        Some(out)
    }

    /// Maps every object, keeping steps. Positions must stay meaningful,
    /// e.g. `t` to `P(t)` with positions prefixed accordingly.
    pub fn map<P: Object>(&self, f: impl Fn(&O) -> P, prefix: &Position) -> ConversionSequence<P> {
        ConversionSequence {
            objects: self.objects.iter().map(f).collect(),
            steps: self
                .steps
                .iter()
                .map(|s| ConvStep {
                    direction: s.direction,
                    rule: s.rule,
                    position: prefix.concat(&s.position),
                })
                .collect(),
        }
    }

    /// `a -> b <- c` rendering.
    pub fn render(&self) -> String {
        let mut out = self.objects[0].to_string();
        for (s, o) in self.steps.iter().zip(&self.objects[1..]) {
            out.push_str(match s.direction {
                Direction::Forward => " -> ",
                Direction::Backward => " <- ",
            });
            out.push_str(&o.to_string());
        }
        out
    }

    /// Rendering with rule labels and positions on every arrow.
    pub fn render_detailed(&self, system: &RewriteSystem) -> String {
        let mut out = self.objects[0].to_string();
        for (s, o) in self.steps.iter().zip(&self.objects[1..]) {
            let tag = format!("{}@{}", system.label(s.rule), s.position);
            match s.direction {
                Direction::Forward => out.push_str(&format!(" -[{tag}]-> ")),
                Direction::Backward => out.push_str(&format!(" <-[{tag}]- ")),
            }
            out.push_str(&o.to_string());
        }
        out
    }
}

impl<O: Object> fmt::Display for ConversionSequence<O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub(crate) struct StepError(ConversionError);

impl StepError {
    fn at(self, index: usize) -> ConversionError {
        match self.0 {
            ConversionError::UnknownRule { rule, .. } => ConversionError::UnknownRule { index, rule },
            ConversionError::BadPosition { position, .. } => ConversionError::BadPosition { index, position },
            ConversionError::NoMatch { rule, position, .. } => ConversionError::NoMatch { index, rule, position },
            other => other,
        }
    }
}

/// Rewrites `source` with rule `rule` at `pos`.
pub(crate) fn apply_step<O: Object>(
    system: &RewriteSystem,
    source: &O,
    rule: usize,
    pos: &Position,
) -> Result<O, StepError> {
    let r = system
        .rule(rule)
        .ok_or(StepError(ConversionError::UnknownRule { index: 0, rule }))?;
    let sub = source.term_at(pos).ok_or_else(|| {
        StepError(ConversionError::BadPosition { index: 0, position: pos.clone() })
    })?;
    let theta = match_pattern(&r.lhs, sub).ok_or_else(|| {
        StepError(ConversionError::NoMatch { index: 0, rule, position: pos.clone() })
    })?;
    source
        .replace_term(pos, theta.apply(&r.rhs))
        .map_err(|_| StepError(ConversionError::BadPosition { index: 0, position: pos.clone() }))
}
