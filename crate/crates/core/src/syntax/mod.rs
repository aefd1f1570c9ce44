//! The text format for problems, proofs and step policies.
//!
//! ```text
//! sig a/0, b/0, f/1;
//! pred P/1;
//! rules {
//!   r1: f(x) -> a
//!   r2: f(x) -> b
//! }
//! sequent P(f(a)) |- P(a);
//! proof
//! (axiom {P(a)} (P(f(a)) |- P(a)))
//! ```
//!
//! A `policy { ... }` block holds scripted splits in the policy file
//! syntax. A `symproof` block holds a proof of the symmetric fragment, whose axiom
//! and cut nodes carry `{A == B}`. Names that are neither declared nor
//! bound are variables.

mod lexer;
mod parser;
mod render;

use std::fmt;

use thiserror::Error;

use crate::atomic::SymProof;
use crate::elim::StepPolicy;
use crate::kernel::{Proof, Sequent};
use crate::rewrite::RewriteSystem;
use crate::term::Signature;

pub use parser::{parse_policy, parse_problem, parse_proof, parse_prop, parse_sequent, parse_sym_proof, parse_term};
pub use render::{render_policy, render_problem, render_proof, render_sym_proof, render_system};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Arity,
    Unbound,
    Rule,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Arity => "arity error",
            ErrorKind::Unbound => "unbound symbol",
            ErrorKind::Rule => "bad rule",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ErrorKind,
    pub message: String,
}

/// Contents of a problem file. Every block but the signature is optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub system: RewriteSystem,
    pub sequent: Option<Sequent>,
    pub proof: Option<Proof>,
    pub symproof: Option<SymProof>,
    pub policy: Option<StepPolicy>,
}

impl ProblemFile {
    pub fn empty(sig: Signature) -> Self {
        ProblemFile {
            system: RewriteSystem::new(sig, Vec::new()).expect("no rules"),
            sequent: None,
            proof: None,
            symproof: None,
            policy: None,
        }
    }

    pub fn signature(&self) -> &Signature {
        self.system.signature()
    }

    /// The sequent to work on: the explicit one, else the proof's end.
    pub fn goal(&self) -> Option<&Sequent> {
        self.sequent
            .as_ref()
            .or(self.proof.as_ref().map(|p| &p.conclusion))
            .or(self.symproof.as_ref().map(|p| &p.conclusion))
    }
}
