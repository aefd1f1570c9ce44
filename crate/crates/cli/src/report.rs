use std::fmt::Write as _;

use asymod_core::elim::ReductionTrace;
use asymod_core::kernel::{Proof, Sequent};
use asymod_core::rewrite::{Budget, ConversionSequence, RewriteSystem};
use asymod_core::syntax::{render_problem, ProblemFile};
use asymod_core::term::Prop;
use asymod_core::atomic::SymProof;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "asymod-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    Refuted,
    Unknown,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Refuted => 1,
            Outcome::Unknown => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

impl Input {
    pub fn new(path: &str, text: &str) -> Self {
        let digest = Sha256::digest(text.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Input { path: path.to_string(), sha256, bytes: text.len() }
    }
}

/// Something a reader can re-check. When `problem` is set it is a complete
/// problem file that `asymod check` accepts.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub kind: String,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivation: Option<String>,
}

impl Witness {
    pub fn note(kind: &str, description: impl Into<String>) -> Self {
        Witness { kind: kind.to_string(), description: description.into(), problem: None, derivation: None }
    }

    pub fn proof(kind: &str, description: impl Into<String>, system: &RewriteSystem, proof: &Proof) -> Self {
        let mut file = ProblemFile::empty(system.signature().clone());
        file.system = system.clone();
        file.proof = Some(proof.clone());
        Witness {
            kind: kind.to_string(),
            description: description.into(),
            problem: Some(render_problem(&file)),
            derivation: Some(proof.render_indented()),
        }
    }

    pub fn sym_proof(description: impl Into<String>, system: &RewriteSystem, proof: &SymProof) -> Self {
        let mut file = ProblemFile::empty(system.signature().clone());
        file.system = system.clone();
        file.symproof = Some(proof.clone());
        Witness {
            kind: "sym-proof".to_string(),
            description: description.into(),
            problem: Some(render_problem(&file)),
            derivation: Some(proof.render_indented()),
        }
    }

    /// A reduction `from ->* to` between propositions, made checkable as
    /// the one-axiom proof of `from ⊢ to`.
    pub fn reduction(system: &RewriteSystem, seq: &ConversionSequence<Prop>) -> Self {
        let (from, to) = (seq.first().clone(), seq.last().clone());
        let proof = Proof::axiom(Sequent::new(vec![from.clone()], vec![to.clone()]), to.clone());
        let mut w = Witness::proof("reduction", format!("{from} ->* {to}"), system, &proof);
        w.derivation = Some(seq.render_detailed(system));
        w
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Input>,
    pub verdict: String,
    pub outcome: Outcome,
    pub exit_code: i32,
    /// False when some search stopped at its budget.
    pub complete: bool,
    pub budget: Budget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_budget: Option<usize>,
    pub summary: Vec<String>,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ReductionTrace>,
    pub details: serde_json::Value,
}

impl RunReport {
    pub fn new(command: &str, input: Option<Input>, budget: Budget) -> Self {
        RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            input,
            verdict: String::new(),
            outcome: Outcome::Unknown,
            exit_code: Outcome::Unknown.exit_code(),
            complete: true,
            budget,
            step_budget: None,
            summary: Vec::new(),
            witnesses: Vec::new(),
            trace: None,
            details: serde_json::Value::Null,
        }
    }

    pub fn conclude(&mut self, verdict: &str, outcome: Outcome) {
        self.verdict = verdict.to_string();
        self.outcome = outcome;
        self.exit_code = outcome.exit_code();
        if outcome == Outcome::Unknown {
            self.complete = false;
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, self.verdict);
        if let Some(input) = &self.input {
            let _ = writeln!(out, "input: {} (sha256 {})", input.path, &input.sha256[..16]);
        }
        for line in &self.summary {
            let _ = writeln!(out, "{line}");
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness [{}]: {}", w.kind, w.description);
            if let Some(d) = &w.derivation {
                for line in d.lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
        if let Some(trace) = &self.trace {
            let _ = write!(out, "trace:\n{trace}");
            if !out.ends_with('\n') {
                out.push('\n');
            }
        }
        out
    }
}
