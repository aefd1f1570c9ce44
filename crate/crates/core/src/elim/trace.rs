use std::fmt;

use serde::Serialize;

use crate::kernel::{path_string, Proof};
use crate::term::{Connective, Prop};

/// Which premise of a cut already closes the end sequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Collapse {
    /// The common reduct on the left is the cut proposition itself.
    LeftIsCut,
    RightIsCut,
}

/// What happened to one cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepEvent {
    /// Two propositions of the end sequent have a common reduct.
    Joined { left: Prop, right: Prop, common: Prop },
    Collapsed { side: Collapse, common: Prop },
    /// The cut was replaced by cuts on `first` and `second`, two one-step
    /// reducts with common reduct `joiner`.
    Split { first: Prop, second: Prop, joiner: Prop, scripted: bool, script_ignored: bool },
    /// `left <-1 source ->1 right` has no common reduct.
    Stuck { source: Prop, left: Prop, right: Prop },
    Undetermined { reason: String },
    /// A cut on a compound proposition, or on an atom whose premises are
    /// not both axioms, was pushed upwards.
    Pushed { events: Vec<MixEvent> },
}

impl StepEvent {
    pub fn label(&self) -> &'static str {
        match self {
            StepEvent::Joined { .. } => "joined",
            StepEvent::Collapsed { .. } => "collapsed",
            StepEvent::Split { .. } => "split",
            StepEvent::Stuck { .. } => "stuck",
            StepEvent::Undetermined { .. } => "undetermined",
            StepEvent::Pushed { .. } => "pushed",
        }
    }
}

/// Events inside one upward push.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MixEvent {
    /// Both sides introduce the cut connective; the listed cuts replace it.
    KeyCase {
        #[serde(serialize_with = "connective_str")]
        connective: Connective,
        cuts: Vec<Prop>,
    },
    /// An axiom of one side already closes the merged sequent.
    ContextAxiom { common: Prop },
    /// Two atomic axioms met on the cut and their outer propositions join.
    AtomicJoin { left: Prop, right: Prop, common: Prop },
    /// Two atomic axioms met but their outer propositions do not join
    /// directly; an atomic cut between them is left for the splitting step.
    AtomicCut { cut: Prop },
}

fn connective_str<S: serde::Serializer>(c: &Connective, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    #[serde(serialize_with = "path_str")]
    pub path: Vec<usize>,
    pub cut: Prop,
    pub event: StepEvent,
    /// Cut propositions of the whole proof after the step, in pre-order.
    pub cuts_after: Vec<Prop>,
}

fn path_str<S: serde::Serializer>(p: &[usize], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&path_string(p))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub initial_cuts: Vec<Prop>,
    /// Non-atomic axioms replaced by atomic ones before any cut was touched.
    pub expanded_axioms: usize,
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    /// Cut multisets before the first step and after each step.
    pub fn snapshots(&self) -> Vec<&[Prop]> {
        let mut out: Vec<&[Prop]> = vec![&self.initial_cuts];
        out.extend(self.steps.iter().map(|s| s.cuts_after.as_slice()));
        out
    }

    pub fn split_cuts(&self) -> Vec<&Prop> {
        self.steps.iter().filter(|s| matches!(s.event, StepEvent::Split { .. })).map(|s| &s.cut).collect()
    }

    pub fn mix_events(&self) -> impl Iterator<Item = &MixEvent> {
        self.steps.iter().flat_map(|s| match &s.event {
            StepEvent::Pushed { events } => events.as_slice(),
            _ => &[],
        })
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cuts = |ps: &[Prop]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "initial cuts: {{{}}}", cuts(&self.initial_cuts))?;
        for s in &self.steps {
            write!(f, "{:>3}. at {} cut {}: ", s.index, path_string(&s.path), s.cut)?;
            match &s.event {
                StepEvent::Joined { left, right, common } => write!(f, "joined {left} and {right} at {common}")?,
                StepEvent::Collapsed { side, common } => write!(f, "collapsed ({side:?}) to axiom on {common}")?,
                StepEvent::Split { first, second, joiner, scripted, script_ignored } => {
                    write!(f, "split into {first} and {second}, joined at {joiner}")?;
                    if *scripted {
                        write!(f, " (scripted)")?;
                    }
                    if *script_ignored {
                        write!(f, " (script entry does not fit, rule order used)")?;
                    }
                }
                StepEvent::Stuck { source, left, right } => write!(f, "stuck on {left} <- {source} -> {right}")?,
                StepEvent::Undetermined { reason } => write!(f, "undetermined: {reason}")?,
                StepEvent::Pushed { events } => {
                    let es: Vec<String> = events
                        .iter()
                        .map(|e| match e {
                            MixEvent::KeyCase { connective, cuts: cs } => format!("key {connective} -> {{{}}}", cuts(cs)),
                            MixEvent::ContextAxiom { common } => format!("context axiom {common}"),
                            MixEvent::AtomicJoin { common, .. } => format!("atomic join {common}"),
                            MixEvent::AtomicCut { cut } => format!("atomic cut {cut}"),
                        })
                        .collect();
                    write!(f, "pushed up [{}]", es.join("; "))?;
                }
            }
            writeln!(f, "; cuts now {{{}}}", cuts(&s.cuts_after))?;
        }
        Ok(())
    }
}

/// Outcome of a whole elimination run. Every variant carries the proof as
/// it stood when the run ended.
#[derive(Debug, Clone)]
pub enum EliminationResult {
    CutFree { proof: Proof, trace: ReductionTrace },
    /// A step could not proceed: a divergence without common reduct.
    Failed { proof: Proof, trace: ReductionTrace, reason: String },
    BudgetExhausted { proof: Proof, trace: ReductionTrace, reason: String },
}

impl EliminationResult {
    pub fn proof(&self) -> &Proof {
        match self {
            EliminationResult::CutFree { proof, .. }
            | EliminationResult::Failed { proof, .. }
            | EliminationResult::BudgetExhausted { proof, .. } => proof,
        }
    }

    pub fn trace(&self) -> &ReductionTrace {
        match self {
            EliminationResult::CutFree { trace, .. }
            | EliminationResult::Failed { trace, .. }
            | EliminationResult::BudgetExhausted { trace, .. } => trace,
        }
    }

    pub fn is_cut_free(&self) -> bool {
        matches!(self, EliminationResult::CutFree { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            EliminationResult::CutFree { .. } => "cut-free",
            EliminationResult::Failed { .. } => "failed",
            EliminationResult::BudgetExhausted { .. } => "budget-exhausted",
        }
    }
}
