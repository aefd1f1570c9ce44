//! Cut elimination: the splitting step for atomic cuts, the loop around
//! it, and the extension to the whole calculus.

mod full;
mod measure;
mod newman;
mod ops;
mod policy;
mod trace;

pub use full::eliminate_cuts_full;
pub use measure::{instrument_measure, MeasureReport, MeasureViolation};
pub use newman::{eliminate_cuts_atomic_asym, newman_step, step_bound, ElimError, StepOutcome};
pub use policy::{ScriptedSplit, StepPolicy};
pub use trace::{Collapse, EliminationResult, MixEvent, ReductionTrace, StepEvent, TraceStep};
