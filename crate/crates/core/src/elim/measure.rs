use std::collections::BTreeSet;

use serde::Serialize;

use crate::rewrite::{empirical_ordering, Budget, OrderingError, RewriteSystem, Rewriter};
use crate::term::Prop;

use super::trace::{ReductionTrace, StepEvent};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureViolation {
    pub step: usize,
    pub before: Vec<Prop>,
    pub after: Vec<Prop>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub steps_checked: usize,
    /// Propositions the ordering was computed on.
    pub carrier: usize,
    pub violations: Vec<MeasureViolation>,
}

impl MeasureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays a trace and checks that each step strictly decreases the
/// multiset of cut propositions in the multiset extension of `->+`, and
/// that every split uses one-step reducts of the cut proposition.
pub fn instrument_measure(
    system: &RewriteSystem,
    trace: &ReductionTrace,
    budget: Budget,
) -> Result<MeasureReport, OrderingError<Prop>> {
    let snapshots = trace.snapshots();
    let carrier: BTreeSet<Prop> = snapshots.iter().flat_map(|s| s.iter().cloned()).collect();
    let carrier: Vec<Prop> = carrier.into_iter().collect();
    let order = empirical_ordering(system, &carrier, budget)?;
    let mut rw = Rewriter::new(system, budget);
    let mut violations = Vec::new();
    for (step, pair) in trace.steps.iter().zip(snapshots.windows(2)) {
        let (before, after) = (pair[0], pair[1]);
        let violation = |reason: String| MeasureViolation {
            step: step.index,
            before: before.to_vec(),
            after: after.to_vec(),
            reason,
        };
        if let StepEvent::Split { first, second, .. } = &step.event {
            let reducts = rw.one_step(&step.cut);
            for x in [first, second] {
                if !reducts.iter().any(|r| &r.object == x) {
                    violations.push(violation(format!("{x} is not a one-step reduct of {}", step.cut)));
                }
            }
        }
        let terminal = matches!(step.event, StepEvent::Stuck { .. } | StepEvent::Undetermined { .. });
        if !terminal && !order.multiset_greater(before, after) {
            violations.push(violation("the cut multiset did not decrease".to_string()));
        }
    }
    Ok(MeasureReport { steps_checked: trace.steps.len(), carrier: carrier.len(), violations })
}
