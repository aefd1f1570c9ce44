use serde::Serialize;

use crate::term::Prop;

/// A fixed choice of the two one-step reducts used when a cut on `cut`
/// has to be split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScriptedSplit {
    pub cut: Prop,
    pub first: Prop,
    pub second: Prop,
}

/// How an elimination step picks among its options.
///
/// Without a script, the first reduct pair in rule order that has a common
/// reduct is used. A scripted entry for the cut proposition overrides that
/// choice; entries that do not fit the cut are ignored and the fallback is
/// recorded in the trace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StepPolicy {
    /// Skip the joinable-pair shortcut, so every cut that cannot collapse
    /// is split.
    pub no_shortcut: bool,
    pub splits: Vec<ScriptedSplit>,
}

impl StepPolicy {
    pub fn rule_order() -> Self {
        StepPolicy::default()
    }

    pub fn scripted(splits: Vec<ScriptedSplit>, no_shortcut: bool) -> Self {
        StepPolicy { no_shortcut, splits }
    }

    pub fn is_scripted(&self) -> bool {
        !self.splits.is_empty()
    }

    pub fn lookup(&self, cut: &Prop) -> Option<&ScriptedSplit> {
        self.splits.iter().find(|s| &s.cut == cut)
    }
}
