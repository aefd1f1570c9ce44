//! Sequents, proof trees and the proof checker.

mod check;
mod proof;
mod sequent;

pub use check::{
    check_proof, path_string, same_skeleton, valid_readings, CheckReport, Failure, FailureKind, Resolved, Side, SideWitness,
};
pub use proof::{Proof, Rule, RULE_TAGS};
pub use sequent::{multiset_eq, multiset_minus, Sequent};
