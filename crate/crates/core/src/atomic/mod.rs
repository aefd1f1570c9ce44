//! Decision procedures and proof synthesis for the atomic fragments.

mod asym;
mod equivalence;
mod sym;

use thiserror::Error;

use crate::term::Prop;

pub use asym::{cut_free_provable_atomic, proof_from_conversion, provable_atomic_asym, BuildError};
pub use equivalence::{cut_redundancy_vs_confluence, forward_carrier, EquivalenceReport};
pub use sym::{check_sym, provable_atomic_sym, reduce_symmetric_atomic, SymCheck, SymProof, SymReduction, SymRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not an atomic sequent: {0} is not atomic")]
pub struct NonAtomic(pub Prop);

/// Why a pair `A ∈ Γ`, `B ∈ Δ` cannot be related.
#[derive(Debug, Clone)]
pub enum PairReason {
    /// Different predicate symbols: rewriting never changes them.
    Skeleton,
    /// The complete conversion class of `of`, which misses the other side.
    Class { of: Prop, class: Vec<Prop> },
    /// Complete, disjoint reduct sets.
    Reducts { left: Vec<Prop>, right: Vec<Prop> },
}

#[derive(Debug, Clone)]
pub struct PairCertificate {
    pub left: Prop,
    pub right: Prop,
    pub reason: PairReason,
}

#[derive(Debug, Clone)]
pub enum AtomicAnswer<P> {
    Provable(P),
    NotProvable(Vec<PairCertificate>),
    Unknown(String),
}

impl<P> AtomicAnswer<P> {
    pub fn proof(&self) -> Option<&P> {
        match self {
            AtomicAnswer::Provable(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_provable(&self) -> bool {
        matches!(self, AtomicAnswer::Provable(_))
    }

    pub fn is_not_provable(&self) -> bool {
        matches!(self, AtomicAnswer::NotProvable(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            AtomicAnswer::Provable(_) => "provable",
            AtomicAnswer::NotProvable(_) => "not-provable",
            AtomicAnswer::Unknown(_) => "unknown",
        }
    }
}

fn require_atomic(s: &crate::kernel::Sequent) -> Result<(), NonAtomic> {
    match s.props().find(|p| !p.is_atomic()) {
        Some(p) => Err(NonAtomic(p.clone())),
        None => Ok(()),
    }
}
