use thiserror::Error;

use crate::kernel::{same_skeleton, Proof, Sequent};
use crate::rewrite::{Budget, ConversionError, ConversionSequence, Convertibility, Joinability, RewriteSystem, Rewriter};
use crate::term::Prop;

use super::{require_atomic, AtomicAnswer, NonAtomic, PairCertificate, PairReason};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("invalid conversion sequence: {0}")]
    InvalidSequence(#[from] ConversionError),
    #[error("{0} does not occur on the left of the sequent")]
    NotInGamma(Prop),
    #[error("{0} does not occur on the right of the sequent")]
    NotInDelta(Prop),
    #[error("sequence starts at {got}, expected {expected}")]
    WrongEndpoint { got: Prop, expected: Prop },
}

/// Turns a conversion `a ≡ b` with `a ∈ Γ`, `b ∈ Δ` into a proof of
/// `Γ ⊢ Δ` with one cut per peak, splitting at the leftmost peak.
pub fn proof_from_conversion(
    system: &RewriteSystem,
    s: &Sequent,
    a: &Prop,
    b: &Prop,
    seq: &ConversionSequence<Prop>,
) -> Result<Proof, BuildError> {
    seq.validate(system)?;
    if !s.gamma.contains(a) {
        return Err(BuildError::NotInGamma(a.clone()));
    }
    if !s.delta.contains(b) {
        return Err(BuildError::NotInDelta(b.clone()));
    }
    if seq.first() != a {
        return Err(BuildError::WrongEndpoint { got: seq.first().clone(), expected: a.clone() });
    }
    if seq.last() != b {
        return Err(BuildError::WrongEndpoint { got: seq.last().clone(), expected: b.clone() });
    }
    Ok(build(s, seq))
}

fn build(s: &Sequent, seq: &ConversionSequence<Prop>) -> Proof {
    match seq.peaks().first() {
        None => Proof::axiom(s.clone(), seq.valley_bottom().expect("no peak").clone()),
        Some(&i) => {
            let c = seq.objects()[i].clone();
            let (left, right) = seq.split_at(i);
            let l = build(&s.with_right(c.clone()), &left);
            let r = build(&s.with_left(c.clone()), &right);
            Proof::cut(s.clone(), c, l, r)
        }
    }
}

/// Provable iff some `A ∈ Γ`, `B ∈ Δ` are convertible; the proof follows
/// a shortest conversion found.
pub fn provable_atomic_asym(
    system: &RewriteSystem,
    s: &Sequent,
    budget: Budget,
) -> Result<AtomicAnswer<Proof>, NonAtomic> {
    require_atomic(s)?;
    let mut rw = Rewriter::new(system, budget);
    let mut certificates = Vec::new();
    let mut unknown = None;
    for a in &s.gamma {
        for b in &s.delta {
            if !same_skeleton(a, b) {
                certificates.push(PairCertificate { left: a.clone(), right: b.clone(), reason: PairReason::Skeleton });
                continue;
            }
            match rw.convertible(a, b) {
                Convertibility::Convertible { sequence, .. } => {
                    let proof = proof_from_conversion(system, s, a, b, &sequence)
                        .expect("search returns validated sequences between the chosen pair");
                    return Ok(AtomicAnswer::Provable(proof));
                }
                Convertibility::NotConvertible => {
                    let class_a = rw.conversion_class(a);
                    let (of, class) = if class_a.complete {
                        (a.clone(), class_a.elements)
                    } else {
                        (b.clone(), rw.conversion_class(b).elements)
                    };
                    certificates.push(PairCertificate {
                        left: a.clone(),
                        right: b.clone(),
                        reason: PairReason::Class { of, class },
                    });
                }
                Convertibility::Unknown => {
                    unknown.get_or_insert_with(|| format!("convertibility of {a} and {b} undetermined"));
                }
            }
        }
    }
    Ok(match unknown {
        Some(reason) => AtomicAnswer::Unknown(reason),
        None => AtomicAnswer::NotProvable(certificates),
    })
}

/// Cut-free provable iff some `A ∈ Γ`, `B ∈ Δ` have a common reduct.
pub fn cut_free_provable_atomic(
    system: &RewriteSystem,
    s: &Sequent,
    budget: Budget,
) -> Result<AtomicAnswer<Proof>, NonAtomic> {
    require_atomic(s)?;
    let mut rw = Rewriter::new(system, budget);
    cut_free_with(&mut rw, s)
}

pub(crate) fn cut_free_with(rw: &mut Rewriter<'_, Prop>, s: &Sequent) -> Result<AtomicAnswer<Proof>, NonAtomic> {
    let mut certificates = Vec::new();
    let mut unknown = None;
    for a in &s.gamma {
        for b in &s.delta {
            if !same_skeleton(a, b) {
                certificates.push(PairCertificate { left: a.clone(), right: b.clone(), reason: PairReason::Skeleton });
                continue;
            }
            match rw.joinable(a, b) {
                Joinability::Joinable(j) => return Ok(AtomicAnswer::Provable(Proof::axiom(s.clone(), j.common))),
                Joinability::Disjoint => certificates.push(PairCertificate {
                    left: a.clone(),
                    right: b.clone(),
                    reason: PairReason::Reducts {
                        left: rw.reducts(a).elements().to_vec(),
                        right: rw.reducts(b).elements().to_vec(),
                    },
                }),
                Joinability::Unknown => {
                    unknown.get_or_insert_with(|| format!("joinability of {a} and {b} undetermined"));
                }
            }
        }
    }
    Ok(match unknown {
        Some(reason) => AtomicAnswer::Unknown(reason),
        None => AtomicAnswer::NotProvable(certificates),
    })
}
