use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Name, Prop};

/// `Γ ⊢ Δ`. Both sides are multisets; the stored order only matters for
/// printing.
#[derive(Debug, Clone, Default)]
pub struct Sequent {
    pub gamma: Vec<Prop>,
    pub delta: Vec<Prop>,
}

impl Sequent {
    pub fn new(gamma: Vec<Prop>, delta: Vec<Prop>) -> Self {
        Sequent { gamma, delta }
    }

    pub fn is_atomic(&self) -> bool {
        self.gamma.iter().chain(&self.delta).all(Prop::is_atomic)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        self.gamma.iter().chain(&self.delta).flat_map(Prop::free_vars).collect()
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.gamma.iter().chain(&self.delta)
    }

    pub fn with_left(&self, p: Prop) -> Sequent {
        let mut s = self.clone();
        s.gamma.push(p);
        s
    }

    pub fn with_right(&self, p: Prop) -> Sequent {
        let mut s = self.clone();
        s.delta.insert(0, p);
        s
    }

    pub fn without_left(&self, i: usize) -> Sequent {
        let mut s = self.clone();
        s.gamma.remove(i);
        s
    }

    pub fn without_right(&self, i: usize) -> Sequent {
        let mut s = self.clone();
        s.delta.remove(i);
        s
    }

    /// Multiset union of both sides.
    pub fn union(&self, other: &Sequent) -> Sequent {
        let mut s = self.clone();
        s.gamma.extend(other.gamma.iter().cloned());
        s.delta.extend(other.delta.iter().cloned());
        s
    }
}

impl PartialEq for Sequent {
    fn eq(&self, other: &Self) -> bool {
        multiset_eq(&self.gamma, &other.gamma) && multiset_eq(&self.delta, &other.delta)
    }
}

impl Eq for Sequent {}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |ps: &[Prop]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        match (self.gamma.is_empty(), self.delta.is_empty()) {
            (true, true) => f.write_str("|-"),
            (true, false) => write!(f, "|- {}", side(&self.delta)),
            (false, true) => write!(f, "{} |-", side(&self.gamma)),
            (false, false) => write!(f, "{} |- {}", side(&self.gamma), side(&self.delta)),
        }
    }
}

pub fn multiset_eq(a: &[Prop], b: &[Prop]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a: Vec<&Prop> = a.iter().collect();
    let mut b: Vec<&Prop> = b.iter().collect();
    a.sort();
    b.sort();
    a == b
}

/// `a - b` when `b` is a sub-multiset of `a`.
pub fn multiset_minus(a: &[Prop], b: &[Prop]) -> Option<Vec<Prop>> {
    let mut rest: Vec<Prop> = a.to_vec();
    for x in b {
        let i = rest.iter().position(|y| y == x)?;
        rest.remove(i);
    }
    Some(rest)
}

impl serde::Serialize for Sequent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn p(c: &str) -> Prop {
        Prop::atom("P", vec![Term::constant(c)])
    }

    #[test]
    fn contexts_are_multisets() {
        let s = Sequent::new(vec![p("a"), p("b")], vec![]);
        let t = Sequent::new(vec![p("b"), p("a")], vec![]);
        assert_eq!(s, t);
        let u = Sequent::new(vec![p("a"), p("a"), p("b")], vec![]);
        assert_ne!(s, u);
    }

    #[test]
    fn display_of_empty_sides() {
        assert_eq!(Sequent::new(vec![p("a")], vec![]).to_string(), "P(a) |-");
        assert_eq!(Sequent::new(vec![], vec![p("a")]).to_string(), "|- P(a)");
        assert_eq!(Sequent::new(vec![p("a")], vec![p("b"), p("c")]).to_string(), "P(a) |- P(b), P(c)");
    }

    #[test]
    fn minus() {
        assert_eq!(multiset_minus(&[p("a"), p("b"), p("a")], &[p("a")]), Some(vec![p("b"), p("a")]));
        assert_eq!(multiset_minus(&[p("a")], &[p("b")]), None);
    }
}
