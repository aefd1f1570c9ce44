use std::collections::BTreeSet;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use crate::term::{Position, Prop, Term, TermError};

/// Something the rewrite relation acts on: a term or a proposition.
/// Rewriting only ever touches term-sorted positions.
pub trait Object: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync + 'static {
    /// Term-sorted subterms in pre-order (leftmost-outermost first).
    fn term_positions(&self) -> Vec<(Position, &Term)>;

    fn term_at(&self, pos: &Position) -> Option<&Term>;

    fn replace_term(&self, pos: &Position, replacement: Term) -> Result<Self, TermError>;

    /// Ground subterms, used to instantiate erasing rules backwards.
    fn ground_subterms(&self) -> BTreeSet<Term>;

    fn size(&self) -> usize;
}

impl Object for Term {
    fn term_positions(&self) -> Vec<(Position, &Term)> {
        self.subterms()
    }

    fn term_at(&self, pos: &Position) -> Option<&Term> {
        self.at(&pos.0)
    }

    fn replace_term(&self, pos: &Position, replacement: Term) -> Result<Self, TermError> {
        self.replace_at(&pos.0, replacement)
    }

    fn ground_subterms(&self) -> BTreeSet<Term> {
        self.subterms()
            .into_iter()
            .filter(|(_, t)| t.free_vars().is_empty() && !has_bound(t))
            .map(|(_, t)| t.clone())
            .collect()
    }

    fn size(&self) -> usize {
        Term::size(self)
    }
}

impl Object for Prop {
    fn term_positions(&self) -> Vec<(Position, &Term)> {
        Prop::term_positions(self)
    }

    fn term_at(&self, pos: &Position) -> Option<&Term> {
        Prop::term_at(self, &pos.0)
    }

    fn replace_term(&self, pos: &Position, replacement: Term) -> Result<Self, TermError> {
        self.replace_at(&pos.0, replacement)
    }

    fn ground_subterms(&self) -> BTreeSet<Term> {
        self.closed_subterms()
            .into_iter()
            .filter(|t| t.free_vars().is_empty())
            .collect()
    }

    fn size(&self) -> usize {
        self.term_positions().len() + self.degree() + 1
    }
}

fn has_bound(t: &Term) -> bool {
    match t {
        Term::Bound(_) => true,
        Term::Var(_) => false,
        Term::App(_, a) => a.iter().any(has_bound),
    }
}
