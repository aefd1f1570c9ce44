//! Substitutions, one-way matching and syntactic unification.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Name, Prop, Term};

/// Finite map from variable names to terms. Identity bindings are never
/// stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution(BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: Name, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, t);
        s
    }

    pub fn insert(&mut self, x: Name, t: Term) {
        if matches!(&t, Term::Var(y) if *y == x) {
            self.0.remove(&x);
        } else {
            self.0.insert(x, t);
        }
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Name>) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(t) = self.0.get(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        out
    }

    pub fn apply(&self, t: &Term) -> Term {
        self.apply_under(t, 0)
    }

    // Replacement terms are shifted past the `depth` binders they are
    // inserted under, so open replacement terms keep their meaning.
    fn apply_under(&self, t: &Term, depth: usize) -> Term {
        match t {
            Term::Var(x) => match self.0.get(x) {
                Some(r) => r.shift(depth, 0),
                None => t.clone(),
            },
            Term::Bound(_) => t.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.apply_under(a, depth)).collect())
            }
        }
    }

    /// Capture-avoiding by construction: bound variables are indices.
    pub fn apply_prop(&self, p: &Prop) -> Prop {
        self.apply_prop_under(p, 0)
    }

    fn apply_prop_under(&self, p: &Prop, depth: usize) -> Prop {
        match p {
            Prop::Atom(q, args) => {
                Prop::Atom(q.clone(), args.iter().map(|a| self.apply_under(a, depth)).collect())
            }
            Prop::Bottom => Prop::Bottom,
            Prop::Implies(a, b) => {
                Prop::implies(self.apply_prop_under(a, depth), self.apply_prop_under(b, depth))
            }
            Prop::And(a, b) => Prop::and(self.apply_prop_under(a, depth), self.apply_prop_under(b, depth)),
            Prop::Or(a, b) => Prop::or(self.apply_prop_under(a, depth), self.apply_prop_under(b, depth)),
            Prop::Forall(h, a) => Prop::Forall(h.clone(), Box::new(self.apply_prop_under(a, depth + 1))),
            Prop::Exists(h, a) => Prop::Exists(h.clone(), Box::new(self.apply_prop_under(a, depth + 1))),
        }
    }

    /// `then ∘ self`: apply `self` first, then `then`.
    pub fn and_then(&self, then: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (x, t) in &self.0 {
            out.insert(x.clone(), then.apply(t));
        }
        for (x, t) in &then.0 {
            if !self.0.contains_key(x) {
                out.insert(x.clone(), t.clone());
            }
        }
        out
    }
}

impl FromIterator<(Name, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (x, t) in iter {
            s.insert(x, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Finds `θ` with `θ(pattern) == subject`. Variables of the subject are
/// rigid: only pattern variables get bound.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut binding = BTreeMap::new();
    match_into(pattern, subject, &mut binding).then(|| binding.into_iter().collect())
}

fn match_into(pattern: &Term, subject: &Term, binding: &mut BTreeMap<Name, Term>) -> bool {
    match (pattern, subject) {
        (Term::Var(x), _) => match binding.get(x) {
            Some(bound) => bound == subject,
            None => {
                binding.insert(x.clone(), subject.clone());
                true
            }
        },
        (Term::Bound(i), Term::Bound(j)) => i == j,
        (Term::App(f, ps), Term::App(g, ss)) => {
            f == g && ps.len() == ss.len() && ps.iter().zip(ss).all(|(p, s)| match_into(p, s, binding))
        }
        _ => false,
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn unify(t: &Term, u: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    let mut stack = vec![(t.clone(), u.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = sigma.apply(&a);
        let b = sigma.apply(&b);
        match (&a, &b) {
            _ if a == b => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.occurs(x) {
                    return None;
                }
                let single = Substitution::singleton(x.clone(), other.clone());
                sigma = sigma.and_then(&single);
                sigma.insert(x.clone(), other.clone());
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ => return None,
        }
    }
    Some(sigma)
}
