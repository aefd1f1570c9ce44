//! First-order terms and propositions.
//!
//! Bound variables use a locally nameless representation: a quantifier
//! keeps only a display hint, and occurrences of the variables it binds are
//! stored as de Bruijn indices ([`Term::Bound`]). Free variables stay named.
//! As a consequence structural equality on [`Prop`] *is* alpha-equivalence,
//! and substitution of free variables can never capture.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Interned-ish identifier used for symbols and variables.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid position {0}")]
    InvalidPosition(Position),
    #[error("unknown function symbol `{0}`")]
    UnknownFunction(Name),
    #[error("unknown predicate symbol `{0}`")]
    UnknownPredicate(Name),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    Arity {
        symbol: Name,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` declared twice with different arities")]
    Redeclared(Name),
    #[error("dangling bound index {0}")]
    DanglingIndex(usize),
}

/// Function and predicate symbols with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    functions: BTreeMap<Name, usize>,
    predicates: BTreeMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_function(&mut self, symbol: &str, arity: usize) -> Result<(), TermError> {
        declare(&mut self.functions, symbol, arity)
    }

    pub fn add_predicate(&mut self, symbol: &str, arity: usize) -> Result<(), TermError> {
        declare(&mut self.predicates, symbol, arity)
    }

    pub fn function_arity(&self, symbol: &str) -> Option<usize> {
        self.functions.get(symbol).copied()
    }

    pub fn predicate_arity(&self, symbol: &str) -> Option<usize> {
        self.predicates.get(symbol).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.functions.iter().map(|(k, v)| (k, *v))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.predicates.iter().map(|(k, v)| (k, *v))
    }

    pub fn constants(&self) -> Vec<Term> {
        self.functions
            .iter()
            .filter(|(_, a)| **a == 0)
            .map(|(f, _)| Term::App(f.clone(), Vec::new()))
            .collect()
    }

    /// Numerals are available when `0/0` and `S/1` are both declared.
    pub fn has_numerals(&self) -> bool {
        self.function_arity("0") == Some(0) && self.function_arity("S") == Some(1)
    }

    pub fn check_term(&self, t: &Term) -> Result<(), TermError> {
        match t {
            Term::Var(_) | Term::Bound(_) => Ok(()),
            Term::App(f, args) => {
                let expected = self
                    .function_arity(f)
                    .ok_or_else(|| TermError::UnknownFunction(f.clone()))?;
                if expected != args.len() {
                    return Err(TermError::Arity {
                        symbol: f.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn check_prop(&self, p: &Prop) -> Result<(), TermError> {
        match p {
            Prop::Atom(pred, args) => {
                let expected = self
                    .predicate_arity(pred)
                    .ok_or_else(|| TermError::UnknownPredicate(pred.clone()))?;
                if expected != args.len() {
                    return Err(TermError::Arity {
                        symbol: pred.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Prop::Bottom => Ok(()),
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => {
                self.check_prop(a)?;
                self.check_prop(b)
            }
            Prop::Forall(_, body) | Prop::Exists(_, body) => self.check_prop(body),
        }
    }
}

fn declare(map: &mut BTreeMap<Name, usize>, symbol: &str, arity: usize) -> Result<(), TermError> {
    match map.get(symbol) {
        Some(&a) if a != arity => Err(TermError::Redeclared(name(symbol))),
        _ => {
            map.insert(name(symbol), arity);
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    /// De Bruijn index of an enclosing quantifier (0 = innermost).
    Bound(usize),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(name(x))
    }

    pub fn constant(c: &str) -> Term {
        Term::App(name(c), Vec::new())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(name(f), args)
    }

    /// `S^n(0)`.
    pub fn numeral(n: usize) -> Term {
        (0..n).fold(Term::constant("0"), |t, _| Term::app("S", vec![t]))
    }

    pub fn as_numeral(&self) -> Option<usize> {
        let mut n = 0;
        let mut t = self;
        loop {
            match t {
                Term::App(f, args) if args.is_empty() && &**f == "0" => return Some(n),
                Term::App(f, args) if args.len() == 1 && &**f == "S" => {
                    n += 1;
                    t = &args[0];
                }
                _ => return None,
            }
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Bound(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Bound(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn occurs(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Bound(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(x)),
        }
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Name>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    /// All subterms in pre-order (outermost first, then left to right).
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(&mut path, &mut |p, t| out.push((Position(p.to_vec()), t)));
        out
    }

    fn walk<'a>(&'a self, path: &mut Vec<usize>, f: &mut dyn FnMut(&[usize], &'a Term)) {
        f(path, self);
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                a.walk(path, f);
                path.pop();
            }
        }
    }

    pub fn at(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::App(_, args) => args.get(i)?.at(rest),
                _ => None,
            },
        }
    }

    pub fn replace_at(&self, pos: &[usize], replacement: Term) -> Result<Term, TermError> {
        self.replace_inner(pos, replacement)
            .ok_or_else(|| TermError::InvalidPosition(Position(pos.to_vec())))
    }

    fn replace_inner(&self, pos: &[usize], replacement: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(replacement),
            Some((&i, rest)) => match self {
                Term::App(f, args) if i < args.len() => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_inner(rest, replacement)?;
                    Some(Term::App(f.clone(), args))
                }
                _ => None,
            },
        }
    }

    /// Adds `by` to every bound index that is free relative to `cutoff`.
    pub(crate) fn shift(&self, by: usize, cutoff: usize) -> Term {
        if by == 0 {
            return self.clone();
        }
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound(i + by),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.shift(by, cutoff)).collect())
            }
            t => t.clone(),
        }
    }

    fn open_at(&self, depth: usize, with: &Term) -> Term {
        match self {
            Term::Bound(i) if *i == depth => with.shift(depth, 0),
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.open_at(depth, with)).collect(),
            ),
            t => t.clone(),
        }
    }

    fn close_at(&self, depth: usize, x: &str) -> Term {
        match self {
            Term::Var(y) if &**y == x => Term::Bound(depth),
            Term::Bound(i) if *i >= depth => Term::Bound(i + 1),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.close_at(depth, x)).collect())
            }
            t => t.clone(),
        }
    }
}

/// The name hint of a quantifier. Hints never take part in equality,
/// ordering or hashing, so two propositions that differ only in the names
/// of bound variables compare equal.
#[derive(Clone)]
pub struct Binder(pub Name);

impl PartialEq for Binder {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Binder {}
impl PartialOrd for Binder {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Binder {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}
impl Hash for Binder {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}
impl fmt::Debug for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    Atom(Name, Vec<Term>),
    Bottom,
    Implies(Box<Prop>, Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Forall(Binder, Box<Prop>),
    Exists(Binder, Box<Prop>),
}

/// Top-level shape of a proposition, ignoring terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    Atom,
    Bottom,
    Implies,
    And,
    Or,
    Forall,
    Exists,
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Connective::Atom => "atom",
            Connective::Bottom => "bottom",
            Connective::Implies => "implies",
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Forall => "forall",
            Connective::Exists => "exists",
        };
        f.write_str(s)
    }
}

impl Prop {
    pub fn atom(p: &str, args: Vec<Term>) -> Prop {
        Prop::Atom(name(p), args)
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::Implies(Box::new(a), Box::new(b))
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Prop) -> Prop {
        Prop::implies(a, Prop::Bottom)
    }

    /// `forall x. body`, binding the free occurrences of `x` in `body`.
    pub fn forall(x: &str, body: Prop) -> Prop {
        Prop::Forall(Binder(name(x)), Box::new(body.close_at(0, x)))
    }

    pub fn exists(x: &str, body: Prop) -> Prop {
        Prop::Exists(Binder(name(x)), Box::new(body.close_at(0, x)))
    }

    pub fn connective(&self) -> Connective {
        match self {
            Prop::Atom(..) => Connective::Atom,
            Prop::Bottom => Connective::Bottom,
            Prop::Implies(..) => Connective::Implies,
            Prop::And(..) => Connective::And,
            Prop::Or(..) => Connective::Or,
            Prop::Forall(..) => Connective::Forall,
            Prop::Exists(..) => Connective::Exists,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Prop::Atom(..))
    }

    /// Number of connectives and quantifiers.
    pub fn degree(&self) -> usize {
        match self {
            Prop::Atom(..) => 0,
            Prop::Bottom => 1,
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => 1 + a.degree() + b.degree(),
            Prop::Forall(_, a) | Prop::Exists(_, a) => 1 + a.degree(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Prop::Atom(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Prop::Bottom => {}
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Prop::Forall(_, a) | Prop::Exists(_, a) => a.collect_vars(out),
        }
    }

    /// Function symbols occurring anywhere in the proposition.
    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.collect_symbols(&mut out));
        out
    }

    fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            Prop::Atom(_, args) => args.iter().for_each(|a| f(a)),
            Prop::Bottom => {}
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Prop::Forall(_, a) | Prop::Exists(_, a) => a.visit_terms(f),
        }
    }

    /// The ground subterms occurring in the proposition (no free or bound
    /// variables).
    pub fn closed_subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            for (_, s) in t.subterms() {
                if s.is_ground() && !contains_bound(s) {
                    out.insert(s.clone());
                }
            }
        });
        out
    }

    /// Term-sorted subterms with their positions, in pre-order. Positions
    /// address connective children first, then atom arguments.
    pub fn term_positions(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk_terms(&mut path, &mut out);
        out
    }

    fn walk_terms<'a>(&'a self, path: &mut Vec<usize>, out: &mut Vec<(Position, &'a Term)>) {
        match self {
            Prop::Atom(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    path.push(i);
                    a.walk(path, &mut |p, t| out.push((Position(p.to_vec()), t)));
                    path.pop();
                }
            }
            Prop::Bottom => {}
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => {
                path.push(0);
                a.walk_terms(path, out);
                path.pop();
                path.push(1);
                b.walk_terms(path, out);
                path.pop();
            }
            Prop::Forall(_, a) | Prop::Exists(_, a) => {
                path.push(0);
                a.walk_terms(path, out);
                path.pop();
            }
        }
    }

    pub fn term_at(&self, pos: &[usize]) -> Option<&Term> {
        let (&i, rest) = pos.split_first()?;
        match self {
            Prop::Atom(_, args) => args.get(i)?.at(rest),
            Prop::Bottom => None,
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => match i {
                0 => a.term_at(rest),
                1 => b.term_at(rest),
                _ => None,
            },
            Prop::Forall(_, a) | Prop::Exists(_, a) if i == 0 => a.term_at(rest),
            _ => None,
        }
    }

    pub fn replace_at(&self, pos: &[usize], replacement: Term) -> Result<Prop, TermError> {
        self.replace_inner(pos, replacement)
            .ok_or_else(|| TermError::InvalidPosition(Position(pos.to_vec())))
    }

    fn replace_inner(&self, pos: &[usize], replacement: Term) -> Option<Prop> {
        let (&i, rest) = pos.split_first()?;
        Some(match self {
            Prop::Atom(p, args) if i < args.len() => {
                let mut args = args.clone();
                args[i] = args[i].replace_inner(rest, replacement)?;
                Prop::Atom(p.clone(), args)
            }
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) if i < 2 => {
                let (mut a, mut b) = (a.clone(), b.clone());
                if i == 0 {
                    *a = a.replace_inner(rest, replacement)?;
                } else {
                    *b = b.replace_inner(rest, replacement)?;
                }
                self.rebuild2(*a, *b)
            }
            Prop::Forall(h, a) if i == 0 => {
                Prop::Forall(h.clone(), Box::new(a.replace_inner(rest, replacement)?))
            }
            Prop::Exists(h, a) if i == 0 => {
                Prop::Exists(h.clone(), Box::new(a.replace_inner(rest, replacement)?))
            }
            _ => return None,
        })
    }

    fn rebuild2(&self, a: Prop, b: Prop) -> Prop {
        match self {
            Prop::Implies(..) => Prop::implies(a, b),
            Prop::And(..) => Prop::and(a, b),
            Prop::Or(..) => Prop::or(a, b),
            _ => unreachable!("rebuild2 on a non-binary connective"),
        }
    }

    /// Instantiates the outermost bound variable of a quantifier body.
    pub fn open(&self, with: &Term) -> Prop {
        self.open_at(0, with)
    }

    fn open_at(&self, depth: usize, with: &Term) -> Prop {
        self.map_terms_depth(depth, &|t, d| t.open_at(d, with))
    }

    fn close_at(&self, depth: usize, x: &str) -> Prop {
        self.map_terms_depth(depth, &|t, d| t.close_at(d, x))
    }

    fn map_terms_depth(&self, depth: usize, f: &dyn Fn(&Term, usize) -> Term) -> Prop {
        match self {
            Prop::Atom(p, args) => Prop::Atom(p.clone(), args.iter().map(|a| f(a, depth)).collect()),
            Prop::Bottom => Prop::Bottom,
            Prop::Implies(a, b) => Prop::implies(a.map_terms_depth(depth, f), b.map_terms_depth(depth, f)),
            Prop::And(a, b) => Prop::and(a.map_terms_depth(depth, f), b.map_terms_depth(depth, f)),
            Prop::Or(a, b) => Prop::or(a.map_terms_depth(depth, f), b.map_terms_depth(depth, f)),
            Prop::Forall(h, a) => Prop::Forall(h.clone(), Box::new(a.map_terms_depth(depth + 1, f))),
            Prop::Exists(h, a) => Prop::Exists(h.clone(), Box::new(a.map_terms_depth(depth + 1, f))),
        }
    }

    /// For a quantifier, the body opened with a free variable named after
    /// the hint (renamed apart from the body's free variables).
    pub fn open_named(&self) -> Option<(Name, Prop)> {
        match self {
            Prop::Forall(h, body) | Prop::Exists(h, body) => {
                let x = fresh_display_name(&h.0, body);
                let opened = body.open(&Term::Var(x.clone()));
                Some((x, opened))
            }
            _ => None,
        }
    }

    /// Immediate subformulas, with quantifier bodies opened by `Bound`
    /// left untouched.
    pub fn children(&self) -> Vec<&Prop> {
        match self {
            Prop::Atom(..) | Prop::Bottom => vec![],
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => vec![a, b],
            Prop::Forall(_, a) | Prop::Exists(_, a) => vec![a],
        }
    }

    /// Locally closed: no dangling de Bruijn indices.
    pub fn is_locally_closed(&self) -> bool {
        self.max_dangling(0).is_none()
    }

    fn max_dangling(&self, depth: usize) -> Option<usize> {
        fn term(t: &Term, depth: usize) -> Option<usize> {
            match t {
                Term::Bound(i) if *i >= depth => Some(*i),
                Term::App(_, args) => args.iter().filter_map(|a| term(a, depth)).max(),
                _ => None,
            }
        }
        match self {
            Prop::Atom(_, args) => args.iter().filter_map(|a| term(a, depth)).max(),
            Prop::Bottom => None,
            Prop::Implies(a, b) | Prop::And(a, b) | Prop::Or(a, b) => {
                a.max_dangling(depth).max(b.max_dangling(depth))
            }
            Prop::Forall(_, a) | Prop::Exists(_, a) => a.max_dangling(depth + 1),
        }
    }
}

fn contains_bound(t: &Term) -> bool {
    match t {
        Term::Bound(_) => true,
        Term::Var(_) => false,
        Term::App(_, args) => args.iter().any(contains_bound),
    }
}

/// Picks a display name for a binder: the hint, primed until it neither
/// captures a free variable of the body nor collides with a symbol in it.
pub(crate) fn fresh_display_name(hint: &Name, body: &Prop) -> Name {
    let mut avoid = body.free_vars();
    avoid.extend(body.symbols());
    fresh_name(hint, &avoid)
}

/// `base`, `base'`, `base''`, ... : the first one not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let mut candidate = base.to_string();
    while avoid.contains(candidate.as_str()) {
        candidate.push('\'');
    }
    name(&candidate)
}

/// Sequence of child indices from the root. The root is the empty sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl std::str::FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "e" || s.is_empty() {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|p| p.parse::<usize>().map_err(|e| format!("bad position `{s}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_numeral() {
            return write!(f, "{n}");
        }
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Bound(i) => write!(f, "#{i}"),
            Term::App(g, args) if args.is_empty() => f.write_str(g),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// Binding strength used by the printer: quantifiers < implies < or < and.
fn prec(p: &Prop) -> u8 {
    match p {
        Prop::Forall(..) | Prop::Exists(..) => 0,
        Prop::Implies(..) => 1,
        Prop::Or(..) => 2,
        Prop::And(..) => 3,
        Prop::Atom(..) | Prop::Bottom => 4,
    }
}

impl Prop {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = prec(self) < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Prop::Atom(p, args) if args.is_empty() => f.write_str(p)?,
            Prop::Atom(p, args) => {
                write!(f, "{p}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")?;
            }
            Prop::Bottom => f.write_str("_|_")?,
            // implication is right associative
            Prop::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" => ")?;
                b.fmt_prec(f, 1)?;
            }
            Prop::Or(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" \\/ ")?;
                b.fmt_prec(f, 2)?;
            }
            Prop::And(a, b) => {
                a.fmt_prec(f, 4)?;
                f.write_str(" /\\ ")?;
                b.fmt_prec(f, 3)?;
            }
            Prop::Forall(..) | Prop::Exists(..) => {
                let kw = if matches!(self, Prop::Forall(..)) { "forall" } else { "exists" };
                let (x, body) = self.open_named().expect("quantifier");
                write!(f, "{kw} {x}. ")?;
                body.fmt_prec(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// Reports carry terms and propositions in their concrete syntax.
impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Prop {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
