use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::conversion::{ConvStep, ConversionSequence, Direction};
use super::object::Object;
use super::system::RewriteSystem;
use crate::subst::{match_pattern, Substitution};
use crate::term::{Name, Position, Term};

/// Caps for every bounded exploration of `->*` and `≡`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_objects: usize,
    pub max_depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_objects: 10_000, max_depth: 64 }
    }
}

impl Budget {
    pub fn objects(max_objects: usize) -> Self {
        Budget { max_objects, ..Budget::default() }
    }
}

/// `o ->1 object` by `rule` at `position` (or, for predecessors,
/// `object ->1 o`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reduct<O> {
    pub object: O,
    pub rule: usize,
    pub position: Position,
}

/// All one-step reducts in leftmost-outermost position order, rules in
/// declaration order within a position.
pub fn one_step_reducts<O: Object>(system: &RewriteSystem, o: &O) -> Vec<Reduct<O>> {
    let mut out = Vec::new();
    for (pos, sub) in o.term_positions() {
        for (i, rule) in system.rules().iter().enumerate() {
            if let Some(theta) = match_pattern(&rule.lhs, sub) {
                let object = o
                    .replace_term(&pos, theta.apply(&rule.rhs))
                    .expect("position came from the object itself");
                out.push(Reduct { object, rule: i, position: pos.clone() });
            }
        }
    }
    out
}

/// Objects `p` with `p ->1 o`. Erasing rules have infinitely many
/// instances; their missing variables are drawn from `pool`, and the
/// returned flag is false whenever that happened.
pub fn one_step_predecessors<O: Object>(
    system: &RewriteSystem,
    o: &O,
    pool: &[Term],
) -> (Vec<Reduct<O>>, bool) {
    let mut out = Vec::new();
    let mut exact = true;
    for (pos, sub) in o.term_positions() {
        for (i, rule) in system.rules().iter().enumerate() {
            let Some(theta) = match_pattern(&rule.rhs, sub) else { continue };
            let missing: Vec<Name> = rule
                .lhs
                .free_vars()
                .into_iter()
                .filter(|v| theta.get(v).is_none())
                .collect();
            if missing.is_empty() {
                let object = o
                    .replace_term(&pos, theta.apply(&rule.lhs))
                    .expect("position came from the object itself");
                out.push(Reduct { object, rule: i, position: pos.clone() });
                continue;
            }
            exact = false;
            for choice in instantiations(&missing, pool) {
                let full = theta.and_then(&choice);
                let object = o
                    .replace_term(&pos, full.apply(&rule.lhs))
                    .expect("position came from the object itself");
                out.push(Reduct { object, rule: i, position: pos.clone() });
            }
        }
    }
    (out, exact)
}

fn instantiations(vars: &[Name], pool: &[Term]) -> Vec<Substitution> {
    let mut acc = vec![Substitution::new()];
    for v in vars {
        let mut next = Vec::new();
        for s in &acc {
            for t in pool {
                let mut s = s.clone();
                s.insert(v.clone(), t.clone());
                next.push(s);
            }
        }
        acc = next;
    }
    acc
}

/// Breadth-first approximation of `{ u | o ->* u }`.
#[derive(Debug, Clone)]
pub struct ReductSet<O> {
    nodes: Vec<O>,
    index: HashMap<O, usize>,
    parent: Vec<Option<(usize, usize, Position)>>,
    depth: Vec<usize>,
    complete: bool,
    steps_used: usize,
}

impl<O: Object> ReductSet<O> {
    /// Elements in discovery order; the seed comes first.
    pub fn elements(&self) -> &[O] {
        &self.nodes
    }

    pub fn seed(&self) -> &O {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when the set is closed under `->1`.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Number of objects whose one-step reducts were computed.
    pub fn steps_used(&self) -> usize {
        self.steps_used
    }

    pub fn contains(&self, o: &O) -> bool {
        self.index.contains_key(o)
    }

    pub fn depth_of(&self, o: &O) -> Option<usize> {
        self.index.get(o).map(|&i| self.depth[i])
    }

    /// A shortest forward derivation from the seed to `o`.
    pub fn derivation_to(&self, o: &O) -> Option<ConversionSequence<O>> {
        let mut i = *self.index.get(o)?;
        let mut chain = Vec::new();
        while let Some((p, rule, pos)) = &self.parent[i] {
            chain.push((i, *rule, pos.clone()));
            i = *p;
        }
        let mut seq = ConversionSequence::single(self.nodes[0].clone());
        for (node, rule, position) in chain.into_iter().rev() {
            seq.push(
                ConvStep { direction: Direction::Forward, rule, position },
                self.nodes[node].clone(),
            );
        }
        Some(seq)
    }
}

/// Result of a joinability query.
#[derive(Debug, Clone)]
pub enum Joinability<O> {
    Joinable(Join<O>),
    /// Both reduct sets are complete and share nothing.
    Disjoint,
    /// Nothing shared within budget, and at least one set was truncated.
    Unknown,
}

impl<O> Joinability<O> {
    pub fn join(&self) -> Option<&Join<O>> {
        match self {
            Joinability::Joinable(j) => Some(j),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Join<O> {
    pub common: O,
    pub left: ConversionSequence<O>,
    pub right: ConversionSequence<O>,
}

impl<O: Object> Join<O> {
    /// `a ->* c <-* b` as one valley sequence.
    pub fn valley(&self) -> ConversionSequence<O> {
        self.left
            .concat(&self.right.reversed())
            .expect("both derivations end at the common reduct")
    }
}

#[derive(Debug, Clone)]
pub enum Convertibility<O> {
    Convertible {
        sequence: ConversionSequence<O>,
        /// False when the search ran out of budget and fell back to a
        /// valley through common reducts.
        shortest: bool,
    },
    /// The full conversion class of one side was enumerated exactly.
    NotConvertible,
    Unknown,
}

impl<O> Convertibility<O> {
    pub fn sequence(&self) -> Option<&ConversionSequence<O>> {
        match self {
            Convertibility::Convertible { sequence, .. } => Some(sequence),
            _ => None,
        }
    }
}

/// Conversion class `{ u | o ≡ u }` as far as it was explored.
#[derive(Debug, Clone)]
pub struct ClassSet<O> {
    pub elements: Vec<O>,
    pub complete: bool,
}

/// Caching front end to the rewrite relation. One instance per system and
/// budget; analyses share a `Rewriter` to avoid recomputing closures.
pub struct Rewriter<'r, O> {
    system: &'r RewriteSystem,
    budget: Budget,
    step_cache: HashMap<O, Arc<Vec<Reduct<O>>>>,
    reduct_cache: HashMap<O, Arc<ReductSet<O>>>,
}

impl<'r, O: Object> Rewriter<'r, O> {
    pub fn new(system: &'r RewriteSystem, budget: Budget) -> Self {
        Rewriter { system, budget, step_cache: HashMap::new(), reduct_cache: HashMap::new() }
    }

    pub fn system(&self) -> &'r RewriteSystem {
        self.system
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn one_step(&mut self, o: &O) -> Arc<Vec<Reduct<O>>> {
        if let Some(r) = self.step_cache.get(o) {
            return r.clone();
        }
        let r = Arc::new(one_step_reducts(self.system, o));
        self.step_cache.insert(o.clone(), r.clone());
        r
    }

    pub fn reducts(&mut self, o: &O) -> Arc<ReductSet<O>> {
        if let Some(r) = self.reduct_cache.get(o) {
            return r.clone();
        }
        let r = Arc::new(self.explore(o));
        self.reduct_cache.insert(o.clone(), r.clone());
        r
    }

    fn explore(&mut self, seed: &O) -> ReductSet<O> {
        let mut set = ReductSet {
            nodes: vec![seed.clone()],
            index: HashMap::from([(seed.clone(), 0)]),
            parent: vec![None],
            depth: vec![0],
            complete: true,
            steps_used: 0,
        };
        let mut next = 0;
        'bfs: while next < set.nodes.len() {
            let current = next;
            next += 1;
            let d = set.depth[current];
            let reducts = self.one_step(&set.nodes[current].clone());
            set.steps_used += 1;
            for r in reducts.iter() {
                if set.index.contains_key(&r.object) {
                    continue;
                }
                if d >= self.budget.max_depth || set.nodes.len() >= self.budget.max_objects {
                    set.complete = false;
                    if set.nodes.len() >= self.budget.max_objects {
                        break 'bfs;
                    }
                    continue;
                }
                set.index.insert(r.object.clone(), set.nodes.len());
                set.nodes.push(r.object.clone());
                set.parent.push(Some((current, r.rule, r.position.clone())));
                set.depth.push(d + 1);
            }
        }
        set
    }

    /// `Some(derivation)` when `to` is a reduct of `from` within budget.
    pub fn reduces_to(&mut self, from: &O, to: &O) -> ReachAnswer<O> {
        if from == to {
            return ReachAnswer::Yes(ConversionSequence::single(from.clone()));
        }
        let set = self.reducts(from);
        match set.derivation_to(to) {
            Some(d) => ReachAnswer::Yes(d),
            None if set.is_complete() => ReachAnswer::No,
            None => ReachAnswer::Unknown,
        }
    }

    pub fn joinable(&mut self, a: &O, b: &O) -> Joinability<O> {
        let ra = self.reducts(a);
        let rb = self.reducts(b);
        let mut best: Option<(usize, &O)> = None;
        for (i, o) in ra.elements().iter().enumerate() {
            if let Some(db) = rb.depth_of(o) {
                let total = ra.depth[i] + db;
                if best.is_none_or(|(t, _)| total < t) {
                    best = Some((total, o));
                }
            }
        }
        match best {
            Some((_, c)) => Joinability::Joinable(Join {
                common: c.clone(),
                left: ra.derivation_to(c).expect("member"),
                right: rb.derivation_to(c).expect("member"),
            }),
            None if ra.is_complete() && rb.is_complete() => Joinability::Disjoint,
            None => Joinability::Unknown,
        }
    }

    /// Breadth-first enumeration of the conversion class of `o`.
    pub fn conversion_class(&mut self, o: &O) -> ClassSet<O> {
        let pool = self.pool(&[o]);
        let mut seen: HashMap<O, ()> = HashMap::from([(o.clone(), ())]);
        let mut order = vec![o.clone()];
        let mut queue = VecDeque::from([(o.clone(), 0usize)]);
        let mut complete = true;
        while let Some((x, d)) = queue.pop_front() {
            let fwd = self.one_step(&x);
            let (back, exact) = one_step_predecessors(self.system, &x, &pool);
            complete &= exact;
            for n in fwd.iter().chain(back.iter()) {
                if seen.contains_key(&n.object) {
                    continue;
                }
                if d >= self.budget.max_depth || order.len() >= self.budget.max_objects {
                    complete = false;
                    continue;
                }
                seen.insert(n.object.clone(), ());
                order.push(n.object.clone());
                queue.push_back((n.object.clone(), d + 1));
            }
        }
        ClassSet { elements: order, complete }
    }

    fn pool(&self, seeds: &[&O]) -> Vec<Term> {
        let mut terms: BTreeSet<Term> = self.system.signature().constants().into_iter().collect();
        for s in seeds {
            terms.extend(s.ground_subterms());
        }
        let mut terms: Vec<Term> = terms.into_iter().collect();
        terms.sort_by_key(|t| (t.size(), t.clone()));
        terms.truncate(16);
        terms
    }

    /// Shortest conversion between `a` and `b` by bidirectional
    /// breadth-first search over `->1 ∪ <-1`. Falls back to a valley
    /// through a common reduct when the search exhausts its budget.
    pub fn convertible(&mut self, a: &O, b: &O) -> Convertibility<O> {
        if a == b {
            return Convertibility::Convertible {
                sequence: ConversionSequence::single(a.clone()),
                shortest: true,
            };
        }
        let pool = self.pool(&[a, b]);
        let mut left = Side::new(a.clone());
        let mut right = Side::new(b.clone());
        let mut exhausted = false;
        loop {
            let (grow, other) = match (left.frontier.is_empty(), right.frontier.is_empty()) {
                (true, _) | (_, true) => break,
                _ if left.frontier.len() <= right.frontier.len() => (&mut left, &right),
                _ => (&mut right, &left),
            };
            if grow.level >= self.budget.max_depth {
                exhausted = true;
                break;
            }
            let frontier = std::mem::take(&mut grow.frontier);
            grow.level += 1;
            let mut meetings: Vec<(usize, O)> = Vec::new();
            for x in frontier {
                let fwd = self.one_step(&x);
                let (back, exact) = one_step_predecessors(self.system, &x, &pool);
                grow.exact &= exact;
                let edges = fwd
                    .iter()
                    .map(|r| (r, true))
                    .chain(back.iter().map(|r| (r, false)));
                for (r, parent_reduces) in edges {
                    if grow.visited.contains_key(&r.object) {
                        continue;
                    }
                    grow.visited.insert(
                        r.object.clone(),
                        Visit {
                            parent: Some((x.clone(), parent_reduces, r.rule, r.position.clone())),
                            depth: grow.level,
                        },
                    );
                    grow.frontier.push(r.object.clone());
                    if let Some(v) = other.visited.get(&r.object) {
                        meetings.push((grow.level + v.depth, r.object.clone()));
                    }
                }
            }
            if let Some((_, m)) = meetings.into_iter().min_by_key(|(d, _)| *d) {
                let sequence = join_paths(&left, &right, &m);
                return Convertibility::Convertible { sequence, shortest: true };
            }
            if left.visited.len() + right.visited.len() > self.budget.max_objects {
                exhausted = true;
                break;
            }
        }
        let left_done = left.frontier.is_empty() && left.exact;
        let right_done = right.frontier.is_empty() && right.exact;
        if !exhausted && (left_done || right_done) {
            return Convertibility::NotConvertible;
        }
        match self.joinable(a, b) {
            Joinability::Joinable(j) => Convertibility::Convertible { sequence: j.valley(), shortest: false },
            _ => Convertibility::Unknown,
        }
    }
}

/// Answer to `from ->* to`.
#[derive(Debug, Clone)]
pub enum ReachAnswer<O> {
    Yes(ConversionSequence<O>),
    No,
    Unknown,
}

struct Visit<O> {
    // (parent, parent ->1 child?, rule, position)
    parent: Option<(O, bool, usize, Position)>,
    depth: usize,
}

struct Side<O> {
    visited: HashMap<O, Visit<O>>,
    frontier: Vec<O>,
    level: usize,
    exact: bool,
}

impl<O: Object> Side<O> {
    fn new(root: O) -> Self {
        Side {
            visited: HashMap::from([(root.clone(), Visit { parent: None, depth: 0 })]),
            frontier: vec![root],
            level: 0,
            exact: true,
        }
    }

    /// Path from the root to `o`, as (objects, steps) in root-to-`o` order.
    fn path_to(&self, o: &O) -> ConversionSequence<O> {
        let mut rev = Vec::new();
        let mut cur = o.clone();
        while let Some((p, parent_reduces, rule, pos)) = &self.visited[&cur].parent {
            let direction = if *parent_reduces { Direction::Forward } else { Direction::Backward };
            rev.push((ConvStep { direction, rule: *rule, position: pos.clone() }, cur.clone()));
            cur = p.clone();
        }
        let mut seq = ConversionSequence::single(cur);
        for (step, obj) in rev.into_iter().rev() {
            seq.push(step, obj);
        }
        seq
    }
}

fn join_paths<O: Object>(left: &Side<O>, right: &Side<O>, meet: &O) -> ConversionSequence<O> {
    let a_to_m = left.path_to(meet);
    let b_to_m = right.path_to(meet);
    a_to_m.concat(&b_to_m.reversed()).expect("paths meet")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::system::RewriteRule;
    use crate::term::Signature;

    fn ground(rules: &[(&str, &str)]) -> RewriteSystem {
        let mut sig = Signature::new();
        for (l, r) in rules {
            sig.add_function(l, 0).unwrap();
            sig.add_function(r, 0).unwrap();
        }
        let rules = rules
            .iter()
            .map(|(l, r)| RewriteRule::new(Term::constant(l), Term::constant(r)))
            .collect();
        RewriteSystem::new(sig, rules).unwrap()
    }

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    #[test]
    fn reducts_of_the_peak_system() {
        let sys = ground(&[("a", "b"), ("a", "b'")]);
        let mut rw = Rewriter::new(&sys, Budget::default());
        let set = rw.reducts(&c("a"));
        assert!(set.is_complete());
        assert_eq!(set.elements(), &[c("a"), c("b"), c("b'")]);
    }

    #[test]
    fn reducts_of_the_loop_system_are_finite() {
        let sys = ground(&[("a", "b"), ("a", "c"), ("b", "a"), ("b", "d")]);
        let mut rw = Rewriter::new(&sys, Budget::default());
        let set = rw.reducts(&c("a"));
        assert!(set.is_complete());
        let got: BTreeSet<_> = set.elements().iter().cloned().collect();
        let want: BTreeSet<_> = ["a", "b", "c", "d"].iter().map(|s| c(s)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn truncation_is_reported() {
        let sys = ground(&[("a", "b"), ("b", "c"), ("c", "d")]);
        let mut rw = Rewriter::new(&sys, Budget { max_objects: 2, max_depth: 64 });
        let set = rw.reducts(&c("a"));
        assert!(!set.is_complete());
        assert_eq!(set.len(), 2);
        let mut rw = Rewriter::new(&sys, Budget { max_objects: 100, max_depth: 1 });
        let set = rw.reducts(&c("a"));
        assert!(!set.is_complete());
        assert_eq!(set.elements(), &[c("a"), c("b")]);
    }

    #[test]
    fn joinable_examples() {
        let sys = ground(&[("a", "b"), ("a", "b'")]);
        let mut rw = Rewriter::new(&sys, Budget::default());
        assert!(matches!(rw.joinable(&c("b"), &c("b'")), Joinability::Disjoint));
        let j = rw.joinable(&c("a"), &c("a"));
        assert_eq!(j.join().unwrap().common, c("a"));

        let sys = ground(&[("a", "b"), ("a", "c"), ("b", "a"), ("b", "d"), ("c", "e"), ("d", "e")]);
        let mut rw = Rewriter::new(&sys, Budget::default());
        let j = rw.joinable(&c("c"), &c("d"));
        let j = j.join().unwrap();
        assert_eq!(j.common, c("e"));
        j.left.validate(&sys).unwrap();
        j.right.validate(&sys).unwrap();
    }

    #[test]
    fn convertible_finds_the_peak() {
        let sys = ground(&[("a", "b"), ("a", "b'")]);
        let mut rw = Rewriter::new(&sys, Budget::default());
        let conv = rw.convertible(&c("b"), &c("b'"));
        let Convertibility::Convertible { sequence, shortest } = conv else { panic!("{conv:?}") };
        assert!(shortest);
        sequence.validate(&sys).unwrap();
        assert_eq!(sequence.objects(), &[c("b"), c("a"), c("b'")]);
        assert_eq!(sequence.peaks(), vec![1]);
        assert!(!sequence.is_valley());
    }

    #[test]
    fn unrelated_constants_are_not_convertible() {
        let sys = ground(&[("a", "b")]);
        let mut sig = sys.signature().clone();
        sig.add_function("c0", 0).unwrap();
        sig.add_function("d0", 0).unwrap();
        let sys = sys.with_signature(sig).unwrap();
        let mut rw = Rewriter::new(&sys, Budget::default());
        assert!(matches!(rw.convertible(&c("c0"), &c("d0")), Convertibility::NotConvertible));
    }
}
