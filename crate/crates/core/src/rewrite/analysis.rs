use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::conversion::{ConvStep, ConversionSequence, Direction};
use super::object::Object;
use super::reduce::{Budget, Joinability, Rewriter};
use super::system::RewriteSystem;
use crate::subst::unify;
use crate::term::{fresh_name, Name, Position, Term};

/// What a `Holds` verdict actually covered.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    /// Seeds or critical pairs examined.
    pub checked: usize,
    /// Distinct objects visited.
    pub objects: usize,
    /// Longest derivation seen (termination only).
    pub longest_derivation: usize,
}

#[derive(Debug, Clone)]
pub enum AnalysisVerdict<W> {
    Holds(Coverage),
    Fails(W),
    Unknown(String),
}

impl<W> AnalysisVerdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, AnalysisVerdict::Holds(_))
    }

    pub fn fails(&self) -> bool {
        matches!(self, AnalysisVerdict::Fails(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            AnalysisVerdict::Fails(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AnalysisVerdict::Holds(_) => "holds",
            AnalysisVerdict::Fails(_) => "fails",
            AnalysisVerdict::Unknown(_) => "unknown",
        }
    }
}

/// `source` rewritten at the root by `outer` gives `left`, and at
/// `position` by `inner` gives `right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    pub source: Term,
    pub left: Term,
    pub right: Term,
    pub outer_rule: usize,
    pub inner_rule: usize,
    pub position: Position,
}

impl CriticalPair {
    /// `left <- source -> right` as a conversion sequence.
    pub fn peak(&self) -> ConversionSequence<Term> {
        let mut seq = ConversionSequence::single(self.left.clone());
        seq.push(
            ConvStep { direction: Direction::Backward, rule: self.outer_rule, position: Position::root() },
            self.source.clone(),
        );
        seq.push(
            ConvStep { direction: Direction::Forward, rule: self.inner_rule, position: self.position.clone() },
            self.right.clone(),
        );
        seq
    }
}

fn rename_apart(t: &Term, map: &BTreeMap<Name, Name>) -> Term {
    match t {
        Term::Var(x) => Term::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
        Term::Bound(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename_apart(a, map)).collect()),
    }
}

/// All overlaps of a left-hand side into a non-variable position of
/// another left-hand side (or of itself below the root). Root overlaps
/// between two distinct rules are listed once, with the earlier rule
/// outermost.
pub fn critical_pairs(system: &RewriteSystem) -> Vec<CriticalPair> {
    let rules = system.rules();
    let mut out = Vec::new();
    for (i, outer) in rules.iter().enumerate() {
        let mut avoid = outer.lhs.free_vars();
        for (j, inner) in rules.iter().enumerate() {
            let mut map = BTreeMap::new();
            for v in inner.lhs.free_vars() {
                let fresh = fresh_name(&v, &avoid);
                avoid.insert(fresh.clone());
                map.insert(v, fresh);
            }
            let inner_lhs = rename_apart(&inner.lhs, &map);
            let inner_rhs = rename_apart(&inner.rhs, &map);
            for (pos, sub) in outer.lhs.subterms() {
                if sub.is_var() {
                    continue;
                }
                if pos.is_root() && j <= i {
                    continue;
                }
                let Some(sigma) = unify(sub, &inner_lhs) else { continue };
                let source = sigma.apply(&outer.lhs);
                let left = sigma.apply(&outer.rhs);
                let right = source
                    .replace_at(&pos.0, sigma.apply(&inner_rhs))
                    .expect("position of the left-hand side");
                out.push(CriticalPair { source, left, right, outer_rule: i, inner_rule: j, position: pos });
            }
            avoid = outer.lhs.free_vars();
        }
    }
    out
}

/// A critical pair whose two sides have complete, disjoint reduct sets.
#[derive(Debug, Clone)]
pub struct LocalWitness {
    pub pair: CriticalPair,
    pub left_reducts: Vec<Term>,
    pub right_reducts: Vec<Term>,
}

pub fn locally_confluent(system: &RewriteSystem, budget: Budget) -> AnalysisVerdict<LocalWitness> {
    let pairs = critical_pairs(system);
    let mut rw = Rewriter::<Term>::new(system, budget);
    let mut unknown = None;
    let mut objects = 0;
    for pair in &pairs {
        match rw.joinable(&pair.left, &pair.right) {
            Joinability::Joinable(_) => {}
            Joinability::Disjoint => {
                return AnalysisVerdict::Fails(LocalWitness {
                    left_reducts: rw.reducts(&pair.left).elements().to_vec(),
                    right_reducts: rw.reducts(&pair.right).elements().to_vec(),
                    pair: pair.clone(),
                });
            }
            Joinability::Unknown => {
                unknown.get_or_insert_with(|| {
                    format!("joinability of {} and {} exceeded the budget", pair.left, pair.right)
                });
            }
        }
        objects += rw.reducts(&pair.left).len() + rw.reducts(&pair.right).len();
    }
    match unknown {
        Some(reason) => AnalysisVerdict::Unknown(reason),
        None => AnalysisVerdict::Holds(Coverage { checked: pairs.len(), objects, longest_derivation: 0 }),
    }
}

/// Two reducts of `seed` without a common reduct.
#[derive(Debug, Clone)]
pub struct ConfluenceWitness<O> {
    pub seed: O,
    pub left: O,
    pub right: O,
    pub left_derivation: ConversionSequence<O>,
    pub right_derivation: ConversionSequence<O>,
}

/// Seeds sorted by size, then structurally, without duplicates.
pub fn canonical_order<O: Object>(universe: &[O]) -> Vec<O> {
    let set: BTreeSet<(usize, O)> = universe.iter().map(|o| (o.size(), o.clone())).collect();
    set.into_iter().map(|(_, o)| o).collect()
}

enum SeedResult<O> {
    Ok(usize),
    Fail(ConfluenceWitness<O>),
    Unknown(String),
}

fn confluent_at<O: Object>(system: &RewriteSystem, budget: Budget, seed: &O) -> SeedResult<O> {
    let mut rw = Rewriter::new(system, budget);
    let set = rw.reducts(seed);
    let mut unknown = (!set.is_complete()).then(|| format!("reducts of {seed} exceeded the budget"));
    let elems = set.elements();
    for (i, u) in elems.iter().enumerate() {
        for v in &elems[i + 1..] {
            match rw.joinable(u, v) {
                Joinability::Joinable(_) => {}
                Joinability::Disjoint => {
                    return SeedResult::Fail(ConfluenceWitness {
                        seed: seed.clone(),
                        left: u.clone(),
                        right: v.clone(),
                        left_derivation: set.derivation_to(u).expect("member"),
                        right_derivation: set.derivation_to(v).expect("member"),
                    });
                }
                Joinability::Unknown => {
                    unknown.get_or_insert_with(|| format!("joinability of {u} and {v} exceeded the budget"));
                }
            }
        }
    }
    match unknown {
        Some(r) => SeedResult::Unknown(r),
        None => SeedResult::Ok(elems.len()),
    }
}

/// Checks every pair of reducts of every seed for joinability. `Holds`
/// is relative to the universe and the budget.
pub fn confluent<O: Object>(
    system: &RewriteSystem,
    universe: &[O],
    budget: Budget,
) -> AnalysisVerdict<ConfluenceWitness<O>> {
    let seeds = canonical_order(universe);
    let results: Vec<SeedResult<O>> = seeds.par_iter().map(|s| confluent_at(system, budget, s)).collect();
    let mut objects = 0;
    let mut unknown = None;
    for r in results {
        match r {
            SeedResult::Fail(w) => return AnalysisVerdict::Fails(w),
            SeedResult::Unknown(reason) => {
                unknown.get_or_insert(reason);
            }
            SeedResult::Ok(n) => objects += n,
        }
    }
    match unknown {
        Some(reason) => AnalysisVerdict::Unknown(reason),
        None => AnalysisVerdict::Holds(Coverage { checked: seeds.len(), objects, longest_derivation: 0 }),
    }
}

/// Forward derivation `o_0 ->1 ... ->1 o_n` with `o_n == o_0`.
#[derive(Debug, Clone)]
pub struct Cycle<O> {
    pub derivation: ConversionSequence<O>,
}

#[derive(Debug, Clone)]
pub enum HeightError<O> {
    Cycle(Cycle<O>),
    Overflow(String),
}

/// Length of the longest derivation from each object, by depth-first
/// search with cycle detection on the current branch.
pub struct DerivationHeights<'r, O> {
    rw: Rewriter<'r, O>,
    heights: HashMap<O, usize>,
}

struct Frame<O> {
    object: O,
    next: usize,
    best: usize,
    // rule and position that led here from the parent
    via: Option<(usize, Position)>,
}

impl<'r, O: Object> DerivationHeights<'r, O> {
    pub fn new(system: &'r RewriteSystem, budget: Budget) -> Self {
        DerivationHeights { rw: Rewriter::new(system, budget), heights: HashMap::new() }
    }

    pub fn visited(&self) -> usize {
        self.heights.len()
    }

    pub fn height(&mut self, seed: &O) -> Result<usize, HeightError<O>> {
        if let Some(&h) = self.heights.get(seed) {
            return Ok(h);
        }
        let budget = self.rw.budget();
        let mut stack = vec![Frame { object: seed.clone(), next: 0, best: 0, via: None }];
        let mut on_stack: HashMap<O, usize> = HashMap::from([(seed.clone(), 0)]);
        while let Some(top) = stack.last_mut() {
            let reducts = self.rw.one_step(&top.object);
            if top.next == reducts.len() {
                let done = stack.pop().expect("nonempty");
                on_stack.remove(&done.object);
                self.heights.insert(done.object.clone(), done.best);
                if let Some(parent) = stack.last_mut() {
                    parent.best = parent.best.max(done.best + 1);
                }
                continue;
            }
            let r = &reducts[top.next];
            top.next += 1;
            if let Some(&h) = self.heights.get(&r.object) {
                top.best = top.best.max(h + 1);
                continue;
            }
            if let Some(&start) = on_stack.get(&r.object) {
                let mut seq = ConversionSequence::single(stack[start].object.clone());
                for f in &stack[start + 1..] {
                    let (rule, position) = f.via.clone().expect("non-root frame");
                    seq.push(ConvStep { direction: Direction::Forward, rule, position }, f.object.clone());
                }
                seq.push(
                    ConvStep { direction: Direction::Forward, rule: r.rule, position: r.position.clone() },
                    r.object.clone(),
                );
                return Err(HeightError::Cycle(Cycle { derivation: seq }));
            }
            if stack.len() > budget.max_depth {
                return Err(HeightError::Overflow(format!(
                    "derivation from {seed} longer than {}",
                    budget.max_depth
                )));
            }
            if self.heights.len() + stack.len() > budget.max_objects {
                return Err(HeightError::Overflow(format!(
                    "more than {} objects below {seed}",
                    budget.max_objects
                )));
            }
            let frame = Frame {
                object: r.object.clone(),
                next: 0,
                best: 0,
                via: Some((r.rule, r.position.clone())),
            };
            on_stack.insert(r.object.clone(), stack.len());
            stack.push(frame);
        }
        Ok(self.heights[seed])
    }
}

/// Looks for a cycle or an over-long derivation from every seed. A
/// derivation exceeding the depth budget yields `Unknown`, never `Fails`:
/// only a cycle is a witness of non-termination.
pub fn terminating<O: Object>(system: &RewriteSystem, universe: &[O], budget: Budget) -> AnalysisVerdict<Cycle<O>> {
    let mut dh = DerivationHeights::new(system, budget);
    let seeds = canonical_order(universe);
    let mut longest = 0;
    for s in &seeds {
        match dh.height(s) {
            Ok(h) => longest = longest.max(h),
            Err(HeightError::Cycle(c)) => return AnalysisVerdict::Fails(c),
            Err(HeightError::Overflow(reason)) => return AnalysisVerdict::Unknown(reason),
        }
    }
    AnalysisVerdict::Holds(Coverage { checked: seeds.len(), objects: dh.visited(), longest_derivation: longest })
}

#[derive(Debug, Clone)]
pub enum OrderingError<O> {
    NotTerminating(Cycle<O>),
    Unknown(String),
}

/// `t > u` iff `t ->+ u`, restricted to the closure of a finite carrier.
#[derive(Debug, Clone)]
pub struct EmpiricalOrdering<O> {
    below: HashMap<O, HashSet<O>>,
}

pub fn empirical_ordering<O: Object>(
    system: &RewriteSystem,
    carrier: &[O],
    budget: Budget,
) -> Result<EmpiricalOrdering<O>, OrderingError<O>> {
    match terminating(system, carrier, budget) {
        AnalysisVerdict::Fails(c) => return Err(OrderingError::NotTerminating(c)),
        AnalysisVerdict::Unknown(r) => return Err(OrderingError::Unknown(r)),
        AnalysisVerdict::Holds(_) => {}
    }
    let mut rw = Rewriter::new(system, budget);
    let mut below = HashMap::new();
    let mut todo: Vec<O> = carrier.to_vec();
    while let Some(t) = todo.pop() {
        if below.contains_key(&t) {
            continue;
        }
        let set = rw.reducts(&t);
        if !set.is_complete() {
            return Err(OrderingError::Unknown(format!("reducts of {t} exceeded the budget")));
        }
        // terminating, so t is not among its proper reducts
        let strict: HashSet<O> = set.elements()[1..].iter().cloned().collect();
        todo.extend(strict.iter().cloned());
        below.insert(t, strict);
    }
    Ok(EmpiricalOrdering { below })
}

impl<O: Object> EmpiricalOrdering<O> {
    pub fn greater(&self, t: &O, u: &O) -> bool {
        self.below.get(t).is_some_and(|s| s.contains(u))
    }

    pub fn carrier_len(&self) -> usize {
        self.below.len()
    }

    /// Dershowitz–Manna extension: `m > n` iff they differ and every
    /// element of `n - m` is dominated by some element of `m - n`.
    pub fn multiset_greater(&self, m: &[O], n: &[O]) -> bool {
        let (m_minus, n_minus) = multiset_differences(m, n);
        if m_minus.is_empty() && n_minus.is_empty() {
            return false;
        }
        n_minus.iter().all(|y| m_minus.iter().any(|x| self.greater(x, y)))
    }
}

/// `(m - n, n - m)` as multisets.
pub fn multiset_differences<O: Object>(m: &[O], n: &[O]) -> (Vec<O>, Vec<O>) {
    let mut count: BTreeMap<&O, isize> = BTreeMap::new();
    for x in m {
        *count.entry(x).or_default() += 1;
    }
    for y in n {
        *count.entry(y).or_default() -= 1;
    }
    let mut m_minus = Vec::new();
    let mut n_minus = Vec::new();
    for (o, c) in count {
        for _ in 0..c.max(0) {
            m_minus.push(o.clone());
        }
        for _ in 0..(-c).max(0) {
            n_minus.push(o.clone());
        }
    }
    (m_minus, n_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::system::RewriteRule;
    use crate::term::Signature;

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    fn ground(rules: &[(&str, &str)]) -> RewriteSystem {
        let mut sig = Signature::new();
        for (l, r) in rules {
            let _ = sig.add_function(l, 0);
            let _ = sig.add_function(r, 0);
        }
        let rules = rules.iter().map(|(l, r)| RewriteRule::new(c(l), c(r))).collect();
        RewriteSystem::new(sig, rules).unwrap()
    }

    fn loop_system() -> RewriteSystem {
        ground(&[("a", "b"), ("a", "c"), ("b", "a"), ("b", "d")])
    }

    fn consts(names: &[&str]) -> Vec<Term> {
        names.iter().map(|n| c(n)).collect()
    }

    #[test]
    fn critical_pairs_of_ground_systems() {
        let cps = critical_pairs(&ground(&[("a", "b"), ("a", "b'")]));
        assert_eq!(cps.len(), 1);
        assert_eq!((&cps[0].source, &cps[0].left, &cps[0].right), (&c("a"), &c("b"), &c("b'")));

        let cps = critical_pairs(&loop_system());
        let got: Vec<_> = cps.iter().map(|p| (p.source.clone(), p.left.clone(), p.right.clone())).collect();
        assert_eq!(got, vec![(c("a"), c("b"), c("c")), (c("b"), c("a"), c("d"))]);
    }

    #[test]
    fn peak_of_a_critical_pair_validates() {
        let sys = loop_system();
        for cp in critical_pairs(&sys) {
            cp.peak().validate(&sys).unwrap();
        }
    }

    #[test]
    fn local_confluence_examples() {
        let v = locally_confluent(&ground(&[("a", "b"), ("a", "b'")]), Budget::default());
        let w = v.witness().unwrap();
        assert_eq!((&w.pair.left, &w.pair.right), (&c("b"), &c("b'")));
        assert!(locally_confluent(&loop_system(), Budget::default()).holds());
    }

    #[test]
    fn confluence_examples() {
        let v = confluent(&ground(&[("a", "b"), ("a", "b'")]), &consts(&["a", "b", "b'"]), Budget::default());
        let w = v.witness().unwrap();
        assert_eq!((&w.seed, &w.left, &w.right), (&c("a"), &c("b"), &c("b'")));

        let v = confluent(&loop_system(), &consts(&["a", "b", "c", "d"]), Budget::default());
        let w = v.witness().unwrap();
        assert_eq!((&w.seed, &w.left, &w.right), (&c("a"), &c("c"), &c("d")));

        let mut sig = loop_system().signature().clone();
        sig.add_function("e", 0).unwrap();
        let sys = loop_system()
            .with_signature(sig)
            .unwrap()
            .extended(vec![RewriteRule::new(c("c"), c("e")), RewriteRule::new(c("d"), c("e"))])
            .unwrap();
        assert!(confluent(&sys, &consts(&["a", "b", "c", "d", "e"]), Budget::default()).holds());
    }

    #[test]
    fn termination_examples() {
        let v = terminating(&loop_system(), &consts(&["a", "b", "c", "d"]), Budget::default());
        let cyc = v.witness().unwrap();
        assert_eq!(cyc.derivation.objects(), &consts(&["a", "b", "a"]));
        cyc.derivation.validate(&loop_system()).unwrap();

        let v = terminating(&ground(&[("a", "b"), ("a", "b'")]), &consts(&["a"]), Budget::default());
        let AnalysisVerdict::Holds(cov) = v else { panic!() };
        assert_eq!(cov.longest_derivation, 1);
    }

    #[test]
    fn ordering_examples() {
        let sys = ground(&[("a", "b"), ("a", "b'")]);
        let ord = empirical_ordering(&sys, &consts(&["a"]), Budget::default()).unwrap();
        assert!(ord.greater(&c("a"), &c("b")));
        assert!(ord.greater(&c("a"), &c("b'")));
        assert!(!ord.greater(&c("b"), &c("b'")) && !ord.greater(&c("b'"), &c("b")));
        assert!(!ord.greater(&c("a"), &c("a")));
        assert!(matches!(
            empirical_ordering(&loop_system(), &consts(&["a"]), Budget::default()),
            Err(OrderingError::NotTerminating(_))
        ));
    }

    #[test]
    fn multiset_extension() {
        let sys = ground(&[("a", "b"), ("a", "b'")]);
        let ord = empirical_ordering(&sys, &consts(&["a"]), Budget::default()).unwrap();
        assert!(ord.multiset_greater(&consts(&["a"]), &consts(&["b", "b'", "b"])));
        assert!(!ord.multiset_greater(&consts(&["a"]), &consts(&["a"])));
        assert!(!ord.multiset_greater(&consts(&["b"]), &consts(&["b'"])));
        assert!(ord.multiset_greater(&consts(&["a", "b"]), &consts(&["b"])));
    }
}
