use std::collections::{BTreeSet, HashMap, VecDeque};

use asymod_core::generate::{generate_random_system, generator_signature, ground_terms, GenParams};
use asymod_core::rewrite::{
    confluent, critical_pairs, empirical_ordering, locally_confluent, terminating, Budget, Direction, Joinability,
    OrderingError, RewriteSystem, Rewriter,
};
use asymod_core::syntax::{parse_problem, parse_prop, parse_term};
use asymod_core::term::{Prop, Term};
use proptest::prelude::*;

const FAILURE: &str = "sig a/0, b/0, b'/0; pred P/1; rules { a -> b; a -> b' }";
const LOOP: &str = "sig a/0, b/0, c/0, d/0, e/0; pred P/1; rules { a -> b; a -> c; b -> a; b -> d }";
const REMARK: &str =
    "sig a/0, b/0, c/0, d/0, e/0; pred P/1; rules { a -> b; a -> c; b -> a; b -> d; c -> e; d -> e }";
const ARITHMETIC: &str = "sig 0/0, S/1, plus/2, times/2; pred eq/2;
rules {
  plus(0, y) -> y
  plus(S(x), y) -> S(plus(x, y))
  times(0, y) -> 0
  times(S(x), y) -> plus(times(x, y), y)
}";

fn system(text: &str) -> RewriteSystem {
    parse_problem(text).expect("test system parses").system
}

fn t(sys: &RewriteSystem, s: &str) -> Term {
    parse_term(s, sys.signature()).expect("test term parses")
}

fn p(sys: &RewriteSystem, s: &str) -> Prop {
    parse_prop(s, sys.signature()).expect("test proposition parses")
}

fn strings<'a>(ts: impl IntoIterator<Item = &'a Term>) -> BTreeSet<String> {
    ts.into_iter().map(|t| t.to_string()).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn budget() -> Budget {
    Budget::default()
}

// Peano evaluation, independent of the rewrite engine.
fn eval(t: &Term) -> u64 {
    let Term::App(f, args) = t else { panic!("not ground: {t}") };
    match (f.to_string().as_str(), args.as_slice()) {
        ("0", []) => 0,
        ("S", [x]) => eval(x) + 1,
        ("plus", [x, y]) => eval(x) + eval(y),
        ("times", [x, y]) => eval(x) * eval(y),
        _ => panic!("unknown symbol in {t}"),
    }
}

#[test]
fn one_step_examples() {
    let sys = system(FAILURE);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    let reducts: Vec<Term> = rw.one_step(&t(&sys, "a")).iter().map(|r| r.object.clone()).collect();
    assert_eq!(strings(&reducts), set(&["b", "b'"]));

    let arith = system(ARITHMETIC);
    let mut rw = Rewriter::<Term>::new(&arith, budget());
    let seed = t(&arith, "times(S(S(0)), S(S(0)))");
    let reducts = rw.one_step(&seed);
    assert_eq!(reducts.len(), 1);
    assert_eq!(reducts[0].object, t(&arith, "plus(times(S(0), S(S(0))), S(S(0)))"));
    assert!(rw.one_step(&t(&arith, "0")).is_empty());
}

#[test]
fn atoms_rewrite_to_atoms() {
    let arith = system(ARITHMETIC);
    let mut rw = Rewriter::<Prop>::new(&arith, budget());
    let q = p(&arith, "forall x. eq(plus(0, x), times(0, x))");
    for r in rw.reducts(&q).elements() {
        assert_eq!(r.connective(), q.connective());
        assert_eq!(r.degree(), q.degree());
    }
    assert!(rw.reducts(&q).contains(&p(&arith, "forall x. eq(x, 0)")));
}

#[test]
fn reducts_examples() {
    let sys = system(FAILURE);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    let r = rw.reducts(&t(&sys, "a"));
    assert!(r.is_complete());
    assert_eq!(strings(r.elements()), set(&["a", "b", "b'"]));

    let sys = system(LOOP);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    let r = rw.reducts(&t(&sys, "a"));
    assert!(r.is_complete());
    assert_eq!(strings(r.elements()), set(&["a", "b", "c", "d"]));

    let arith = system(ARITHMETIC);
    let mut rw = Rewriter::<Term>::new(&arith, budget());
    let seed = t(&arith, "times(S(S(0)), S(S(0)))");
    let r = rw.reducts(&seed);
    assert!(r.is_complete());
    assert!(r.contains(&t(&arith, "S(S(S(S(0))))")));
    // every reduct denotes the same number
    for u in r.elements() {
        assert_eq!(eval(u), 4, "{u}");
    }
}

#[test]
fn joinable_examples() {
    let sys = system(FAILURE);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    assert!(matches!(rw.joinable(&t(&sys, "b"), &t(&sys, "b'")), Joinability::Disjoint));

    let sys = system(REMARK);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    let j = rw.joinable(&t(&sys, "c"), &t(&sys, "d"));
    let j = j.join().expect("c and d join");
    assert_eq!(j.common, t(&sys, "e"));
    j.valley().validate(&sys).unwrap();

    let a = t(&sys, "a");
    assert_eq!(rw.joinable(&a, &a).join().expect("reflexive").common, a);
}

#[test]
fn convertible_examples() {
    let sys = system(FAILURE);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    let c = rw.convertible(&t(&sys, "b"), &t(&sys, "b'"));
    let seq = c.sequence().expect("convertible");
    seq.validate(&sys).unwrap();
    assert_eq!(seq.render(), "b <- a -> b'");
    assert_eq!(seq.peaks(), vec![1]);

    let arith = system(ARITHMETIC);
    let mut rw = Rewriter::<Prop>::new(&arith, budget());
    let c = rw.convertible(&p(&arith, "eq(4, 4)"), &p(&arith, "eq(times(2, 2), 4)"));
    let seq = c.sequence().expect("convertible");
    seq.validate(&arith).unwrap();
    assert!(!seq.is_empty());
    assert!(seq.steps().iter().all(|s| s.direction == Direction::Backward));

    let fresh = system("sig k/0, m/0; rules { }");
    let mut rw = Rewriter::<Term>::new(&fresh, budget());
    assert!(rw.convertible(&t(&fresh, "k"), &t(&fresh, "m")).sequence().is_none());
}

#[test]
fn peaks_and_valleys() {
    let sys = system(FAILURE);
    let mut rw = Rewriter::<Term>::new(&sys, budget());
    let peak = rw.convertible(&t(&sys, "b"), &t(&sys, "b'")).sequence().unwrap().clone();
    assert_eq!(peak.peaks(), vec![1]);
    assert!(!peak.is_valley());

    let down = rw.reducts(&t(&sys, "a")).derivation_to(&t(&sys, "b")).unwrap();
    assert!(down.peaks().is_empty() && down.is_valley());

    let single = rw.reducts(&t(&sys, "b")).derivation_to(&t(&sys, "b")).unwrap();
    assert!(single.is_empty() && single.peaks().is_empty() && single.is_valley());
}

fn pair_strings(sys: &RewriteSystem) -> BTreeSet<(String, String, String)> {
    critical_pairs(sys)
        .into_iter()
        .map(|cp| {
            let (l, r) = (cp.left.to_string(), cp.right.to_string());
            let (l, r) = if l <= r { (l, r) } else { (r, l) };
            (cp.source.to_string(), l, r)
        })
        .collect()
}

#[test]
fn critical_pair_examples() {
    let own = |s: &str, l: &str, r: &str| (s.to_string(), l.to_string(), r.to_string());
    assert_eq!(pair_strings(&system(FAILURE)), BTreeSet::from([own("a", "b", "b'")]));
    assert!(pair_strings(&system(ARITHMETIC)).is_empty());
    assert_eq!(pair_strings(&system(LOOP)), BTreeSet::from([own("a", "b", "c"), own("b", "a", "d")]));
}

#[test]
fn local_confluence_examples() {
    let v = locally_confluent(&system(FAILURE), budget());
    let w = v.witness().expect("fails");
    assert_eq!(set(&[&w.pair.left.to_string(), &w.pair.right.to_string()]), set(&["b", "b'"]));
    assert!(locally_confluent(&system(LOOP), budget()).holds());
    assert!(locally_confluent(&system(ARITHMETIC), budget()).holds());
}

#[test]
fn confluence_examples() {
    let sys = system(FAILURE);
    let universe = sys.signature().constants();
    let w = confluent(&sys, &universe, budget());
    let w = w.witness().expect("fails");
    assert_eq!(w.seed.to_string(), "a");
    assert_eq!(set(&[&w.left.to_string(), &w.right.to_string()]), set(&["b", "b'"]));
    w.left_derivation.validate(&sys).unwrap();
    w.right_derivation.validate(&sys).unwrap();

    let sys = system(LOOP);
    let universe = sys.signature().constants();
    let w = confluent(&sys, &universe, budget());
    let w = w.witness().expect("fails");
    assert_eq!(set(&[&w.left.to_string(), &w.right.to_string()]), set(&["c", "d"]));

    let sys = system(REMARK);
    assert!(confluent(&sys, &sys.signature().constants(), budget()).holds());
}

#[test]
fn termination_examples() {
    let sys = system(LOOP);
    let v = terminating(&sys, &sys.signature().constants(), budget());
    let cycle = &v.witness().expect("fails").derivation;
    cycle.validate(&sys).unwrap();
    assert_eq!(cycle.render(), "a -> b -> a");

    let sys = system(FAILURE);
    assert!(terminating(&sys, &sys.signature().constants(), budget()).holds());

    let arith = system(ARITHMETIC);
    let universe: Vec<Term> = ground_terms(arith.signature(), 3, 400).into_iter().filter(|t| t.size() <= 12).collect();
    assert!(universe.len() > 100);
    assert!(terminating(&arith, &universe, budget()).holds());
}

#[test]
fn ordering_examples() {
    let sys = system(FAILURE);
    let carrier = sys.signature().constants();
    let order = empirical_ordering(&sys, &carrier, budget()).unwrap();
    let (a, b, b2) = (t(&sys, "a"), t(&sys, "b"), t(&sys, "b'"));
    assert!(order.greater(&a, &b) && order.greater(&a, &b2));
    assert!(!order.greater(&b, &b2) && !order.greater(&b2, &b) && !order.greater(&a, &a));

    let arith = system(ARITHMETIC);
    let seed = t(&arith, "times(S(0), S(S(0)))");
    let order = empirical_ordering(&arith, std::slice::from_ref(&seed), budget()).unwrap();
    let mut rw = Rewriter::<Term>::new(&arith, budget());
    for r in rw.reducts(&seed).elements().iter().filter(|r| **r != seed) {
        assert!(order.greater(&seed, r), "{seed} > {r}");
    }

    let sys = system(LOOP);
    let err = empirical_ordering(&sys, &sys.signature().constants(), budget());
    assert!(matches!(err, Err(OrderingError::NotTerminating(_))));
}

#[test]
fn rules_are_well_formed() {
    assert!(parse_problem("sig a/0; rules { x -> a }").is_err());
    assert!(parse_problem("sig f/1, a/0; rules { f(x) -> y }").is_err());
}

// Ground terms f^n(c) over the generator signature, as (c, n).
type Flat = (String, usize);

fn flat(t: &Term) -> Flat {
    let s = t.to_string();
    let n = s.matches("f(").count();
    (s[2 * n..s.len() - n].to_string(), n)
}

/// One-step reducts of `f^n(c)` under ground rules `f^i(c) -> f^j(d)`.
fn oracle_step(rules: &[(Flat, Flat)], (c, n): &Flat) -> BTreeSet<Flat> {
    let mut out = BTreeSet::new();
    for ((lc, li), (rc, ri)) in rules {
        if lc == c && li <= n {
            out.insert((rc.clone(), n - li + ri));
        }
    }
    out
}

fn oracle_closure(rules: &[(Flat, Flat)], seed: &Flat, cap: usize) -> Option<BTreeSet<Flat>> {
    let mut seen = BTreeSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed.clone()]);
    while let Some(x) = queue.pop_front() {
        for y in oracle_step(rules, &x) {
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen)
}

fn oracle_rules(sys: &RewriteSystem) -> Vec<(Flat, Flat)> {
    sys.rules().iter().map(|r| (flat(&r.lhs), flat(&r.rhs))).collect()
}

fn universe() -> Vec<Term> {
    ground_terms(&generator_signature(), 3, usize::MAX)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_step_matches_oracle(seed in 0u64..10_000) {
        let sys = generate_random_system(seed, GenParams::default());
        let rules = oracle_rules(&sys);
        let mut rw = Rewriter::<Term>::new(&sys, budget());
        for u in universe() {
            let got: BTreeSet<Flat> = rw.one_step(&u).iter().map(|r| flat(&r.object)).collect();
            prop_assert_eq!(got, oracle_step(&rules, &flat(&u)));
        }
    }

    #[test]
    fn closures_match_oracle_and_are_fixed_points(seed in 0u64..10_000) {
        let sys = generate_random_system(seed, GenParams::default());
        let rules = oracle_rules(&sys);
        let small = Budget::objects(200);
        let mut rw = Rewriter::<Term>::new(&sys, small);
        let mut big = Rewriter::<Term>::new(&sys, Budget::objects(400));
        for u in universe() {
            let r = rw.reducts(&u);
            let got: BTreeSet<Flat> = r.elements().iter().map(flat).collect();
            prop_assert!(r.contains(&u));
            // enlarging the budget never removes elements
            let larger: BTreeSet<Flat> = big.reducts(&u).elements().iter().map(flat).collect();
            prop_assert!(got.is_subset(&larger));
            if r.is_complete() {
                prop_assert_eq!(Some(got), oracle_closure(&rules, &flat(&u), 10_000));
                for x in r.elements() {
                    for y in rw.one_step(x).iter() {
                        prop_assert!(r.contains(&y.object));
                    }
                    r.derivation_to(x).unwrap().validate(&sys).unwrap();
                }
            }
        }
    }

    #[test]
    fn conversions_validate_and_peaks_match_valleys(seed in 0u64..10_000) {
        let sys = generate_random_system(seed, GenParams::default());
        let mut rw = Rewriter::<Term>::new(&sys, Budget::objects(300));
        let u = universe();
        for (i, x) in u.iter().enumerate().step_by(3) {
            for y in u[i..].iter().step_by(4) {
                if let Some(seq) = rw.convertible(x, y).sequence() {
                    prop_assert!(seq.validate(&sys).is_ok());
                    prop_assert_eq!(seq.first(), x);
                    prop_assert_eq!(seq.last(), y);
                    prop_assert_eq!(seq.peaks().is_empty(), seq.is_valley());
                }
            }
        }
    }

    #[test]
    fn confluence_verdicts_match_oracle(seed in 0u64..10_000) {
        let sys = generate_random_system(seed, GenParams::default());
        let rules = oracle_rules(&sys);
        let u = universe();
        let mut memo: HashMap<Flat, Option<BTreeSet<Flat>>> = HashMap::new();
        let mut closure = |x: &Flat| memo.entry(x.clone()).or_insert_with(|| oracle_closure(&rules, x, 100)).clone();
        let Some(closures) = u.iter().map(|x| closure(&flat(x))).collect::<Option<Vec<_>>>() else { return Ok(()) };
        let verdict = confluent(&sys, &u, Budget::objects(2_000));
        // closures of reducts are subsets of the seed's, hence complete
        let mut expected = true;
        for c in &closures {
            for a in c {
                for b in c {
                    if closure(a).unwrap().is_disjoint(&closure(b).unwrap()) {
                        expected = false;
                    }
                }
            }
        }
        prop_assert_eq!(verdict.holds(), expected, "oracle says {}, got {}", expected, verdict.label());
        if let Some(w) = verdict.witness() {
            prop_assert!(w.left_derivation.validate(&sys).is_ok() && w.right_derivation.validate(&sys).is_ok());
            let (l, r) = (closure(&flat(&w.left)).unwrap(), closure(&flat(&w.right)).unwrap());
            prop_assert!(l.is_disjoint(&r));
        }
    }

    #[test]
    fn newman_corollary(seed in 0u64..10_000) {
        let sys = generate_random_system(seed, GenParams::default());
        let u = universe();
        let b = Budget::objects(2_000);
        if locally_confluent(&sys, b).holds() && terminating(&sys, &u, b).holds() {
            let v = confluent(&sys, &u, b);
            prop_assert!(!v.fails(), "locally confluent and terminating but not confluent");
            if v.holds() {
                let mut rw = Rewriter::<Term>::new(&sys, b);
                for (i, x) in u.iter().enumerate() {
                    for y in &u[i..] {
                        if rw.convertible(x, y).sequence().is_some() {
                            prop_assert!(rw.joinable(x, y).join().is_some(), "{x} and {y} convertible but not joinable");
                        }
                    }
                }
            }
        }
    }
}
