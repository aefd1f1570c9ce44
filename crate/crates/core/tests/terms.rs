use std::collections::BTreeMap;

use asymod_core::subst::{match_pattern, unify, Substitution};
use asymod_core::term::{name, Position, Prop, Term, TermError};
use proptest::prelude::*;

fn v(x: &str) -> Term {
    Term::var(x)
}
fn c(x: &str) -> Term {
    Term::constant(x)
}
fn app(f: &str, args: Vec<Term>) -> Term {
    Term::app(f, args)
}
fn subst(pairs: &[(&str, Term)]) -> Substitution {
    pairs.iter().map(|(x, t)| (name(x), t.clone())).collect()
}

#[test]
fn substitute_examples() {
    let s = subst(&[("x", c("0"))]);
    assert_eq!(s.apply(&app("plus", vec![v("x"), v("y")])), app("plus", vec![c("0"), v("y")]));

    let p = Prop::atom("P", vec![app("t", vec![])]);
    assert_eq!(Substitution::new().apply_prop(&p), p);
}

#[test]
fn substitution_avoids_capture() {
    let q = |a: Term, b: Term| Prop::atom("Q", vec![a, b]);
    let before = Prop::forall("x", q(v("x"), v("y")));
    let after = subst(&[("y", v("x"))]).apply_prop(&before);
    assert_eq!(after, Prop::forall("z", q(v("z"), v("x"))));
    assert_eq!(after.free_vars().into_iter().collect::<Vec<_>>(), vec![name("x")]);
    let shown = after.to_string();
    assert!(shown.starts_with("forall ") && !shown.starts_with("forall x."), "{shown}");
    assert!(shown.ends_with(", x)"), "{shown}");
}

#[test]
fn alpha_examples() {
    let p = |x: &str| Prop::atom("P", vec![v(x)]);
    assert_eq!(Prop::forall("x", p("x")), Prop::forall("y", p("y")));
    assert_ne!(Prop::forall("x", p("x")), Prop::forall("x", Prop::atom("Q", vec![v("x")])));
    let pa = Prop::atom("P", vec![c("a")]);
    assert_eq!(pa, pa.clone());
}

#[test]
fn match_examples() {
    let m = match_pattern(&app("plus", vec![c("0"), v("y")]), &app("plus", vec![c("0"), app("S", vec![c("0")])]));
    assert_eq!(m, Some(subst(&[("y", app("S", vec![c("0")]))])));
    assert_eq!(match_pattern(&app("plus", vec![app("S", vec![v("x")]), v("y")]), &app("plus", vec![c("0"), c("0")])), None);
    assert_eq!(match_pattern(&app("times", vec![v("x"), v("x")]), &app("times", vec![c("a"), c("b")])), None);
}

#[test]
fn match_treats_subject_variables_as_rigid() {
    // x in the subject is a constant for matching purposes
    assert_eq!(match_pattern(&app("f", vec![c("a")]), &app("f", vec![v("x")])), None);
    assert_eq!(match_pattern(&app("f", vec![v("y")]), &app("f", vec![v("x")])), Some(subst(&[("y", v("x"))])));
}

#[test]
fn unify_examples() {
    assert_eq!(
        unify(&app("f", vec![v("x")]), &app("f", vec![app("g", vec![v("y")])])),
        Some(subst(&[("x", app("g", vec![v("y")]))]))
    );
    assert_eq!(unify(&v("x"), &app("f", vec![v("x")])), None);
    assert_eq!(unify(&c("a"), &c("a")), Some(Substitution::new()));
}

#[test]
fn replace_examples() {
    let t = app("plus", vec![c("0"), v("y")]);
    assert_eq!(t.replace_at(&[0], app("S", vec![c("0")])).unwrap(), app("plus", vec![app("S", vec![c("0")]), v("y")]));
    let p = Prop::atom("P", vec![app("plus", vec![c("0"), c("0")])]);
    assert_eq!(p.replace_at(&[0, 0], c("0")).unwrap(), p);
    let pa = Prop::atom("P", vec![c("a")]);
    assert!(matches!(pa.replace_at(&[3], c("b")), Err(TermError::InvalidPosition(_))));
    assert_eq!(Position::root().child(0).concat(&Position(vec![1])), Position(vec![0, 1]));
}

// Terms over x, y, z, constants a, b, unary f and binary g.
fn term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(v("x")),
        Just(v("y")),
        Just(v("z")),
        Just(c("a")),
        Just(c("b")),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| app("g", vec![s, t])),
        ]
    })
}

fn substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::vec((prop_oneof![Just("x"), Just("y"), Just("z")], term(2)), 0..3)
        .prop_map(|pairs| pairs.into_iter().map(|(x, t)| (name(x), t)).collect())
}

fn vars_of(t: &Term) -> Vec<String> {
    t.free_vars().into_iter().map(|n| n.to_string()).collect()
}

/// Ground terms used to enumerate unifiers.
fn small_ground() -> Vec<Term> {
    vec![c("a"), c("b"), app("f", vec![c("a")]), app("f", vec![c("b")]), app("g", vec![c("a"), c("b")])]
}

proptest! {
    #[test]
    fn composition(t in term(3), s1 in substitution(), s2 in substitution()) {
        prop_assert_eq!(s2.apply(&s1.apply(&t)), s1.and_then(&s2).apply(&t));
    }

    #[test]
    fn match_recovers_the_instance(p in term(3), s in substitution()) {
        let instance = s.apply(&p);
        let m = match_pattern(&p, &instance);
        prop_assert!(m.is_some());
        let m = m.unwrap();
        prop_assert_eq!(m.apply(&p), instance);
        let vars: Vec<_> = p.free_vars().into_iter().collect();
        let expected = s.restrict(vars.iter());
        // identity bindings are left out of a match
        for x in &vars {
            prop_assert_eq!(m.get(x).cloned().unwrap_or_else(|| Term::var(x)), expected.get(x).cloned().unwrap_or_else(|| Term::var(x)));
        }
    }

    #[test]
    fn unifiers_unify_and_are_most_general(t in term(2), u in term(2)) {
        let mut vars = vars_of(&t);
        vars.extend(vars_of(&u));
        vars.sort();
        vars.dedup();
        let pool = small_ground();
        let mgu = unify(&t, &u);
        if let Some(s) = &mgu {
            prop_assert_eq!(s.apply(&t), s.apply(&u));
        }
        // every ground unifier over the pool is an instance of the mgu
        let mut choice = vec![0usize; vars.len()];
        loop {
            let tau: Substitution = vars.iter().zip(&choice).map(|(x, &i)| (name(x), pool[i].clone())).collect();
            if tau.apply(&t) == tau.apply(&u) {
                let s = mgu.as_ref();
                prop_assert!(s.is_some(), "{} unifies but no mgu was found", tau);
                let s = s.unwrap();
                let tuple = |sub: &Substitution| app("tuple", vars.iter().map(|x| sub.apply(&Term::var(x))).collect());
                prop_assert!(match_pattern(&tuple(s), &tuple(&tau)).is_some(), "{} is not an instance of {}", tau, s);
            }
            let mut k = 0;
            while k < choice.len() && choice[k] + 1 == pool.len() {
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
            choice[k] += 1;
        }
    }
}

// Named propositions with their own alpha-equivalence, as an oracle.
#[derive(Debug, Clone)]
enum Named {
    Atom(&'static str, Vec<&'static str>),
    Bot,
    Imp(Box<Named>, Box<Named>),
    And(Box<Named>, Box<Named>),
    All(&'static str, Box<Named>),
    Ex(&'static str, Box<Named>),
}

fn to_prop(n: &Named) -> Prop {
    match n {
        Named::Atom(p, args) => Prop::atom(p, args.iter().map(|x| v(x)).collect()),
        Named::Bot => Prop::Bottom,
        Named::Imp(a, b) => Prop::implies(to_prop(a), to_prop(b)),
        Named::And(a, b) => Prop::and(to_prop(a), to_prop(b)),
        Named::All(x, a) => Prop::forall(x, to_prop(a)),
        Named::Ex(x, a) => Prop::exists(x, to_prop(a)),
    }
}

/// De Bruijn rendering: bound variables by binder distance, free ones by name.
fn debruijn(n: &Named, env: &mut Vec<&'static str>, out: &mut String) {
    match n {
        Named::Atom(p, args) => {
            out.push_str(p);
            for x in args {
                match env.iter().rev().position(|y| y == x) {
                    Some(i) => out.push_str(&format!(" #{i}")),
                    None => out.push_str(&format!(" {x}")),
                }
            }
            out.push(';');
        }
        Named::Bot => out.push_str("bot;"),
        Named::Imp(a, b) | Named::And(a, b) => {
            out.push_str(if matches!(n, Named::Imp(..)) { "imp(" } else { "and(" });
            debruijn(a, env, out);
            debruijn(b, env, out);
            out.push(')');
        }
        Named::All(x, a) | Named::Ex(x, a) => {
            out.push_str(if matches!(n, Named::All(..)) { "all(" } else { "ex(" });
            env.push(x);
            debruijn(a, env, out);
            env.pop();
            out.push(')');
        }
    }
}

fn oracle_alpha(a: &Named, b: &Named) -> bool {
    let (mut x, mut y) = (String::new(), String::new());
    debruijn(a, &mut Vec::new(), &mut x);
    debruijn(b, &mut Vec::new(), &mut y);
    x == y
}

fn named(depth: u32) -> impl Strategy<Value = Named> {
    let var = prop_oneof![Just("x"), Just("y"), Just("z")];
    let leaf = prop_oneof![
        var.clone().prop_map(|x| Named::Atom("P", vec![x])),
        (var.clone(), var.clone()).prop_map(|(x, y)| Named::Atom("Q", vec![x, y])),
        Just(Named::Bot),
    ];
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Named::Imp(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Named::And(Box::new(a), Box::new(b))),
            (var.clone(), inner.clone()).prop_map(|(x, a)| Named::All(x, Box::new(a))),
            (var.clone(), inner).prop_map(|(x, a)| Named::Ex(x, Box::new(a))),
        ]
    })
}

/// `n` with binders renamed to `w` wherever `blocked` allows it.
fn rename_binders(n: &Named, blocked: &dyn Fn(&Named) -> bool) -> Named {
    match n {
        Named::Atom(..) | Named::Bot => n.clone(),
        Named::Imp(a, b) => Named::Imp(Box::new(rename_binders(a, blocked)), Box::new(rename_binders(b, blocked))),
        Named::And(a, b) => Named::And(Box::new(rename_binders(a, blocked)), Box::new(rename_binders(b, blocked))),
        Named::All(x, a) | Named::Ex(x, a) => {
            let body = rename_binders(a, blocked);
            let (x, renamed) = if blocked(&body) { (*x, body) } else { ("w", substitute_named(&body, x, "w")) };
            if matches!(n, Named::All(..)) {
                Named::All(x, Box::new(renamed))
            } else {
                Named::Ex(x, Box::new(renamed))
            }
        }
    }
}

fn mentions_w(n: &Named) -> bool {
    match n {
        Named::Atom(_, args) => args.contains(&"w"),
        Named::Bot => false,
        Named::Imp(a, b) | Named::And(a, b) => mentions_w(a) || mentions_w(b),
        Named::All(x, a) | Named::Ex(x, a) => *x == "w" || mentions_w(a),
    }
}

fn substitute_named(n: &Named, from: &'static str, to: &'static str) -> Named {
    match n {
        Named::Atom(p, args) => Named::Atom(p, args.iter().map(|a| if *a == from { to } else { a }).collect()),
        Named::Bot => Named::Bot,
        Named::Imp(a, b) => Named::Imp(Box::new(substitute_named(a, from, to)), Box::new(substitute_named(b, from, to))),
        Named::And(a, b) => Named::And(Box::new(substitute_named(a, from, to)), Box::new(substitute_named(b, from, to))),
        Named::All(x, _) | Named::Ex(x, _) if *x == from => n.clone(),
        Named::All(x, a) => Named::All(x, Box::new(substitute_named(a, from, to))),
        Named::Ex(x, a) => Named::Ex(x, Box::new(substitute_named(a, from, to))),
    }
}

proptest! {
    #[test]
    fn alpha_agrees_with_de_bruijn_oracle(a in named(5), b in named(5)) {
        let (pa, pb) = (to_prop(&a), to_prop(&b));
        prop_assert_eq!(pa == pb, oracle_alpha(&a, &b));
        // reflexive and symmetric
        prop_assert_eq!(&pa, &to_prop(&a));
        prop_assert_eq!(pa == pb, pb == pa);
    }

    #[test]
    fn renaming_binders_preserves_alpha(a in named(5)) {
        let renamed = rename_binders(&a, &mentions_w);
        prop_assert!(oracle_alpha(&a, &renamed));
        prop_assert_eq!(to_prop(&a), to_prop(&renamed));
    }

    #[test]
    fn alpha_is_transitive(a in named(4), b in named(4), c in named(4)) {
        let (pa, pb, pc) = (to_prop(&a), to_prop(&b), to_prop(&c));
        let b2 = rename_binders(&a, &mentions_w);
        prop_assert_eq!(&pa, &to_prop(&b2));
        if pa == pb && pb == pc {
            prop_assert_eq!(pa, pc);
        }
    }

    #[test]
    fn binary_ordering_is_consistent(a in named(4), b in named(4)) {
        let mut m = BTreeMap::new();
        m.insert(to_prop(&a), 1);
        m.insert(to_prop(&b), 2);
        prop_assert_eq!(m.len() == 1, to_prop(&a) == to_prop(&b));
    }
}
