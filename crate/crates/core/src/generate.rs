//! Random ground rewrite systems and finite term universes.

use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rewrite::{RewriteRule, RewriteSystem};
use crate::term::{Prop, Signature, Term};

pub const CONSTANTS: [&str; 5] = ["a", "b", "c", "d", "e"];
pub const UNARY: &str = "f";
pub const PREDICATE: &str = "P";

/// Bounds for [`generate_random_system`]. Depth counts function symbols
/// above a constant, so `a` has depth 0 and `f(f(a))` depth 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub min_rules: usize,
    pub max_rules: usize,
    pub max_depth: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { min_rules: 2, max_rules: 6, max_depth: 2 }
    }
}

/// Constants `a`..`e`, the unary `f` and the unary predicate `P`.
pub fn generator_signature() -> Signature {
    let mut sig = Signature::new();
    for c in CONSTANTS {
        sig.add_function(c, 0).expect("fresh symbol");
    }
    sig.add_function(UNARY, 1).expect("fresh symbol");
    sig.add_predicate(PREDICATE, 1).expect("fresh symbol");
    sig
}

fn random_term(rng: &mut ChaCha8Rng, max_depth: usize) -> Term {
    let depth = rng.random_range(0..=max_depth);
    let mut t = Term::constant(CONSTANTS[rng.random_range(0..CONSTANTS.len())]);
    for _ in 0..depth {
        t = Term::app(UNARY, vec![t]);
    }
    t
}

/// A ground system, a deterministic function of `seed`. Rules are
/// distinct and never of the form `t -> t`.
pub fn generate_random_system(seed: u64, params: GenParams) -> RewriteSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(params.min_rules..=params.max_rules);
    let mut rules: Vec<RewriteRule> = Vec::new();
    while rules.len() < n {
        let lhs = random_term(&mut rng, params.max_depth);
        let rhs = random_term(&mut rng, params.max_depth);
        if lhs != rhs && !rules.iter().any(|r| r.lhs == lhs && r.rhs == rhs) {
            rules.push(RewriteRule::new(lhs, rhs));
        }
    }
    RewriteSystem::new(generator_signature(), rules).expect("ground rules over the generator signature")
}

/// Ground terms of depth at most `depth` over the functions of `sig`, in
/// order of increasing depth, stopping after `cap` terms.
pub fn ground_terms(sig: &Signature, depth: usize, cap: usize) -> Vec<Term> {
    let mut out: Vec<Term> = sig.constants();
    out.truncate(cap);
    let mut seen: BTreeSet<Term> = out.iter().cloned().collect();
    let functions: Vec<(String, usize)> =
        sig.functions().filter(|(_, n)| *n > 0).map(|(f, n)| (f.to_string(), n)).collect();
    for _ in 0..depth {
        let previous = out.clone();
        for (f, n) in &functions {
            let mut args = vec![0usize; *n];
            'tuples: loop {
                if out.len() >= cap {
                    return out;
                }
                let t = Term::app(f, args.iter().map(|i| previous[*i].clone()).collect());
                if seen.insert(t.clone()) {
                    out.push(t);
                }
                for k in (0..*n).rev() {
                    args[k] += 1;
                    if args[k] < previous.len() {
                        continue 'tuples;
                    }
                    args[k] = 0;
                }
                break;
            }
        }
        if out.len() == previous.len() {
            break;
        }
    }
    out
}

/// Every ground subterm of the given propositions and of the rules.
pub fn problem_terms<'a>(system: &RewriteSystem, props: impl IntoIterator<Item = &'a Prop>) -> Vec<Term> {
    let mut out = BTreeSet::new();
    let mut add = |t: &Term| {
        for (_, s) in t.subterms() {
            if s.is_ground() {
                out.insert(s.clone());
            }
        }
    };
    for r in system.rules() {
        add(&r.lhs);
        add(&r.rhs);
    }
    for p in props {
        for t in p.closed_subterms() {
            add(&t);
        }
    }
    out.into_iter().collect()
}

/// The default analysis universe: ground subterms of the problem plus all
/// ground terms up to `depth`, capped.
pub fn default_universe<'a>(
    system: &RewriteSystem,
    props: impl IntoIterator<Item = &'a Prop>,
    depth: usize,
    cap: usize,
) -> Vec<Term> {
    let mut seen = BTreeSet::new();
    problem_terms(system, props)
        .into_iter()
        .chain(ground_terms(system.signature(), depth, cap))
        .filter(|t| seen.insert(t.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_system() {
        let p = GenParams::default();
        assert_eq!(generate_random_system(7, p), generate_random_system(7, p));
    }

    #[test]
    fn generator_universe_has_twenty_terms() {
        assert_eq!(ground_terms(&generator_signature(), 3, 1000).len(), 20);
    }

    #[test]
    fn ground_terms_respect_the_cap() {
        let mut sig = Signature::new();
        sig.add_function("0", 0).unwrap();
        sig.add_function("plus", 2).unwrap();
        assert_eq!(ground_terms(&sig, 1, 1000).len(), 2);
        assert_eq!(ground_terms(&sig, 2, 1000).len(), 2 + 3);
        assert_eq!(ground_terms(&sig, 5, 10).len(), 10);
    }
}
