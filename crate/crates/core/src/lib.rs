//! Asymmetric deduction modulo a term rewrite system.
//!
//! Terms and propositions ([`term`]), the rewrite relation and its
//! analyses ([`rewrite`]), the sequent kernel ([`kernel`]), decision
//! procedures for the atomic fragments ([`atomic`]) and the cut
//! elimination engines ([`elim`]).

pub mod rewrite;
pub mod subst;
pub mod term;
pub mod kernel;
pub mod atomic;
pub mod elim;
pub mod generate;
pub mod suites;
pub mod syntax;
