use crate::atomic::{SymProof, SymRule};
use crate::elim::{ScriptedSplit, StepPolicy};
use crate::kernel::{Proof, Rule, Sequent, RULE_TAGS};
use crate::rewrite::{RewriteRule, RewriteSystem};
use crate::term::{name, Name, Prop, Signature, Term};

use super::lexer::{lex, Tok, Token};
use super::{ErrorKind, ParseError, ProblemFile};

pub(crate) struct Parser<'s> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'s Signature,
    // quantifier and annotation variables in scope, innermost last
    scope: Vec<Name>,
}

impl<'s> Parser<'s> {
    pub(crate) fn new(text: &str, sig: &'s Signature) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, sig, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn error_at(&self, at: (usize, usize), kind: ErrorKind, message: String) -> ParseError {
        ParseError { line: at.0, col: at.1, kind, message }
    }

    fn error(&self, message: String) -> ParseError {
        self.error_at(self.here(), ErrorKind::Syntax, message)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected an identifier, found {}", other.describe()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => Err(self.error(format!("unexpected {} after the end", other.describe()))),
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.here();
        let f = self.ident()?;
        if self.eat(&Tok::LParen) {
            let mut args = vec![self.term()?];
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            return match self.sig.function_arity(&f) {
                Some(n) if n == args.len() => Ok(Term::app(&f, args)),
                Some(n) => Err(self.error_at(
                    at,
                    ErrorKind::Arity,
                    format!("`{f}` takes {n} arguments, {} given", args.len()),
                )),
                None => Err(self.error_at(at, ErrorKind::Unbound, format!("undeclared function symbol `{f}`"))),
            };
        }
        if self.scope.iter().any(|x| **x == *f) {
            return Ok(Term::var(&f));
        }
        match self.sig.function_arity(&f) {
            Some(0) => Ok(Term::constant(&f)),
            Some(n) => Err(self.error_at(at, ErrorKind::Arity, format!("`{f}` takes {n} arguments, none given"))),
            None if f.chars().all(|c| c.is_ascii_digit()) => {
                if !self.sig.has_numerals() {
                    return Err(self.error_at(
                        at,
                        ErrorKind::Unbound,
                        format!("numeral `{f}` needs `0/0` and `S/1` declared"),
                    ));
                }
                let n: usize = f.parse().map_err(|_| self.error_at(at, ErrorKind::Syntax, "numeral too large".into()))?;
                Ok(Term::numeral(n))
            }
            None if self.sig.predicate_arity(&f).is_some() => {
                Err(self.error_at(at, ErrorKind::Syntax, format!("predicate `{f}` used as a term")))
            }
            None => Ok(Term::var(&f)),
        }
    }

    pub(crate) fn prop(&mut self) -> Result<Prop, ParseError> {
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        let left = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let right = self.prop()?;
            return Ok(Prop::implies(left, right));
        }
        Ok(left)
    }

    fn quantifier(&mut self) -> Result<Option<Prop>, ParseError> {
        let forall = matches!(self.peek(), Tok::Ident(s) if s == "forall");
        let exists = matches!(self.peek(), Tok::Ident(s) if s == "exists");
        if !(forall || exists) || !matches!(self.peek_at(1), Tok::Ident(_)) || self.peek_at(2) != &Tok::Dot {
            return Ok(None);
        }
        self.bump();
        let x = self.ident()?;
        self.expect(Tok::Dot)?;
        self.scope.push(name(&x));
        let body = self.prop();
        self.scope.pop();
        let body = body?;
        Ok(Some(if forall { Prop::forall(&x, body) } else { Prop::exists(&x, body) }))
    }

    fn disjunction(&mut self) -> Result<Prop, ParseError> {
        let left = self.conjunction()?;
        if self.eat(&Tok::Or) {
            let right = match self.quantifier()? {
                Some(q) => q,
                None => self.disjunction()?,
            };
            return Ok(Prop::or(left, right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Prop, ParseError> {
        let left = self.unary()?;
        if self.eat(&Tok::And) {
            let right = match self.quantifier()? {
                Some(q) => q,
                None => self.conjunction()?,
            };
            return Ok(Prop::and(left, right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Prop, ParseError> {
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Prop::not(self.unary()?))
            }
            Tok::Bottom => {
                self.bump();
                Ok(Prop::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let p = self.prop()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(_) => self.atom(),
            other => Err(self.error(format!("expected a proposition, found {}", other.describe()))),
        }
    }

    fn atom(&mut self) -> Result<Prop, ParseError> {
        let at = self.here();
        let p = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            args.push(self.term()?);
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        match self.sig.predicate_arity(&p) {
            Some(n) if n == args.len() => Ok(Prop::atom(&p, args)),
            Some(n) => Err(self.error_at(at, ErrorKind::Arity, format!("`{p}` takes {n} arguments, {} given", args.len()))),
            None => Err(self.error_at(at, ErrorKind::Unbound, format!("undeclared predicate `{p}`"))),
        }
    }

    fn props_until(&mut self, stop: &[Tok]) -> Result<Vec<Prop>, ParseError> {
        let mut out = Vec::new();
        if stop.contains(self.peek()) {
            return Ok(out);
        }
        out.push(self.prop()?);
        while self.eat(&Tok::Comma) {
            out.push(self.prop()?);
        }
        Ok(out)
    }

    pub(crate) fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let gamma = self.props_until(&[Tok::Turnstile])?;
        self.expect(Tok::Turnstile)?;
        let delta = self.props_until(&[Tok::Semi, Tok::RParen, Tok::Eof])?;
        Ok(Sequent::new(gamma, delta))
    }

    fn conclusion(&mut self) -> Result<Sequent, ParseError> {
        self.expect(Tok::LParen)?;
        let s = self.sequent()?;
        self.expect(Tok::RParen)?;
        Ok(s)
    }

    // `{A; B; ...}`, recorded as token offsets and parsed once the rule
    // tag says what each entry is. `{}` or nothing is empty.
    fn braces(&mut self) -> Result<Vec<Annot>, ParseError> {
        if !self.eat(&Tok::LBrace) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.push(Annot { toks_from: self.pos });
            self.skip_annotation()?;
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            self.expect(Tok::Semi)?;
        }
    }

    // Skips to the next `;` or `}` at bracket depth zero.
    fn skip_annotation(&mut self) -> Result<(), ParseError> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::LParen => depth += 1,
                Tok::RParen if depth > 0 => depth -= 1,
                Tok::Semi | Tok::RBrace if depth == 0 => return Ok(()),
                Tok::Eof => return Err(self.error("unterminated annotation".into())),
                _ => {}
            }
            self.bump();
        }
    }

    fn reparse<T>(&mut self, a: &Annot, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        let saved = self.pos;
        self.pos = a.toks_from;
        let r = f(self);
        let ok = r.is_ok() && matches!(self.peek(), Tok::Semi | Tok::RBrace);
        let end = self.here();
        self.pos = saved;
        match r {
            Ok(_) if !ok => Err(self.error_at(end, ErrorKind::Syntax, "unexpected tokens in annotation".into())),
            r => r,
        }
    }

    fn with_var<T>(&mut self, x: &str, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        self.scope.push(name(x));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn rule(&mut self, tag: &str, tag_at: (usize, usize), annots: &[Annot]) -> Result<Rule, ParseError> {
        let want = match tag {
            "weak-left" | "weak-right" | "bot-left" => 0,
            "axiom" | "cut" => 1,
            "contr-left" | "contr-right" | "forall-left" | "exists-right" => 3,
            _ => 2,
        };
        if annots.len() != want {
            return Err(self.error_at(
                tag_at,
                ErrorKind::Syntax,
                format!("`{tag}` takes {want} annotations, {} given", annots.len()),
            ));
        }
        let p = |s: &mut Self, i: usize| s.reparse(&annots[i], Self::prop);
        let var = |s: &mut Self, i: usize| s.reparse(&annots[i], Self::ident);
        Ok(match tag {
            "axiom" => Rule::Axiom { common: p(self, 0)? },
            "cut" => Rule::Cut { cut: p(self, 0)? },
            "contr-left" => Rule::ContrLeft { main: p(self, 0)?, first: p(self, 1)?, second: p(self, 2)? },
            "contr-right" => Rule::ContrRight { main: p(self, 0)?, first: p(self, 1)?, second: p(self, 2)? },
            "weak-left" => Rule::WeakLeft,
            "weak-right" => Rule::WeakRight,
            "bot-left" => Rule::BottomLeft,
            "imp-left" => Rule::ImpLeft { left: p(self, 0)?, right: p(self, 1)? },
            "imp-right" => Rule::ImpRight { left: p(self, 0)?, right: p(self, 1)? },
            "and-left" => Rule::AndLeft { left: p(self, 0)?, right: p(self, 1)? },
            "and-right" => Rule::AndRight { left: p(self, 0)?, right: p(self, 1)? },
            "or-left" => Rule::OrLeft { left: p(self, 0)?, right: p(self, 1)? },
            "or-right" => Rule::OrRight { left: p(self, 0)?, right: p(self, 1)? },
            "forall-left" | "exists-right" => {
                let x = var(self, 0)?;
                let body = self.with_var(&x, |s| p(s, 1))?;
                let term = self.reparse(&annots[2], Self::term)?;
                let var = name(&x);
                if tag == "forall-left" {
                    Rule::ForallLeft { var, body, term }
                } else {
                    Rule::ExistsRight { var, body, term }
                }
            }
            "forall-right" | "exists-left" => {
                let x = var(self, 0)?;
                let body = self.with_var(&x, |s| p(s, 1))?;
                let var = name(&x);
                if tag == "forall-right" {
                    Rule::ForallRight { var, body }
                } else {
                    Rule::ExistsLeft { var, body }
                }
            }
            other => {
                return Err(self.error_at(
                    tag_at,
                    ErrorKind::Syntax,
                    format!("unknown rule `{other}`, expected one of {}", RULE_TAGS.join(", ")),
                ))
            }
        })
    }

    // `[A -> B -> C; D -> E]`
    fn chains(&mut self) -> Result<Vec<Vec<Prop>>, ParseError> {
        let mut out = Vec::new();
        if !self.eat(&Tok::LBracket) {
            return Ok(out);
        }
        loop {
            let mut chain = vec![self.prop()?];
            while self.eat(&Tok::Arrow) {
                chain.push(self.prop()?);
            }
            out.push(chain);
            if self.eat(&Tok::RBracket) {
                return Ok(out);
            }
            self.expect(Tok::Semi)?;
        }
    }

    pub(crate) fn proof(&mut self) -> Result<Proof, ParseError> {
        self.expect(Tok::LParen)?;
        let tag_at = self.here();
        let tag = self.ident()?;
        if !RULE_TAGS.contains(&tag.as_str()) {
            return Err(self.error_at(
                tag_at,
                ErrorKind::Syntax,
                format!("unknown rule `{tag}`, expected one of {}", RULE_TAGS.join(", ")),
            ));
        }
        let annots = self.braces()?;
        let rule = self.rule(&tag, tag_at, &annots)?;
        let witnesses = self.chains()?;
        let conclusion = self.conclusion()?;
        let mut premises = Vec::new();
        while self.peek() == &Tok::LParen {
            premises.push(self.proof()?);
        }
        self.expect(Tok::RParen)?;
        Ok(Proof { rule, conclusion, premises, witnesses })
    }

    pub(crate) fn sym_proof(&mut self) -> Result<SymProof, ParseError> {
        self.expect(Tok::LParen)?;
        let tag_at = self.here();
        let tag = self.ident()?;
        let pair = |s: &mut Self| -> Result<(Prop, Prop), ParseError> {
            s.expect(Tok::LBrace)?;
            let left = s.prop()?;
            s.expect(Tok::Equiv)?;
            let right = s.prop()?;
            s.expect(Tok::RBrace)?;
            Ok((left, right))
        };
        let rule = match tag.as_str() {
            "axiom" => {
                let (left, right) = pair(self)?;
                SymRule::Axiom { left, right }
            }
            "cut" => {
                let (left, right) = pair(self)?;
                SymRule::Cut { left, right }
            }
            "contr-left" => SymRule::ContrLeft,
            "contr-right" => SymRule::ContrRight,
            "weak-left" => SymRule::WeakLeft,
            "weak-right" => SymRule::WeakRight,
            other => {
                return Err(self.error_at(tag_at, ErrorKind::Syntax, format!("unknown symmetric rule `{other}`")))
            }
        };
        let conclusion = self.conclusion()?;
        let mut premises = Vec::new();
        while self.peek() == &Tok::LParen {
            premises.push(self.sym_proof()?);
        }
        self.expect(Tok::RParen)?;
        Ok(SymProof { rule, conclusion, premises })
    }

    fn policy_entries(&mut self, stop: &Tok) -> Result<StepPolicy, ParseError> {
        let mut policy = StepPolicy::default();
        while self.peek() != stop {
            if self.keyword("no-shortcut") {
                policy.no_shortcut = true;
            } else if self.keyword("on") {
                let cut = self.prop()?;
                if !self.keyword("split") {
                    return Err(self.error(format!("expected `split`, found {}", self.peek().describe())));
                }
                let first = self.prop()?;
                let second = self.prop()?;
                policy.splits.push(ScriptedSplit { cut, first, second });
            } else {
                return Err(self.error(format!("expected `on` or `no-shortcut`, found {}", self.peek().describe())));
            }
            self.eat(&Tok::Semi);
        }
        Ok(policy)
    }

    fn rules(&mut self) -> Result<(Vec<RewriteRule>, (usize, usize)), ParseError> {
        let at = self.here();
        self.expect(Tok::LBrace)?;
        let mut rules = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let label = if matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Colon {
                let n = self.ident()?;
                self.bump();
                Some(n)
            } else {
                None
            };
            let lhs = self.term()?;
            self.expect(Tok::Arrow)?;
            let rhs = self.term()?;
            rules.push(RewriteRule { lhs, rhs, name: label });
            self.eat(&Tok::Semi);
        }
        Ok((rules, at))
    }
}

struct Annot {
    toks_from: usize,
}

fn declarations(p: &mut Parser<'_>) -> Result<Vec<(String, usize, (usize, usize))>, ParseError> {
    let mut out = Vec::new();
    loop {
        let at = p.here();
        let s = p.ident()?;
        p.expect(Tok::Slash)?;
        let n = p.ident()?;
        let arity = n.parse().map_err(|_| p.error_at(at, ErrorKind::Syntax, format!("bad arity `{n}`")))?;
        out.push((s, arity, at));
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(Tok::Semi)?;
    Ok(out)
}

/// Parses a whole problem file. Declarations must precede their uses.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut sig = Signature::new();
    // declarations first, in a throwaway pass, so later blocks see them all
    let toks = lex(text)?;
    let empty = Signature::new();
    let mut p = Parser { toks, pos: 0, sig: &empty, scope: Vec::new() };
    while p.peek() != &Tok::Eof {
        let is_sig = p.keyword("sig");
        if is_sig || p.keyword("pred") {
            for (s, arity, at) in declarations(&mut p)? {
                let r = if is_sig { sig.add_function(&s, arity) } else { sig.add_predicate(&s, arity) };
                r.map_err(|e| p.error_at(at, ErrorKind::Arity, e.to_string()))?;
            }
        } else {
            p.bump();
        }
    }

    let mut p = Parser::new(text, &sig)?;
    let mut rules: Option<Vec<RewriteRule>> = None;
    let mut rules_at = (1, 1);
    let mut file = ProblemFile::empty(sig.clone());
    while p.peek() != &Tok::Eof {
        let at = p.here();
        let kw = p.ident()?;
        match kw.as_str() {
            "sig" | "pred" => {
                declarations(&mut p)?;
            }
            "rules" => {
                if rules.is_some() {
                    return Err(p.error_at(at, ErrorKind::Syntax, "second rules block".into()));
                }
                let (rs, a) = p.rules()?;
                rules = Some(rs);
                rules_at = a;
            }
            "sequent" => {
                file.sequent = Some(p.sequent()?);
                p.expect(Tok::Semi)?;
            }
            "proof" => file.proof = Some(p.proof()?),
            "symproof" => file.symproof = Some(p.sym_proof()?),
            "policy" => {
                p.expect(Tok::LBrace)?;
                file.policy = Some(p.policy_entries(&Tok::RBrace)?);
                p.expect(Tok::RBrace)?;
            }
            other => {
                return Err(p.error_at(
                    at,
                    ErrorKind::Syntax,
                    format!("expected sig, pred, rules, sequent, proof, symproof or policy, found `{other}`"),
                ))
            }
        }
    }
    let err = |e: crate::rewrite::RuleError| p.error_at(rules_at, ErrorKind::Rule, e.to_string());
    file.system = RewriteSystem::new(sig.clone(), rules.unwrap_or_default()).map_err(err)?;
    Ok(file)
}

fn whole<'s, T>(text: &str, sig: &'s Signature, f: impl FnOnce(&mut Parser<'s>) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let t = f(&mut p)?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    whole(text, sig, Parser::term)
}

pub fn parse_prop(text: &str, sig: &Signature) -> Result<Prop, ParseError> {
    whole(text, sig, Parser::prop)
}

pub fn parse_sequent(text: &str, sig: &Signature) -> Result<Sequent, ParseError> {
    whole(text, sig, Parser::sequent)
}

pub fn parse_proof(text: &str, sig: &Signature) -> Result<Proof, ParseError> {
    whole(text, sig, Parser::proof)
}

pub fn parse_sym_proof(text: &str, sig: &Signature) -> Result<SymProof, ParseError> {
    whole(text, sig, Parser::sym_proof)
}

/// Policy files: an optional `no-shortcut` line and entries
/// `on C split C1 C2`, optionally `;`-terminated.
pub fn parse_policy(text: &str, sig: &Signature) -> Result<StepPolicy, ParseError> {
    whole(text, sig, |p| p.policy_entries(&Tok::Eof))
}
