//! Untyped λ-terms extended with logical connectives, first-order
//! quantifiers, predicate atoms and variable-free operators, with
//! capture-avoiding β-normalization.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::vf::VfOp;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// Individual constant, e.g. `ann` under constant-style proper nouns.
    Const(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pred(String, Vec<Term>),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Imp(Box<Term>, Box<Term>),
    Forall(String, Box<Term>),
    Exists(String, Box<Term>),
    Vf(VfOp, Vec<Term>),
    VfLemma(String),
}

pub fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

pub fn lam(x: &str, body: Term) -> Term {
    Term::Lam(x.to_string(), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

pub fn app2(f: Term, a: Term, b: Term) -> Term {
    app(app(f, a), b)
}

pub fn pred(lemma: &str, args: Vec<Term>) -> Term {
    Term::Pred(lemma.to_string(), args)
}

pub fn not(t: Term) -> Term {
    Term::Not(Box::new(t))
}

pub fn imp(a: Term, b: Term) -> Term {
    Term::Imp(Box::new(a), Box::new(b))
}

pub fn forall(x: &str, body: Term) -> Term {
    Term::Forall(x.to_string(), Box::new(body))
}

pub fn exists(x: &str, body: Term) -> Term {
    Term::Exists(x.to_string(), Box::new(body))
}

/// `λx.lemma(x)`
pub fn unary(lemma: &str) -> Term {
    lam("x", pred(lemma, vec![var("x")]))
}

/// n-ary conjunction with nested conjunctions spliced in.
pub fn and(parts: Vec<Term>) -> Term {
    flat(parts, true)
}

pub fn or(parts: Vec<Term>) -> Term {
    flat(parts, false)
}

fn flat(parts: Vec<Term>, conj: bool) -> Term {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match (p, conj) {
            (Term::And(inner), true) | (Term::Or(inner), false) => out.extend(inner),
            (p, _) => out.push(p),
        }
    }
    if out.len() == 1 {
        return out.pop().unwrap();
    }
    if conj {
        Term::And(out)
    } else {
        Term::Or(out)
    }
}

impl Term {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, b) | Term::Forall(x, b) | Term::Exists(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            t => t.children().for_each(|c| c.collect_free(bound, out)),
        }
    }

    /// Direct subterms, excluding binder names.
    pub fn children(&self) -> Box<dyn Iterator<Item = &Term> + '_> {
        match self {
            Term::Var(_) | Term::Const(_) | Term::VfLemma(_) => Box::new(std::iter::empty()),
            Term::Lam(_, b) | Term::Not(b) | Term::Forall(_, b) | Term::Exists(_, b) => {
                Box::new(std::iter::once(b.as_ref()))
            }
            Term::App(f, a) | Term::Imp(f, a) => Box::new([f.as_ref(), a.as_ref()].into_iter()),
            Term::Pred(_, args) | Term::And(args) | Term::Or(args) | Term::Vf(_, args) => {
                Box::new(args.iter())
            }
        }
    }

    /// True if no subterm is a β-redex.
    pub fn is_normal(&self) -> bool {
        match self {
            Term::App(f, _) if matches!(**f, Term::Lam(..)) => false,
            t => t.children().all(|c| c.is_normal()),
        }
    }

    fn map_children(self, f: &mut impl FnMut(Term) -> Result<Term>) -> Result<Term> {
        Ok(match self {
            t @ (Term::Var(_) | Term::Const(_) | Term::VfLemma(_)) => t,
            Term::Lam(x, b) => Term::Lam(x, Box::new(f(*b)?)),
            Term::Forall(x, b) => Term::Forall(x, Box::new(f(*b)?)),
            Term::Exists(x, b) => Term::Exists(x, Box::new(f(*b)?)),
            Term::Not(b) => Term::Not(Box::new(f(*b)?)),
            Term::App(a, b) => Term::App(Box::new(f(*a)?), Box::new(f(*b)?)),
            Term::Imp(a, b) => Term::Imp(Box::new(f(*a)?), Box::new(f(*b)?)),
            Term::Pred(l, args) => Term::Pred(l, args.into_iter().map(&mut *f).collect::<Result<_>>()?),
            Term::Vf(op, args) => Term::Vf(op, args.into_iter().map(&mut *f).collect::<Result<_>>()?),
            Term::And(args) => and(args.into_iter().map(&mut *f).collect::<Result<_>>()?),
            Term::Or(args) => or(args.into_iter().map(&mut *f).collect::<Result<_>>()?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Leftmost-outermost redex first.
    #[default]
    NormalOrder,
    /// Arguments are normalized before they are substituted.
    ApplicativeOrder,
}

pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// A β-normalizer. Fresh names are drawn from a per-instance counter, so
/// independent normalizations never share state.
pub struct Normalizer {
    strategy: Strategy,
    max_steps: usize,
    steps: usize,
    fresh: usize,
}

impl Normalizer {
    pub fn new(strategy: Strategy, max_steps: usize) -> Normalizer {
        Normalizer {
            strategy,
            max_steps,
            steps: 0,
            fresh: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn normalize(&mut self, t: Term) -> Result<Term> {
        match self.strategy {
            Strategy::NormalOrder => self.nf(t),
            Strategy::ApplicativeOrder => self.nf_applicative(t),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::NonNormalizing(self.max_steps));
        }
        Ok(())
    }

    fn nf(&mut self, mut t: Term) -> Result<Term> {
        loop {
            match t {
                Term::App(f, a) => match self.whnf(*f)? {
                    Term::Lam(x, body) => {
                        self.tick()?;
                        t = self.subst(*body, &x, &a);
                    }
                    head if is_neutral(&head) => return Ok(app(self.nf(head)?, self.nf(*a)?)),
                    head => return Err(arity(&head, &a)),
                },
                t => return t.map_children(&mut |c| self.nf(c)),
            }
        }
    }

    fn whnf(&mut self, mut t: Term) -> Result<Term> {
        loop {
            match t {
                Term::App(f, a) => match self.whnf(*f)? {
                    Term::Lam(x, body) => {
                        self.tick()?;
                        t = self.subst(*body, &x, &a);
                    }
                    head => return Ok(Term::App(Box::new(head), a)),
                },
                t => return Ok(t),
            }
        }
    }

    fn nf_applicative(&mut self, mut t: Term) -> Result<Term> {
        loop {
            match t {
                Term::App(f, a) => {
                    let f = self.nf_applicative(*f)?;
                    let a = self.nf_applicative(*a)?;
                    match f {
                        Term::Lam(x, body) => {
                            self.tick()?;
                            t = self.subst(*body, &x, &a);
                        }
                        head if is_neutral(&head) => return Ok(app(head, a)),
                        head => return Err(arity(&head, &a)),
                    }
                }
                t => return t.map_children(&mut |c| self.nf_applicative(c)),
            }
        }
    }

    fn fresh_name(&mut self, base: &str) -> String {
        self.fresh += 1;
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
        format!("{stem}_{}", self.fresh)
    }

    /// `t[x := s]`, renaming binders that would capture free variables of `s`.
    pub fn subst(&mut self, t: Term, x: &str, s: &Term) -> Term {
        let fv = s.free_vars();
        self.subst_with(t, x, s, &fv)
    }

    fn subst_with(&mut self, t: Term, x: &str, s: &Term, fv: &BTreeSet<String>) -> Term {
        match t {
            Term::Var(y) => {
                if y == x {
                    s.clone()
                } else {
                    Term::Var(y)
                }
            }
            Term::Lam(..) | Term::Forall(..) | Term::Exists(..) => {
                let (kind, y, b) = split_binder(t);
                if y == x {
                    return rebind(&kind, y, b);
                }
                if fv.contains(&y) {
                    let z = self.fresh_name(&y);
                    let b = self.subst_with(b, &y, &Term::Var(z.clone()), &BTreeSet::from([z.clone()]));
                    let b = self.subst_with(b, x, s, fv);
                    rebind(&kind, z, b)
                } else {
                    let b = self.subst_with(b, x, s, fv);
                    rebind(&kind, y, b)
                }
            }
            t => t
                .map_children(&mut |c| Ok(self.subst_with(c, x, s, fv)))
                .expect("substitution is infallible"),
        }
    }
}

#[derive(Clone, Copy)]
enum BinderKind {
    Lam,
    Forall,
    Exists,
}

fn split_binder(t: Term) -> (BinderKind, String, Term) {
    match t {
        Term::Lam(y, b) => (BinderKind::Lam, y, *b),
        Term::Forall(y, b) => (BinderKind::Forall, y, *b),
        Term::Exists(y, b) => (BinderKind::Exists, y, *b),
        _ => unreachable!(),
    }
}

fn rebind(kind: &BinderKind, y: String, b: Term) -> Term {
    match kind {
        BinderKind::Lam => Term::Lam(y, Box::new(b)),
        BinderKind::Forall => Term::Forall(y, Box::new(b)),
        BinderKind::Exists => Term::Exists(y, Box::new(b)),
    }
}

/// Heads that may stand in an application without being a redex.
fn is_neutral(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, _) => is_neutral(f),
        _ => false,
    }
}

fn arity(head: &Term, arg: &Term) -> Error {
    Error::Arity {
        head: head.to_string(),
        arg: arg.to_string(),
    }
}

/// β-normal form in normal order, with canonical bound-variable names.
pub fn beta_normalize(t: Term) -> Result<Term> {
    let nf = Normalizer::new(Strategy::NormalOrder, DEFAULT_MAX_STEPS).normalize(t)?;
    Ok(canonicalize(&nf))
}

/// Renames quantifier-bound variables to `x1, x2, …` and λ-bound variables
/// to `v1, v2, …`, each in order of first binder in a pre-order walk.
/// α-equivalent terms have identical canonical forms.
pub fn canonicalize(t: &Term) -> Term {
    let mut c = Canon {
        env: HashMap::new(),
        quant: 0,
        lam: 0,
    };
    c.go(t)
}

struct Canon {
    env: HashMap<String, Vec<String>>,
    quant: usize,
    lam: usize,
}

impl Canon {
    fn go(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(
                self.env
                    .get(x)
                    .and_then(|s| s.last())
                    .cloned()
                    .unwrap_or_else(|| x.clone()),
            ),
            Term::Lam(x, b) | Term::Forall(x, b) | Term::Exists(x, b) => {
                let name = if matches!(t, Term::Lam(..)) {
                    self.lam += 1;
                    format!("v{}", self.lam)
                } else {
                    self.quant += 1;
                    format!("x{}", self.quant)
                };
                self.env.entry(x.clone()).or_default().push(name.clone());
                let body = Box::new(self.go(b));
                self.env.get_mut(x).unwrap().pop();
                match t {
                    Term::Lam(..) => Term::Lam(name, body),
                    Term::Forall(..) => Term::Forall(name, body),
                    _ => Term::Exists(name, body),
                }
            }
            t => t
                .clone()
                .map_children(&mut |c| Ok(self.go(&c)))
                .expect("canonicalization is infallible"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[Term], sep: &str) -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Term::Var(x) | Term::Const(x) | Term::VfLemma(x) => f.write_str(x),
            Term::Lam(x, b) => write!(f, "λ{x}.{b}"),
            Term::App(a, b) => write!(f, "({a} {b})"),
            Term::Pred(l, args) => {
                write!(f, "{l}(")?;
                list(f, args, ",")?;
                f.write_str(")")
            }
            Term::Not(b) => write!(f, "¬{b}"),
            Term::And(xs) => {
                f.write_str("(")?;
                list(f, xs, " ∧ ")?;
                f.write_str(")")
            }
            Term::Or(xs) => {
                f.write_str("(")?;
                list(f, xs, " ∨ ")?;
                f.write_str(")")
            }
            Term::Imp(a, b) => write!(f, "({a} → {b})"),
            Term::Forall(x, b) => write!(f, "∀{x}.{b}"),
            Term::Exists(x, b) => write!(f, "∃{x}.{b}"),
            Term::Vf(op, args) => {
                write!(f, "{op}(")?;
                list(f, args, ",")?;
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_with_constant() {
        let t = app(lam("F", app(var("F"), Term::Const("ann".into()))), unary("run"));
        assert_eq!(beta_normalize(t).unwrap(), pred("run", vec![Term::Const("ann".into())]));
    }

    #[test]
    fn every_applied_to_dog_and_run() {
        let every = lam(
            "F",
            lam("G", forall("x", imp(app(var("F"), var("x")), app(var("G"), var("x"))))),
        );
        let t = app2(every, unary("dog"), unary("run"));
        let expected = forall(
            "x1",
            imp(pred("dog", vec![var("x1")]), pred("run", vec![var("x1")])),
        );
        assert_eq!(beta_normalize(t).unwrap(), expected);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λy.λx.y) x  must not become λx.x
        let t = app(lam("y", lam("x", var("y"))), var("x"));
        let n = Normalizer::new(Strategy::NormalOrder, 10).normalize(t).unwrap();
        match n {
            Term::Lam(z, body) => {
                assert_ne!(z, "x");
                assert_eq!(*body, var("x"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn quantifier_capture_is_avoided() {
        // (λP.∃x.P) applied to a term mentioning free x
        let t = app(lam("P", exists("x", and(vec![var("P"), pred("dog", vec![var("x")])]))), pred("run", vec![var("x")]));
        let n = Normalizer::new(Strategy::NormalOrder, 10).normalize(t).unwrap();
        let Term::Exists(z, body) = n else { panic!() };
        assert_ne!(z, "x");
        assert_eq!(*body, and(vec![pred("run", vec![var("x")]), pred("dog", vec![var(&z)])]));
    }

    #[test]
    fn applying_a_predicate_is_an_arity_error() {
        let t = app(pred("dog", vec![var("x")]), var("y"));
        assert!(matches!(beta_normalize(t), Err(Error::Arity { .. })));
    }

    #[test]
    fn omega_does_not_normalize() {
        let w = lam("x", app(var("x"), var("x")));
        let t = app(w.clone(), w);
        assert!(matches!(beta_normalize(t), Err(Error::NonNormalizing(_))));
    }

    #[test]
    fn alpha_equivalent_terms_canonicalize_identically() {
        let a = exists("y", lam("q", pred("p", vec![var("y"), var("q")])));
        let b = exists("z", lam("r", pred("p", vec![var("z"), var("r")])));
        assert_eq!(canonicalize(&a), canonicalize(&b));
    }

    #[test]
    fn conjunctions_flatten() {
        let t = and(vec![and(vec![var("a"), var("b")]), var("c")]);
        assert_eq!(t, Term::And(vec![var("a"), var("b"), var("c")]));
    }
}
