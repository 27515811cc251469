//! Variable-free formulas: prefix trees over fixed-arity operators and
//! uppercase content lemmas. Because every operator has a fixed arity the
//! flat token sequence determines the tree.
//!
//! Interpretation, used by [`vf_to_fol`]: at the top level a quantifier
//! takes two concepts (sets of individuals). Inside a concept position a
//! quantifier takes a concept and a relation, `Q(F, R) = {a | Q x (F x, R(a, x))}`.
//! `NOT`, `AND` and `OR` act pointwise at whatever level they occur, and
//! `INV` swaps the arguments of a relation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fol::{Fol, FolTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VfOp {
    All,
    Exist,
    Two,
    Three,
    And,
    Or,
    Not,
    Inv,
}

impl VfOp {
    pub const ALL: [VfOp; 8] = [
        VfOp::All,
        VfOp::Exist,
        VfOp::Two,
        VfOp::Three,
        VfOp::And,
        VfOp::Or,
        VfOp::Not,
        VfOp::Inv,
    ];

    pub fn arity(self) -> usize {
        match self {
            VfOp::Not | VfOp::Inv => 1,
            _ => 2,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            VfOp::All => "ALL",
            VfOp::Exist => "EXIST",
            VfOp::Two => "TWO",
            VfOp::Three => "THREE",
            VfOp::And => "AND",
            VfOp::Or => "OR",
            VfOp::Not => "NOT",
            VfOp::Inv => "INV",
        }
    }

    pub fn from_token(t: &str) -> Option<VfOp> {
        VfOp::ALL.into_iter().find(|op| op.token() == t)
    }

    pub fn is_quantifier(self) -> bool {
        matches!(self, VfOp::All | VfOp::Exist | VfOp::Two | VfOp::Three)
    }
}

impl fmt::Display for VfOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Vf {
    /// A content lemma, stored lowercase and written uppercase.
    Lemma(String),
    Op(VfOp, Vec<Vf>),
}

impl Vf {
    pub fn lemma(l: &str) -> Vf {
        Vf::Lemma(l.to_lowercase())
    }

    pub fn op(op: VfOp, args: Vec<Vf>) -> Vf {
        assert_eq!(op.arity(), args.len(), "{op} arity");
        Vf::Op(op, args)
    }

    pub fn from_term(t: &crate::lambda::Term) -> Result<Vf> {
        use crate::lambda::Term;
        match t {
            Term::VfLemma(l) => Ok(Vf::lemma(l)),
            Term::Vf(op, args) if args.len() == op.arity() => Ok(Vf::Op(
                *op,
                args.iter().map(Vf::from_term).collect::<Result<_>>()?,
            )),
            other => Err(Error::NotAFormula(other.to_string())),
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.write_tokens(&mut out);
        out
    }

    fn write_tokens(&self, out: &mut Vec<String>) {
        match self {
            Vf::Lemma(l) => out.push(l.to_uppercase()),
            Vf::Op(op, args) => {
                out.push(op.token().to_string());
                args.iter().for_each(|a| a.write_tokens(out));
            }
        }
    }

    pub fn serialize(&self) -> String {
        self.tokens().join(" ")
    }

    /// Arity-driven prefix reading. Error positions are 1-based token indices.
    pub fn parse(text: &str) -> Result<Vf> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.is_empty() {
            return Err(Error::parse(1, "empty formula"));
        }
        let mut pos = 0;
        let f = parse_at(&toks, &mut pos)?;
        if pos < toks.len() {
            return Err(Error::parse(pos + 1, format!("unexpected trailing token {:?}", toks[pos])));
        }
        Ok(f)
    }

    /// Content lemmas in prefix order.
    pub fn lemmas(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Vf, out: &mut Vec<&'a str>) {
            match f {
                Vf::Lemma(l) => out.push(l),
                Vf::Op(_, args) => args.iter().for_each(|a| go(a, out)),
            }
        }
        go(self, &mut out);
        out
    }
}

fn parse_at(toks: &[&str], pos: &mut usize) -> Result<Vf> {
    let t = toks[*pos];
    *pos += 1;
    let Some(op) = VfOp::from_token(t) else {
        if t.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Ok(Vf::lemma(t));
        }
        return Err(Error::parse(*pos, format!("invalid token {t:?}")));
    };
    let mut args = Vec::with_capacity(op.arity());
    for i in 0..op.arity() {
        if *pos >= toks.len() {
            return Err(Error::parse(
                *pos + 1,
                format!("operator {op} missing operand {} of {}", i + 1, op.arity()),
            ));
        }
        args.push(parse_at(toks, pos)?);
    }
    Ok(Vf::Op(op, args))
}

impl fmt::Display for Vf {
    /// Bracketed form, e.g. `EXIST(AND(WHITE,DOG),NOT(RUN))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vf::Lemma(l) => f.write_str(&l.to_uppercase()),
            Vf::Op(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Translation to first-order logic with canonical variable names.
pub fn vf_to_fol(f: &Vf) -> Result<Fol> {
    vf_to_fol_with(f, &BTreeSet::new())
}

/// As [`vf_to_fol`], but `EXIST(PN, G)` with `PN` in `constants` becomes
/// `G(pn)` with `pn` an individual constant rather than an existential.
pub fn vf_to_fol_with(f: &Vf, constants: &BTreeSet<String>) -> Result<Fol> {
    let mut t = Translator { n: 0, constants };
    Ok(t.prop(f)?.canonicalize())
}

struct Translator<'a> {
    n: usize,
    constants: &'a BTreeSet<String>,
}

impl Translator<'_> {
    fn fresh(&mut self) -> String {
        self.n += 1;
        format!("_v{}", self.n)
    }

    fn shape(f: &Vf, ctx: &str) -> Error {
        Error::UnsupportedShape(format!("{f} in {ctx} position"))
    }

    fn constant(&self, f: &Vf) -> Option<String> {
        match f {
            Vf::Lemma(l) if self.constants.contains(l) => Some(l.clone()),
            _ => None,
        }
    }

    fn quantify(&mut self, op: VfOp, restrictor: &Vf, scope: impl FnOnce(&mut Self, &FolTerm) -> Result<Fol>) -> Result<Fol> {
        if op == VfOp::Exist {
            if let Some(c) = self.constant(restrictor) {
                return scope(self, &FolTerm::Const(c));
            }
            if let Vf::Op(VfOp::And, parts) = restrictor {
                if let Some(c) = self.constant(&parts[0]) {
                    let c = FolTerm::Const(c);
                    let rest = self.concept(&parts[1], &c)?;
                    return Ok(Fol::and(vec![rest, scope(self, &c)?]));
                }
            }
        }
        let x = self.fresh();
        let xv = FolTerm::Var(x.clone());
        let r = self.concept(restrictor, &xv)?;
        let s = scope(self, &xv)?;
        Ok(match op {
            VfOp::All => Fol::forall(&x, Fol::imp(r, s)),
            VfOp::Exist => Fol::exists(&x, Fol::and(vec![r, s])),
            VfOp::Two | VfOp::Three => {
                let marker = if op == VfOp::Two { "two" } else { "three" };
                Fol::exists(&x, Fol::and(vec![Fol::Atom(marker.into(), vec![xv]), r, s]))
            }
            _ => unreachable!(),
        })
    }

    fn prop(&mut self, f: &Vf) -> Result<Fol> {
        match f {
            Vf::Op(op, args) if op.is_quantifier() => {
                let scope = &args[1];
                self.quantify(*op, &args[0], |t, x| t.concept(scope, x))
            }
            Vf::Op(VfOp::Not, args) => Ok(Fol::not(self.prop(&args[0])?)),
            Vf::Op(VfOp::And, args) => Ok(Fol::and(vec![self.prop(&args[0])?, self.prop(&args[1])?])),
            Vf::Op(VfOp::Or, args) => Ok(Fol::or(vec![self.prop(&args[0])?, self.prop(&args[1])?])),
            other => Err(Self::shape(other, "sentence")),
        }
    }

    fn concept(&mut self, f: &Vf, a: &FolTerm) -> Result<Fol> {
        match f {
            Vf::Lemma(l) => Ok(Fol::Atom(l.clone(), vec![a.clone()])),
            Vf::Op(VfOp::Not, args) => Ok(Fol::not(self.concept(&args[0], a)?)),
            Vf::Op(VfOp::And, args) => Ok(Fol::and(vec![self.concept(&args[0], a)?, self.concept(&args[1], a)?])),
            Vf::Op(VfOp::Or, args) => Ok(Fol::or(vec![self.concept(&args[0], a)?, self.concept(&args[1], a)?])),
            Vf::Op(op, args) if op.is_quantifier() => {
                let rel = &args[1];
                let a = a.clone();
                self.quantify(*op, &args[0], |t, x| t.relation(rel, &a, x))
            }
            other => Err(Self::shape(other, "concept")),
        }
    }

    fn relation(&mut self, f: &Vf, a: &FolTerm, b: &FolTerm) -> Result<Fol> {
        match f {
            Vf::Lemma(l) => Ok(Fol::Atom(l.clone(), vec![a.clone(), b.clone()])),
            Vf::Op(VfOp::Inv, args) => self.relation(&args[0], b, a),
            Vf::Op(VfOp::Not, args) => Ok(Fol::not(self.relation(&args[0], a, b)?)),
            Vf::Op(VfOp::And, args) => Ok(Fol::and(vec![
                self.relation(&args[0], a, b)?,
                self.relation(&args[1], a, b)?,
            ])),
            Vf::Op(VfOp::Or, args) => Ok(Fol::or(vec![
                self.relation(&args[0], a, b)?,
                self.relation(&args[1], a, b)?,
            ])),
            other => Err(Self::shape(other, "relation")),
        }
    }
}
