//! First-order formulas: conversion from normalized λ-terms, canonical
//! variable naming, and the whitespace-tokenized ASCII serialization used in
//! dataset files and model predictions.
//!
//! ```text
//! formula := "exists" VAR "." formula
//!          | "all" VAR "." formula
//!          | "-" formula
//!          | "(" formula ( "&" formula )+ ")"
//!          | "(" formula ( "|" formula )+ ")"
//!          | "(" formula "->" formula ")"
//!          | LEMMA "(" term ( "," term )* ")"
//! ```
//!
//! A term is a variable when an enclosing quantifier binds it and an
//! individual constant otherwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::lambda::Term;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FolTerm {
    Var(String),
    Const(String),
}

impl FolTerm {
    pub fn name(&self) -> &str {
        match self {
            FolTerm::Var(s) | FolTerm::Const(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fol {
    Atom(String, Vec<FolTerm>),
    Not(Box<Fol>),
    And(Vec<Fol>),
    Or(Vec<Fol>),
    Imp(Box<Fol>, Box<Fol>),
    Forall(String, Box<Fol>),
    Exists(String, Box<Fol>),
}

impl Fol {
    pub fn atom(lemma: &str, args: &[&str]) -> Fol {
        Fol::Atom(
            lemma.to_string(),
            args.iter().map(|a| FolTerm::Var(a.to_string())).collect(),
        )
    }

    pub fn not(f: Fol) -> Fol {
        Fol::Not(Box::new(f))
    }

    pub fn imp(a: Fol, b: Fol) -> Fol {
        Fol::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, f: Fol) -> Fol {
        Fol::Forall(x.to_string(), Box::new(f))
    }

    pub fn exists(x: &str, f: Fol) -> Fol {
        Fol::Exists(x.to_string(), Box::new(f))
    }

    /// Conjunction with nested conjunctions spliced in; a single conjunct
    /// is returned as is.
    pub fn and(parts: Vec<Fol>) -> Fol {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Fol::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Fol::And(out)
        }
    }

    pub fn or(parts: Vec<Fol>) -> Fol {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Fol::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Fol::Or(out)
        }
    }

    /// Reads a β-normal term as a formula. Every predicate argument must be
    /// a variable or a constant.
    pub fn from_term(t: &Term) -> Result<Fol> {
        Ok(match t {
            Term::Pred(l, args) => Fol::Atom(
                l.clone(),
                args.iter()
                    .map(|a| match a {
                        Term::Var(x) => Ok(FolTerm::Var(x.clone())),
                        Term::Const(c) => Ok(FolTerm::Const(c.clone())),
                        other => Err(Error::NotAFormula(other.to_string())),
                    })
                    .collect::<Result<_>>()?,
            ),
            Term::Not(b) => Fol::not(Fol::from_term(b)?),
            Term::And(xs) => Fol::and(xs.iter().map(Fol::from_term).collect::<Result<_>>()?),
            Term::Or(xs) => Fol::or(xs.iter().map(Fol::from_term).collect::<Result<_>>()?),
            Term::Imp(a, b) => Fol::imp(Fol::from_term(a)?, Fol::from_term(b)?),
            Term::Forall(x, b) => Fol::forall(x, Fol::from_term(b)?),
            Term::Exists(x, b) => Fol::exists(x, Fol::from_term(b)?),
            other => return Err(Error::NotAFormula(other.to_string())),
        })
    }

    pub fn children(&self) -> Vec<&Fol> {
        match self {
            Fol::Atom(..) => vec![],
            Fol::Not(b) | Fol::Forall(_, b) | Fol::Exists(_, b) => vec![b],
            Fol::And(xs) | Fol::Or(xs) => xs.iter().collect(),
            Fol::Imp(a, b) => vec![a, b],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Fol, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Fol::Atom(_, args) => {
                    for a in args {
                        if let FolTerm::Var(x) = a {
                            if !bound.contains(x) {
                                out.insert(x.clone());
                            }
                        }
                    }
                }
                Fol::Forall(x, b) | Fol::Exists(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                f => f.children().into_iter().for_each(|c| go(c, bound, out)),
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Predicate symbols with their arities. Fails if one symbol is used
    /// with two arities.
    pub fn signature(&self) -> Result<BTreeMap<String, usize>> {
        let mut sig = BTreeMap::new();
        let mut bad = None;
        self.visit_atoms(&mut |l, args| {
            if let Some(&k) = sig.get(l) {
                if k != args.len() {
                    bad = Some(l.to_string());
                }
            } else {
                sig.insert(l.to_string(), args.len());
            }
        });
        match bad {
            Some(l) => Err(Error::NotAFormula(format!("predicate {l} used with two arities"))),
            None => Ok(sig),
        }
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, args| {
            for a in args {
                if let FolTerm::Const(c) = a {
                    out.insert(c.clone());
                }
            }
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&str, &[FolTerm])) {
        match self {
            Fol::Atom(l, args) => f(l, args),
            other => other.children().into_iter().for_each(|c| c.visit_atoms(f)),
        }
    }

    /// Quantified variables renamed `x1, x2, …` in pre-order.
    pub fn canonicalize(&self) -> Fol {
        fn go(f: &Fol, env: &mut HashMap<String, Vec<String>>, n: &mut usize) -> Fol {
            match f {
                Fol::Atom(l, args) => Fol::Atom(
                    l.clone(),
                    args.iter()
                        .map(|a| match a {
                            FolTerm::Var(x) => FolTerm::Var(
                                env.get(x).and_then(|s| s.last()).cloned().unwrap_or_else(|| x.clone()),
                            ),
                            c => c.clone(),
                        })
                        .collect(),
                ),
                Fol::Forall(x, b) | Fol::Exists(x, b) => {
                    *n += 1;
                    let name = format!("x{n}");
                    env.entry(x.clone()).or_default().push(name.clone());
                    let body = go(b, env, n);
                    env.get_mut(x).unwrap().pop();
                    if matches!(f, Fol::Forall(..)) {
                        Fol::forall(&name, body)
                    } else {
                        Fol::exists(&name, body)
                    }
                }
                Fol::Not(b) => Fol::not(go(b, env, n)),
                Fol::And(xs) => Fol::and(xs.iter().map(|x| go(x, env, n)).collect()),
                Fol::Or(xs) => Fol::or(xs.iter().map(|x| go(x, env, n)).collect()),
                Fol::Imp(a, b) => {
                    let a = go(a, env, n);
                    Fol::imp(a, go(b, env, n))
                }
            }
        }
        go(self, &mut HashMap::new(), &mut 0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Number of quantifiers on the longest nesting path.
    pub fn quantifier_depth(&self) -> usize {
        let below = self.children().iter().map(|c| c.quantifier_depth()).max().unwrap_or(0);
        match self {
            Fol::Forall(..) | Fol::Exists(..) => below + 1,
            _ => below,
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.write_tokens(&mut out);
        out
    }

    fn write_tokens(&self, out: &mut Vec<String>) {
        let push = |out: &mut Vec<String>, s: &str| out.push(s.to_string());
        match self {
            Fol::Atom(l, args) => {
                push(out, l);
                push(out, "(");
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        push(out, ",");
                    }
                    push(out, a.name());
                }
                push(out, ")");
            }
            Fol::Not(b) => {
                push(out, "-");
                b.write_tokens(out);
            }
            Fol::Forall(x, b) | Fol::Exists(x, b) => {
                push(out, if matches!(self, Fol::Forall(..)) { "all" } else { "exists" });
                push(out, x);
                push(out, ".");
                b.write_tokens(out);
            }
            Fol::And(xs) | Fol::Or(xs) => {
                let op = if matches!(self, Fol::And(_)) { "&" } else { "|" };
                push(out, "(");
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        push(out, op);
                    }
                    x.write_tokens(out);
                }
                push(out, ")");
            }
            Fol::Imp(a, b) => {
                push(out, "(");
                a.write_tokens(out);
                push(out, "->");
                b.write_tokens(out);
                push(out, ")");
            }
        }
    }

    /// The ASCII token string, tokens separated by single spaces.
    pub fn serialize(&self) -> String {
        self.tokens().join(" ")
    }

    pub fn parse(text: &str) -> Result<Fol> {
        let toks = tokenize(text)?;
        let mut p = FolParser {
            toks: &toks,
            pos: 0,
            bound: Vec::new(),
        };
        let f = p.formula()?;
        if p.pos < toks.len() {
            return Err(p.error("unexpected trailing token"));
        }
        Ok(f)
    }
}

/// Splits on whitespace and on punctuation, so "dog(x1)" and "dog ( x1 )"
/// read the same.
fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "().,&|".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push("->".into());
                i += 2;
            } else {
                out.push("-".into());
                i += 1;
            }
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(Error::parse(out.len() + 1, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn is_ident(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_')
}

struct FolParser<'a> {
    toks: &'a [String],
    pos: usize,
    bound: Vec<String>,
}

impl<'a> FolParser<'a> {
    /// Positions in errors are 1-based token indices.
    fn error(&self, msg: &str) -> Error {
        let found = self.toks.get(self.pos).map_or("end of input".to_string(), |t| format!("{t:?}"));
        Error::parse(self.pos + 1, format!("{msg}, found {found}"))
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|s| s.as_str())
    }

    fn expect(&mut self, t: &str) -> Result<()> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {t:?}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(t) if is_ident(t) && t != "exists" && t != "all" => {
                self.pos += 1;
                Ok(t.to_string())
            }
            _ => Err(self.error(&format!("expected {what}"))),
        }
    }

    fn formula(&mut self) -> Result<Fol> {
        match self.peek() {
            Some("exists") | Some("all") => {
                let universal = self.peek() == Some("all");
                self.pos += 1;
                let x = self.ident("variable")?;
                self.expect(".")?;
                self.bound.push(x.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(if universal {
                    Fol::forall(&x, body)
                } else {
                    Fol::exists(&x, body)
                })
            }
            Some("-") => {
                self.pos += 1;
                Ok(Fol::not(self.formula()?))
            }
            Some("(") => {
                self.pos += 1;
                let first = self.formula()?;
                let op = match self.peek() {
                    Some(")") => {
                        self.pos += 1;
                        return Ok(first);
                    }
                    Some(op @ ("&" | "|" | "->")) => op.to_string(),
                    _ => return Err(self.error("expected connective or \")\"")),
                };
                let mut parts = vec![first];
                while self.peek() == Some(op.as_str()) {
                    self.pos += 1;
                    parts.push(self.formula()?);
                    if op == "->" {
                        break;
                    }
                }
                match self.peek() {
                    Some(")") => self.pos += 1,
                    Some("&" | "|" | "->") => {
                        return Err(self.error("mixed connectives need explicit brackets"))
                    }
                    _ => return Err(self.error("expected \")\"")),
                }
                Ok(match op.as_str() {
                    "&" => Fol::And(parts),
                    "|" => Fol::Or(parts),
                    _ => {
                        let b = parts.pop().unwrap();
                        Fol::imp(parts.pop().unwrap(), b)
                    }
                })
            }
            Some(t) if is_ident(t) => {
                let lemma = t.to_string();
                self.pos += 1;
                self.expect("(")?;
                let mut args = Vec::new();
                loop {
                    let a = self.ident("term")?;
                    args.push(if self.bound.contains(&a) {
                        FolTerm::Var(a)
                    } else {
                        FolTerm::Const(a)
                    });
                    match self.peek() {
                        Some(",") => self.pos += 1,
                        Some(")") => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected \",\" or \")\"")),
                    }
                }
                Ok(Fol::Atom(lemma, args))
            }
            _ => Err(self.error("expected formula")),
        }
    }
}

/// Serialized in the ASCII notation.
impl serde::Serialize for Fol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&Fol::serialize(self))
    }
}

impl<'de> serde::Deserialize<'de> for Fol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Fol, D::Error> {
        let text = String::deserialize(d)?;
        Fol::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Fol {
    /// Logician's notation: `∃x1.(white(x1) ∧ dog(x1) ∧ ¬run(x1))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fol::Atom(l, args) => {
                let a: Vec<&str> = args.iter().map(|t| t.name()).collect();
                write!(f, "{l}({})", a.join(","))
            }
            Fol::Not(b) => write!(f, "¬{b}"),
            Fol::Forall(x, b) => write!(f, "∀{x}.{b}"),
            Fol::Exists(x, b) => write!(f, "∃{x}.{b}"),
            Fol::And(xs) | Fol::Or(xs) => {
                let sep = if matches!(self, Fol::And(_)) { " ∧ " } else { " ∨ " };
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(sep))
            }
            Fol::Imp(a, b) => write!(f, "({a} → {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example2() -> Fol {
        Fol::exists(
            "x1",
            Fol::And(vec![
                Fol::atom("white", &["x1"]),
                Fol::atom("dog", &["x1"]),
                Fol::not(Fol::atom("run", &["x1"])),
            ]),
        )
    }

    #[test]
    fn serializes_example() {
        assert_eq!(
            example2().serialize(),
            "exists x1 . ( white ( x1 ) & dog ( x1 ) & - run ( x1 ) )"
        );
        assert_eq!(example2().to_string(), "∃x1.(white(x1) ∧ dog(x1) ∧ ¬run(x1))");
    }

    #[test]
    fn parses_back() {
        let s = "all x1 . ( ( dog ( x1 ) & wild ( x1 ) ) -> run ( x1 ) )";
        let f = Fol::parse(s).unwrap();
        assert_eq!(f.serialize(), s);
        assert_eq!(Fol::parse(&example2().serialize()).unwrap(), example2());
    }

    #[test]
    fn unbound_terms_are_constants() {
        let f = Fol::parse("- exists x1 . ( dog ( x1 ) & chase ( ann , x1 ) )").unwrap();
        assert_eq!(f.constants(), BTreeSet::from(["ann".to_string()]));
        assert!(f.is_closed());
    }

    #[test]
    fn compact_spelling_is_accepted() {
        let f = Fol::parse("exists x1.(dog(x1) & run(x1))").unwrap();
        assert_eq!(f.serialize(), "exists x1 . ( dog ( x1 ) & run ( x1 ) )");
    }

    #[test]
    fn malformed_input_reports_token_position() {
        match Fol::parse("exists ( dog") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(Fol::parse("( a ( x ) & b ( x ) | c ( x ) )").is_err());
        assert!(Fol::parse("dog ( x1 ) )").is_err());
        assert!(Fol::parse("").is_err());
    }

    #[test]
    fn canonical_names_follow_binder_order() {
        let f = Fol::exists("y", Fol::forall("z", Fol::atom("p", &["y", "z"])));
        assert_eq!(f.canonicalize().serialize(), "exists x1 . all x2 . p ( x1 , x2 )");
    }
}
