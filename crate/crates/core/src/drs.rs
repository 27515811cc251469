//! Discourse representation structures built from first-order formulas by
//! the usual Kamp mapping, and their clausal form.
//!
//! Clausal form lists, box by box in pre-order, first the `REF` clauses of a
//! box, then its conditions in composition order (operator conditions as
//! `b NOT b'`, `b IMP b' b''`, `b OR b' b''`), then the clauses of its
//! sub-boxes. Binary predicate clauses list the object referent before the
//! subject referent: `chase(x2, x3)` is written `b3 chase x3 x2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::fol::{Fol, FolTerm};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrsBox {
    pub label: String,
    pub universe: Vec<String>,
    pub conditions: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    /// Predicate with arguments in first-order order.
    Pred(String, Vec<String>),
    Not(DrsBox),
    Imp(DrsBox, DrsBox),
    Or(DrsBox, DrsBox),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub box_label: String,
    pub op: String,
    pub args: Vec<String>,
}

impl Clause {
    pub fn new(box_label: &str, op: &str, args: &[&str]) -> Clause {
        Clause {
            box_label: box_label.to_string(),
            op: op.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    /// Whole clause as whitespace-separated fields.
    pub fn fields(&self) -> Vec<&str> {
        let mut v = vec![self.box_label.as_str(), self.op.as_str()];
        v.extend(self.args.iter().map(|a| a.as_str()));
        v
    }

    pub fn is_operator(&self) -> bool {
        matches!(self.op.as_str(), "REF" | "NOT" | "IMP" | "OR")
    }

    /// Gold-side arity discipline.
    pub fn is_well_formed(&self) -> bool {
        match self.op.as_str() {
            "REF" | "NOT" => self.args.len() == 1,
            "IMP" | "OR" => self.args.len() == 2,
            _ => matches!(self.args.len(), 1 | 2),
        }
    }

    pub fn parse(line: &str) -> Option<Clause> {
        let line = line.split('%').next().unwrap_or("");
        let mut it = line.split_whitespace();
        let b = it.next()?;
        let op = it.next()?;
        Some(Clause {
            box_label: b.to_string(),
            op: op.to_string(),
            args: it.map(|s| s.to_string()).collect(),
        })
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fields().join(" "))
    }
}

/// Separator between clauses when a whole DRS is written on one line.
pub const INLINE_SEPARATOR: &str = " ; ";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClausalDrs(pub Vec<Clause>);

impl ClausalDrs {
    pub fn clauses(&self) -> &[Clause] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        self.0.iter().map(|c| c.to_string()).collect()
    }

    /// One clause per line, each line terminated by `\n`.
    pub fn serialize(&self) -> String {
        self.0.iter().map(|c| format!("{c}\n")).collect()
    }

    pub fn serialize_inline(&self) -> String {
        self.lines().join(INLINE_SEPARATOR)
    }

    /// Lenient reading: blank lines and `%` comments are skipped; any head
    /// other than `REF`, `NOT`, `IMP`, `OR` is taken as a predicate. A line
    /// with a single field is an error carrying its 1-based line number.
    pub fn parse(text: &str) -> Result<ClausalDrs> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('%').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            match Clause::parse(content) {
                Some(c) => out.push(c),
                None => {
                    return Err(Error::ParseLine {
                        line: i + 1,
                        message: format!("clause needs a box label and an operator: {line:?}"),
                    })
                }
            }
        }
        Ok(ClausalDrs(out))
    }

    /// Reads clauses written on one line and separated by `;`.
    pub fn parse_inline(text: &str) -> Result<ClausalDrs> {
        ClausalDrs::parse(&text.split(';').collect::<Vec<_>>().join("\n"))
    }

    /// Rebuilds the first-order reading of a clausal DRS: a box is an
    /// existential closure of its conditions, `IMP` a universal closure of
    /// the antecedent's referents, `NOT` negation, `OR` disjunction.
    /// Tokens never introduced by `REF` are individual constants.
    pub fn to_fol(&self) -> Result<Fol> {
        let bad = |m: String| Error::UnsupportedShape(m);
        let mut boxes: BTreeMap<&str, (Vec<&str>, Vec<&Clause>)> = BTreeMap::new();
        let mut order: Vec<&str> = Vec::new();
        let mut children: BTreeSet<&str> = BTreeSet::new();
        let mut referents: BTreeSet<&str> = BTreeSet::new();
        for c in &self.0 {
            if !c.is_well_formed() {
                return Err(bad(format!("ill-formed clause {c}")));
            }
            if !boxes.contains_key(c.box_label.as_str()) {
                order.push(&c.box_label);
            }
            let entry = boxes.entry(&c.box_label).or_default();
            match c.op.as_str() {
                "REF" => {
                    entry.0.push(&c.args[0]);
                    referents.insert(&c.args[0]);
                }
                "NOT" | "IMP" | "OR" => {
                    entry.1.push(c);
                    children.extend(c.args.iter().map(|a| a.as_str()));
                }
                _ => entry.1.push(c),
            }
        }
        for c in &children {
            boxes.entry(c).or_default();
        }
        let roots: Vec<&str> = order.iter().copied().filter(|b| !children.contains(b)).collect();
        if roots.len() != 1 {
            return Err(bad(format!("expected one root box, found {}", roots.len())));
        }
        struct Ctx<'a> {
            boxes: &'a BTreeMap<&'a str, (Vec<&'a str>, Vec<&'a Clause>)>,
            referents: &'a BTreeSet<&'a str>,
            visiting: BTreeSet<&'a str>,
        }
        fn body<'a>(ctx: &mut Ctx<'a>, b: &'a str) -> Result<Fol> {
            if !ctx.visiting.insert(b) {
                return Err(Error::UnsupportedShape(format!("box {b} occurs inside itself")));
            }
            let (_, conds) = &ctx.boxes[b];
            let mut parts = Vec::new();
            for c in conds.iter().copied() {
                parts.push(match c.op.as_str() {
                    "NOT" => Fol::not(closed(ctx, &c.args[0])?),
                    "OR" => Fol::or(vec![closed(ctx, &c.args[0])?, closed(ctx, &c.args[1])?]),
                    "IMP" => {
                        let a: &str = &c.args[0];
                        let inner = Fol::imp(body(ctx, a)?, closed(ctx, &c.args[1])?);
                        ctx.boxes[a].0.iter().rev().fold(inner, |f, x| Fol::forall(x, f))
                    }
                    _ => {
                        let mut args: Vec<&String> = c.args.iter().collect();
                        if args.len() == 2 {
                            args.reverse();
                        }
                        Fol::Atom(
                            c.op.clone(),
                            args.into_iter()
                                .map(|a| {
                                    if ctx.referents.contains(a.as_str()) {
                                        FolTerm::Var(a.clone())
                                    } else {
                                        FolTerm::Const(a.clone())
                                    }
                                })
                                .collect(),
                        )
                    }
                });
            }
            ctx.visiting.remove(b);
            Ok(match parts.len() {
                0 => Fol::And(vec![]),
                _ => Fol::and(parts),
            })
        }
        fn closed<'a>(ctx: &mut Ctx<'a>, b: &'a str) -> Result<Fol> {
            let inner = body(ctx, b)?;
            Ok(ctx.boxes[b].0.iter().rev().fold(inner, |f, x| Fol::exists(x, f)))
        }
        let mut ctx = Ctx {
            boxes: &boxes,
            referents: &referents,
            visiting: BTreeSet::new(),
        };
        closed(&mut ctx, roots[0])
    }
}

impl fmt::Display for ClausalDrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Kamp-style translation from formulas of the fragment to boxes.
#[derive(Debug, Clone, Default)]
pub struct DrsConverter {
    adjectives: BTreeSet<String>,
}

impl DrsConverter {
    /// A converter that keeps conditions in formula order.
    pub fn new() -> DrsConverter {
        DrsConverter::default()
    }

    /// A converter that lists an adjective condition before the noun
    /// condition it modifies, mirroring the surface order.
    pub fn with_adjectives(adjectives: BTreeSet<String>) -> DrsConverter {
        DrsConverter { adjectives }
    }

    pub fn for_lexicon(lex: &Lexicon) -> DrsConverter {
        DrsConverter::with_adjectives(lex.adjective_lemmas())
    }

    pub fn convert(&self, f: &Fol) -> Result<DrsBox> {
        let mut b = Builder {
            boxes: 0,
            referents: 0,
            env: HashMap::new(),
        };
        let mut root = b.new_box();
        b.build(f, &mut root)?;
        self.reorder(&mut root);
        Ok(root)
    }

    pub fn clauses(&self, f: &Fol) -> Result<ClausalDrs> {
        Ok(drs_to_clauses(&self.convert(f)?))
    }

    fn reorder(&self, b: &mut DrsBox) {
        let conds = &mut b.conditions;
        let mut i = 0;
        while i + 1 < conds.len() {
            let swap = match (&conds[i], &conds[i + 1]) {
                (Condition::Pred(n, a1), Condition::Pred(adj, a2)) => {
                    a1.len() == 1
                        && a1 == a2
                        && self.adjectives.contains(adj)
                        && !self.adjectives.contains(n)
                }
                _ => false,
            };
            if swap {
                conds.swap(i, i + 1);
                i += 2;
            } else {
                i += 1;
            }
        }
        for c in conds.iter_mut() {
            match c {
                Condition::Pred(..) => {}
                Condition::Not(s) => self.reorder(s),
                Condition::Imp(a, s) | Condition::Or(a, s) => {
                    self.reorder(a);
                    self.reorder(s);
                }
            }
        }
    }
}

pub fn fol_to_drs(f: &Fol) -> Result<DrsBox> {
    DrsConverter::new().convert(f)
}

struct Builder {
    boxes: usize,
    referents: usize,
    env: HashMap<String, Vec<String>>,
}

impl Builder {
    fn new_box(&mut self) -> DrsBox {
        self.boxes += 1;
        DrsBox {
            label: format!("b{}", self.boxes),
            universe: Vec::new(),
            conditions: Vec::new(),
        }
    }

    fn introduce(&mut self, x: &str, b: &mut DrsBox) {
        self.referents += 1;
        let r = format!("x{}", self.referents);
        self.env.entry(x.to_string()).or_default().push(r.clone());
        b.universe.push(r);
    }

    fn release(&mut self, x: &str) {
        self.env.get_mut(x).and_then(|s| s.pop());
    }

    fn term(&self, t: &FolTerm) -> Result<String> {
        match t {
            FolTerm::Var(x) => self
                .env
                .get(x)
                .and_then(|s| s.last())
                .cloned()
                .ok_or_else(|| Error::UnsupportedShape(format!("free variable {x}"))),
            FolTerm::Const(c) => Ok(c.clone()),
        }
    }

    fn sub_box(&mut self, f: &Fol) -> Result<DrsBox> {
        let mut b = self.new_box();
        self.build(f, &mut b)?;
        Ok(b)
    }

    fn build(&mut self, f: &Fol, b: &mut DrsBox) -> Result<()> {
        match f {
            Fol::Atom(l, args) => {
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_>>()?;
                b.conditions.push(Condition::Pred(l.clone(), args));
            }
            Fol::And(xs) => {
                for x in xs {
                    self.build(x, b)?;
                }
            }
            Fol::Exists(x, body) => {
                self.introduce(x, b);
                self.build(body, b)?;
                // the referent stays in the box; only the name binding ends
                self.release(x);
            }
            Fol::Not(body) => {
                let s = self.sub_box(body)?;
                b.conditions.push(Condition::Not(s));
            }
            Fol::Forall(x, body) => {
                let mut ant = self.new_box();
                self.introduce(x, &mut ant);
                let cons = match body.as_ref() {
                    Fol::Imp(a, c) => {
                        self.build(a, &mut ant)?;
                        self.sub_box(c)?
                    }
                    other => self.sub_box(other)?,
                };
                self.release(x);
                b.conditions.push(Condition::Imp(ant, cons));
            }
            Fol::Imp(a, c) => {
                let ant = self.sub_box(a)?;
                let cons = self.sub_box(c)?;
                b.conditions.push(Condition::Imp(ant, cons));
            }
            Fol::Or(xs) => {
                let Some((first, rest)) = xs.split_first() else {
                    return Err(Error::UnsupportedShape("empty disjunction".into()));
                };
                let left = self.sub_box(first)?;
                let right = self.sub_box(&Fol::or(rest.to_vec()))?;
                b.conditions.push(Condition::Or(left, right));
            }
        }
        Ok(())
    }
}

/// Pre-order linearization into clauses.
pub fn drs_to_clauses(root: &DrsBox) -> ClausalDrs {
    fn emit(b: &DrsBox, out: &mut Vec<Clause>) {
        let l = b.label.as_str();
        for r in &b.universe {
            out.push(Clause::new(l, "REF", &[r]));
        }
        for c in &b.conditions {
            out.push(match c {
                Condition::Pred(p, args) => {
                    let mut a: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                    if a.len() == 2 {
                        a.reverse();
                    }
                    Clause::new(l, p, &a)
                }
                Condition::Not(s) => Clause::new(l, "NOT", &[&s.label]),
                Condition::Imp(a, s) => Clause::new(l, "IMP", &[&a.label, &s.label]),
                Condition::Or(a, s) => Clause::new(l, "OR", &[&a.label, &s.label]),
            });
        }
        for c in &b.conditions {
            match c {
                Condition::Pred(..) => {}
                Condition::Not(s) => emit(s, out),
                Condition::Imp(a, s) | Condition::Or(a, s) => {
                    emit(a, out);
                    emit(s, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    emit(root, &mut out);
    ClausalDrs(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sentence;
    use crate::semantics::compose_fol;

    fn clauses(s: &str) -> String {
        let lex = Lexicon::default();
        let f = compose_fol(&lex, &parse_sentence(&lex, s).unwrap()).unwrap();
        DrsConverter::for_lexicon(&lex).clauses(&f).unwrap().serialize()
    }

    #[test]
    fn negated_existential() {
        assert_eq!(
            clauses("one white dog did not run"),
            "b1 REF x1\nb1 white x1\nb1 dog x1\nb1 NOT b2\nb2 run x1\n"
        );
    }

    #[test]
    fn universal_with_adjective() {
        assert_eq!(
            clauses("all wild dogs ran"),
            "b1 IMP b2 b3\nb2 REF x1\nb2 wild x1\nb2 dog x1\nb3 run x1\n"
        );
    }

    #[test]
    fn proper_noun_as_predicate() {
        assert_eq!(clauses("ann ran"), "b1 REF x1\nb1 ann x1\nb1 run x1\n");
    }

    #[test]
    fn nested_relatives_in_universal() {
        let expected = "\
b1 IMP b2 b4
b2 REF x1
b2 lion x1
b2 NOT b3
b3 REF x2
b3 REF x3
b3 two x2
b3 bear x2
b3 three x3
b3 monkey x3
b3 chase x3 x2
b3 follow x2 x1
b4 NOT b5
b5 cry x1
";
        assert_eq!(
            clauses("all lions that did not follow two bears that chased three monkeys did not cry"),
            expected
        );
    }

    #[test]
    fn disjunction_uses_or_boxes() {
        assert_eq!(
            clauses("one tiger ran or came"),
            "b1 REF x1\nb1 tiger x1\nb1 OR b2 b3\nb2 run x1\nb3 come x1\n"
        );
    }

    #[test]
    fn lenient_parsing() {
        let d = ClausalDrs::parse("b1 REF x1\n\nb1 foo x1 x2 x3 % comment\n").unwrap();
        assert_eq!(d.len(), 2);
        assert!(!d.0[1].is_well_formed());
        match ClausalDrs::parse("b1 REF x1\nb2\n") {
            Err(Error::ParseLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let inline = ClausalDrs::parse_inline("b1 REF x1 ; b1 dog x1").unwrap();
        assert_eq!(inline.serialize_inline(), "b1 REF x1 ; b1 dog x1");
    }

    #[test]
    fn back_translation() {
        let d = ClausalDrs::parse("b1 IMP b2 b3\nb2 REF x1\nb2 dog x1\nb3 NOT b4\nb4 chase ann x1\n").unwrap();
        assert_eq!(d.to_fol().unwrap().to_string(), "∀x1.(dog(x1) → ¬chase(x1,ann))");
    }
}
