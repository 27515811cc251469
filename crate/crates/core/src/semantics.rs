//! Compositional semantics: each grammar rule builds a λ-term from the
//! meanings of its children; β-normalization then yields a first-order
//! formula or a variable-free formula.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fol::Fol;
use crate::grammar::{DerivationTree, Rule};
use crate::lambda::{
    and, app, canonicalize, exists, forall, imp, lam, not, or, pred, unary, var, Normalizer, Strategy, Term,
    DEFAULT_MAX_STEPS,
};
use crate::lexicon::{Category, Lexicon, Quantifier, QuantifierType};
use crate::vf::{vf_to_fol_with, Vf, VfOp};

/// How proper nouns enter first-order formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProperNounStyle {
    /// `λF.∃x(ann(x) ∧ F(x))`
    #[default]
    Predicate,
    /// `λF.F(ann)`
    Constant,
}

/// Order of the noun and adjective inside a modified restrictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictorOrder {
    NounFirst,
    AdjectiveFirst,
    /// Adjective first under existential quantifiers (a, one), noun first
    /// under numerals and universals.
    #[default]
    ByQuantifier,
}

impl RestrictorOrder {
    fn adjective_first(self, q: Quantifier) -> bool {
        match self {
            RestrictorOrder::NounFirst => false,
            RestrictorOrder::AdjectiveFirst => true,
            RestrictorOrder::ByQuantifier => q.kind() == QuantifierType::Exi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SemanticsConfig {
    pub proper_nouns: ProperNounStyle,
    pub restrictor_order: RestrictorOrder,
    #[serde(skip)]
    pub strategy: Strategy,
    pub max_steps: usize,
}

impl Default for SemanticsConfig {
    fn default() -> Self {
        SemanticsConfig {
            proper_nouns: ProperNounStyle::default(),
            restrictor_order: RestrictorOrder::default(),
            strategy: Strategy::NormalOrder,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Builds and normalizes meaning terms for derivation trees over one lexicon.
#[derive(Clone)]
pub struct Composer<'a> {
    lex: &'a Lexicon,
    cfg: SemanticsConfig,
}

impl<'a> Composer<'a> {
    pub fn new(lex: &'a Lexicon, cfg: SemanticsConfig) -> Composer<'a> {
        Composer { lex, cfg }
    }

    pub fn config(&self) -> &SemanticsConfig {
        &self.cfg
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lex
    }

    fn normalize(&self, t: Term) -> Result<Term> {
        let nf = Normalizer::new(self.cfg.strategy, self.cfg.max_steps).normalize(t)?;
        Ok(canonicalize(&nf))
    }

    pub fn compose_fol(&self, tree: &DerivationTree) -> Result<Fol> {
        let t = self.normalize(self.fol_term(tree))?;
        Ok(Fol::from_term(&t)?.canonicalize())
    }

    pub fn compose_vf(&self, tree: &DerivationTree) -> Result<Vf> {
        let t = self.normalize(self.vf_term(tree))?;
        Vf::from_term(&t)
    }

    /// First-order reading of a variable-free formula under this
    /// configuration's proper-noun style.
    pub fn vf_to_fol(&self, f: &Vf) -> Result<Fol> {
        let constants = match self.cfg.proper_nouns {
            ProperNounStyle::Predicate => BTreeSet::new(),
            ProperNounStyle::Constant => self.lex.proper_noun_lemmas(),
        };
        vf_to_fol_with(f, &constants)
    }

    fn lemma(&self, t: &DerivationTree) -> &'a str {
        let (cat, i) = t.leaf().expect("lexical leaf");
        self.lex.lemma(cat, i)
    }

    fn quantifier(&self, t: &DerivationTree) -> Quantifier {
        self.lex.quantifiers[t.leaf_index()]
    }

    /// The unreduced λ-term for the first-order reading.
    pub fn fol_term(&self, t: &DerivationTree) -> Term {
        let DerivationTree::Node { rule, children: c } = t else {
            return self.fol_lexical(t);
        };
        let sem = |i: usize| self.fol_term(&c[i]);
        let x = || var("x");
        match rule {
            Rule::Sentence => app(sem(0), sem(1)),
            Rule::NegSentence => app(sem(0), lam("x", not(app(sem(1), x())))),
            Rule::ProperNoun | Rule::Intransitive | Rule::SubjectRel => sem(0),
            Rule::Quantified => app(sem(0), sem(1)),
            Rule::QuantifiedAdj => {
                let (n, a) = (app(sem(2), x()), app(sem(1), x()));
                let body = if self.cfg.restrictor_order.adjective_first(self.quantifier(&c[0])) {
                    and(vec![a, n])
                } else {
                    and(vec![n, a])
                };
                app(sem(0), lam("x", body))
            }
            Rule::QuantifiedRel => app(sem(0), lam("x", and(vec![app(sem(1), x()), app(sem(2), x())]))),
            Rule::ProperNounRel => lam(
                "F",
                app(sem(0), lam("x", and(vec![app(sem(1), x()), app(var("F"), x())]))),
            ),
            Rule::Adverbial => lam("x", and(vec![app(sem(0), x()), app(sem(1), x())])),
            Rule::Disjunction => lam("x", or(vec![app(sem(0), x()), app(sem(1), x())])),
            Rule::Conjunction => lam("x", and(vec![app(sem(0), x()), app(sem(1), x())])),
            Rule::Transitive => lam("x", app(sem(1), lam("y", app(app(sem(0), var("y")), x())))),
            Rule::NegSubjectRel => lam("x", not(app(sem(0), x()))),
            Rule::ObjectRel => lam("y", app(sem(0), lam("x", app(app(sem(1), var("y")), x())))),
            Rule::NegObjectRel => lam(
                "y",
                app(sem(0), lam("x", not(app(app(sem(1), var("y")), x())))),
            ),
        }
    }

    fn fol_lexical(&self, t: &DerivationTree) -> Term {
        let (cat, _) = t.leaf().unwrap();
        let fx = || app(var("F"), var("x"));
        let gx = || app(var("G"), var("x"));
        match cat {
            Category::Quantifier => {
                let q = self.quantifier(t);
                let body = match q {
                    Quantifier::Every | Quantifier::All => forall("x", imp(fx(), gx())),
                    Quantifier::A | Quantifier::One => exists("x", and(vec![fx(), gx()])),
                    Quantifier::Two | Quantifier::Three => exists(
                        "x",
                        and(vec![pred(q.numeral_marker().unwrap(), vec![var("x")]), fx(), gx()]),
                    ),
                };
                lam("F", lam("G", body))
            }
            Category::ProperNoun => {
                let pn = self.lemma(t);
                match self.cfg.proper_nouns {
                    ProperNounStyle::Predicate => {
                        lam("F", exists("x", and(vec![pred(pn, vec![var("x")]), fx()])))
                    }
                    ProperNounStyle::Constant => lam("F", app(var("F"), Term::Const(pn.to_string()))),
                }
            }
            Category::TransitiveVerb => lam("y", lam("x", pred(self.lemma(t), vec![var("x"), var("y")]))),
            _ => unary(self.lemma(t)),
        }
    }

    /// The unreduced λ-term for the variable-free reading.
    pub fn vf_term(&self, t: &DerivationTree) -> Term {
        let DerivationTree::Node { rule, children: c } = t else {
            return self.vf_lexical(t);
        };
        let sem = |i: usize| self.vf_term(&c[i]);
        let op = |o: VfOp, args: Vec<Term>| Term::Vf(o, args);
        match rule {
            Rule::Sentence | Rule::Quantified => app(sem(0), sem(1)),
            Rule::NegSentence => app(sem(0), op(VfOp::Not, vec![sem(1)])),
            Rule::ProperNoun | Rule::Intransitive | Rule::SubjectRel => sem(0),
            Rule::QuantifiedAdj => {
                let args = if self.cfg.restrictor_order.adjective_first(self.quantifier(&c[0])) {
                    vec![sem(1), sem(2)]
                } else {
                    vec![sem(2), sem(1)]
                };
                app(sem(0), op(VfOp::And, args))
            }
            Rule::QuantifiedRel => app(sem(0), op(VfOp::And, vec![sem(1), sem(2)])),
            Rule::ProperNounRel => lam(
                "F",
                op(
                    VfOp::Exist,
                    vec![
                        op(VfOp::And, vec![Term::VfLemma(self.lemma(&c[0]).to_string()), sem(1)]),
                        var("F"),
                    ],
                ),
            ),
            Rule::Adverbial | Rule::Conjunction => op(VfOp::And, vec![sem(0), sem(1)]),
            Rule::Disjunction => op(VfOp::Or, vec![sem(0), sem(1)]),
            Rule::Transitive => app(sem(1), sem(0)),
            Rule::NegSubjectRel => op(VfOp::Not, vec![sem(0)]),
            Rule::ObjectRel => app(sem(0), op(VfOp::Inv, vec![sem(1)])),
            Rule::NegObjectRel => app(sem(0), op(VfOp::Not, vec![op(VfOp::Inv, vec![sem(1)])])),
        }
    }

    fn vf_lexical(&self, t: &DerivationTree) -> Term {
        let (cat, _) = t.leaf().unwrap();
        match cat {
            Category::Quantifier => {
                let o = match self.quantifier(t) {
                    Quantifier::Every | Quantifier::All => VfOp::All,
                    Quantifier::A | Quantifier::One => VfOp::Exist,
                    Quantifier::Two => VfOp::Two,
                    Quantifier::Three => VfOp::Three,
                };
                lam("F", lam("G", Term::Vf(o, vec![var("F"), var("G")])))
            }
            Category::ProperNoun => lam(
                "F",
                Term::Vf(VfOp::Exist, vec![Term::VfLemma(self.lemma(t).to_string()), var("F")]),
            ),
            _ => Term::VfLemma(self.lemma(t).to_string()),
        }
    }
}

pub fn compose_fol(lex: &Lexicon, tree: &DerivationTree) -> Result<Fol> {
    Composer::new(lex, SemanticsConfig::default()).compose_fol(tree)
}

pub fn compose_vf(lex: &Lexicon, tree: &DerivationTree) -> Result<Vf> {
    Composer::new(lex, SemanticsConfig::default()).compose_vf(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sentence;

    fn fol(s: &str) -> String {
        let lex = Lexicon::default();
        compose_fol(&lex, &parse_sentence(&lex, s).unwrap()).unwrap().to_string()
    }

    fn vf(s: &str) -> String {
        let lex = Lexicon::default();
        compose_vf(&lex, &parse_sentence(&lex, s).unwrap()).unwrap().serialize()
    }

    #[test]
    fn first_order_examples() {
        assert_eq!(fol("one white dog did not run"), "∃x1.(white(x1) ∧ dog(x1) ∧ ¬run(x1))");
        assert_eq!(
            fol("two small cats chased bob"),
            "∃x1.(two(x1) ∧ cat(x1) ∧ small(x1) ∧ ∃x2.(bob(x2) ∧ chase(x1,x2)))"
        );
        assert_eq!(
            fol("all small cats chased bob"),
            "∀x1.((cat(x1) ∧ small(x1)) → ∃x2.(bob(x2) ∧ chase(x1,x2)))"
        );
        assert_eq!(fol("all wild dogs ran"), "∀x1.((dog(x1) ∧ wild(x1)) → run(x1))");
        assert_eq!(fol("all tigers ran or swam"), "∀x1.(tiger(x1) → (run(x1) ∨ swim(x1)))");
    }

    #[test]
    fn variable_free_examples() {
        assert_eq!(vf("one white dog did not run"), "EXIST AND WHITE DOG NOT RUN");
        assert_eq!(vf("all small cats chased bob"), "ALL AND CAT SMALL EXIST BOB CHASE");
        assert_eq!(vf("two small cats chased bob"), "TWO AND CAT SMALL EXIST BOB CHASE");
        assert_eq!(vf("ann did not chase two dogs"), "EXIST ANN NOT TWO DOG CHASE");
        assert_eq!(vf("all wild dogs ran"), "ALL AND DOG WILD RUN");
        assert_eq!(vf("two dogs that all cats kicked loved ann"), "TWO AND DOG ALL CAT INV KICK EXIST ANN LOVE");
    }

    #[test]
    fn nested_relatives() {
        assert_eq!(
            fol("all lions that did not follow two bears that chased three monkeys did not cry"),
            "∀x1.((lion(x1) ∧ ¬∃x2.(two(x2) ∧ bear(x2) ∧ ∃x3.(three(x3) ∧ monkey(x3) ∧ chase(x2,x3)) ∧ follow(x1,x2))) → ¬cry(x1))"
        );
        assert_eq!(
            fol("two dogs that all cats kicked loved ann"),
            "∃x1.(two(x1) ∧ dog(x1) ∧ ∀x2.(cat(x2) → kick(x2,x1)) ∧ ∃x3.(ann(x3) ∧ love(x1,x3)))"
        );
        assert_eq!(
            fol("one dog liked bob that loved two rats"),
            "∃x1.(dog(x1) ∧ ∃x2.(bob(x2) ∧ ∃x3.(two(x3) ∧ rat(x3) ∧ love(x2,x3)) ∧ like(x1,x2)))"
        );
    }

    #[test]
    fn constant_style_proper_nouns() {
        let lex = Lexicon::default();
        let cfg = SemanticsConfig {
            proper_nouns: ProperNounStyle::Constant,
            ..Default::default()
        };
        let c = Composer::new(&lex, cfg);
        let t = parse_sentence(&lex, "ann did not chase two dogs").unwrap();
        assert_eq!(
            c.compose_fol(&t).unwrap().to_string(),
            "¬∃x1.(two(x1) ∧ dog(x1) ∧ chase(ann,x1))"
        );
        let t = parse_sentence(&lex, "one dog liked bob that loved two rats").unwrap();
        assert_eq!(
            c.compose_fol(&t).unwrap(),
            c.vf_to_fol(&c.compose_vf(&t).unwrap()).unwrap()
        );
    }

    #[test]
    fn strategies_agree() {
        let lex = Lexicon::default();
        let t = parse_sentence(&lex, "all lions that did not follow two bears that chased three monkeys did not cry").unwrap();
        let a = Composer::new(&lex, SemanticsConfig::default());
        let b = Composer::new(
            &lex,
            SemanticsConfig {
                strategy: Strategy::ApplicativeOrder,
                ..Default::default()
            },
        );
        assert_eq!(a.compose_fol(&t).unwrap(), b.compose_fol(&t).unwrap());
        assert_eq!(a.compose_vf(&t).unwrap(), b.compose_vf(&t).unwrap());
    }
}
