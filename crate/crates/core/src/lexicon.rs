//! Lexical entries for the generated fragment.
//!
//! The lexicon is immutable once loaded and is shared by reference between
//! the generator, the composition pipelines and the evaluators.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six determiners of the fragment, in grammar order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Every,
    All,
    A,
    One,
    Two,
    Three,
}

/// Coarse quantifier classes used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuantifierType {
    Exi,
    Num,
    Uni,
}

impl Quantifier {
    pub const ALL: [Quantifier; 6] = [
        Quantifier::Every,
        Quantifier::All,
        Quantifier::A,
        Quantifier::One,
        Quantifier::Two,
        Quantifier::Three,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Quantifier::Every => "every",
            Quantifier::All => "all",
            Quantifier::A => "a",
            Quantifier::One => "one",
            Quantifier::Two => "two",
            Quantifier::Three => "three",
        }
    }

    pub fn from_word(word: &str) -> Option<Quantifier> {
        Quantifier::ALL.into_iter().find(|q| q.word() == word)
    }

    /// Whether the noun after this determiner is plural.
    pub fn takes_plural(self) -> bool {
        matches!(self, Quantifier::All | Quantifier::Two | Quantifier::Three)
    }

    pub fn kind(self) -> QuantifierType {
        match self {
            Quantifier::A | Quantifier::One => QuantifierType::Exi,
            Quantifier::Two | Quantifier::Three => QuantifierType::Num,
            Quantifier::Every | Quantifier::All => QuantifierType::Uni,
        }
    }

    /// Numerals contribute a marker predicate named after the numeral.
    pub fn numeral_marker(self) -> Option<&'static str> {
        match self {
            Quantifier::Two => Some("two"),
            Quantifier::Three => Some("three"),
            _ => None,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

impl fmt::Display for QuantifierType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QuantifierType::Exi => "Exi",
            QuantifierType::Num => "Num",
            QuantifierType::Uni => "Uni",
        };
        f.write_str(s)
    }
}

/// Lexical categories with open word lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Quantifier,
    Noun,
    ProperNoun,
    IntransitiveVerb,
    SecondVerb,
    TransitiveVerb,
    Adjective,
    Adverb,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::Quantifier,
        Category::Noun,
        Category::ProperNoun,
        Category::IntransitiveVerb,
        Category::SecondVerb,
        Category::TransitiveVerb,
        Category::Adjective,
        Category::Adverb,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Category::Quantifier => "Q",
            Category::Noun => "N",
            Category::ProperNoun => "PN",
            Category::IntransitiveVerb => "IV",
            Category::SecondVerb => "IV'",
            Category::TransitiveVerb => "TV",
            Category::Adjective => "Adj",
            Category::Adverb => "Adv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounEntry {
    pub lemma: String,
    pub singular: String,
    pub plural: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbEntry {
    pub lemma: String,
    pub past: String,
    pub base: String,
}

/// Proper nouns, adjectives and adverbs: one surface form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordEntry {
    pub lemma: String,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    #[serde(default = "default_quantifiers")]
    pub quantifiers: Vec<Quantifier>,
    pub nouns: Vec<NounEntry>,
    pub proper_nouns: Vec<WordEntry>,
    pub intransitive_verbs: Vec<VerbEntry>,
    pub second_verbs: Vec<VerbEntry>,
    pub transitive_verbs: Vec<VerbEntry>,
    pub adjectives: Vec<WordEntry>,
    pub adverbs: Vec<WordEntry>,
}

fn default_quantifiers() -> Vec<Quantifier> {
    Quantifier::ALL.to_vec()
}

fn noun(lemma: &str, plural: &str) -> NounEntry {
    NounEntry {
        lemma: lemma.into(),
        singular: lemma.into(),
        plural: plural.into(),
    }
}

fn verb(lemma: &str, past: &str) -> VerbEntry {
    VerbEntry {
        lemma: lemma.into(),
        past: past.into(),
        base: lemma.into(),
    }
}

fn word(lemma: &str) -> WordEntry {
    WordEntry {
        lemma: lemma.into(),
        surface: lemma.into(),
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            quantifiers: default_quantifiers(),
            nouns: vec![
                noun("dog", "dogs"),
                noun("rabbit", "rabbits"),
                noun("cat", "cats"),
                noun("bear", "bears"),
                noun("tiger", "tigers"),
                noun("lion", "lions"),
                noun("monkey", "monkeys"),
                noun("rat", "rats"),
                noun("pig", "pigs"),
                noun("fox", "foxes"),
                noun("wolf", "wolves"),
            ],
            proper_nouns: ["ann", "bob", "fred", "chris", "eliott", "john", "mary", "sue", "tom", "dave"]
                .into_iter()
                .map(word)
                .collect(),
            intransitive_verbs: vec![
                verb("run", "ran"),
                verb("walk", "walked"),
                verb("swim", "swam"),
                verb("dance", "danced"),
                verb("dawdle", "dawdled"),
                verb("escape", "escaped"),
                verb("cry", "cried"),
                verb("sleep", "slept"),
                verb("jump", "jumped"),
                verb("move", "moved"),
            ],
            second_verbs: vec![
                verb("laugh", "laughed"),
                verb("groan", "groaned"),
                verb("roar", "roared"),
                verb("scream", "screamed"),
                verb("come", "came"),
                verb("run", "ran"),
                verb("cry", "cried"),
                verb("swim", "swam"),
                verb("smile", "smiled"),
                verb("shout", "shouted"),
            ],
            transitive_verbs: vec![
                verb("kiss", "kissed"),
                verb("kick", "kicked"),
                verb("clean", "cleaned"),
                verb("touch", "touched"),
                verb("chase", "chased"),
                verb("love", "loved"),
                verb("like", "liked"),
                verb("follow", "followed"),
                verb("know", "knew"),
                verb("admire", "admired"),
            ],
            adjectives: [
                "small", "large", "crazy", "polite", "wild", "white", "black", "brown", "cute", "old",
            ]
            .into_iter()
            .map(word)
            .collect(),
            adverbs: [
                "slowly",
                "quickly",
                "seriously",
                "suddenly",
                "happily",
                "loudly",
                "quietly",
                "rapidly",
                "carefully",
                "gracefully",
            ]
            .into_iter()
            .map(word)
            .collect(),
        }
    }
}

impl Lexicon {
    /// Loads a TOML lexicon and validates it.
    pub fn from_toml_str(text: &str) -> Result<Lexicon> {
        let lex: Lexicon = toml::from_str(text).map_err(|e| Error::Lexicon(e.to_string()))?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Lexicon> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("lexicon serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut qs = self.quantifiers.clone();
        qs.sort();
        if qs != Quantifier::ALL.to_vec() {
            return Err(Error::Lexicon(
                "quantifiers must be exactly every, all, a, one, two, three".into(),
            ));
        }
        for cat in Category::ALL.into_iter().skip(1) {
            if self.len(cat) == 0 {
                return Err(Error::Lexicon(format!("category {} is empty", cat.symbol())));
            }
        }
        for n in &self.nouns {
            if n.singular == n.plural {
                return Err(Error::Lexicon(format!(
                    "noun {:?} needs distinct singular and plural forms",
                    n.lemma
                )));
            }
        }
        for v in self
            .intransitive_verbs
            .iter()
            .chain(&self.second_verbs)
            .chain(&self.transitive_verbs)
        {
            if v.past == v.base {
                return Err(Error::Lexicon(format!(
                    "verb {:?} needs distinct past and base forms",
                    v.lemma
                )));
            }
        }
        for cat in Category::ALL.into_iter().skip(1) {
            let lemmas = self.lemmas(cat);
            let unique: BTreeSet<_> = lemmas.iter().collect();
            if unique.len() != lemmas.len() {
                return Err(Error::Lexicon(format!(
                    "duplicate lemma in category {}",
                    cat.symbol()
                )));
            }
            for l in &lemmas {
                let ok = !l.is_empty()
                    && l.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                    && l.chars().all(|c| c.is_ascii_lowercase() || c == '_');
                if !ok {
                    return Err(Error::Lexicon(format!(
                        "lemma {l:?} must be lowercase ASCII letters"
                    )));
                }
                if l.len() > 1 && l.starts_with('x') && l[1..].chars().all(|c| c.is_ascii_digit()) {
                    return Err(Error::Lexicon(format!("lemma {l:?} clashes with variable names")));
                }
                if matches!(l.as_str(), "exists" | "all" | "two" | "three") {
                    return Err(Error::Lexicon(format!("lemma {l:?} is reserved")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self, cat: Category) -> usize {
        match cat {
            Category::Quantifier => self.quantifiers.len(),
            Category::Noun => self.nouns.len(),
            Category::ProperNoun => self.proper_nouns.len(),
            Category::IntransitiveVerb => self.intransitive_verbs.len(),
            Category::SecondVerb => self.second_verbs.len(),
            Category::TransitiveVerb => self.transitive_verbs.len(),
            Category::Adjective => self.adjectives.len(),
            Category::Adverb => self.adverbs.len(),
        }
    }

    pub fn lemma(&self, cat: Category, index: usize) -> &str {
        match cat {
            Category::Quantifier => self.quantifiers[index].word(),
            Category::Noun => &self.nouns[index].lemma,
            Category::ProperNoun => &self.proper_nouns[index].lemma,
            Category::IntransitiveVerb => &self.intransitive_verbs[index].lemma,
            Category::SecondVerb => &self.second_verbs[index].lemma,
            Category::TransitiveVerb => &self.transitive_verbs[index].lemma,
            Category::Adjective => &self.adjectives[index].lemma,
            Category::Adverb => &self.adverbs[index].lemma,
        }
    }

    pub fn lemmas(&self, cat: Category) -> Vec<String> {
        (0..self.len(cat)).map(|i| self.lemma(cat, i).to_string()).collect()
    }

    pub fn proper_noun_lemmas(&self) -> BTreeSet<String> {
        self.proper_nouns.iter().map(|p| p.lemma.clone()).collect()
    }

    pub fn adjective_lemmas(&self) -> BTreeSet<String> {
        self.adjectives.iter().map(|p| p.lemma.clone()).collect()
    }

    pub fn noun_lemmas(&self) -> BTreeSet<String> {
        self.nouns.iter().map(|p| p.lemma.clone()).collect()
    }

    pub fn transitive_lemmas(&self) -> BTreeSet<String> {
        self.transitive_verbs.iter().map(|p| p.lemma.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_is_valid() {
        let lex = Lexicon::default();
        lex.validate().unwrap();
        assert_eq!(lex.quantifiers.len(), 6);
        assert_eq!(lex.nouns.len(), 11);
        assert_eq!(lex.adjectives.len(), 10);
        assert_eq!(lex.adverbs.len(), 10);
        assert!(lex.proper_nouns.len() >= 5);
        assert!(lex.intransitive_verbs.len() >= 5);
        assert!(lex.second_verbs.len() >= 5);
        assert!(lex.transitive_verbs.len() >= 5);
    }

    #[test]
    fn toml_round_trip() {
        let lex = Lexicon::default();
        let text = lex.to_toml_string();
        assert_eq!(Lexicon::from_toml_str(&text).unwrap(), lex);
    }

    #[test]
    fn rejects_bad_entries() {
        let mut lex = Lexicon::default();
        lex.nouns[0].plural = lex.nouns[0].singular.clone();
        assert!(lex.validate().is_err());

        let mut lex = Lexicon::default();
        lex.quantifiers.pop();
        assert!(lex.validate().is_err());

        let mut lex = Lexicon::default();
        lex.adverbs.push(word("slowly"));
        assert!(lex.validate().is_err());

        let mut lex = Lexicon::default();
        lex.transitive_verbs[0].past = "kiss".into();
        assert!(lex.validate().is_err());
    }
}
