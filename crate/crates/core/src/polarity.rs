//! Monotonicity polarity of content words, read off a formula by tracking
//! whether each predicate occurs under an even or odd number of downward
//! entailing operators.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fol::Fol;
use crate::lexicon::{Lexicon, Quantifier};
use crate::vf::{Vf, VfOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Direction::Up => '↑',
            Direction::Down => '↓',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PolarizedToken {
    pub lemma: String,
    pub direction: Direction,
}

impl PolarizedToken {
    pub fn new(lemma: &str, direction: Direction) -> PolarizedToken {
        PolarizedToken {
            lemma: lemma.to_string(),
            direction,
        }
    }
}

impl fmt::Display for PolarizedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.lemma, self.direction.arrow())
    }
}

/// Marks content words; lemmas in the excluded set (numeral markers and,
/// when built from a lexicon, proper nouns) are skipped.
#[derive(Debug, Clone)]
pub struct Polarizer {
    excluded: BTreeSet<String>,
}

impl Default for Polarizer {
    fn default() -> Self {
        let excluded = Quantifier::ALL
            .iter()
            .filter_map(|q| q.numeral_marker())
            .map(String::from)
            .collect();
        Polarizer { excluded }
    }
}

impl Polarizer {
    pub fn for_lexicon(lex: &Lexicon) -> Polarizer {
        let mut p = Polarizer::default();
        p.excluded.extend(lex.proper_noun_lemmas());
        p
    }

    pub fn excluded(&self) -> &BTreeSet<String> {
        &self.excluded
    }

    fn emit(&self, lemma: &str, d: Direction, out: &mut Vec<PolarizedToken>) {
        let l = lemma.to_lowercase();
        if !self.excluded.contains(&l) {
            out.push(PolarizedToken { lemma: l, direction: d });
        }
    }

    pub fn fol(&self, f: &Fol) -> Vec<PolarizedToken> {
        let mut out = Vec::new();
        self.fol_into(f, Direction::Up, &mut out);
        out
    }

    fn fol_into(&self, f: &Fol, d: Direction, out: &mut Vec<PolarizedToken>) {
        match f {
            Fol::Atom(l, _) => self.emit(l, d, out),
            Fol::Not(b) => self.fol_into(b, d.flip(), out),
            Fol::Imp(a, b) => {
                self.fol_into(a, d.flip(), out);
                self.fol_into(b, d, out);
            }
            Fol::And(xs) | Fol::Or(xs) => xs.iter().for_each(|x| self.fol_into(x, d, out)),
            Fol::Forall(_, b) | Fol::Exists(_, b) => self.fol_into(b, d, out),
        }
    }

    pub fn vf(&self, f: &Vf) -> Vec<PolarizedToken> {
        let mut out = Vec::new();
        self.vf_into(f, Direction::Up, &mut out);
        out
    }

    fn vf_into(&self, f: &Vf, d: Direction, out: &mut Vec<PolarizedToken>) {
        match f {
            Vf::Lemma(l) => self.emit(l, d, out),
            Vf::Op(VfOp::All, args) => {
                self.vf_into(&args[0], d.flip(), out);
                self.vf_into(&args[1], d, out);
            }
            Vf::Op(VfOp::Not, args) => self.vf_into(&args[0], d.flip(), out),
            Vf::Op(_, args) => args.iter().for_each(|a| self.vf_into(a, d, out)),
        }
    }
}

pub fn polarize_fol(f: &Fol) -> Vec<PolarizedToken> {
    Polarizer::default().fol(f)
}

pub fn polarize_vf(f: &Vf) -> Vec<PolarizedToken> {
    Polarizer::default().vf(f)
}

/// Sorted copy, for multiset comparison.
pub fn as_multiset(tokens: &[PolarizedToken]) -> Vec<PolarizedToken> {
    let mut v = tokens.to_vec();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::{Down, Up};

    fn marks(tokens: &[PolarizedToken]) -> Vec<String> {
        tokens.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn first_order_marks() {
        let f = Fol::parse("all x1 . ( dog ( x1 ) -> run ( x1 ) )").unwrap();
        assert_eq!(marks(&polarize_fol(&f)), ["dog↓", "run↑"]);
        let f = Fol::parse("all x1 . ( dog ( x1 ) -> - run ( x1 ) )").unwrap();
        assert_eq!(marks(&polarize_fol(&f)), ["dog↓", "run↓"]);
        let f = Fol::parse("exists x1 . ( small ( x1 ) & dog ( x1 ) & - swim ( x1 ) )").unwrap();
        assert_eq!(marks(&polarize_fol(&f)), ["small↑", "dog↑", "swim↓"]);
    }

    #[test]
    fn variable_free_marks() {
        let p = Polarizer::for_lexicon(&Lexicon::default());
        assert_eq!(marks(&p.vf(&Vf::parse("ALL TIGER OR RUN SWIM").unwrap())), ["tiger↓", "run↑", "swim↑"]);
        assert_eq!(marks(&p.vf(&Vf::parse("EXIST ANN NOT TWO DOG CHASE").unwrap())), ["dog↓", "chase↓"]);
        assert_eq!(
            marks(&p.vf(&Vf::parse("EXIST AND SMALL DOG NOT SWIM").unwrap())),
            ["small↑", "dog↑", "swim↓"]
        );
    }

    #[test]
    fn numeral_markers_and_constants_are_skipped() {
        let f = Fol::parse("- exists x1 . ( two ( x1 ) & dog ( x1 ) & chase ( ann , x1 ) )").unwrap();
        assert_eq!(
            polarize_fol(&f),
            vec![PolarizedToken::new("dog", Down), PolarizedToken::new("chase", Down)]
        );
        let g = Fol::parse("exists x1 . ( ann ( x1 ) & run ( x1 ) )").unwrap();
        let p = Polarizer::for_lexicon(&Lexicon::default());
        assert_eq!(p.fol(&g), vec![PolarizedToken::new("run", Up)]);
    }
}
