//! Scoring of predicted meaning representations against gold ones.

mod counter;
mod report;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use counter::{clause_match_f, is_variable, MatchConfig, MatchResult, SearchStrategy};
pub use report::{cell_labels, CellLabels, EvalReport, MetricSummary, Score};

use crate::polarity::{Direction, PolarizedToken};

/// Token-level equality after whitespace normalization. An empty prediction
/// never matches.
pub fn exact_match(gold: &str, pred: &str) -> bool {
    let p: Vec<&str> = pred.split_whitespace().collect();
    !p.is_empty() && p == gold.split_whitespace().collect::<Vec<_>>()
}

/// Match counts for one direction of polarity marking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Prf {
    /// Both sides empty counts as perfect agreement.
    pub fn precision(&self) -> f64 {
        match (self.predicted, self.gold) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (p, _) => self.matched as f64 / p as f64,
        }
    }

    pub fn recall(&self) -> f64 {
        match (self.predicted, self.gold) {
            (0, 0) => 1.0,
            (_, 0) => 0.0,
            (_, g) => self.matched as f64 / g as f64,
        }
    }

    pub fn f(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn add(&mut self, other: &Prf) {
        self.matched += other.matched;
        self.predicted += other.predicted;
        self.gold += other.gold;
    }
}

/// Multiset overlap of the tokens marked `direction` on each side.
pub fn polarity_prf(gold: &[PolarizedToken], pred: &[PolarizedToken], direction: Direction) -> Prf {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut out = Prf::default();
    for t in gold.iter().filter(|t| t.direction == direction) {
        *counts.entry(&t.lemma).or_insert(0) += 1;
        out.gold += 1;
    }
    for t in pred.iter().filter(|t| t.direction == direction) {
        out.predicted += 1;
        if let Some(n) = counts.get_mut(t.lemma.as_str()) {
            if *n > 0 {
                *n -= 1;
                out.matched += 1;
            }
        }
    }
    out
}
