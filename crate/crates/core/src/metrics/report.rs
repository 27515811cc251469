use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Prf;
use crate::grammar::PhenomenonTags;

/// One record's contribution to a metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    /// Averaged over records.
    Value(f64),
    /// Summed over records, then turned into precision, recall and F.
    Counts(Prf),
}

/// Breakdown cells a record falls into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellLabels {
    /// Class of the subject quantifier, or the object's when the subject is
    /// a proper noun.
    pub quantifier: Option<String>,
    /// `Adj`, `Adv`, `Con` (conjunction or disjunction), combinations joined
    /// by `+`, or `Non`; suffixed `+Neg` under sentential negation.
    pub modifier: String,
    pub depth: String,
}

pub fn cell_labels(tags: &PhenomenonTags) -> CellLabels {
    let quantifier = tags
        .subject_quantifier
        .or(tags.object_quantifier)
        .map(|q| format!("{:?}", q.kind()));
    let mut mods = Vec::new();
    if tags.has_adjective {
        mods.push("Adj");
    }
    if tags.has_adverb {
        mods.push("Adv");
    }
    if tags.has_conjunction || tags.has_disjunction {
        mods.push("Con");
    }
    let mut modifier = if mods.is_empty() { "Non".to_string() } else { mods.join("+") };
    if tags.has_negation {
        modifier.push_str("+Neg");
    }
    CellLabels {
        quantifier,
        modifier,
        depth: format!("Dep{}", tags.depth),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSummary {
    pub overall: f64,
    pub by_quantifier: BTreeMap<String, f64>,
    pub by_modifier: BTreeMap<String, f64>,
    pub by_depth: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub representation: String,
    pub records: usize,
    /// Predictions that failed to parse; they still count, as misses.
    pub unparseable: usize,
    pub metrics: BTreeMap<String, MetricSummary>,
}

#[derive(Default)]
enum Acc {
    #[default]
    Empty,
    Mean(f64, usize),
    Counts(Prf),
}

impl Acc {
    fn add(&mut self, s: &Score) {
        match (self, s) {
            (a @ Acc::Empty, Score::Value(v)) => *a = Acc::Mean(*v, 1),
            (a @ Acc::Empty, Score::Counts(c)) => *a = Acc::Counts(*c),
            (Acc::Mean(sum, n), Score::Value(v)) => {
                *sum += v;
                *n += 1;
            }
            (Acc::Counts(p), Score::Counts(c)) => p.add(c),
            _ => panic!("metric mixes averaged values and counts"),
        }
    }

    fn values(&self, name: &str) -> Vec<(String, f64)> {
        match self {
            Acc::Empty => Vec::new(),
            Acc::Mean(sum, n) => vec![(name.to_string(), sum / *n as f64)],
            Acc::Counts(p) => vec![
                (format!("{name}_precision"), p.precision()),
                (format!("{name}_recall"), p.recall()),
                (format!("{name}_f"), p.f()),
            ],
        }
    }
}

impl EvalReport {
    pub fn build(
        representation: &str,
        items: &[(PhenomenonTags, Vec<(String, Score)>)],
        unparseable: usize,
    ) -> EvalReport {
        let mut overall: BTreeMap<&str, Acc> = BTreeMap::new();
        let mut cells: BTreeMap<(usize, String, &str), Acc> = BTreeMap::new();
        for (tags, scores) in items {
            let labels = cell_labels(tags);
            for (name, s) in scores {
                overall.entry(name).or_default().add(s);
                if let Some(q) = &labels.quantifier {
                    cells.entry((0, q.clone(), name)).or_default().add(s);
                }
                cells.entry((1, labels.modifier.clone(), name)).or_default().add(s);
                cells.entry((2, labels.depth.clone(), name)).or_default().add(s);
            }
        }
        let mut metrics: BTreeMap<String, MetricSummary> = BTreeMap::new();
        for (name, acc) in &overall {
            for (k, v) in acc.values(name) {
                metrics.entry(k).or_default().overall = v;
            }
        }
        for ((axis, cell, name), acc) in &cells {
            for (k, v) in acc.values(name) {
                let m = metrics.entry(k).or_default();
                let target = match axis {
                    0 => &mut m.by_quantifier,
                    1 => &mut m.by_modifier,
                    _ => &mut m.by_depth,
                };
                target.insert(cell.clone(), v);
            }
        }
        EvalReport {
            representation: representation.to_string(),
            records: items.len(),
            unparseable,
            metrics,
        }
    }

    /// Cell-wise mean of several reports, e.g. runs with different seeds. A
    /// cell missing from some reports is averaged over those that have it.
    pub fn mean(reports: &[EvalReport]) -> Option<EvalReport> {
        let first = reports.first()?;
        let mut sums: BTreeMap<(String, usize, String), (f64, usize)> = BTreeMap::new();
        for r in reports {
            for (name, m) in &r.metrics {
                let mut add = |axis: usize, cell: &str, v: f64| {
                    let e = sums.entry((name.clone(), axis, cell.to_string())).or_insert((0.0, 0));
                    e.0 += v;
                    e.1 += 1;
                };
                add(0, "", m.overall);
                for (axis, cells) in [(1, &m.by_quantifier), (2, &m.by_modifier), (3, &m.by_depth)] {
                    for (cell, v) in cells {
                        add(axis, cell, *v);
                    }
                }
            }
        }
        let mut metrics: BTreeMap<String, MetricSummary> = BTreeMap::new();
        for ((name, axis, cell), (sum, n)) in sums {
            let v = sum / n as f64;
            let m = metrics.entry(name).or_default();
            let target = match axis {
                0 => {
                    m.overall = v;
                    continue;
                }
                1 => &mut m.by_quantifier,
                2 => &mut m.by_modifier,
                _ => &mut m.by_depth,
            };
            target.insert(cell, v);
        }
        Some(EvalReport {
            representation: first.representation.clone(),
            records: reports.iter().map(|r| r.records).sum::<usize>() / reports.len(),
            unparseable: reports.iter().map(|r| r.unparseable).sum::<usize>() / reports.len(),
            metrics,
        })
    }

    /// Plain-text table, one row per metric and breakdown cell.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "representation: {}  records: {}  unparseable: {}",
            self.representation, self.records, self.unparseable
        );
        for (name, m) in &self.metrics {
            let _ = writeln!(out, "{name:<28} overall {:.4}", m.overall);
            for (axis, cells) in [
                ("quantifier", &m.by_quantifier),
                ("modifier", &m.by_modifier),
                ("depth", &m.by_depth),
            ] {
                for (cell, v) in cells {
                    let _ = writeln!(out, "{:<28} {axis:<10} {cell:<12} {v:.4}", "");
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Quantifier;

    fn tags(q: Quantifier, adj: bool, neg: bool, depth: usize) -> PhenomenonTags {
        PhenomenonTags {
            subject_quantifier: Some(q),
            object_quantifier: None,
            quantifiers: vec![q],
            has_negation: neg,
            has_adjective: adj,
            has_adverb: false,
            has_conjunction: false,
            has_disjunction: false,
            embedding_types: Vec::new(),
            depth,
        }
    }

    #[test]
    fn labels() {
        let l = cell_labels(&tags(Quantifier::Two, true, true, 0));
        assert_eq!(l.quantifier.as_deref(), Some("Num"));
        assert_eq!(l.modifier, "Adj+Neg");
        assert_eq!(l.depth, "Dep0");
        assert_eq!(cell_labels(&tags(Quantifier::A, false, false, 2)).modifier, "Non");
    }

    #[test]
    fn averages_and_absent_cells() {
        let items = vec![
            (tags(Quantifier::A, true, false, 0), vec![("exact".to_string(), Score::Value(1.0))]),
            (tags(Quantifier::One, true, false, 0), vec![("exact".to_string(), Score::Value(0.0))]),
            (tags(Quantifier::Every, false, false, 0), vec![("exact".to_string(), Score::Value(1.0))]),
        ];
        let r = EvalReport::build("fol", &items, 0);
        let m = &r.metrics["exact"];
        assert!((m.overall - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.by_quantifier["Exi"], 0.5);
        assert_eq!(m.by_quantifier["Uni"], 1.0);
        assert!(!m.by_quantifier.contains_key("Num"));
        assert_eq!(m.by_modifier["Adj"], 0.5);
    }

    #[test]
    fn counts_are_micro_averaged() {
        let c = |m, p, g| {
            Score::Counts(Prf {
                matched: m,
                predicted: p,
                gold: g,
            })
        };
        let items = vec![
            (tags(Quantifier::A, false, false, 0), vec![("up".to_string(), c(1, 1, 2))]),
            (tags(Quantifier::A, false, false, 0), vec![("up".to_string(), c(3, 3, 4))]),
        ];
        let r = EvalReport::build("fol", &items, 0);
        assert_eq!(r.metrics["up_precision"].overall, 1.0);
        assert_eq!(r.metrics["up_recall"].overall, 4.0 / 6.0);
    }

    #[test]
    fn mean_of_runs() {
        let run = |v| {
            EvalReport::build(
                "fol",
                &[(tags(Quantifier::A, false, false, 0), vec![("exact".to_string(), Score::Value(v))])],
                0,
            )
        };
        let m = EvalReport::mean(&[run(1.0), run(0.0)]).unwrap();
        assert_eq!(m.metrics["exact"].overall, 0.5);
        assert_eq!(m.metrics["exact"].by_quantifier["Exi"], 0.5);
        assert!(EvalReport::mean(&[]).is_none());
    }
}
