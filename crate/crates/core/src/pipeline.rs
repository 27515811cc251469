//! Scoring a prediction file against gold records.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{gold_clauses, DatasetRecord, Mr, Prediction};
use crate::drs::ClausalDrs;
use crate::entail::{self, atp_report, AtpReport, Budget, EntailmentVerdict, ExternalProver, Verdict};
use crate::error::{Error, Result};
use crate::fol::Fol;
use crate::lexicon::Lexicon;
use crate::metrics::{clause_match_f, exact_match, polarity_prf, EvalReport, MatchConfig, Prf, Score};
use crate::polarity::{Direction, PolarizedToken, Polarizer};
use crate::semantics::{Composer, SemanticsConfig};
use crate::vf::Vf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Exact,
    Counter,
    Polarity,
    Entail,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Exact, Metric::Counter, Metric::Polarity, Metric::Entail];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Exact => "exact",
            Metric::Counter => "counter",
            Metric::Polarity => "polarity",
            Metric::Entail => "entail",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown metric {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub mr: Mr,
    pub metrics: Vec<Metric>,
    pub matching: MatchConfig,
    pub budget: Budget,
    pub semantics: SemanticsConfig,
    /// Decides entailment with this prover instead of the internal engine.
    pub external: Option<ExternalProver>,
}

impl EvalConfig {
    pub fn new(mr: Mr, metrics: &[Metric]) -> EvalConfig {
        EvalConfig {
            mr,
            metrics: metrics.to_vec(),
            matching: MatchConfig::default(),
            budget: Budget::default(),
            semantics: SemanticsConfig::default(),
            external: None,
        }
    }
}

/// Per-record outcome kept beside the aggregate report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEval {
    pub id: String,
    pub prediction: String,
    pub unparseable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entailment: Option<[EntailmentVerdict; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub report: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atp: Option<AtpReport>,
    pub records: Vec<RecordEval>,
}

/// A representation read from text, kept in whichever forms parsed.
struct Reading {
    clauses: Option<ClausalDrs>,
    fol: Option<Fol>,
    polarity: Option<Vec<PolarizedToken>>,
    parsed: bool,
}

struct Reader<'a> {
    mr: Mr,
    composer: Composer<'a>,
    polarizer: Polarizer,
}

impl Reader<'_> {
    fn read(&self, text: &str) -> Reading {
        match self.mr {
            Mr::Fol => {
                let fol = Fol::parse(text).ok();
                Reading {
                    clauses: None,
                    polarity: fol.as_ref().map(|f| self.polarizer.fol(f)),
                    parsed: fol.is_some(),
                    fol,
                }
            }
            Mr::Vf => {
                let vf = Vf::parse(text).ok();
                Reading {
                    clauses: None,
                    fol: vf.as_ref().and_then(|v| self.composer.vf_to_fol(v).ok()),
                    polarity: vf.as_ref().map(|v| self.polarizer.vf(v)),
                    parsed: vf.is_some(),
                }
            }
            Mr::Drs => {
                let clauses = ClausalDrs::parse_inline(text).ok().filter(|c| !c.is_empty());
                let fol = clauses.as_ref().and_then(|c| c.to_fol().ok());
                Reading {
                    parsed: clauses.is_some(),
                    polarity: fol.as_ref().map(|f| self.polarizer.fol(f)),
                    clauses,
                    fol,
                }
            }
        }
    }
}

/// Scores every gold record against the prediction with the same id; a
/// missing prediction scores as an empty one.
pub fn evaluate(
    lex: &Lexicon,
    gold: &[DatasetRecord],
    preds: &[Prediction],
    cfg: &EvalConfig,
) -> Result<Evaluation> {
    if gold.is_empty() || preds.is_empty() {
        return Err(Error::NoRecords);
    }
    if cfg.metrics.contains(&Metric::Counter) && cfg.mr != Mr::Drs {
        return Err(Error::Config("clause matching needs the drs representation".into()));
    }
    let by_id: HashMap<&str, &Prediction> = preds.iter().map(|p| (p.id.as_str(), p)).collect();
    let reader = Reader {
        mr: cfg.mr,
        composer: Composer::new(lex, cfg.semantics),
        polarizer: Polarizer::for_lexicon(lex),
    };
    let wants = |m: Metric| cfg.metrics.contains(&m);
    let scored: Vec<(Vec<(String, Score)>, RecordEval)> = gold
        .par_iter()
        .map(|g| {
            let target = g.target(cfg.mr);
            let pred = by_id.get(g.id.as_str()).map(|p| p.raw.as_str()).unwrap_or("");
            let gr = reader.read(&target);
            let pr = reader.read(pred);
            let mut scores = Vec::new();
            if wants(Metric::Exact) {
                let v = if exact_match(&target, pred) { 1.0 } else { 0.0 };
                scores.push(("exact".to_string(), Score::Value(v)));
            }
            if wants(Metric::Counter) {
                let gc = match &gr.clauses {
                    Some(c) => c.clone(),
                    None => gold_clauses(g).unwrap_or(ClausalDrs(Vec::new())),
                };
                let counts = match &pr.clauses {
                    Some(pc) => {
                        let m = clause_match_f(gc.clauses(), pc.clauses(), &cfg.matching);
                        Prf {
                            matched: m.matched,
                            predicted: m.predicted,
                            gold: m.gold,
                        }
                    }
                    None => Prf {
                        matched: 0,
                        predicted: 0,
                        gold: gc.len(),
                    },
                };
                scores.push(("counter".to_string(), Score::Counts(counts)));
            }
            if wants(Metric::Polarity) {
                let gp = gr.polarity.clone().unwrap_or_default();
                let pp = pr.polarity.clone().unwrap_or_default();
                for d in [Direction::Up, Direction::Down] {
                    scores.push((format!("polarity_{d}"), Score::Counts(polarity_prf(&gp, &pp, d))));
                }
            }
            let mut entailment = None;
            if wants(Metric::Entail) {
                let verdicts = match (&gr.fol, &pr.fol) {
                    (Some(a), Some(b)) => match &cfg.external {
                        Some(ext) => ext.check(a, b),
                        None => entail::check(a, b, &cfg.budget),
                    },
                    _ => entail::malformed(),
                };
                let hit = |v: &EntailmentVerdict| if v.verdict == Verdict::Entails { 1.0 } else { 0.0 };
                scores.push(("entail_gold_to_pred".to_string(), Score::Value(hit(&verdicts[0]))));
                scores.push(("entail_pred_to_gold".to_string(), Score::Value(hit(&verdicts[1]))));
                scores.push((
                    "entail_both".to_string(),
                    Score::Value(hit(&verdicts[0]) * hit(&verdicts[1])),
                ));
                entailment = Some(verdicts);
            }
            let record = RecordEval {
                id: g.id.clone(),
                prediction: pred.to_string(),
                unparseable: !pr.parsed,
                entailment,
            };
            (scores, record)
        })
        .collect();
    let unparseable = scored.iter().filter(|(_, r)| r.unparseable).count();
    let items: Vec<_> = gold
        .iter()
        .zip(&scored)
        .map(|(g, (s, _))| (g.tags.clone(), s.clone()))
        .collect();
    let report = EvalReport::build(cfg.mr.name(), &items, unparseable);
    let records: Vec<RecordEval> = scored.into_iter().map(|(_, r)| r).collect();
    let atp = wants(Metric::Entail).then(|| {
        let verdicts: Vec<[EntailmentVerdict; 2]> = records.iter().filter_map(|r| r.entailment.clone()).collect();
        atp_report(&verdicts)
    });
    Ok(Evaluation {
        report,
        atp,
        records,
    })
}

/// Gold targets as predictions, keyed by record id.
pub fn gold_as_predictions(gold: &[DatasetRecord], mr: Mr) -> Vec<Prediction> {
    gold.iter()
        .map(|g| Prediction {
            id: g.id.clone(),
            raw: g.target(mr),
            malformed: false,
        })
        .collect()
}
