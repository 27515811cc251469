//! Entailment between first-order formulas: finite countermodel search,
//! a ground tableau prover whose proofs are replayed by a checker, TPTP
//! export and an adapter for external provers.

mod model;
mod sat;
mod tableau;
mod tptp;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use model::FiniteModel;
pub use tableau::{Closure, Inference, Proof, ProofNode};
pub use tptp::{parse_szs_status, to_tptp, tptp_problem, ExternalProver, Role};

use crate::fol::{Fol, FolTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entails,
    NotEntails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entails => "entails",
            Verdict::NotEntails => "not_entails",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Gold entails prediction, or prediction entails gold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntailDirection {
    GoldToPred,
    PredToGold,
}

impl fmt::Display for EntailDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntailDirection::GoldToPred => "G=>P",
            EntailDirection::PredToGold => "G<=P",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Proof(Proof),
    Countermodel(FiniteModel),
    /// Why no definite verdict was reached, or why the input was rejected.
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntailmentVerdict {
    pub direction: EntailDirection,
    pub verdict: Verdict,
    pub witness: Witness,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl EntailmentVerdict {
    /// Proof depth or countermodel, in one line.
    pub fn describe(&self) -> String {
        match &self.witness {
            Witness::Proof(p) => format!("closed tableau, depth {}, {} inferences", p.depth(), p.size()),
            Witness::Countermodel(m) => format!("countermodel: {m}"),
            Witness::Note(n) => n.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub max_domain: usize,
    /// Upper bound of the iterative deepening on existential witnesses.
    pub max_witnesses: usize,
    pub tableau_nodes: usize,
    pub sat_decisions: usize,
    pub timeout_ms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_domain: 4,
            max_witnesses: 16,
            tableau_nodes: 200_000,
            sat_decisions: 2_000_000,
            timeout_ms: 10_000,
        }
    }
}

/// Domains searched for countermodels before the tableau runs; larger ones
/// only if the tableau neither closes nor saturates.
const EARLY_DOMAINS: usize = 1;

/// Decides whether `premise` entails `conclusion`. Every definite answer has
/// been re-checked: countermodels by evaluation, proofs by replay.
pub fn entails(premise: &Fol, conclusion: &Fol, budget: &Budget) -> (Verdict, Witness) {
    let premise = close(premise);
    let conclusion = close(conclusion);
    let deadline = Instant::now() + Duration::from_millis(budget.timeout_ms);
    let problem = Fol::and(vec![premise.clone(), Fol::not(conclusion.clone())]);
    let refutes = |m: &FiniteModel| {
        m.is_well_formed()
            && m.eval(&premise).unwrap_or(false)
            && !m.eval(&conclusion).unwrap_or(true)
    };
    let search = |domains: std::ops::RangeInclusive<usize>| {
        for n in domains {
            if Instant::now() > deadline {
                return None;
            }
            if let sat::Search::Found(m) = sat::find_model(&problem, n, budget.sat_decisions, Some(deadline)) {
                if refutes(&m) {
                    return Some(m);
                }
            }
        }
        None
    };
    let max_domain = budget.max_domain.max(1);
    if let Some(m) = search(1..=max_domain.min(EARLY_DOMAINS)) {
        return (Verdict::NotEntails, Witness::Countermodel(m));
    }
    let mut prover = tableau::Prover::new(budget.max_witnesses, budget.tableau_nodes, Some(deadline));
    let unknown = match prover.refute(&premise, &conclusion) {
        tableau::Outcome::Closed(proof) if proof.verify() => return (Verdict::Entails, Witness::Proof(proof)),
        tableau::Outcome::Closed(_) => "proof failed verification",
        tableau::Outcome::Saturated(m) if refutes(&m) => return (Verdict::NotEntails, Witness::Countermodel(m)),
        _ => "search budget exhausted",
    };
    if let Some(m) = search(EARLY_DOMAINS + 1..=max_domain) {
        return (Verdict::NotEntails, Witness::Countermodel(m));
    }
    if Instant::now() > deadline {
        return (Verdict::Unknown, Witness::Note("time limit reached".into()));
    }
    (Verdict::Unknown, Witness::Note(unknown.into()))
}

/// Both directions between a gold and a predicted formula.
pub fn check(gold: &Fol, pred: &Fol, budget: &Budget) -> [EntailmentVerdict; 2] {
    let run = |direction, a: &Fol, b: &Fol| {
        let start = Instant::now();
        let (verdict, witness) = entails(a, b, budget);
        EntailmentVerdict {
            direction,
            verdict,
            witness,
            elapsed: start.elapsed(),
        }
    };
    [
        run(EntailDirection::GoldToPred, gold, pred),
        run(EntailDirection::PredToGold, pred, gold),
    ]
}

/// Verdicts for a prediction that could not be read as a formula.
pub fn malformed() -> [EntailmentVerdict; 2] {
    [EntailDirection::GoldToPred, EntailDirection::PredToGold].map(|direction| EntailmentVerdict {
        direction,
        verdict: Verdict::NotEntails,
        witness: Witness::Note("malformed".into()),
        elapsed: Duration::ZERO,
    })
}

pub fn equivalent(a: &Fol, b: &Fol, budget: &Budget) -> bool {
    check(a, b, budget).iter().all(|v| v.verdict == Verdict::Entails)
}

/// Accuracies over a set of records for the three entailment targets.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AtpReport {
    pub records: usize,
    pub gold_to_pred: f64,
    pub pred_to_gold: f64,
    pub both: f64,
    pub unknown_gold_to_pred: usize,
    pub unknown_pred_to_gold: usize,
}

pub fn atp_report(results: &[[EntailmentVerdict; 2]]) -> AtpReport {
    let n = results.len();
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let count = |i: usize, v: Verdict| results.iter().filter(|r| r[i].verdict == v).count();
    let both = results
        .iter()
        .filter(|r| r.iter().all(|v| v.verdict == Verdict::Entails))
        .count();
    AtpReport {
        records: n,
        gold_to_pred: frac(count(0, Verdict::Entails)),
        pred_to_gold: frac(count(1, Verdict::Entails)),
        both: frac(both),
        unknown_gold_to_pred: count(0, Verdict::Unknown),
        unknown_pred_to_gold: count(1, Verdict::Unknown),
    }
}

/// Negation normal form of `f`, or of `¬f` when `negated`. Implications are
/// eliminated.
pub fn nnf(f: &Fol, negated: bool) -> Fol {
    match f {
        Fol::Atom(..) if negated => Fol::not(f.clone()),
        Fol::Atom(..) => f.clone(),
        Fol::Not(b) => nnf(b, !negated),
        Fol::And(xs) | Fol::Or(xs) => {
            let parts = xs.iter().map(|x| nnf(x, negated)).collect();
            if matches!(f, Fol::And(_)) != negated {
                Fol::and(parts)
            } else {
                Fol::or(parts)
            }
        }
        Fol::Imp(a, b) => {
            if negated {
                Fol::and(vec![nnf(a, false), nnf(b, true)])
            } else {
                Fol::or(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Fol::Forall(x, b) | Fol::Exists(x, b) => {
            let body = nnf(b, negated);
            if matches!(f, Fol::Forall(..)) != negated {
                Fol::forall(x, body)
            } else {
                Fol::exists(x, body)
            }
        }
    }
}

/// Replaces the free occurrences of variable `x` by the constant `c`.
pub fn subst(f: &Fol, x: &str, c: &str) -> Fol {
    match f {
        Fol::Atom(p, args) => Fol::Atom(
            p.clone(),
            args.iter()
                .map(|a| match a {
                    FolTerm::Var(v) if v == x => FolTerm::Const(c.to_string()),
                    other => other.clone(),
                })
                .collect(),
        ),
        Fol::Not(b) => Fol::not(subst(b, x, c)),
        Fol::And(xs) => Fol::And(xs.iter().map(|y| subst(y, x, c)).collect()),
        Fol::Or(xs) => Fol::Or(xs.iter().map(|y| subst(y, x, c)).collect()),
        Fol::Imp(a, b) => Fol::imp(subst(a, x, c), subst(b, x, c)),
        Fol::Forall(v, _) | Fol::Exists(v, _) if v == x => f.clone(),
        Fol::Forall(v, b) => Fol::forall(v, subst(b, x, c)),
        Fol::Exists(v, b) => Fol::exists(v, subst(b, x, c)),
    }
}

pub(crate) fn mentions(f: &Fol, name: &str) -> bool {
    let mut found = false;
    f.visit_atoms(&mut |_, args| found |= args.iter().any(|a| a.name() == name));
    found
}

/// Free variables turned into constants of the same name.
fn close(f: &Fol) -> Fol {
    f.free_vars().iter().fold(f.clone(), |g, v| subst(&g, v, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fol(s: &str) -> Fol {
        Fol::parse(s).unwrap()
    }

    #[test]
    fn nnf_pushes_negation_inward() {
        let f = fol("- all x1 . ( dog ( x1 ) -> run ( x1 ) )");
        assert_eq!(nnf(&f, false), fol("exists x1 . ( dog ( x1 ) & - run ( x1 ) )"));
    }

    #[test]
    fn weakened_antecedent() {
        let g = fol("all x1 . ( ( cat ( x1 ) & wild ( x1 ) ) -> ( escape ( x1 ) & run ( x1 ) ) )");
        let p = fol("all x1 . ( cat ( x1 ) -> ( escape ( x1 ) & run ( x1 ) ) )");
        let [gp, pg] = check(&g, &p, &Budget::default());
        assert_eq!(gp.verdict, Verdict::NotEntails);
        assert_eq!(pg.verdict, Verdict::Entails);
        let Witness::Countermodel(m) = &gp.witness else { panic!() };
        // a cat that is not wild and does not both escape and run
        assert!(m.eval(&g).unwrap() && !m.eval(&p).unwrap());
    }

    #[test]
    fn conjunction_weakening() {
        let g = fol("exists x1 . ( dog ( x1 ) & run ( x1 ) )");
        let p = fol("exists x1 . ( dog ( x1 ) & wild ( x1 ) & run ( x1 ) )");
        let [gp, pg] = check(&g, &p, &Budget::default());
        assert_eq!((gp.verdict, pg.verdict), (Verdict::NotEntails, Verdict::Entails));
    }

    #[test]
    fn reflexive_with_nested_quantifiers() {
        let g = fol("all x1 . ( ( lion ( x1 ) & - exists x2 . ( two ( x2 ) & bear ( x2 ) & exists x3 . ( three ( x3 ) & monkey ( x3 ) & chase ( x2 , x3 ) ) & follow ( x1 , x2 ) ) ) -> - cry ( x1 ) )");
        assert!(equivalent(&g, &g, &Budget::default()));
    }

    #[test]
    fn constants() {
        let a = fol("chase ( ann , bob )");
        let b = fol("exists x1 . chase ( ann , x1 )");
        assert_eq!(entails(&a, &b, &Budget::default()).0, Verdict::Entails);
        assert_eq!(entails(&b, &a, &Budget::default()).0, Verdict::NotEntails);
    }

    #[test]
    fn report_counts_unknowns_as_failures() {
        let mk = |v: Verdict| EntailmentVerdict {
            direction: EntailDirection::GoldToPred,
            verdict: v,
            witness: Witness::Note(String::new()),
            elapsed: Duration::ZERO,
        };
        let r = atp_report(&[
            [mk(Verdict::Entails), mk(Verdict::Entails)],
            [mk(Verdict::Entails), mk(Verdict::Unknown)],
        ]);
        assert_eq!((r.gold_to_pred, r.pred_to_gold, r.both), (1.0, 0.5, 0.5));
        assert_eq!(r.unknown_pred_to_gold, 1);
    }
}
