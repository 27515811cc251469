//! Clause-level F-score between two clausal DRSs under the best one-to-one
//! renaming of the prediction's variables onto the gold variables.
//!
//! Variables are tokens of the form letters-then-digits (`b3`, `x12`); all
//! other tokens are constants and must match literally. Box labels and
//! discourse referents are separate namespaces, told apart by position:
//! the first field and the arguments of `NOT`, `IMP` and `OR` are boxes,
//! everything else is a referent.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::drs::Clause;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    /// Exhaustive when both sides are small, hill-climbing otherwise.
    #[default]
    Auto,
    Exhaustive,
    HillClimb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    pub restarts: usize,
    /// Largest number of variables per side searched exhaustively.
    pub exhaustive_threshold: usize,
    pub seed: u64,
    /// Whether `REF` clauses take part in matching.
    pub count_ref: bool,
    pub strategy: SearchStrategy,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            restarts: 10,
            exhaustive_threshold: 8,
            seed: 0,
            count_ref: false,
            strategy: SearchStrategy::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub matched: usize,
    pub gold: usize,
    pub predicted: usize,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    /// Prediction variable to gold variable.
    pub mapping: BTreeMap<String, String>,
}

pub fn is_variable(tok: &str) -> bool {
    let letters = tok.trim_end_matches(|c: char| c.is_ascii_digit());
    !letters.is_empty()
        && letters.len() < tok.len()
        && letters.chars().all(|c| c.is_ascii_lowercase())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Box,
    Referent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Slot {
    Var(usize),
    Const(String),
}

/// A clause with variables replaced by indices into one side's variable table.
#[derive(Debug, Clone)]
struct Encoded {
    op: String,
    slots: Vec<Slot>,
}

struct Side {
    vars: Vec<(Kind, String)>,
    clauses: Vec<Encoded>,
}

fn encode(clauses: &[&Clause]) -> Side {
    let mut index: HashMap<(Kind, String), usize> = HashMap::new();
    let mut vars = Vec::new();
    let mut out = Vec::new();
    for c in clauses {
        let box_args = matches!(c.op.as_str(), "NOT" | "IMP" | "OR");
        let mut slots = Vec::with_capacity(c.args.len() + 1);
        let fields = std::iter::once((&c.box_label, Kind::Box)).chain(
            c.args
                .iter()
                .map(|a| (a, if box_args { Kind::Box } else { Kind::Referent })),
        );
        for (tok, kind) in fields {
            if is_variable(tok) {
                let key = (kind, tok.clone());
                let id = *index.entry(key.clone()).or_insert_with(|| {
                    vars.push(key);
                    vars.len() - 1
                });
                slots.push(Slot::Var(id));
            } else {
                slots.push(Slot::Const(tok.clone()));
            }
        }
        out.push(Encoded {
            op: c.op.clone(),
            slots,
        });
    }
    Side { vars, clauses: out }
}

const UNMAPPED: usize = usize::MAX;

struct Problem {
    gold: Side,
    pred: Side,
    gold_counts: HashMap<(String, Vec<Slot>), usize>,
    /// For each prediction clause, gold clauses it could match, each with the
    /// variable assignments that match would require.
    candidates: Vec<Vec<Vec<(usize, usize)>>>,
}

impl Problem {
    fn new(gold: &[&Clause], pred: &[&Clause]) -> Problem {
        let gold = encode(gold);
        let pred = encode(pred);
        let mut gold_counts = HashMap::new();
        for c in &gold.clauses {
            *gold_counts.entry((c.op.clone(), c.slots.clone())).or_insert(0) += 1;
        }
        let candidates = pred
            .clauses
            .iter()
            .map(|p| {
                gold.clauses
                    .iter()
                    .filter_map(|g| required(p, g, &pred.vars, &gold.vars))
                    .collect()
            })
            .collect();
        Problem {
            gold,
            pred,
            gold_counts,
            candidates,
        }
    }

    /// Matched clause count under a full assignment.
    fn score(&self, map: &[usize]) -> usize {
        let mut remaining = self.gold_counts.clone();
        let mut m = 0;
        'clauses: for c in &self.pred.clauses {
            let mut slots = Vec::with_capacity(c.slots.len());
            for s in &c.slots {
                match s {
                    Slot::Var(v) if map[*v] == UNMAPPED => continue 'clauses,
                    Slot::Var(v) => slots.push(Slot::Var(map[*v])),
                    Slot::Const(k) => slots.push(Slot::Const(k.clone())),
                }
            }
            if let Some(n) = remaining.get_mut(&(c.op.clone(), slots)) {
                if *n > 0 {
                    *n -= 1;
                    m += 1;
                }
            }
        }
        m
    }

    /// Upper bound on the score of any completion of a partial assignment
    /// (`None` entries are undecided).
    fn bound(&self, partial: &[Option<usize>]) -> usize {
        self.candidates
            .iter()
            .filter(|cands| {
                cands.iter().any(|req| {
                    req.iter()
                        .all(|&(p, g)| partial[p].is_none() || partial[p] == Some(g))
                })
            })
            .count()
    }

    fn exhaustive(&self) -> (usize, Vec<usize>) {
        let n = self.pred.vars.len();
        // most constrained variables first
        let mut occurrences = vec![0usize; n];
        for c in &self.pred.clauses {
            for s in &c.slots {
                if let Slot::Var(v) = s {
                    occurrences[*v] += 1;
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(occurrences[v]));
        let mut partial = vec![None; n];
        let mut used = vec![false; self.gold.vars.len()];
        let mut best = (0usize, vec![UNMAPPED; n]);
        best.0 = self.score(&best.1);
        self.dfs(&order, 0, &mut partial, &mut used, &mut best);
        best
    }

    fn dfs(
        &self,
        order: &[usize],
        k: usize,
        partial: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        best: &mut (usize, Vec<usize>),
    ) {
        if self.bound(partial) <= best.0 && k > 0 {
            return;
        }
        if k == order.len() {
            let full: Vec<usize> = partial.iter().map(|o| o.unwrap()).collect();
            let s = self.score(&full);
            if s > best.0 {
                *best = (s, full);
            }
            return;
        }
        let v = order[k];
        let kind = self.pred.vars[v].0;
        for g in 0..self.gold.vars.len() {
            if used[g] || self.gold.vars[g].0 != kind {
                continue;
            }
            used[g] = true;
            partial[v] = Some(g);
            self.dfs(order, k + 1, partial, used, best);
            used[g] = false;
        }
        partial[v] = Some(UNMAPPED);
        self.dfs(order, k + 1, partial, used, best);
        partial[v] = None;
    }

    fn hill_climb(&self, cfg: &MatchConfig) -> (usize, Vec<usize>) {
        let n = self.pred.vars.len();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut best = (0usize, vec![UNMAPPED; n]);
        best.0 = self.score(&best.1);
        for r in 0..cfg.restarts.max(1) {
            let start = if r == 0 { self.smart_start() } else { self.random_start(&mut rng) };
            let (s, map) = self.climb(start);
            if s > best.0 {
                best = (s, map);
            }
        }
        best
    }

    /// Greedy start: repeatedly take the prediction clause with the fewest
    /// candidate matches still consistent with the mapping so far, and adopt
    /// the candidate that agrees most with it.
    fn smart_start(&self) -> Vec<usize> {
        let mut map = vec![UNMAPPED; self.pred.vars.len()];
        let mut used = vec![false; self.gold.vars.len()];
        let mut open: Vec<usize> = (0..self.candidates.len())
            .filter(|&c| !self.candidates[c].is_empty())
            .collect();
        loop {
            let mut pick: Option<(usize, &Vec<(usize, usize)>)> = None;
            open.retain(|&c| {
                let consistent: Vec<&Vec<(usize, usize)>> = self.candidates[c]
                    .iter()
                    .filter(|req| req.iter().all(|&(p, g)| map[p] == g || (map[p] == UNMAPPED && !used[g])))
                    .collect();
                let Some(best) = consistent
                    .iter()
                    .max_by_key(|req| (req.iter().filter(|&&(p, g)| map[p] == g).count(), std::cmp::Reverse(req.len())))
                else {
                    return false;
                };
                if best.iter().all(|&(p, g)| map[p] == g) {
                    return false;
                }
                if pick.is_none_or(|(n, _)| consistent.len() < n) {
                    pick = Some((consistent.len(), best));
                }
                true
            });
            let Some((_, req)) = pick else {
                return map;
            };
            for &(p, g) in req {
                map[p] = g;
                used[g] = true;
            }
        }
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut map = vec![UNMAPPED; self.pred.vars.len()];
        for kind in [Kind::Box, Kind::Referent] {
            let mut golds: Vec<usize> = (0..self.gold.vars.len())
                .filter(|&g| self.gold.vars[g].0 == kind)
                .collect();
            golds.shuffle(rng);
            let preds: Vec<usize> = (0..self.pred.vars.len())
                .filter(|&p| self.pred.vars[p].0 == kind)
                .collect();
            for p in preds {
                if !golds.is_empty() && rng.gen_bool(0.9) {
                    map[p] = golds.pop().unwrap();
                }
            }
        }
        map
    }

    /// Steepest ascent over single reassignments (swapping when the target
    /// is taken) until no move improves the score.
    fn climb(&self, mut map: Vec<usize>) -> (usize, Vec<usize>) {
        let mut score = self.score(&map);
        loop {
            let mut best_move: Option<(usize, Vec<usize>)> = None;
            for p in 0..map.len() {
                let kind = self.pred.vars[p].0;
                let targets = (0..self.gold.vars.len())
                    .filter(|&g| self.gold.vars[g].0 == kind)
                    .chain(std::iter::once(UNMAPPED));
                for g in targets {
                    if map[p] == g {
                        continue;
                    }
                    let mut next = map.clone();
                    if g != UNMAPPED {
                        if let Some(q) = map.iter().position(|&x| x == g) {
                            next[q] = map[p];
                        }
                    }
                    next[p] = g;
                    let s = self.score(&next);
                    if s > best_move.as_ref().map_or(score, |b| b.0) {
                        best_move = Some((s, next));
                    }
                }
            }
            match best_move {
                Some((s, next)) => {
                    score = s;
                    map = next;
                }
                None => return (score, map),
            }
        }
    }
}

/// Variable assignments under which `p` becomes `g`, if any.
fn required(
    p: &Encoded,
    g: &Encoded,
    pvars: &[(Kind, String)],
    gvars: &[(Kind, String)],
) -> Option<Vec<(usize, usize)>> {
    if p.op != g.op || p.slots.len() != g.slots.len() {
        return None;
    }
    let mut req: Vec<(usize, usize)> = Vec::new();
    for (a, b) in p.slots.iter().zip(&g.slots) {
        match (a, b) {
            (Slot::Const(x), Slot::Const(y)) if x == y => {}
            (Slot::Var(x), Slot::Var(y)) if pvars[*x].0 == gvars[*y].0 => {
                for &(px, gy) in &req {
                    if (px == *x) != (gy == *y) {
                        return None;
                    }
                }
                req.push((*x, *y));
            }
            _ => return None,
        }
    }
    req.sort_unstable();
    req.dedup();
    Some(req)
}

pub fn clause_match_f(gold: &[Clause], pred: &[Clause], cfg: &MatchConfig) -> MatchResult {
    let keep = |c: &&Clause| cfg.count_ref || c.op != "REF";
    let gold: Vec<&Clause> = gold.iter().filter(keep).collect();
    let pred: Vec<&Clause> = pred.iter().filter(keep).collect();
    let problem = Problem::new(&gold, &pred);
    let small = problem.gold.vars.len() <= cfg.exhaustive_threshold
        && problem.pred.vars.len() <= cfg.exhaustive_threshold;
    let (matched, map) = match cfg.strategy {
        SearchStrategy::Exhaustive => problem.exhaustive(),
        SearchStrategy::HillClimb => problem.hill_climb(cfg),
        SearchStrategy::Auto if small => problem.exhaustive(),
        SearchStrategy::Auto => problem.hill_climb(cfg),
    };
    let mapping = map
        .iter()
        .enumerate()
        .filter(|(_, &g)| g != UNMAPPED)
        .map(|(p, &g)| (problem.pred.vars[p].1.clone(), problem.gold.vars[g].1.clone()))
        .collect();
    let (gn, pn) = (gold.len(), pred.len());
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    MatchResult {
        matched,
        gold: gn,
        predicted: pn,
        precision: ratio(matched, pn),
        recall: ratio(matched, gn),
        f: ratio(2 * matched, gn + pn),
        mapping,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drs::ClausalDrs;

    fn drs(s: &str) -> Vec<Clause> {
        ClausalDrs::parse_inline(s).unwrap().0
    }

    #[test]
    fn variable_tokens() {
        assert!(is_variable("b1") && is_variable("x12") && is_variable("k0"));
        assert!(!is_variable("dog") && !is_variable("12") && !is_variable("X1") && !is_variable("b"));
    }

    #[test]
    fn identical_sets_score_one() {
        let g = drs("b1 REF x1 ; b1 dog x1 ; b1 NOT b2 ; b2 run x1");
        let r = clause_match_f(&g, &g, &MatchConfig::default());
        assert_eq!(r.f, 1.0);
    }

    #[test]
    fn renamed_variables_with_one_wrong_predicate() {
        let cfg = MatchConfig {
            count_ref: true,
            ..Default::default()
        };
        let r = clause_match_f(&drs("b1 REF x1 ; b1 dog x1"), &drs("b9 REF x7 ; b9 cat x7"), &cfg);
        assert_eq!(r.matched, 1);
        assert_eq!(r.f, 0.5);
        assert_eq!(r.mapping["b9"], "b1");
    }

    #[test]
    fn empty_prediction() {
        let r = clause_match_f(&drs("b1 dog x1"), &[], &MatchConfig::default());
        assert_eq!((r.precision, r.recall, r.f), (0.0, 0.0, 0.0));
    }

    #[test]
    fn mapping_is_one_to_one() {
        // two prediction referents cannot both map to x1
        let g = drs("b1 dog x1 ; b1 cat x2");
        let p = drs("b1 dog x1 ; b1 dog x2");
        let r = clause_match_f(&g, &p, &MatchConfig::default());
        assert_eq!(r.matched, 1);
    }

    #[test]
    fn namespaces_are_separate() {
        let g = drs("b1 NOT b2 ; b2 run x1");
        let p = drs("b1 NOT b2 ; b2 run b2");
        let r = clause_match_f(&g, &p, &MatchConfig::default());
        assert_eq!(r.matched, 2);
    }
}
