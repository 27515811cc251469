//! Ground analytic tableau over negation normal form, with a bound on the
//! number of existential witnesses per branch, and a separate checker that
//! replays a closed tableau.

use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::model::FiniteModel;
use super::{mentions, nnf, subst};
use crate::fol::Fol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inference {
    /// Adds every conjunct of a conjunction on the branch.
    Alpha(Fol),
    /// Instantiates an existential with a constant new to the branch.
    Delta { premise: Fol, witness: String },
    /// Instantiates a universal with any constant.
    Gamma { premise: Fol, term: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    /// The atom and its negation are both on the branch.
    Contradiction(Fol),
    /// One sub-branch per disjunct, each extended with that disjunct.
    Split { premise: Fol, branches: Vec<ProofNode> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub steps: Vec<Inference>,
    pub end: Closure,
}

/// A closed tableau for `premise ∧ ¬conclusion`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub premise: Fol,
    pub conclusion: Fol,
    pub root: ProofNode,
}

impl ProofNode {
    fn depth(&self) -> usize {
        self.steps.len()
            + match &self.end {
                Closure::Contradiction(_) => 1,
                Closure::Split { branches, .. } => 1 + branches.iter().map(|b| b.depth()).max().unwrap_or(0),
            }
    }

    fn size(&self) -> usize {
        self.steps.len()
            + match &self.end {
                Closure::Contradiction(_) => 1,
                Closure::Split { branches, .. } => 1 + branches.iter().map(|b| b.size()).sum::<usize>(),
            }
    }
}

impl Proof {
    /// Longest branch, in inferences.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// Replays the tableau: every premise must be on its branch, every
    /// witness fresh, and every leaf must hold a complementary pair.
    pub fn verify(&self) -> bool {
        let start: HashSet<Fol> = [nnf(&self.premise, false), nnf(&self.conclusion, true)]
            .into_iter()
            .collect();
        verify_node(&self.root, start)
    }
}

fn verify_node(node: &ProofNode, mut branch: HashSet<Fol>) -> bool {
    for step in &node.steps {
        match step {
            Inference::Alpha(p) => match p {
                Fol::And(xs) if branch.contains(p) => branch.extend(xs.iter().cloned()),
                _ => return false,
            },
            Inference::Delta { premise, witness } => match premise {
                Fol::Exists(x, body) if branch.contains(premise) => {
                    if branch.iter().any(|f| mentions(f, witness)) {
                        return false;
                    }
                    branch.insert(subst(body, x, witness));
                }
                _ => return false,
            },
            Inference::Gamma { premise, term } => match premise {
                Fol::Forall(x, body) if branch.contains(premise) => {
                    branch.insert(subst(body, x, term));
                }
                _ => return false,
            },
        }
    }
    match &node.end {
        Closure::Contradiction(a) => {
            matches!(a, Fol::Atom(..)) && branch.contains(a) && branch.contains(&Fol::not(a.clone()))
        }
        Closure::Split { premise, branches } => match premise {
            Fol::Or(xs) if branch.contains(premise) && xs.len() == branches.len() => {
                xs.iter().zip(branches).all(|(x, b)| {
                    let mut next = branch.clone();
                    next.insert(x.clone());
                    verify_node(b, next)
                })
            }
            _ => false,
        },
    }
}

pub(crate) enum Outcome {
    Closed(Proof),
    /// Every branch was expanded without hitting the witness bound and one
    /// stayed open; carries the branch read as a model.
    Saturated(FiniteModel),
    Exhausted,
}

#[derive(Clone, Default)]
struct Branch {
    set: HashSet<Fol>,
    todo: VecDeque<Fol>,
    exists: VecDeque<Fol>,
    ors: Vec<Fol>,
    alls: Vec<Fol>,
    terms: Vec<String>,
    witnesses: usize,
    blocked: bool,
}

impl Branch {
    fn add(&mut self, f: Fol) -> bool {
        if self.set.insert(f.clone()) {
            self.todo.push_back(f);
            true
        } else {
            false
        }
    }

    fn closes(&self, f: &Fol) -> bool {
        match f {
            Fol::Atom(..) => self.set.contains(&Fol::not(f.clone())),
            Fol::Not(a) => self.set.contains(a.as_ref()),
            Fol::Or(xs) => xs.is_empty(),
            _ => false,
        }
    }

    fn as_model(&self, reserved: &[String]) -> FiniteModel {
        let mut names: Vec<String> = self.terms.clone();
        for r in reserved {
            if !names.contains(r) {
                names.push(r.clone());
            }
        }
        let mut m = FiniteModel::new(names.len().max(1));
        for (i, n) in names.iter().enumerate() {
            m.constants.insert(n.clone(), i);
        }
        for f in &self.set {
            if let Fol::Atom(p, args) = f {
                let tuple = args.iter().map(|a| m.constants[a.name()]).collect();
                m.insert(p, tuple);
            }
        }
        m
    }
}

enum Expansion {
    Closed(ProofNode),
    Open(Box<Branch>),
    Aborted,
}

pub(crate) struct Prover {
    pub max_witnesses: usize,
    pub node_budget: usize,
    pub deadline: Option<Instant>,
    nodes: usize,
    fresh: usize,
    reserved: Vec<String>,
}

impl Prover {
    pub(crate) fn new(max_witnesses: usize, node_budget: usize, deadline: Option<Instant>) -> Prover {
        Prover {
            max_witnesses,
            node_budget,
            deadline,
            nodes: 0,
            fresh: 0,
            reserved: Vec::new(),
        }
    }

    /// Iterative deepening on the witness bound, doubling up to
    /// `max_witnesses`.
    pub(crate) fn refute(&mut self, premise: &Fol, conclusion: &Fol) -> Outcome {
        let a = nnf(premise, false);
        let b = nnf(conclusion, true);
        let mut reserved: Vec<String> = a.constants().into_iter().collect();
        reserved.extend(b.constants());
        reserved.sort();
        reserved.dedup();
        self.reserved = reserved;
        let ceiling = self.max_witnesses;
        let mut bound = 1;
        loop {
            let k = bound.min(ceiling);
            let mut start = Branch {
                terms: self.reserved.clone(),
                ..Default::default()
            };
            start.add(a.clone());
            start.add(b.clone());
            self.fresh = 0;
            match self.expand(start, k) {
                Expansion::Closed(root) => {
                    return Outcome::Closed(Proof {
                        premise: premise.clone(),
                        conclusion: conclusion.clone(),
                        root,
                    })
                }
                Expansion::Open(branch) if !branch.blocked => {
                    return Outcome::Saturated(branch.as_model(&self.reserved))
                }
                Expansion::Open(_) if k < ceiling => bound *= 2,
                _ => return Outcome::Exhausted,
            }
        }
    }

    fn fresh_name(&mut self) -> String {
        loop {
            self.fresh += 1;
            let name = format!("w{}", self.fresh);
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }

    fn over_budget(&mut self) -> bool {
        self.nodes += 1;
        self.nodes > self.node_budget
            || (self.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() > d))
    }

    fn instantiate_all(&self, b: &mut Branch, all: &Fol, term: &str, steps: &mut Vec<Inference>) {
        if let Fol::Forall(x, body) = all {
            if b.add(subst(body, x, term)) {
                steps.push(Inference::Gamma {
                    premise: all.clone(),
                    term: term.to_string(),
                });
            }
        }
    }

    fn expand(&mut self, mut b: Branch, k: usize) -> Expansion {
        let mut steps = Vec::new();
        loop {
            if self.over_budget() {
                return Expansion::Aborted;
            }
            if let Some(f) = b.todo.pop_front() {
                match &f {
                    Fol::Atom(..) | Fol::Not(_) => {
                        if b.closes(&f) {
                            let atom = match f {
                                Fol::Not(a) => *a,
                                a => a,
                            };
                            return Expansion::Closed(ProofNode {
                                steps,
                                end: Closure::Contradiction(atom),
                            });
                        }
                    }
                    Fol::And(xs) => {
                        steps.push(Inference::Alpha(f.clone()));
                        for x in xs {
                            b.add(x.clone());
                        }
                    }
                    Fol::Or(_) => b.ors.push(f),
                    Fol::Exists(..) => b.exists.push_back(f),
                    Fol::Forall(..) => {
                        if b.terms.is_empty() {
                            let c = self.fresh_name();
                            b.terms.push(c);
                        }
                        for t in b.terms.clone() {
                            self.instantiate_all(&mut b, &f, &t, &mut steps);
                        }
                        b.alls.push(f);
                    }
                    Fol::Imp(..) => unreachable!("input is in negation normal form"),
                }
                continue;
            }
            if let Some(e) = b.exists.pop_front() {
                if b.witnesses >= k {
                    b.blocked = true;
                    continue;
                }
                let Fol::Exists(x, body) = &e else { unreachable!() };
                let c = self.fresh_name();
                b.witnesses += 1;
                let inst = subst(body, x, &c);
                steps.push(Inference::Delta {
                    premise: e.clone(),
                    witness: c.clone(),
                });
                b.add(inst);
                b.terms.push(c.clone());
                for a in b.alls.clone() {
                    self.instantiate_all(&mut b, &a, &c, &mut steps);
                }
                continue;
            }
            break;
        }

        let set = &b.set;
        b.ors.retain(|o| match o {
            Fol::Or(xs) => !xs.iter().any(|x| set.contains(x)),
            _ => true,
        });
        if b.ors.is_empty() {
            return Expansion::Open(Box::new(b));
        }
        let open_count = |o: &Fol| match o {
            Fol::Or(xs) => xs.iter().filter(|x| !b.closes(x)).count(),
            _ => usize::MAX,
        };
        let (i, _) = b
            .ors
            .iter()
            .enumerate()
            .min_by_key(|(_, o)| open_count(o))
            .unwrap();
        let chosen = b.ors.remove(i);
        let Fol::Or(xs) = &chosen else { unreachable!() };
        let mut branches = Vec::with_capacity(xs.len());
        for x in xs {
            let mut child = b.clone();
            child.add(x.clone());
            match self.expand(child, k) {
                Expansion::Closed(n) => branches.push(n),
                other => return other,
            }
        }
        Expansion::Closed(ProofNode {
            steps,
            end: Closure::Split {
                premise: chosen,
                branches,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prove(a: &str, b: &str) -> Option<Proof> {
        let mut p = Prover::new(8, 100_000, None);
        match p.refute(&Fol::parse(a).unwrap(), &Fol::parse(b).unwrap()) {
            Outcome::Closed(proof) => Some(proof),
            _ => None,
        }
    }

    #[test]
    fn closes_and_verifies() {
        let g = "all x1 . ( ( cat ( x1 ) & wild ( x1 ) ) -> ( escape ( x1 ) & run ( x1 ) ) )";
        let p = "all x1 . ( cat ( x1 ) -> ( escape ( x1 ) & run ( x1 ) ) )";
        let proof = prove(p, g).expect("weaker antecedent entails");
        assert!(proof.verify());
        assert!(proof.depth() > 0);
        assert!(prove(g, p).is_none());
    }

    #[test]
    fn tampered_proofs_fail_verification() {
        let mut proof = prove("exists x1 . ( dog ( x1 ) & run ( x1 ) )", "exists x1 . dog ( x1 )").unwrap();
        assert!(proof.verify());
        proof.conclusion = Fol::parse("exists x1 . cat ( x1 )").unwrap();
        assert!(!proof.verify());
    }

    #[test]
    fn saturated_branch_is_a_model() {
        let a = Fol::parse("exists x1 . dog ( x1 )").unwrap();
        let b = Fol::parse("exists x2 . cat ( x2 )").unwrap();
        let mut p = Prover::new(8, 100_000, None);
        match p.refute(&a, &b) {
            Outcome::Saturated(m) => {
                assert!(m.eval(&a).unwrap());
                assert!(!m.eval(&b).unwrap());
            }
            _ => panic!("expected an open branch"),
        }
    }
}
