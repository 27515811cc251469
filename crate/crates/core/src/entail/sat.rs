//! Finite countermodel search: a formula is grounded over a fixed domain,
//! clausified and handed to a small DPLL solver.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use super::nnf;
use super::model::FiniteModel;
use crate::fol::{Fol, FolTerm};

type Lit = u32;

fn lit(var: u32, positive: bool) -> Lit {
    var << 1 | (!positive) as u32
}

fn negate(l: Lit) -> Lit {
    l ^ 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SatResult {
    Sat,
    Unsat,
    Aborted,
}

/// DPLL with two watched literals and chronological backtracking.
pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    trail: Vec<Lit>,
    /// Trail length at each decision, and the decided literal.
    decisions: Vec<(usize, Lit)>,
    empty_clause: bool,
    units: Vec<Lit>,
}

impl Solver {
    pub(crate) fn new(vars: usize) -> Solver {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * vars],
            assign: vec![0; vars],
            trail: Vec::new(),
            decisions: Vec::new(),
            empty_clause: false,
            units: Vec::new(),
        }
    }

    pub(crate) fn add_clause(&mut self, mut c: Vec<Lit>) {
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == negate(w[1])) {
            return;
        }
        match c.len() {
            0 => self.empty_clause = true,
            1 => self.units.push(c[0]),
            _ => {
                let i = self.clauses.len();
                self.watches[c[0] as usize].push(i);
                self.watches[c[1] as usize].push(i);
                self.clauses.push(c);
            }
        }
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assign[(l >> 1) as usize];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn set(&mut self, l: Lit) {
        self.assign[(l >> 1) as usize] = if l & 1 == 1 { -1 } else { 1 };
        self.trail.push(l);
    }

    /// Propagates from trail position `from`; false on conflict.
    fn propagate(&mut self, mut from: usize) -> bool {
        while from < self.trail.len() {
            let falsified = negate(self.trail[from]);
            from += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut i = 0;
            let mut ok = true;
            while i < ws.len() {
                let ci = ws[i];
                let other = {
                    let c = &mut self.clauses[ci];
                    if c[0] == falsified {
                        c.swap(0, 1);
                    }
                    c[0]
                };
                if self.value_of(other) == 1 {
                    i += 1;
                    continue;
                }
                let len = self.clauses[ci].len();
                let replacement = (2..len).find(|&k| {
                    let l = self.clauses[ci][k];
                    self.value_of(l) != -1
                });
                if let Some(k) = replacement {
                    let c = &mut self.clauses[ci];
                    c.swap(1, k);
                    let nw = c[1];
                    self.watches[nw as usize].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                i += 1;
                match self.value_of(other) {
                    0 => self.set(other),
                    -1 => {
                        ok = false;
                        break;
                    }
                    _ => {}
                }
            }
            let rest = std::mem::take(&mut self.watches[falsified as usize]);
            ws.extend(rest);
            self.watches[falsified as usize] = ws;
            if !ok {
                return false;
            }
        }
        true
    }

    fn value_of(&self, l: Lit) -> i8 {
        self.value(l)
    }

    pub(crate) fn solve(&mut self, max_decisions: usize, deadline: Option<Instant>) -> SatResult {
        if self.empty_clause {
            return SatResult::Unsat;
        }
        for l in std::mem::take(&mut self.units) {
            match self.value(l) {
                -1 => return SatResult::Unsat,
                0 => self.set(l),
                _ => {}
            }
        }
        if !self.propagate(0) {
            return SatResult::Unsat;
        }
        let mut made = 0usize;
        loop {
            let next = (0..self.assign.len()).find(|&v| self.assign[v] == 0);
            let Some(v) = next else {
                return SatResult::Sat;
            };
            made += 1;
            if made > max_decisions || (made.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() > d)) {
                return SatResult::Aborted;
            }
            let l = lit(v as u32, false);
            self.decisions.push((self.trail.len(), l));
            let start = self.trail.len();
            self.set(l);
            let mut ok = self.propagate(start);
            while !ok {
                // flip the most recent decision that has not been flipped yet
                loop {
                    let Some((pos, d)) = self.decisions.pop() else {
                        return SatResult::Unsat;
                    };
                    for u in self.trail.drain(pos..) {
                        self.assign[(u >> 1) as usize] = 0;
                    }
                    if d & 1 == 1 {
                        // negative phase tried first; this was the first try
                        let flipped = negate(d);
                        self.decisions.push((pos, flipped));
                        self.set(flipped);
                        ok = self.propagate(pos);
                        break;
                    }
                }
            }
        }
    }

    pub(crate) fn model_value(&self, var: u32) -> bool {
        self.assign[var as usize] == 1
    }
}

/// Plaisted–Greenbaum clausification of a ground NNF formula.
struct Grounder<'a> {
    atoms: HashMap<(String, Vec<usize>), u32>,
    atom_list: Vec<(u32, String, Vec<usize>)>,
    next: u32,
    clauses: Vec<Vec<Lit>>,
    domain: usize,
    constants: &'a HashMap<String, usize>,
}

enum Node {
    True,
    False,
    Lit(Lit),
}

impl Grounder<'_> {
    fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next - 1
    }

    fn atom(&mut self, p: &str, tuple: Vec<usize>) -> u32 {
        let key = (p.to_string(), tuple);
        if let Some(&v) = self.atoms.get(&key) {
            return v;
        }
        let v = self.fresh();
        self.atom_list.push((v, key.0.clone(), key.1.clone()));
        self.atoms.insert(key, v);
        v
    }

    fn encode(&mut self, f: &Fol, env: &mut Vec<(String, usize)>) -> Node {
        match f {
            Fol::Atom(p, args) => {
                let tuple = args
                    .iter()
                    .map(|a| match a {
                        FolTerm::Var(x) => env
                            .iter()
                            .rev()
                            .find(|(y, _)| y == x)
                            .map(|(_, e)| *e)
                            .or_else(|| self.constants.get(x).copied())
                            .expect("closed formula"),
                        FolTerm::Const(c) => self.constants[c],
                    })
                    .collect();
                Node::Lit(lit(self.atom(p, tuple), true))
            }
            Fol::Not(b) => match self.encode(b, env) {
                Node::True => Node::False,
                Node::False => Node::True,
                Node::Lit(l) => Node::Lit(negate(l)),
            },
            Fol::And(xs) | Fol::Or(xs) => {
                let conj = matches!(f, Fol::And(_));
                let parts: Vec<_> = xs.iter().map(|x| self.encode(x, env)).collect();
                self.combine(conj, parts)
            }
            Fol::Forall(x, b) | Fol::Exists(x, b) => {
                let conj = matches!(f, Fol::Forall(..));
                let mut parts = Vec::with_capacity(self.domain);
                for e in 0..self.domain {
                    env.push((x.clone(), e));
                    parts.push(self.encode(b, env));
                    env.pop();
                }
                self.combine(conj, parts)
            }
            Fol::Imp(..) => unreachable!("input is in negation normal form"),
        }
    }

    fn combine(&mut self, conj: bool, parts: Vec<Node>) -> Node {
        let mut lits = Vec::new();
        for p in parts {
            match (p, conj) {
                (Node::True, true) | (Node::False, false) => {}
                (Node::False, true) => return Node::False,
                (Node::True, false) => return Node::True,
                (Node::Lit(l), _) => lits.push(l),
            }
        }
        match lits.len() {
            0 if conj => Node::True,
            0 => Node::False,
            1 => Node::Lit(lits[0]),
            _ => {
                let v = lit(self.fresh(), true);
                if conj {
                    for l in lits {
                        self.clauses.push(vec![negate(v), l]);
                    }
                } else {
                    let mut c = vec![negate(v)];
                    c.extend(lits);
                    self.clauses.push(c);
                }
                Node::Lit(v)
            }
        }
    }
}

pub(crate) enum Search {
    Found(FiniteModel),
    NoModel,
    Aborted,
}

/// A model of `f` over exactly `domain` elements, if one exists.
pub(crate) fn find_model(
    f: &Fol,
    domain: usize,
    max_decisions: usize,
    deadline: Option<Instant>,
) -> Search {
    let f = nnf(f, false);
    let names: Vec<String> = constant_names(&f).into_iter().collect();
    let combos = domain.checked_pow(names.len() as u32).unwrap_or(usize::MAX);
    let mut aborted = false;
    for k in 0..combos.min(4096) {
        let mut rest = k;
        let mut constants = HashMap::new();
        for n in &names {
            constants.insert(n.clone(), rest % domain);
            rest /= domain;
        }
        let mut g = Grounder {
            atoms: HashMap::new(),
            atom_list: Vec::new(),
            next: 0,
            clauses: Vec::new(),
            domain,
            constants: &constants,
        };
        let root = g.encode(&f, &mut Vec::new());
        let root = match root {
            Node::False => continue,
            Node::True => None,
            Node::Lit(l) => Some(l),
        };
        let mut solver = Solver::new(g.next as usize);
        for c in std::mem::take(&mut g.clauses) {
            solver.add_clause(c);
        }
        if let Some(l) = root {
            solver.add_clause(vec![l]);
        }
        match solver.solve(max_decisions, deadline) {
            SatResult::Sat => {
                let mut m = FiniteModel::new(domain);
                m.constants = constants.iter().map(|(k, v)| (k.clone(), *v)).collect();
                for (v, p, tuple) in &g.atom_list {
                    if solver.model_value(*v) {
                        m.insert(p, tuple.clone());
                    }
                }
                return Search::Found(m);
            }
            SatResult::Unsat => {}
            SatResult::Aborted => aborted = true,
        }
    }
    if aborted || combos > 4096 {
        Search::Aborted
    } else {
        Search::NoModel
    }
}

/// Constants, including terms written as variables that no quantifier binds.
pub(crate) fn constant_names(f: &Fol) -> BTreeSet<String> {
    let mut out = f.constants();
    out.extend(f.free_vars());
    out
}
