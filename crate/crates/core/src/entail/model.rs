use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fol::{Fol, FolTerm};

/// A finite interpretation over the domain `0..domain`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FiniteModel {
    pub domain: usize,
    pub constants: BTreeMap<String, usize>,
    /// Predicate extensions; a missing predicate is empty.
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl FiniteModel {
    pub fn new(domain: usize) -> FiniteModel {
        FiniteModel {
            domain,
            ..Default::default()
        }
    }

    pub fn insert(&mut self, pred: &str, tuple: Vec<usize>) {
        self.relations.entry(pred.to_string()).or_default().insert(tuple);
    }

    pub fn holds(&self, pred: &str, tuple: &[usize]) -> bool {
        self.relations.get(pred).is_some_and(|r| r.contains(tuple))
    }

    pub fn is_well_formed(&self) -> bool {
        self.domain >= 1
            && self.constants.values().all(|&e| e < self.domain)
            && self
                .relations
                .values()
                .flatten()
                .flatten()
                .all(|&e| e < self.domain)
    }

    /// Truth value of a closed formula. Constants missing from the model
    /// are an error.
    pub fn eval(&self, f: &Fol) -> Result<bool> {
        self.eval_in(f, &mut HashMap::new())
    }

    fn eval_in(&self, f: &Fol, env: &mut HashMap<String, Vec<usize>>) -> Result<bool> {
        Ok(match f {
            Fol::Atom(p, args) => {
                let mut tuple = Vec::with_capacity(args.len());
                for a in args {
                    let bound = match a {
                        FolTerm::Var(x) => env.get(x).and_then(|s| s.last()).copied(),
                        FolTerm::Const(_) => None,
                    };
                    let e = match bound.or_else(|| self.constants.get(a.name()).copied()) {
                        Some(e) => e,
                        None => return Err(Error::NotAFormula(format!("unbound term {}", a.name()))),
                    };
                    tuple.push(e);
                }
                self.holds(p, &tuple)
            }
            Fol::Not(b) => !self.eval_in(b, env)?,
            Fol::And(xs) => {
                for x in xs {
                    if !self.eval_in(x, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Fol::Or(xs) => {
                for x in xs {
                    if self.eval_in(x, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Fol::Imp(a, b) => !self.eval_in(a, env)? || self.eval_in(b, env)?,
            Fol::Forall(x, b) | Fol::Exists(x, b) => {
                let universal = matches!(f, Fol::Forall(..));
                let mut result = universal;
                for e in 0..self.domain {
                    env.entry(x.clone()).or_default().push(e);
                    let v = self.eval_in(b, env);
                    env.get_mut(x).unwrap().pop();
                    if v? != universal {
                        result = !universal;
                        break;
                    }
                }
                result
            }
        })
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain {{0..{}}}", self.domain)?;
        for (c, e) in &self.constants {
            write!(f, "; {c}={e}")?;
        }
        for (p, tuples) in &self.relations {
            let items: Vec<String> = tuples
                .iter()
                .map(|t| {
                    if t.len() == 1 {
                        t[0].to_string()
                    } else {
                        let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                        format!("({})", parts.join(","))
                    }
                })
                .collect();
            write!(f, "; {p}={{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_quantifiers() {
        let mut m = FiniteModel::new(2);
        m.insert("dog", vec![0]);
        m.insert("run", vec![0]);
        m.insert("cat", vec![1]);
        let all = Fol::parse("all x1 . ( dog ( x1 ) -> run ( x1 ) )").unwrap();
        let some_cat_runs = Fol::parse("exists x1 . ( cat ( x1 ) & run ( x1 ) )").unwrap();
        assert!(m.eval(&all).unwrap());
        assert!(!m.eval(&some_cat_runs).unwrap());
        assert_eq!(m.to_string(), "domain {0..2}; cat={1}; dog={0}; run={0}");
    }

    #[test]
    fn constants_must_be_interpreted() {
        let m = FiniteModel::new(1);
        assert!(m.eval(&Fol::parse("run ( ann )").unwrap()).is_err());
    }
}
