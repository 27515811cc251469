//! Controlled train/test splits.
//!
//! Every strategy fixes a grammar fragment and a side assignment that depends
//! only on a sentence's [`PhenomenonTags`]; building a split samples trees from
//! the fragment and partitions them by that assignment.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grammar::{tag, DerivationTree, Fragment, Generator, PhenomenonTags, Rule, Site};
use crate::lexicon::{Lexicon, Quantifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    SystematicityModifier,
    SystematicityNegation,
    Productivity,
    DepthExposure,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::SystematicityModifier,
        Strategy::SystematicityNegation,
        Strategy::Productivity,
        Strategy::DepthExposure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::SystematicityModifier => "systematicity_modifier",
            Strategy::SystematicityNegation => "systematicity_negation",
            Strategy::Productivity => "productivity",
            Strategy::DepthExposure => "depth_exposure",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown split strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn side(self) -> Side {
        match self {
            Split::Train | Split::Valid => Side::Train,
            Split::Test => Side::Test,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub strategy: Strategy,
    pub primitives: Vec<Quantifier>,
    /// Systematicity: train plus test size.
    pub pool: usize,
    /// Systematicity: train size, validation included.
    pub train: usize,
    /// Systematicity: share of basic set 1 in train; proportional to the
    /// sub-population sizes when unset.
    pub basic1_share: Option<f64>,
    /// Productivity and depth exposure: records per depth and side.
    pub per_depth: usize,
    pub max_depth: usize,
    /// Productivity: deepest depth on the train side.
    pub train_max_depth: usize,
    pub valid_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::new(Strategy::SystematicityModifier)
    }
}

impl SplitSpec {
    /// Defaults for a strategy: a 50,000 pool with 12,000 train for the
    /// systematicity strategies, 20,000 per depth up to 4 for productivity,
    /// 2,000 per depth up to 4 with primitives one, two, every for depth
    /// exposure.
    pub fn new(strategy: Strategy) -> SplitSpec {
        let (primitives, per_depth) = match strategy {
            Strategy::DepthExposure => (vec![Quantifier::One, Quantifier::Two, Quantifier::Every], 2_000),
            Strategy::Productivity => (Vec::new(), 20_000),
            _ => (vec![Quantifier::One], 0),
        };
        SplitSpec {
            strategy,
            primitives,
            pool: 50_000,
            train: 12_000,
            basic1_share: None,
            per_depth,
            max_depth: 4,
            train_max_depth: 1,
            valid_fraction: 0.1,
            seed: 0,
        }
    }

    pub fn with_primitives(mut self, qs: &[Quantifier]) -> SplitSpec {
        self.primitives = qs.to_vec();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> SplitSpec {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.valid_fraction) {
            return Err(Error::Config(format!("valid fraction {} outside [0, 1)", self.valid_fraction)));
        }
        if let Some(s) = self.basic1_share {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Config(format!("basic set 1 share {s} outside [0, 1]")));
            }
        }
        match self.strategy {
            Strategy::SystematicityModifier | Strategy::SystematicityNegation | Strategy::DepthExposure
                if self.primitives.is_empty() =>
            {
                Err(Error::Config(format!("{} needs at least one primitive quantifier", self.strategy)))
            }
            Strategy::SystematicityModifier | Strategy::SystematicityNegation if self.train > self.pool => {
                Err(Error::InfeasibleSplit(format!(
                    "train size {} exceeds pool size {}",
                    self.train, self.pool
                )))
            }
            Strategy::Productivity if self.train_max_depth >= self.max_depth => Err(Error::Config(format!(
                "train depth {} leaves no test depth below {}",
                self.train_max_depth, self.max_depth
            ))),
            _ => Ok(()),
        }
    }

    fn is_primitive(&self, q: Quantifier) -> bool {
        self.primitives.contains(&q)
    }
}

/// Depth-0 sentences with a quantified subject, a proper-noun object and at
/// most one modifier (adjective, adverb, conjunction or disjunction).
pub fn systematicity_fragment() -> Fragment {
    Fragment::empty(0)
        .allow(&[Site::Sentence], &[Rule::Sentence, Rule::NegSentence])
        .allow(&[Site::MainSubject], &[Rule::Quantified, Rule::QuantifiedAdj])
        .allow(
            &[Site::MainVp],
            &[
                Rule::Intransitive,
                Rule::Adverbial,
                Rule::Disjunction,
                Rule::Conjunction,
                Rule::Transitive,
            ],
        )
        .allow(&[Site::MainObject], &[Rule::ProperNoun])
}

/// Quantified subject, transitive verb, proper-noun object that may carry a
/// chain of subject relatives with quantified transitive objects.
pub fn depth_exposure_fragment(max_depth: usize) -> Fragment {
    Fragment::empty(max_depth)
        .allow(&[Site::Sentence], &[Rule::Sentence])
        .allow(&[Site::MainSubject], &[Rule::Quantified])
        .allow(&[Site::MainVp, Site::EmbeddedVp], &[Rule::Transitive])
        .allow(&[Site::MainObject], &[Rule::ProperNoun, Rule::ProperNounRel])
        .allow(&[Site::Relative], &[Rule::SubjectRel])
        .allow(&[Site::EmbeddedObject], &[Rule::Quantified, Rule::QuantifiedRel])
}

fn modifier_count(tags: &PhenomenonTags) -> usize {
    [tags.has_adjective, tags.has_adverb, tags.has_conjunction, tags.has_disjunction]
        .iter()
        .filter(|b| **b)
        .count()
}

/// Which side a sentence belongs to under `spec`, or `None` when it falls
/// outside the strategy (e.g. mixes primitive and non-primitive quantifiers).
pub fn assign_side(tags: &PhenomenonTags, spec: &SplitSpec) -> Option<Side> {
    basic_set(tags, spec).map(|b| if b == 0 { Side::Test } else { Side::Train })
}

/// 1 or 2 for the two basic sets, 0 for test; depth-based strategies report
/// 1 for every train record.
fn basic_set(tags: &PhenomenonTags, spec: &SplitSpec) -> Option<u8> {
    let all_primitive = !tags.quantifiers.is_empty() && tags.quantifiers.iter().all(|q| spec.is_primitive(*q));
    let none_primitive = !tags.quantifiers.is_empty() && !tags.quantifiers.iter().any(|q| spec.is_primitive(*q));
    match spec.strategy {
        Strategy::SystematicityModifier | Strategy::SystematicityNegation if tags.depth > 0 => None,
        Strategy::SystematicityModifier => match modifier_count(tags) {
            0 => Some(1),
            1 if all_primitive => Some(2),
            1 if none_primitive => Some(0),
            _ => None,
        },
        Strategy::SystematicityNegation => match (modifier_count(tags), tags.has_negation) {
            (2.., _) => None,
            (_, false) => Some(2),
            (_, true) if all_primitive => Some(1),
            (_, true) if none_primitive => Some(0),
            _ => None,
        },
        Strategy::Productivity => match tags.depth {
            d if d <= spec.train_max_depth => Some(1),
            d if d <= spec.max_depth => Some(0),
            _ => None,
        },
        Strategy::DepthExposure => match tags.depth {
            0 => Some(1),
            d if d > spec.max_depth => None,
            _ if all_primitive => Some(1),
            _ if none_primitive => Some(0),
            _ => None,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitItem {
    pub tree: DerivationTree,
    pub tags: PhenomenonTags,
    pub split: Split,
}

/// A built split: train and validation items first, then test, each group in
/// sampling order.
#[derive(Debug, Clone)]
pub struct Partition {
    pub spec: SplitSpec,
    pub items: Vec<SplitItem>,
}

impl Partition {
    pub fn count(&self, split: Split) -> usize {
        self.items.iter().filter(|i| i.split == split).count()
    }

    pub fn side(&self, side: Side) -> impl Iterator<Item = &SplitItem> {
        self.items.iter().filter(move |i| i.split.side() == side)
    }
}

pub fn build(lex: &Lexicon, spec: &SplitSpec) -> Result<Partition> {
    spec.validate()?;
    let (train, test) = match spec.strategy {
        Strategy::SystematicityModifier | Strategy::SystematicityNegation => build_systematicity(lex, spec)?,
        Strategy::Productivity => build_productivity(lex, spec)?,
        Strategy::DepthExposure => build_depth_exposure(lex, spec)?,
    };
    let mut items = carve_validation(lex, train, spec);
    items.extend(test.into_iter().map(|tree| SplitItem {
        tags: tag(lex, &tree),
        tree,
        split: Split::Test,
    }));
    Ok(Partition {
        spec: spec.clone(),
        items,
    })
}

fn build_systematicity(lex: &Lexicon, spec: &SplitSpec) -> Result<(Vec<DerivationTree>, Vec<DerivationTree>)> {
    let generator = Generator::new(lex, systematicity_fragment());
    let mut strata: [Vec<u128>; 3] = Default::default();
    for i in 0..generator.population() {
        if let Some(b) = basic_set(&tag(lex, &generator.unrank(i)), spec) {
            strata[b as usize].push(i);
        }
    }
    let [test_pool, b1, b2] = &strata;
    let test_n = spec.pool - spec.train;
    let share = spec
        .basic1_share
        .unwrap_or_else(|| b1.len() as f64 / (b1.len() + b2.len()).max(1) as f64);
    let n1 = ((spec.train as f64 * share).round() as usize).min(spec.train);
    let n2 = spec.train - n1;
    if n1 > b1.len() || n2 > b2.len() || test_n > test_pool.len() {
        return Err(Error::InfeasibleSplit(format!(
            "{} with primitives {:?} needs {n1} + {n2} train and {test_n} test sentences; \
             achievable maxima are basic set 1: {}, basic set 2: {}, train: {}, test: {}",
            spec.strategy,
            spec.primitives,
            b1.len(),
            b2.len(),
            b1.len() + b2.len(),
            test_pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pick = |pool: &[u128], n: usize| -> Vec<DerivationTree> {
        let mut chosen: Vec<u128> = index::sample(&mut rng, pool.len(), n).into_iter().map(|k| pool[k]).collect();
        chosen.sort_unstable();
        chosen.into_iter().map(|i| generator.unrank(i)).collect()
    };
    let mut train = pick(b1, n1);
    train.extend(pick(b2, n2));
    let test = pick(test_pool, test_n);
    Ok((train, test))
}

fn exact_depth(
    lex: &Lexicon,
    fragment: Fragment,
    depth: usize,
    n: usize,
    seed: u64,
    what: &str,
) -> Result<Vec<DerivationTree>> {
    let filter = move |t: &DerivationTree| t.depth() == depth;
    Generator::new(lex, fragment)
        .sample(n, seed, Some(&filter))
        .map_err(|e| match e {
            Error::PopulationTooSmall { requested, available } => Error::InfeasibleSplit(format!(
                "{what} at depth {depth}: requested {requested}, achievable maximum {available}"
            )),
            other => other,
        })
}

fn depth_seed(seed: u64, depth: usize, side: u64) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(depth as u64 * 2 + side)
}

fn build_productivity(lex: &Lexicon, spec: &SplitSpec) -> Result<(Vec<DerivationTree>, Vec<DerivationTree>)> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for d in 0..=spec.max_depth {
        let trees = exact_depth(lex, Fragment::table9(d), d, spec.per_depth, depth_seed(spec.seed, d, 0), "productivity")?;
        if d <= spec.train_max_depth {
            train.extend(trees);
        } else {
            test.extend(trees);
        }
    }
    Ok((train, test))
}

fn build_depth_exposure(lex: &Lexicon, spec: &SplitSpec) -> Result<(Vec<DerivationTree>, Vec<DerivationTree>)> {
    let others: Vec<Quantifier> = Quantifier::ALL
        .into_iter()
        .filter(|q| !spec.is_primitive(*q) && lex.quantifiers.contains(q))
        .collect();
    if others.is_empty() {
        return Err(Error::Config("depth exposure needs a non-primitive quantifier for test".into()));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for d in 0..=spec.max_depth {
        let base = depth_exposure_fragment(d);
        if d == 0 {
            train.extend(exact_depth(lex, base, 0, spec.per_depth, depth_seed(spec.seed, 0, 0), "depth exposure train")?);
            continue;
        }
        let f = base.clone().restrict_quantifiers(lex, &spec.primitives);
        train.extend(exact_depth(lex, f, d, spec.per_depth, depth_seed(spec.seed, d, 0), "depth exposure train")?);
        let f = base.restrict_quantifiers(lex, &others);
        test.extend(exact_depth(lex, f, d, spec.per_depth, depth_seed(spec.seed, d, 1), "depth exposure test")?);
    }
    Ok((train, test))
}

fn stratum(tags: &PhenomenonTags) -> (Vec<Quantifier>, usize, bool, usize) {
    (tags.quantifiers.clone(), modifier_count(tags), tags.has_negation, tags.depth)
}

/// Marks `round(n × fraction)` train items as validation, spread evenly over
/// the list sorted by stratum so each stratum contributes its share.
fn carve_validation(lex: &Lexicon, train: Vec<DerivationTree>, spec: &SplitSpec) -> Vec<SplitItem> {
    let mut items: Vec<SplitItem> = train
        .into_iter()
        .map(|tree| SplitItem {
            tags: tag(lex, &tree),
            tree,
            split: Split::Train,
        })
        .collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| (basic_set(&items[i].tags, spec), stratum(&items[i].tags)));
    let n = items.len();
    let target = (n as f64 * spec.valid_fraction).round() as usize;
    for (rank, &i) in order.iter().enumerate() {
        let before = rank * target / n.max(1);
        let after = (rank + 1) * target / n.max(1);
        if after > before {
            items[i].split = Split::Valid;
        }
    }
    items
}
