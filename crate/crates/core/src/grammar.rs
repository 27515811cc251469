//! The context-free fragment: rules, derivation trees, exhaustive
//! enumeration in canonical order, seeded sampling, surface realization,
//! phenomenon tagging and a parser for the fragment's own sentences.
//!
//! Enumeration is index based. For every nonterminal at a given site and
//! depth budget the number of derivations is counted once; a tree is then
//! recovered from its index by mixed-radix decoding (rule index first, then
//! children left to right, lexicon order inside each child). Sampling draws
//! distinct indices, so populations far too large to materialize can still
//! be sampled uniformly without replacement.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Category, Lexicon, Quantifier};

/// Productions of the fragment, in canonical order.
///
/// `ProperNounRel` is not part of the base grammar; fragments enable it
/// explicitly (it is needed for sentences such as "one dog liked bob that
/// loved two rats").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// S → NP VP
    Sentence,
    /// S → NP did not VP
    NegSentence,
    /// NP → PN
    ProperNoun,
    /// NP → Q N
    Quantified,
    /// NP → Q Adj N
    QuantifiedAdj,
    /// NP → Q N S̄
    QuantifiedRel,
    /// VP → IV
    Intransitive,
    /// VP → IV Adv
    Adverbial,
    /// VP → IV or IV′
    Disjunction,
    /// VP → IV and IV′
    Conjunction,
    /// VP → TV NP
    Transitive,
    /// S̄ → that VP
    SubjectRel,
    /// S̄ → that did not VP
    NegSubjectRel,
    /// S̄ → that NP TV
    ObjectRel,
    /// S̄ → that NP did not TV
    NegObjectRel,
    /// NP → PN S̄
    ProperNounRel,
}

impl Rule {
    pub const ALL: [Rule; 16] = [
        Rule::Sentence,
        Rule::NegSentence,
        Rule::ProperNoun,
        Rule::Quantified,
        Rule::QuantifiedAdj,
        Rule::QuantifiedRel,
        Rule::Intransitive,
        Rule::Adverbial,
        Rule::Disjunction,
        Rule::Conjunction,
        Rule::Transitive,
        Rule::SubjectRel,
        Rule::NegSubjectRel,
        Rule::ObjectRel,
        Rule::NegObjectRel,
        Rule::ProperNounRel,
    ];

    /// The fifteen base productions.
    pub fn base() -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(|r| *r != Rule::ProperNounRel)
    }

    pub fn lhs(self) -> Symbol {
        use Rule::*;
        match self {
            Sentence | NegSentence => Symbol::S,
            ProperNoun | Quantified | QuantifiedAdj | QuantifiedRel | ProperNounRel => Symbol::Np,
            Intransitive | Adverbial | Disjunction | Conjunction | Transitive => Symbol::Vp,
            SubjectRel | NegSubjectRel | ObjectRel | NegObjectRel => Symbol::Rel,
        }
    }

    /// Right-hand side nonterminals and preterminals, in surface order.
    pub fn rhs(self) -> &'static [Symbol] {
        use Symbol::*;
        match self {
            Rule::Sentence | Rule::NegSentence => &[Np, Vp],
            Rule::ProperNoun => &[Pn],
            Rule::Quantified => &[Q, N],
            Rule::QuantifiedAdj => &[Q, Adj, N],
            Rule::QuantifiedRel => &[Q, N, Rel],
            Rule::ProperNounRel => &[Pn, Rel],
            Rule::Intransitive => &[Iv],
            Rule::Adverbial => &[Iv, Adv],
            Rule::Disjunction | Rule::Conjunction => &[Iv, Iv2],
            Rule::Transitive => &[Tv, Np],
            Rule::SubjectRel | Rule::NegSubjectRel => &[Vp],
            Rule::ObjectRel | Rule::NegObjectRel => &[Np, Tv],
        }
    }

    pub fn is_negated(self) -> bool {
        matches!(self, Rule::NegSentence | Rule::NegSubjectRel | Rule::NegObjectRel)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Sentence => "S -> NP VP",
            Rule::NegSentence => "S -> NP did not VP",
            Rule::ProperNoun => "NP -> PN",
            Rule::Quantified => "NP -> Q N",
            Rule::QuantifiedAdj => "NP -> Q Adj N",
            Rule::QuantifiedRel => "NP -> Q N S'",
            Rule::Intransitive => "VP -> IV",
            Rule::Adverbial => "VP -> IV Adv",
            Rule::Disjunction => "VP -> IV or IV'",
            Rule::Conjunction => "VP -> IV and IV'",
            Rule::Transitive => "VP -> TV NP",
            Rule::SubjectRel => "S' -> that VP",
            Rule::NegSubjectRel => "S' -> that did not VP",
            Rule::ObjectRel => "S' -> that NP TV",
            Rule::NegObjectRel => "S' -> that NP did not TV",
            Rule::ProperNounRel => "NP -> PN S'",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    S,
    Np,
    Vp,
    Rel,
    Q,
    N,
    Pn,
    Iv,
    Iv2,
    Tv,
    Adj,
    Adv,
}

impl Symbol {
    fn category(self) -> Option<Category> {
        Some(match self {
            Symbol::Q => Category::Quantifier,
            Symbol::N => Category::Noun,
            Symbol::Pn => Category::ProperNoun,
            Symbol::Iv => Category::IntransitiveVerb,
            Symbol::Iv2 => Category::SecondVerb,
            Symbol::Tv => Category::TransitiveVerb,
            Symbol::Adj => Category::Adjective,
            Symbol::Adv => Category::Adverb,
            _ => return None,
        })
    }
}

/// Structural position of a nonterminal. Fragments license rules per site,
/// which is how the split strategies restrict, say, objects to proper nouns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Sentence,
    MainSubject,
    MainObject,
    EmbeddedSubject,
    EmbeddedObject,
    MainVp,
    EmbeddedVp,
    Relative,
}

impl Site {
    pub const NP: [Site; 4] = [
        Site::MainSubject,
        Site::MainObject,
        Site::EmbeddedSubject,
        Site::EmbeddedObject,
    ];
    pub const VP: [Site; 2] = [Site::MainVp, Site::EmbeddedVp];

    fn symbol(self) -> Symbol {
        match self {
            Site::Sentence => Symbol::S,
            Site::MainSubject | Site::MainObject | Site::EmbeddedSubject | Site::EmbeddedObject => {
                Symbol::Np
            }
            Site::MainVp | Site::EmbeddedVp => Symbol::Vp,
            Site::Relative => Symbol::Rel,
        }
    }

    /// Site of the nonterminal child `sym` under `rule` applied at `self`.
    fn child(self, rule: Rule, sym: Symbol) -> Site {
        match (rule, sym) {
            (Rule::Sentence | Rule::NegSentence, Symbol::Np) => Site::MainSubject,
            (Rule::Sentence | Rule::NegSentence, Symbol::Vp) => Site::MainVp,
            (Rule::Transitive, Symbol::Np) => {
                if self == Site::MainVp {
                    Site::MainObject
                } else {
                    Site::EmbeddedObject
                }
            }
            (Rule::SubjectRel | Rule::NegSubjectRel, Symbol::Vp) => Site::EmbeddedVp,
            (Rule::ObjectRel | Rule::NegObjectRel, Symbol::Np) => Site::EmbeddedSubject,
            (_, Symbol::Rel) => Site::Relative,
            _ => unreachable!("no nonterminal {sym:?} under {rule}"),
        }
    }
}

/// A set of licensed (site, rule) pairs, optional lexicon restrictions and a
/// bound on relative-clause nesting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    allowed: BTreeSet<(Site, Rule)>,
    restrict: BTreeMap<Category, Vec<usize>>,
    pub max_depth: usize,
}

impl Fragment {
    /// Every base production at every site where its left-hand side occurs.
    pub fn table9(max_depth: usize) -> Fragment {
        let mut allowed = BTreeSet::new();
        for rule in Rule::base() {
            for site in sites_of(rule.lhs()) {
                allowed.insert((site, rule));
            }
        }
        Fragment {
            allowed,
            restrict: BTreeMap::new(),
            max_depth,
        }
    }

    /// A fragment licensing nothing; build it up with [`Fragment::allow`].
    pub fn empty(max_depth: usize) -> Fragment {
        Fragment {
            allowed: BTreeSet::new(),
            restrict: BTreeMap::new(),
            max_depth,
        }
    }

    pub fn allow(mut self, sites: &[Site], rules: &[Rule]) -> Fragment {
        for &site in sites {
            for &rule in rules {
                assert_eq!(site.symbol(), rule.lhs(), "{rule} cannot apply at {site:?}");
                self.allowed.insert((site, rule));
            }
        }
        self
    }

    pub fn deny(mut self, sites: &[Site], rules: &[Rule]) -> Fragment {
        for &site in sites {
            for &rule in rules {
                self.allowed.remove(&(site, rule));
            }
        }
        self
    }

    /// Allows `NP → PN S̄` wherever `NP → PN` is allowed.
    pub fn with_proper_noun_relatives(mut self) -> Fragment {
        let sites: Vec<Site> = self
            .allowed
            .iter()
            .filter(|(_, r)| *r == Rule::ProperNoun)
            .map(|(s, _)| *s)
            .collect();
        for s in sites {
            self.allowed.insert((s, Rule::ProperNounRel));
        }
        self
    }

    /// Limits a lexical category to the given lemmas.
    pub fn restrict_lexicon(mut self, lex: &Lexicon, category: Category, lemmas: &[&str]) -> Fragment {
        let idx: Vec<usize> = (0..lex.len(category))
            .filter(|&i| lemmas.contains(&lex.lemma(category, i)))
            .collect();
        self.restrict.insert(category, idx);
        self
    }

    pub fn restrict_quantifiers(mut self, lex: &Lexicon, qs: &[Quantifier]) -> Fragment {
        let idx = (0..lex.quantifiers.len())
            .filter(|&i| qs.contains(&lex.quantifiers[i]))
            .collect();
        self.restrict.insert(Category::Quantifier, idx);
        self
    }

    pub fn allows(&self, site: Site, rule: Rule) -> bool {
        self.allowed.contains(&(site, rule))
    }

    pub fn rules(&self) -> impl Iterator<Item = (Site, Rule)> + '_ {
        self.allowed.iter().copied()
    }

    fn rules_at(&self, site: Site) -> impl Iterator<Item = Rule> + '_ {
        Rule::ALL.into_iter().filter(move |r| self.allows(site, *r))
    }

    fn lexical_indices(&self, lex: &Lexicon, cat: Category) -> Vec<usize> {
        match self.restrict.get(&cat) {
            Some(v) => v.clone(),
            None => (0..lex.len(cat)).collect(),
        }
    }
}

fn sites_of(sym: Symbol) -> Vec<Site> {
    match sym {
        Symbol::S => vec![Site::Sentence],
        Symbol::Np => Site::NP.to_vec(),
        Symbol::Vp => Site::VP.to_vec(),
        Symbol::Rel => vec![Site::Relative],
        _ => vec![],
    }
}

/// A derivation in the fragment. Function words ("did not", "that", "or",
/// "and") are implied by the rule; children are the right-hand side symbols
/// in surface order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DerivationTree {
    Node {
        rule: Rule,
        children: Vec<DerivationTree>,
    },
    Leaf {
        category: Category,
        index: usize,
    },
}

impl DerivationTree {
    pub fn rule(&self) -> Option<Rule> {
        match self {
            DerivationTree::Node { rule, .. } => Some(*rule),
            DerivationTree::Leaf { .. } => None,
        }
    }

    pub fn children(&self) -> &[DerivationTree] {
        match self {
            DerivationTree::Node { children, .. } => children,
            DerivationTree::Leaf { .. } => &[],
        }
    }

    pub fn child(&self, i: usize) -> &DerivationTree {
        &self.children()[i]
    }

    pub fn leaf(&self) -> Option<(Category, usize)> {
        match self {
            DerivationTree::Leaf { category, index } => Some((*category, *index)),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DerivationTree::Node { rule, .. } => match rule.lhs() {
                Symbol::S => "S",
                Symbol::Np => "NP",
                Symbol::Vp => "VP",
                _ => "S'",
            },
            DerivationTree::Leaf { category, .. } => category.symbol(),
        }
    }

    /// Longest chain of relative clauses on a root-to-leaf path.
    pub fn depth(&self) -> usize {
        let below = self.children().iter().map(|c| c.depth()).max().unwrap_or(0);
        match self.rule() {
            Some(r) if r.lhs() == Symbol::Rel => below + 1,
            _ => below,
        }
    }

    /// Every quantifier in the tree, in surface order.
    pub fn quantifiers(&self, lex: &Lexicon) -> Vec<Quantifier> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Some((Category::Quantifier, i)) = t.leaf() {
                out.push(lex.quantifiers[i]);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a DerivationTree)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Content-word lemmas (nouns, proper nouns, verbs, adjectives, adverbs)
    /// in surface order.
    pub fn content_lemmas(&self, lex: &Lexicon) -> Vec<(Category, String)> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Some((cat, i)) = t.leaf() {
                if cat != Category::Quantifier {
                    out.push((cat, lex.lemma(cat, i).to_string()));
                }
            }
        });
        out
    }

    /// Checks that every node is an instance of a production and every
    /// leaf index is in range.
    pub fn is_well_formed(&self, lex: &Lexicon) -> bool {
        match self {
            DerivationTree::Leaf { category, index } => *index < lex.len(*category),
            DerivationTree::Node { rule, children } => {
                let rhs = rule.rhs();
                rhs.len() == children.len()
                    && rhs.iter().zip(children).all(|(sym, c)| {
                        let ok = match (sym.category(), c) {
                            (Some(cat), DerivationTree::Leaf { category, .. }) => cat == *category,
                            (None, DerivationTree::Node { rule, .. }) => rule.lhs() == *sym,
                            _ => false,
                        };
                        ok && c.is_well_formed(lex)
                    })
            }
        }
    }

    pub fn leaf_index(&self) -> usize {
        self.leaf().expect("leaf").1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingType {
    Peripheral,
    Center,
}

impl fmt::Display for EmbeddingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingType::Peripheral => "Per",
            EmbeddingType::Center => "Cen",
        })
    }
}

/// The seven annotated phenomena of a generated sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhenomenonTags {
    pub subject_quantifier: Option<Quantifier>,
    pub object_quantifier: Option<Quantifier>,
    /// Every quantifier in the sentence, in surface order.
    pub quantifiers: Vec<Quantifier>,
    pub has_negation: bool,
    pub has_adjective: bool,
    pub has_adverb: bool,
    pub has_conjunction: bool,
    pub has_disjunction: bool,
    pub embedding_types: Vec<EmbeddingType>,
    pub depth: usize,
}

// ---------------------------------------------------------------------------
// Counting and unranking

/// Derivation counts for one fragment over one lexicon.
///
/// Counts are memoized per (site, remaining depth); the table is behind a
/// mutex so a generator can be shared across threads.
pub struct Generator<'a> {
    lex: &'a Lexicon,
    fragment: Fragment,
    lexical: HashMap<Category, Vec<usize>>,
    memo: Mutex<HashMap<(Site, usize), u128>>,
}

impl<'a> Generator<'a> {
    pub fn new(lex: &'a Lexicon, fragment: Fragment) -> Generator<'a> {
        let lexical = Category::ALL
            .into_iter()
            .map(|c| (c, fragment.lexical_indices(lex, c)))
            .collect();
        Generator {
            lex,
            fragment,
            lexical,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn fragment(&self) -> &Fragment {
        &self.fragment
    }

    pub fn lexicon(&self) -> &Lexicon {
        self.lex
    }

    /// Number of trees with relative-clause depth at most `max_depth`.
    pub fn population(&self) -> u128 {
        self.count(Site::Sentence, self.fragment.max_depth)
    }

    fn lex_count(&self, cat: Category) -> u128 {
        self.lexical[&cat].len() as u128
    }

    fn count(&self, site: Site, budget: usize) -> u128 {
        if let Some(&c) = self.memo.lock().unwrap().get(&(site, budget)) {
            return c;
        }
        let mut total: u128 = 0;
        for rule in self.fragment.rules_at(site) {
            total = total
                .checked_add(self.rule_count(site, rule, budget))
                .expect("derivation count exceeds u128");
        }
        self.memo.lock().unwrap().insert((site, budget), total);
        total
    }

    fn child_budget(site: Site, budget: usize) -> Option<usize> {
        if site == Site::Relative {
            budget.checked_sub(1)
        } else {
            Some(budget)
        }
    }

    fn child_counts(&self, site: Site, rule: Rule, budget: usize) -> Option<Vec<u128>> {
        let inner = Self::child_budget(site, budget)?;
        Some(
            rule.rhs()
                .iter()
                .map(|sym| match sym.category() {
                    Some(cat) => self.lex_count(cat),
                    None => self.count(site.child(rule, *sym), inner),
                })
                .collect(),
        )
    }

    fn rule_count(&self, site: Site, rule: Rule, budget: usize) -> u128 {
        match self.child_counts(site, rule, budget) {
            None => 0,
            Some(counts) => counts.iter().try_fold(1u128, |acc, &c| acc.checked_mul(c)).expect("derivation count exceeds u128"),
        }
    }

    /// The tree at position `index` of the canonical order.
    pub fn unrank(&self, index: u128) -> DerivationTree {
        assert!(index < self.population(), "index out of range");
        self.unrank_at(Site::Sentence, self.fragment.max_depth, index)
    }

    fn unrank_at(&self, site: Site, budget: usize, mut index: u128) -> DerivationTree {
        for rule in self.fragment.rules_at(site) {
            let rc = self.rule_count(site, rule, budget);
            if index >= rc {
                index -= rc;
                continue;
            }
            let counts = self.child_counts(site, rule, budget).expect("nonzero count");
            let inner = Self::child_budget(site, budget).expect("nonzero count");
            let mut digits = vec![0u128; counts.len()];
            for i in (0..counts.len()).rev() {
                digits[i] = index % counts[i];
                index /= counts[i];
            }
            let children = rule
                .rhs()
                .iter()
                .zip(digits)
                .map(|(sym, d)| match sym.category() {
                    Some(cat) => DerivationTree::Leaf {
                        category: cat,
                        index: self.lexical[&cat][d as usize],
                    },
                    None => self.unrank_at(site.child(rule, *sym), inner, d),
                })
                .collect();
            return DerivationTree::Node { rule, children };
        }
        unreachable!("index within population always selects a rule")
    }

    /// Lazily yields every tree in canonical order.
    pub fn enumerate(&self) -> impl Iterator<Item = DerivationTree> + '_ {
        let total = self.population();
        let mut i: u128 = 0;
        std::iter::from_fn(move || {
            if i < total {
                let t = self.unrank(i);
                i += 1;
                Some(t)
            } else {
                None
            }
        })
    }

    /// Uniform sample of `n` distinct trees, returned in canonical order.
    ///
    /// With a filter, distinct trees are drawn by rejection. When that stalls
    /// and the population is at most [`EXPLICIT_LIMIT`], it is filtered
    /// exhaustively instead, so a shortfall reports the exact available count.
    pub fn sample(
        &self,
        n: usize,
        seed: u64,
        filter: Option<&dyn Fn(&DerivationTree) -> bool>,
    ) -> Result<Vec<DerivationTree>> {
        let total = self.population();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if n == 0 {
            return Ok(Vec::new());
        }
        match filter {
            None => {
                if (n as u128) > total {
                    return Err(Error::PopulationTooSmall {
                        requested: n,
                        available: total,
                    });
                }
                let mut idx = floyd_sample(&mut rng, total, n);
                idx.sort_unstable();
                Ok(idx.into_iter().map(|i| self.unrank(i)).collect())
            }
            Some(f) => {
                if let Some(out) = self.sample_by_rejection(n, &mut rng, f, total <= EXPLICIT_LIMIT) {
                    return Ok(out);
                }
                if total > EXPLICIT_LIMIT {
                    return Err(Error::PopulationTooSmall {
                        requested: n,
                        available: 0,
                    });
                }
                let kept: Vec<u128> = (0..total).filter(|&i| f(&self.unrank(i))).collect();
                if n > kept.len() {
                    return Err(Error::PopulationTooSmall {
                        requested: n,
                        available: kept.len() as u128,
                    });
                }
                let mut pick = floyd_sample(&mut rng, kept.len() as u128, n);
                pick.sort_unstable();
                Ok(pick.into_iter().map(|p| self.unrank(kept[p as usize])).collect())
            }
        }
    }

    /// Draws distinct indices until `n` pass the filter. Gives up early when
    /// an exhaustive scan is possible and the acceptance rate looks poor.
    fn sample_by_rejection(
        &self,
        n: usize,
        rng: &mut ChaCha8Rng,
        f: &dyn Fn(&DerivationTree) -> bool,
        can_scan: bool,
    ) -> Option<Vec<DerivationTree>> {
        let total = self.population();
        let max_attempts = if can_scan {
            (4 * n as u128 + 1_000).min(total / 2)
        } else {
            200 * n as u128 + 1_000_000
        };
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0u128;
        while out.len() < n {
            if attempts >= max_attempts || seen.len() as u128 == total {
                return None;
            }
            attempts += 1;
            let i = rng.gen_range(0..total);
            if !seen.insert(i) {
                continue;
            }
            let t = self.unrank(i);
            if f(&t) {
                out.push((i, t));
            }
        }
        out.sort_by_key(|(i, _)| *i);
        Some(out.into_iter().map(|(_, t)| t).collect())
    }
}

/// Largest filtered population that [`Generator::sample`] scans exhaustively.
pub const EXPLICIT_LIMIT: u128 = 1 << 21;

/// Floyd's algorithm: `n` distinct integers from `0..total`, in draw order.
fn floyd_sample(rng: &mut ChaCha8Rng, total: u128, n: usize) -> Vec<u128> {
    let mut chosen = HashSet::with_capacity(n);
    let mut order = Vec::with_capacity(n);
    let n = n as u128;
    for j in (total - n)..total {
        let t = rng.gen_range(0..=j);
        let pick = if chosen.contains(&t) { j } else { t };
        chosen.insert(pick);
        order.push(pick);
    }
    order
}

/// All trees of `fragment` (depth ≤ `fragment.max_depth`) that pass `filter`,
/// in canonical order.
pub fn enumerate_trees<'a>(
    lex: &'a Lexicon,
    fragment: Fragment,
    filter: Option<&'a dyn Fn(&DerivationTree) -> bool>,
) -> impl Iterator<Item = DerivationTree> + 'a {
    let generator = Generator::new(lex, fragment);
    let total = generator.population();
    (0..total)
        .map(move |i| generator.unrank(i))
        .filter(move |t| filter.is_none_or(|f| f(t)))
}

pub fn sample_trees(
    lex: &Lexicon,
    fragment: Fragment,
    n: usize,
    seed: u64,
    filter: Option<&dyn Fn(&DerivationTree) -> bool>,
) -> Result<Vec<DerivationTree>> {
    Generator::new(lex, fragment).sample(n, seed, filter)
}

// ---------------------------------------------------------------------------
// Realization

pub fn realize(lex: &Lexicon, tree: &DerivationTree) -> String {
    let mut out = Vec::new();
    realize_into(lex, tree, false, &mut out);
    out.join(" ")
}

fn verb_form(lex: &Lexicon, cat: Category, i: usize, base: bool) -> &str {
    let v = match cat {
        Category::IntransitiveVerb => &lex.intransitive_verbs[i],
        Category::SecondVerb => &lex.second_verbs[i],
        Category::TransitiveVerb => &lex.transitive_verbs[i],
        _ => unreachable!(),
    };
    if base {
        &v.base
    } else {
        &v.past
    }
}

/// `base` asks the verbs of this phrase (not of embedded clauses) to surface
/// in base form, as after "did not".
fn realize_into<'l>(lex: &'l Lexicon, t: &DerivationTree, base: bool, out: &mut Vec<&'l str>) {
    let DerivationTree::Node { rule, children } = t else {
        let (cat, i) = t.leaf().unwrap();
        out.push(match cat {
            Category::Quantifier => lex.quantifiers[i].word(),
            Category::ProperNoun => &lex.proper_nouns[i].surface,
            Category::Adjective => &lex.adjectives[i].surface,
            Category::Adverb => &lex.adverbs[i].surface,
            Category::Noun => &lex.nouns[i].singular,
            c => verb_form(lex, c, i, base),
        });
        return;
    };
    match rule {
        Rule::Sentence => {
            realize_into(lex, &children[0], false, out);
            realize_into(lex, &children[1], false, out);
        }
        Rule::NegSentence => {
            realize_into(lex, &children[0], false, out);
            out.extend(["did", "not"]);
            realize_into(lex, &children[1], true, out);
        }
        Rule::ProperNoun => realize_into(lex, &children[0], false, out),
        Rule::ProperNounRel => {
            realize_into(lex, &children[0], false, out);
            realize_into(lex, &children[1], false, out);
        }
        Rule::Quantified | Rule::QuantifiedAdj | Rule::QuantifiedRel => {
            let q = lex.quantifiers[children[0].leaf_index()];
            out.push(q.word());
            if *rule == Rule::QuantifiedAdj {
                realize_into(lex, &children[1], false, out);
            }
            let noun_pos = if *rule == Rule::QuantifiedAdj { 2 } else { 1 };
            let n = &lex.nouns[children[noun_pos].leaf_index()];
            out.push(if q.takes_plural() { &n.plural } else { &n.singular });
            if *rule == Rule::QuantifiedRel {
                realize_into(lex, &children[2], false, out);
            }
        }
        Rule::Intransitive => realize_into(lex, &children[0], base, out),
        Rule::Adverbial => {
            realize_into(lex, &children[0], base, out);
            realize_into(lex, &children[1], base, out);
        }
        Rule::Disjunction | Rule::Conjunction => {
            realize_into(lex, &children[0], base, out);
            out.push(if *rule == Rule::Disjunction { "or" } else { "and" });
            realize_into(lex, &children[1], base, out);
        }
        Rule::Transitive => {
            realize_into(lex, &children[0], base, out);
            realize_into(lex, &children[1], false, out);
        }
        Rule::SubjectRel => {
            out.push("that");
            realize_into(lex, &children[0], false, out);
        }
        Rule::NegSubjectRel => {
            out.extend(["that", "did", "not"]);
            realize_into(lex, &children[0], true, out);
        }
        Rule::ObjectRel => {
            out.push("that");
            realize_into(lex, &children[0], false, out);
            realize_into(lex, &children[1], false, out);
        }
        Rule::NegObjectRel => {
            out.push("that");
            realize_into(lex, &children[0], false, out);
            out.extend(["did", "not"]);
            realize_into(lex, &children[1], true, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Tagging

/// Embedding type of a relative clause: object-gap relatives ("that all
/// cats kicked") nest in the middle of their host and are center
/// embeddings; subject-gap relatives ("that chased all polite cats") extend
/// to the right and are peripheral.
pub fn embedding_type(rule: Rule) -> Option<EmbeddingType> {
    match rule {
        Rule::SubjectRel | Rule::NegSubjectRel => Some(EmbeddingType::Peripheral),
        Rule::ObjectRel | Rule::NegObjectRel => Some(EmbeddingType::Center),
        _ => None,
    }
}

pub fn tag(lex: &Lexicon, tree: &DerivationTree) -> PhenomenonTags {
    let mut tags = PhenomenonTags {
        subject_quantifier: None,
        object_quantifier: None,
        quantifiers: tree.quantifiers(lex),
        has_negation: false,
        has_adjective: false,
        has_adverb: false,
        has_conjunction: false,
        has_disjunction: false,
        embedding_types: longest_chain(tree),
        depth: 0,
    };
    tags.depth = tags.embedding_types.len();
    let np_quantifier = |np: &DerivationTree| match np.rule() {
        Some(Rule::Quantified | Rule::QuantifiedAdj | Rule::QuantifiedRel) => {
            Some(lex.quantifiers[np.child(0).leaf_index()])
        }
        _ => None,
    };
    if tree.rule().is_some_and(|r| r.lhs() == Symbol::S) {
        tags.subject_quantifier = np_quantifier(tree.child(0));
        let vp = tree.child(1);
        if vp.rule() == Some(Rule::Transitive) {
            tags.object_quantifier = np_quantifier(vp.child(1));
        }
    }
    tree.walk(&mut |t| match t.rule() {
        Some(r) if r.is_negated() => tags.has_negation = true,
        Some(Rule::QuantifiedAdj) => tags.has_adjective = true,
        Some(Rule::Adverbial) => tags.has_adverb = true,
        Some(Rule::Conjunction) => tags.has_conjunction = true,
        Some(Rule::Disjunction) => tags.has_disjunction = true,
        _ => {}
    });
    tags
}

/// Embedding types along the deepest relative-clause chain (leftmost on ties).
fn longest_chain(t: &DerivationTree) -> Vec<EmbeddingType> {
    let mut best: Vec<EmbeddingType> = Vec::new();
    for c in t.children() {
        let chain = longest_chain(c);
        if chain.len() > best.len() {
            best = chain;
        }
    }
    if let Some(e) = t.rule().and_then(embedding_type) {
        best.insert(0, e);
    }
    best
}

// ---------------------------------------------------------------------------
// Parsing

/// Recovers the derivation of a sentence of the fragment (base rules plus
/// proper-noun relatives). Fails if the sentence has no parse or more than one.
pub fn parse_sentence(lex: &Lexicon, sentence: &str) -> Result<DerivationTree> {
    let tokens: Vec<String> = sentence
        .split_whitespace()
        .map(|t| t.trim_end_matches('.').to_lowercase())
        .collect();
    let p = Parser { lex, toks: &tokens };
    let parses: Vec<DerivationTree> = p
        .sentence(0)
        .into_iter()
        .filter(|(_, end)| *end == tokens.len())
        .map(|(t, _)| t)
        .collect();
    match parses.len() {
        1 => Ok(parses.into_iter().next().unwrap()),
        0 => Err(Error::Unparseable(sentence.to_string())),
        k => Err(Error::Unparseable(format!("{sentence} ({k} parses)"))),
    }
}

struct Parser<'a> {
    lex: &'a Lexicon,
    toks: &'a [String],
}

type Parses = Vec<(DerivationTree, usize)>;

impl Parser<'_> {
    fn word(&self, pos: usize, w: &str) -> bool {
        self.toks.get(pos).is_some_and(|t| t == w)
    }

    fn leaf(category: Category, index: usize) -> DerivationTree {
        DerivationTree::Leaf { category, index }
    }

    fn node(rule: Rule, children: Vec<DerivationTree>) -> DerivationTree {
        DerivationTree::Node { rule, children }
    }

    fn lexical(&self, pos: usize, cat: Category, base: bool) -> Vec<usize> {
        let Some(tok) = self.toks.get(pos) else {
            return vec![];
        };
        (0..self.lex.len(cat))
            .filter(|&i| match cat {
                Category::ProperNoun => &self.lex.proper_nouns[i].surface == tok,
                Category::Adjective => &self.lex.adjectives[i].surface == tok,
                Category::Adverb => &self.lex.adverbs[i].surface == tok,
                Category::IntransitiveVerb | Category::SecondVerb | Category::TransitiveVerb => {
                    verb_form(self.lex, cat, i, base) == tok
                }
                _ => false,
            })
            .collect()
    }

    fn sentence(&self, pos: usize) -> Parses {
        let mut out = Vec::new();
        for (np, p1) in self.np(pos) {
            if self.word(p1, "did") && self.word(p1 + 1, "not") {
                for (vp, p2) in self.vp(p1 + 2, true) {
                    out.push((Self::node(Rule::NegSentence, vec![np.clone(), vp]), p2));
                }
            }
            for (vp, p2) in self.vp(p1, false) {
                out.push((Self::node(Rule::Sentence, vec![np.clone(), vp]), p2));
            }
        }
        out
    }

    fn np(&self, pos: usize) -> Parses {
        let mut out = Vec::new();
        for pn in self.lexical(pos, Category::ProperNoun, false) {
            let leaf = Self::leaf(Category::ProperNoun, pn);
            out.push((Self::node(Rule::ProperNoun, vec![leaf.clone()]), pos + 1));
            for (rel, p) in self.rel(pos + 1) {
                out.push((Self::node(Rule::ProperNounRel, vec![leaf.clone(), rel]), p));
            }
        }
        let Some(q) = self.toks.get(pos).and_then(|t| Quantifier::from_word(t)) else {
            return out;
        };
        let Some(qi) = self.lex.quantifiers.iter().position(|x| *x == q) else {
            return out;
        };
        let ql = Self::leaf(Category::Quantifier, qi);
        let noun_at = |p: usize| -> Vec<usize> {
            let Some(tok) = self.toks.get(p) else {
                return vec![];
            };
            (0..self.lex.nouns.len())
                .filter(|&i| {
                    let n = &self.lex.nouns[i];
                    let form = if q.takes_plural() { &n.plural } else { &n.singular };
                    form == tok
                })
                .collect()
        };
        for n in noun_at(pos + 1) {
            let nl = Self::leaf(Category::Noun, n);
            out.push((Self::node(Rule::Quantified, vec![ql.clone(), nl.clone()]), pos + 2));
            for (rel, p) in self.rel(pos + 2) {
                out.push((Self::node(Rule::QuantifiedRel, vec![ql.clone(), nl.clone(), rel]), p));
            }
        }
        for a in self.lexical(pos + 1, Category::Adjective, false) {
            for n in noun_at(pos + 2) {
                out.push((
                    Self::node(
                        Rule::QuantifiedAdj,
                        vec![ql.clone(), Self::leaf(Category::Adjective, a), Self::leaf(Category::Noun, n)],
                    ),
                    pos + 3,
                ));
            }
        }
        out
    }

    fn vp(&self, pos: usize, base: bool) -> Parses {
        let mut out = Vec::new();
        for iv in self.lexical(pos, Category::IntransitiveVerb, base) {
            let l = Self::leaf(Category::IntransitiveVerb, iv);
            out.push((Self::node(Rule::Intransitive, vec![l.clone()]), pos + 1));
            for adv in self.lexical(pos + 1, Category::Adverb, false) {
                out.push((
                    Self::node(Rule::Adverbial, vec![l.clone(), Self::leaf(Category::Adverb, adv)]),
                    pos + 2,
                ));
            }
            for (conj, rule) in [("or", Rule::Disjunction), ("and", Rule::Conjunction)] {
                if self.word(pos + 1, conj) {
                    for iv2 in self.lexical(pos + 2, Category::SecondVerb, base) {
                        out.push((
                            Self::node(rule, vec![l.clone(), Self::leaf(Category::SecondVerb, iv2)]),
                            pos + 3,
                        ));
                    }
                }
            }
        }
        for tv in self.lexical(pos, Category::TransitiveVerb, base) {
            for (np, p) in self.np(pos + 1) {
                out.push((
                    Self::node(Rule::Transitive, vec![Self::leaf(Category::TransitiveVerb, tv), np]),
                    p,
                ));
            }
        }
        out
    }

    fn rel(&self, pos: usize) -> Parses {
        let mut out = Vec::new();
        if !self.word(pos, "that") {
            return out;
        }
        let pos = pos + 1;
        if self.word(pos, "did") && self.word(pos + 1, "not") {
            for (vp, p) in self.vp(pos + 2, true) {
                out.push((Self::node(Rule::NegSubjectRel, vec![vp]), p));
            }
        }
        for (vp, p) in self.vp(pos, false) {
            out.push((Self::node(Rule::SubjectRel, vec![vp]), p));
        }
        for (np, p) in self.np(pos) {
            for tv in self.lexical(p, Category::TransitiveVerb, false) {
                out.push((
                    Self::node(Rule::ObjectRel, vec![np.clone(), Self::leaf(Category::TransitiveVerb, tv)]),
                    p + 1,
                ));
            }
            if self.word(p, "did") && self.word(p + 1, "not") {
                for tv in self.lexical(p + 2, Category::TransitiveVerb, true) {
                    out.push((
                        Self::node(
                            Rule::NegObjectRel,
                            vec![np.clone(), Self::leaf(Category::TransitiveVerb, tv)],
                        ),
                        p + 3,
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::default()
    }

    fn parse(s: &str) -> DerivationTree {
        parse_sentence(&lex(), s).unwrap()
    }

    #[test]
    fn single_tree_fragment() {
        let lex = lex();
        let frag = Fragment::empty(0)
            .allow(&[Site::Sentence], &[Rule::Sentence])
            .allow(&[Site::MainSubject], &[Rule::Quantified])
            .allow(&[Site::MainVp], &[Rule::Intransitive])
            .restrict_quantifiers(&lex, &[Quantifier::One])
            .restrict_lexicon(&lex, Category::Noun, &["tiger"])
            .restrict_lexicon(&lex, Category::IntransitiveVerb, &["run"]);
        let trees: Vec<_> = enumerate_trees(&lex, frag, None).collect();
        assert_eq!(trees.len(), 1);
        assert_eq!(realize(&lex, &trees[0]), "one tiger ran");
    }

    #[test]
    fn realization_examples() {
        let lex = lex();
        for s in [
            "two tigers ran",
            "one tiger did not run",
            "two dogs that all cats kicked loved ann",
            "bob liked a bear that chased all polite cats",
            "every tiger ran or came",
            "ann did not chase two dogs",
            "all lions that did not follow two bears that chased three monkeys did not cry",
        ] {
            assert_eq!(realize(&lex, &parse(s)), s);
        }
    }

    #[test]
    fn agreement_is_checked_by_the_parser() {
        assert!(parse_sentence(&lex(), "two tiger ran").is_err());
        assert!(parse_sentence(&lex(), "one tigers ran").is_err());
        assert!(parse_sentence(&lex(), "one tiger did not ran").is_err());
    }

    #[test]
    fn tags_for_examples() {
        let lex = lex();
        let t = tag(&lex, &parse("every tiger ran or came"));
        assert_eq!(t.subject_quantifier, Some(Quantifier::Every));
        assert!(t.has_disjunction);
        assert!(!t.has_conjunction && !t.has_negation && !t.has_adjective && !t.has_adverb);
        assert_eq!(t.depth, 0);

        let t = tag(&lex, &parse("bob liked a bear that chased all polite cats"));
        assert_eq!(t.subject_quantifier, None);
        assert_eq!(t.object_quantifier, Some(Quantifier::A));
        assert!(t.has_adjective);
        assert_eq!(t.embedding_types, vec![EmbeddingType::Peripheral]);
        assert_eq!(t.depth, 1);

        let t = tag(&lex, &parse("one tiger ran"));
        assert_eq!(t.subject_quantifier, Some(Quantifier::One));
        assert_eq!(t.object_quantifier, None);
        assert!(!(t.has_negation || t.has_adjective || t.has_adverb || t.has_conjunction || t.has_disjunction));
        assert_eq!(t.depth, 0);

        let t = tag(&lex, &parse("two dogs that a bear that chased all polite cats kicked loved ann"));
        assert_eq!(t.embedding_types, vec![EmbeddingType::Center, EmbeddingType::Peripheral]);
    }

    #[test]
    fn every_base_rule_is_used_at_depth_one() {
        let lex = lex();
        let g = Generator::new(&lex, Fragment::table9(1));
        let trees = g.sample(4000, 3, None).unwrap();
        let mut used = BTreeSet::new();
        for t in &trees {
            t.walk(&mut |n| {
                if let Some(r) = n.rule() {
                    used.insert(r);
                }
            });
        }
        for r in Rule::base() {
            assert!(used.contains(&r), "{r} never used");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_distinct() {
        let lex = lex();
        let g = Generator::new(&lex, Fragment::table9(1));
        let a = g.sample(500, 11, None).unwrap();
        let b = g.sample(500, 11, None).unwrap();
        assert_eq!(a, b);
        let set: HashSet<_> = a.iter().collect();
        assert_eq!(set.len(), 500);
        assert!(g.sample(0, 11, None).unwrap().is_empty());
    }

    #[test]
    fn population_too_small_reports_size() {
        let lex = lex();
        let frag = Fragment::empty(0)
            .allow(&[Site::Sentence], &[Rule::Sentence])
            .allow(&[Site::MainSubject], &[Rule::ProperNoun])
            .allow(&[Site::MainVp], &[Rule::Intransitive]);
        let err = sample_trees(&lex, frag, 1000, 0, None).unwrap_err();
        match err {
            Error::PopulationTooSmall { available, .. } => assert_eq!(available, 100),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unrank_is_injective_on_a_small_fragment() {
        let lex = lex();
        let frag = Fragment::table9(0)
            .restrict_lexicon(&lex, Category::Noun, &["dog"])
            .restrict_lexicon(&lex, Category::ProperNoun, &["ann"])
            .restrict_lexicon(&lex, Category::Adjective, &["small"])
            .restrict_lexicon(&lex, Category::Adverb, &["slowly"])
            .restrict_lexicon(&lex, Category::IntransitiveVerb, &["run"])
            .restrict_lexicon(&lex, Category::SecondVerb, &["laugh"])
            .restrict_lexicon(&lex, Category::TransitiveVerb, &["kiss", "kick"]);
        let trees: Vec<_> = enumerate_trees(&lex, frag, None).collect();
        let sentences: HashSet<_> = trees.iter().map(|t| realize(&lex, t)).collect();
        assert_eq!(sentences.len(), trees.len());
        for t in &trees {
            assert!(t.is_well_formed(&lex));
            assert_eq!(&parse_sentence(&lex, &realize(&lex, t)).unwrap(), t);
        }
    }
}
