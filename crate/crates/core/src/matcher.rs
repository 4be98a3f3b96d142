//! Entity matching and relation selection against a knowledge structure.
//!
//! Both go through the same candidate query: a one-line selective question
//! followed by an indexed candidate list (`c_1: …, c_2: …`). An exact
//! normalized match always short-circuits without consulting the oracle.
//! Otherwise the oracle picks from the list, or with
//! [`MatchStrategy::Lexical`] the best [`lexical_score`] wins outright.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{Oracle, OracleRequest};
use crate::store::{EntityId, KnowledgeStructure, RelationLabel};
use crate::text::normalize_label;

pub const DEFAULT_PREFILTER_TOP_K: usize = 20;

const MATCH_SYSTEM: &str = "You align names against a knowledge base. \
Reply with the identifier of the single best candidate, for example c_1.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchStrategy {
    Oracle,
    Lexical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatcherConfig {
    pub strategy: MatchStrategy,
    pub prefilter_top_k: usize,
    pub min_lexical_score: f64,
    pub token_jaccard_weight: f64,
    pub trigram_dice_weight: f64,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self {
            strategy: MatchStrategy::Oracle,
            prefilter_top_k: DEFAULT_PREFILTER_TOP_K,
            min_lexical_score: 0.0,
            token_jaccard_weight: 0.5,
            trigram_dice_weight: 0.5,
        }
    }
}

impl MatcherConfig {
    pub fn lexical() -> Self {
        Self {
            strategy: MatchStrategy::Lexical,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let weights = [self.token_jaccard_weight, self.trigram_dice_weight];
        if weights.iter().any(|w| !(0.0..=1.0).contains(w))
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidRequest(
                "similarity weights must be in [0, 1] and sum to 1".into(),
            ));
        }
        if self.prefilter_top_k == 0 {
            return Err(Error::InvalidRequest("prefilter_top_k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.min_lexical_score) {
            return Err(Error::InvalidRequest("min_lexical_score must be in [0, 1]".into()));
        }
        Ok(())
    }

    fn score(&self, a: &str, b: &str) -> f64 {
        weighted_score(a, b, self.token_jaccard_weight, self.trigram_dice_weight)
    }
}

/// `0.5 * Jaccard(tokens) + 0.5 * Dice(character trigrams)` over normalized text.
///
/// Symmetric, in `[0, 1]`, exactly 1 for identical non-empty inputs and 0 when
/// either side is empty. Trigrams are taken over the text padded with one
/// space on each side so single characters still produce one trigram.
pub fn lexical_score(a: &str, b: &str) -> f64 {
    weighted_score(a, b, 0.5, 0.5)
}

fn weighted_score(a: &str, b: &str, jaccard_weight: f64, dice_weight: f64) -> f64 {
    let a = normalize_label(a);
    let b = normalize_label(b);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    jaccard_weight * token_jaccard(&a, &b) + dice_weight * trigram_dice(&a, &b)
}

fn token_jaccard(a: &str, b: &str) -> f64 {
    let ta: HashSet<&str> = a.split(' ').collect();
    let tb: HashSet<&str> = b.split(' ').collect();
    let inter = ta.intersection(&tb).count();
    let union = ta.len() + tb.len() - inter;
    inter as f64 / union as f64
}

fn trigrams(s: &str) -> HashMap<[char; 3], usize> {
    let padded: Vec<char> = std::iter::once(' ')
        .chain(s.chars())
        .chain(std::iter::once(' '))
        .collect();
    let mut grams = HashMap::new();
    for w in padded.windows(3) {
        *grams.entry([w[0], w[1], w[2]]).or_insert(0) += 1;
    }
    grams
}

fn trigram_dice(a: &str, b: &str) -> f64 {
    let ga = trigrams(a);
    let gb = trigrams(b);
    let total: usize = ga.values().sum::<usize>() + gb.values().sum::<usize>();
    let shared: usize = ga
        .iter()
        .map(|(g, n)| (*n).min(gb.get(g).copied().unwrap_or(0)))
        .sum();
    2.0 * shared as f64 / total as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateKind {
    Entity,
    Relation,
}

impl CandidateKind {
    fn noun(self) -> &'static str {
        match self {
            CandidateKind::Entity => "entity",
            CandidateKind::Relation => "relation",
        }
    }
}

/// Selective question plus an indexed candidate list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateQuery {
    pub kind: CandidateKind,
    pub target: String,
    pub prefix_question: String,
    /// `(1-based index, feature text)`, contiguous.
    pub candidates: Vec<(usize, String)>,
}

impl CandidateQuery {
    /// Fails when `features` is empty.
    pub fn new(
        kind: CandidateKind,
        target: impl Into<String>,
        features: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let target = target.into();
        let candidates: Vec<(usize, String)> = features
            .into_iter()
            .enumerate()
            .map(|(i, f)| (i + 1, f.into()))
            .collect();
        if candidates.is_empty() {
            return Err(Error::InvalidRequest("candidate query needs candidates".into()));
        }
        let noun = kind.noun();
        Ok(Self {
            kind,
            prefix_question: format!("Which candidate {noun} best matches the {noun} {target}?"),
            target,
            candidates,
        })
    }

    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|(_, f)| f.as_str())
    }
}

impl fmt::Display for CandidateQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.prefix_question)?;
        f.write_str("\n")?;
        for (pos, (index, feature)) in self.candidates.iter().enumerate() {
            if pos > 0 {
                f.write_str(", ")?;
            }
            write!(f, "c_{index}: {feature}")?;
        }
        Ok(())
    }
}

/// Two-line rendering: the selective question, then `c_1: …, c_2: …`.
pub fn render_candidate_query(query: &CandidateQuery) -> String {
    query.to_string()
}

static SELECTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"c_(\d+)").unwrap());

/// Reads the oracle's pick out of `reply`, returning a 1-based index.
///
/// The first `c_<n>` with `n` in range wins. Failing that, the candidate whose
/// feature scores highest against the whole reply is taken (lowest index on ties).
pub fn parse_selection<S: AsRef<str>>(reply: &str, candidates: &[S]) -> Result<usize> {
    if reply.trim().is_empty() {
        return Err(Error::UnparseableSelection);
    }
    if candidates.is_empty() {
        return Err(Error::InvalidRequest("no candidates to select from".into()));
    }
    for cap in SELECTION.captures_iter(reply) {
        if let Ok(n) = cap[1].parse::<usize>() {
            if (1..=candidates.len()).contains(&n) {
                return Ok(n);
            }
        }
    }
    let mut best = (1, f64::NEG_INFINITY);
    for (i, c) in candidates.iter().enumerate() {
        let s = lexical_score(c.as_ref(), reply);
        if s > best.1 {
            best = (i + 1, s);
        }
    }
    Ok(best.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMethod {
    Exact,
    Lexical,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult<T> {
    pub chosen: T,
    /// 1-based position in the candidate list the choice was made from.
    pub chosen_index: usize,
    pub method: MatchMethod,
    pub score: f64,
}

fn ask_oracle(oracle: &dyn Oracle, query: &CandidateQuery) -> Result<usize> {
    let request =
        OracleRequest::new(MATCH_SYSTEM, render_candidate_query(query)).with_max_output_tokens(32);
    let reply = oracle.complete(&request)?;
    let features: Vec<&str> = query.features().collect();
    parse_selection(&reply.text, &features)
}

/// Aligns `target` with an entity of `structure`.
pub fn match_entity(
    target: &EntityId,
    structure: &KnowledgeStructure,
    oracle: &dyn Oracle,
    config: &MatcherConfig,
) -> Result<MatchResult<EntityId>> {
    let catalog = structure.entities();
    if catalog.is_empty() {
        return Err(Error::EntityNotFound(target.display().to_string()));
    }
    if let Ok(pos) = catalog.binary_search(target) {
        return Ok(MatchResult {
            chosen: catalog[pos].clone(),
            chosen_index: pos + 1,
            method: MatchMethod::Exact,
            score: 1.0,
        });
    }

    let mut ranked: Vec<(f64, &EntityId)> = catalog
        .iter()
        .map(|e| (config.score(target.label(), e.label()), e))
        .collect();
    // stable: equal scores keep catalog (label) order
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    ranked.truncate(config.prefilter_top_k.max(1));

    match config.strategy {
        MatchStrategy::Lexical => {
            let (score, best) = ranked[0];
            if score < config.min_lexical_score {
                return Err(Error::EntityNotFound(format!(
                    "{} (best candidate {} scored {score:.3})",
                    target.display(),
                    best.display()
                )));
            }
            Ok(MatchResult {
                chosen: best.clone(),
                chosen_index: 1,
                method: MatchMethod::Lexical,
                score,
            })
        }
        MatchStrategy::Oracle => {
            let query = CandidateQuery::new(
                CandidateKind::Entity,
                target.display(),
                ranked.iter().map(|(_, e)| e.display()),
            )?;
            let index = ask_oracle(oracle, &query)?;
            Ok(MatchResult {
                chosen: ranked[index - 1].1.clone(),
                chosen_index: index,
                method: MatchMethod::Oracle,
                score: 1.0,
            })
        }
    }
}

/// Picks the outgoing relation of `current` that best corresponds to `target`.
/// Every outgoing relation is a candidate; there is no pre-filter.
pub fn select_relation(
    target: &RelationLabel,
    current: &EntityId,
    structure: &KnowledgeStructure,
    oracle: &dyn Oracle,
    config: &MatcherConfig,
) -> Result<MatchResult<RelationLabel>> {
    let relations = structure.relations_of(current);
    if relations.is_empty() {
        return Err(Error::DeadEnd(current.display().to_string()));
    }
    if let Some(pos) = relations.iter().position(|r| *r == target) {
        return Ok(MatchResult {
            chosen: relations[pos].clone(),
            chosen_index: pos + 1,
            method: MatchMethod::Exact,
            score: 1.0,
        });
    }
    match config.strategy {
        MatchStrategy::Lexical => {
            let mut best = (0, f64::NEG_INFINITY);
            for (i, r) in relations.iter().enumerate() {
                let s = config.score(target.label(), r.label());
                if s > best.1 {
                    best = (i, s);
                }
            }
            Ok(MatchResult {
                chosen: relations[best.0].clone(),
                chosen_index: best.0 + 1,
                method: MatchMethod::Lexical,
                score: best.1,
            })
        }
        MatchStrategy::Oracle => {
            let query = CandidateQuery::new(
                CandidateKind::Relation,
                target.display(),
                relations.iter().map(|r| r.display()),
            )?;
            let index = ask_oracle(oracle, &query)?;
            Ok(MatchResult {
                chosen: relations[index - 1].clone(),
                chosen_index: index,
                method: MatchMethod::Oracle,
                score: 1.0,
            })
        }
    }
}
