//! Seeded generators: functional structures, walks, edited multi-hop cases,
//! distractor edits, and a scripted oracle that answers them faithfully.
//!
//! Entity names are pronounceable nonsense drawn without replacement from one
//! [`NameGen`], so everything produced through the same generator lives in a
//! disjoint namespace.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{chain_prompt_key, extraction_prompt_key, render_chain, ReasoningSkeleton};
use crate::harness::MultiHopCase;
use crate::oracle::{RuleMatcher, ScriptedOracle};
use crate::store::{EditOperation, FactTriple, KnowledgeStructure, ReasoningPath};
use crate::text::normalize_label;

pub const RELATIONS: &[&str] = &[
    "created by",
    "spouse",
    "place of birth",
    "country",
    "capital",
    "head of state",
    "continent",
    "developer",
    "founded by",
    "country of citizenship",
    "employer",
    "educated at",
    "official language",
    "headquarters location",
    "author",
    "chairperson",
];

const ONSETS: &[&str] = &[
    "b", "br", "c", "d", "dr", "f", "g", "gr", "h", "k", "l", "m", "n", "p", "qu", "r", "s", "st",
    "t", "th", "v", "w", "z",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou", "ea"];
const CODAS: &[&str] = &["", "", "n", "r", "l", "s", "th", "x", "m"];

/// Unique-name source; uniqueness is by normalized label.
#[derive(Debug, Default)]
pub struct NameGen {
    used: HashSet<String>,
}

impl NameGen {
    pub fn new() -> Self {
        Self::default()
    }

    fn word<R: Rng + ?Sized>(rng: &mut R) -> String {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(rng).unwrap());
            w.push_str(NUCLEI.choose(rng).unwrap());
        }
        w.push_str(CODAS.choose(rng).unwrap());
        let mut chars = w.chars();
        let first = chars.next().unwrap().to_ascii_uppercase();
        std::iter::once(first).chain(chars).collect()
    }

    /// A two-word name never returned before by this generator.
    pub fn fresh<R: Rng + ?Sized>(&mut self, rng: &mut R) -> String {
        loop {
            let name = format!("{} {}", Self::word(rng), Self::word(rng));
            if self.used.insert(normalize_label(&name)) {
                return name;
            }
        }
    }

    /// Marks `name` as taken.
    pub fn reserve(&mut self, name: &str) {
        self.used.insert(normalize_label(name));
    }
}

/// Every `(subject, relation)` has exactly one object. Between 2 and
/// `max_entities` entities, each with up to `max_relations` distinct relations.
pub fn random_functional_structure<R: Rng + ?Sized>(
    rng: &mut R,
    names: &mut NameGen,
    max_entities: usize,
    max_relations: usize,
) -> KnowledgeStructure {
    let n = rng.random_range(2..=max_entities.max(2));
    let entities: Vec<String> = (0..n).map(|_| names.fresh(rng)).collect();
    let mut triples = Vec::new();
    for s in &entities {
        let k = rng.random_range(0..=max_relations.min(RELATIONS.len()));
        for r in RELATIONS.choose_multiple(rng, k) {
            let o = entities.choose(rng).unwrap();
            triples.push(FactTriple::new(s, r, o).expect("generated labels are non-empty"));
        }
    }
    KnowledgeStructure::build(triples)
}

/// A uniformly stepped walk of exactly `hops` hops, or `None` when no start
/// entity admits one within a bounded number of tries.
pub fn random_walk<R: Rng + ?Sized>(
    structure: &KnowledgeStructure,
    rng: &mut R,
    hops: usize,
) -> Option<ReasoningPath> {
    let starts: Vec<_> = structure
        .entities()
        .iter()
        .filter(|e| !structure.relations_of(e).is_empty())
        .collect();
    for _ in 0..64 {
        let mut current = (*starts.choose(rng)?).clone();
        let mut hops_out = Vec::with_capacity(hops);
        for _ in 0..hops {
            let rels = structure.relations_of(&current);
            let Some(&rel) = rels.choose(rng) else { break };
            let objects = structure.objects_of(&current, rel);
            let next = objects.choose(rng)?.clone();
            hops_out.push(FactTriple::from_parts(current, rel.clone(), next.clone()));
            current = next;
        }
        if hops_out.len() == hops {
            return ReasoningPath::from_hops(hops_out);
        }
    }
    None
}

/// Source entity and relation sequence of a path.
pub fn skeleton_of(path: &ReasoningPath) -> ReasoningSkeleton {
    let source = path.hops()[0].subject.clone();
    ReasoningSkeleton::new(source, path.relations().cloned().collect())
        .expect("non-empty path yields a skeleton")
}

/// Question paraphrases over a chain's source and relations.
pub fn questions_for(source: &str, relations: &[&str]) -> Vec<String> {
    let mut nested = source.to_string();
    for r in relations {
        nested = format!("the {r} of {nested}");
    }
    let steps = relations.join(", then ");
    vec![
        format!("What is {nested}?"),
        format!("Starting from {source} and following {steps}, which entity do you reach?"),
    ]
}

/// One edited `hops`-hop case with one or two rewrites.
///
/// The first rewrite at hop `j` diverts the chain to a fresh entity; every
/// later hop then runs through fresh entities. A second rewrite (at a later
/// hop) replaces a pre-edit fact of the diverted chain, which is added to
/// the original triples so there is something to overwrite.
pub fn synthetic_case<R: Rng + ?Sized>(
    rng: &mut R,
    names: &mut NameGen,
    case_id: impl Into<String>,
    hops: usize,
) -> MultiHopCase {
    assert!(hops >= 1 && hops <= RELATIONS.len());
    let relations: Vec<&str> = RELATIONS.choose_multiple(rng, hops).copied().collect();
    let nodes: Vec<String> = (0..=hops).map(|_| names.fresh(rng)).collect();
    let t = |s: &str, r: &str, o: &str| FactTriple::new(s, r, o).expect("non-empty labels");

    let mut original: Vec<FactTriple> = (0..hops)
        .map(|i| t(&nodes[i], relations[i], &nodes[i + 1]))
        .collect();

    let rewrite_count = if hops >= 2 { rng.random_range(1..=2) } else { 1 };
    let mut positions: Vec<usize> = rand::seq::index::sample(rng, hops, rewrite_count).into_vec();
    positions.sort_unstable();

    let mut edited = Vec::with_capacity(hops);
    let mut rewrites = Vec::new();
    let mut current = nodes[0].clone();
    let mut diverged = false;
    for (i, r) in relations.iter().enumerate() {
        let next = if positions.contains(&i) {
            let old = if diverged {
                let stale = names.fresh(rng);
                original.push(t(&current, r, &stale));
                stale
            } else {
                nodes[i + 1].clone()
            };
            let new = names.fresh(rng);
            rewrites.push(
                EditOperation::replace(&current, r, Some(&old), &new).expect("fresh names differ"),
            );
            diverged = true;
            new
        } else if diverged {
            names.fresh(rng)
        } else {
            nodes[i + 1].clone()
        };
        edited.push(t(&current, r, &next));
        current = next;
    }

    MultiHopCase {
        case_id: case_id.into(),
        questions: questions_for(&nodes[0], &relations),
        gold_new_answer: current,
        answer_aliases: Vec::new(),
        original_triples: original,
        hop_count: edited.len(),
        edited_triples: edited,
        rewrites,
    }
}

/// `counts` lists `(hops, how_many)`; case ids are `syn-<n>` in generation order.
pub fn synthetic_suite(seed: u64, counts: &[(usize, usize)]) -> Vec<MultiHopCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = NameGen::new();
    suite_with(&mut rng, &mut names, counts, "syn")
}

/// Like [`synthetic_suite`] but sharing a caller's generator state.
pub fn suite_with<R: Rng + ?Sized>(
    rng: &mut R,
    names: &mut NameGen,
    counts: &[(usize, usize)],
    id_prefix: &str,
) -> Vec<MultiHopCase> {
    let mut out = Vec::new();
    for &(hops, n) in counts {
        for _ in 0..n {
            let id = format!("{id_prefix}-{}", out.len());
            out.push(synthetic_case(rng, names, id, hops));
        }
    }
    out
}

/// Edits introducing `n` facts about fresh entities; they touch nothing
/// already named by `names`.
pub fn distractor_edits<R: Rng + ?Sized>(
    rng: &mut R,
    names: &mut NameGen,
    n: usize,
) -> Vec<EditOperation> {
    (0..n)
        .map(|_| {
            let s = names.fresh(rng);
            let o = names.fresh(rng);
            let r = RELATIONS.choose(rng).unwrap();
            EditOperation::replace(&s, r, None, &o).expect("fresh names differ")
        })
        .collect()
}

/// Skeleton reply text for a chain: source entity and relations.
pub fn skeleton_reply(chain: &[FactTriple]) -> String {
    let relations: Vec<&str> = chain.iter().map(|t| t.relation.display()).collect();
    format!(
        "entity: {}\nrelations: {}",
        chain[0].subject.display(),
        relations.join(" -> ")
    )
}

/// A well-behaved oracle for `cases`.
///
/// Chain prompts get the case's pre-edit chain (outdated knowledge, as a real
/// model would produce), extraction prompts get the matching skeleton, and
/// baseline prompts get the new answer when every rewrite statement was
/// retrieved, the old answer otherwise. Candidate queries fall back to a
/// reply that names nothing, which resolves lexically.
pub fn faithful_script(cases: &[MultiHopCase]) -> ScriptedOracle {
    let mut oracle = ScriptedOracle::new();
    for case in cases {
        let chain = &case.original_triples[..case.hop_count.min(case.original_triples.len())];
        if chain.is_empty() {
            continue;
        }
        let chain_text = render_chain(chain);
        for q in &case.questions {
            oracle.push_rule(RuleMatcher::EndsWith(chain_prompt_key(q)), chain_text.clone());
        }
        oracle.push_rule(
            RuleMatcher::EndsWith(extraction_prompt_key(chain)),
            skeleton_reply(chain),
        );
    }
    for case in cases {
        let old_answer = case
            .original_triples
            .get(case.hop_count.saturating_sub(1))
            .map(|t| t.object.display().to_string())
            .unwrap_or_default();
        for q in &case.questions {
            let tail = format!("Question: {}\nAnswer:", q.trim());
            let mut needles = vec![tail.clone()];
            needles.extend(
                case.rewrites
                    .iter()
                    .map(|rw| crate::baseline::render_statement(&rw.new_fact())),
            );
            oracle.push_rule(RuleMatcher::AllOf(needles), case.gold_new_answer.clone());
            oracle.push_rule(RuleMatcher::EndsWith(tail), old_answer.clone());
        }
    }
    oracle.with_fallback("none of the candidates")
}

/// Replaces every chain object with fresh text, keeping the source and the
/// relations; the chain stays linked.
pub fn scramble_chain<R: Rng + ?Sized>(
    rng: &mut R,
    names: &mut NameGen,
    chain: &[FactTriple],
) -> Vec<FactTriple> {
    let mut out = Vec::with_capacity(chain.len());
    let mut subject = chain[0].subject.display().to_string();
    for t in chain {
        let object = names.fresh(rng);
        out.push(FactTriple::new(&subject, t.relation.display(), &object).expect("non-empty"));
        subject = object;
    }
    out
}

/// Shuffled copy, for order-independence checks.
pub fn shuffled<T: Clone, R: Rng + ?Sized>(rng: &mut R, items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
