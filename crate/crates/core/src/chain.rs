//! Reasoning chains and skeleton extraction.
//!
//! The oracle is asked to write its reasoning as one `(subject ; relation ; object)`
//! line per hop. From that chain only the first subject and the relation
//! sequence are kept; every other entity is parametric knowledge that may be
//! stale and is dropped.

use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{Oracle, OracleRequest};
use crate::store::{EntityId, FactTriple, RelationLabel};

pub const CHAIN_REPROMPT: &str = "Answer ONLY with lines of the form (subject ; relation ; object).";
pub const SKELETON_REPROMPT: &str = "Answer ONLY with two lines: \
`entity: <starting entity>` and `relations: <relation 1> -> ... -> <relation n>`.";

const CHAIN_TEMPLATE_FILE: &str = "chain_generation.txt";
const EXTRACTION_TEMPLATE_FILE: &str = "extraction.txt";
const DEFAULT_CHAIN_TEMPLATE: &str = include_str!("../fixtures/prompts/chain_generation.txt");
const DEFAULT_EXTRACTION_TEMPLATE: &str = include_str!("../fixtures/prompts/extraction.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractionMode {
    /// Ask the oracle to restate entity and relations (two oracle calls per question).
    Llm,
    /// Project the parsed chain directly, no oracle call.
    Deterministic,
}

/// Parsed chain plus the oracle's raw text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReasoningChain {
    pub steps: Vec<FactTriple>,
    pub raw_text: String,
}

impl ReasoningChain {
    pub fn new(steps: Vec<FactTriple>, raw_text: impl Into<String>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::MalformedChain("chain has no steps".into()));
        }
        Ok(Self {
            steps,
            raw_text: raw_text.into(),
        })
    }

    /// Indices `i` where `steps[i].subject != steps[i-1].object`.
    pub fn linkage_breaks(&self) -> Vec<usize> {
        (1..self.steps.len())
            .filter(|&i| self.steps[i].subject != self.steps[i - 1].object)
            .collect()
    }
}

/// Source entity plus ordered relations; all other chain entities are gone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReasoningSkeleton {
    pub source_entity: EntityId,
    pub relations: Vec<RelationLabel>,
}

impl ReasoningSkeleton {
    pub fn new(source_entity: EntityId, relations: Vec<RelationLabel>) -> Result<Self> {
        if relations.is_empty() {
            return Err(Error::MalformedSkeleton("no relations".into()));
        }
        Ok(Self {
            source_entity,
            relations,
        })
    }

    pub fn from_text(source: &str, relations: &[&str]) -> Result<Self> {
        let source = EntityId::new(source).map_err(|e| Error::MalformedSkeleton(e.to_string()))?;
        let relations = relations
            .iter()
            .map(|r| RelationLabel::new(*r))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::MalformedSkeleton(e.to_string()))?;
        Self::new(source, relations)
    }

    pub fn hop_count(&self) -> usize {
        self.relations.len()
    }
}

impl fmt::Display for ReasoningSkeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entity: {}\nrelations: ", self.source_entity)?;
        for (i, r) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Instructions and in-context demonstrations for both oracle steps.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplateSet {
    pub chain_generation_system: String,
    /// `(question, chain text)`
    pub chain_generation_demos: Vec<(String, String)>,
    pub extraction_system: String,
    /// `(chain text, skeleton text)`
    pub extraction_demos: Vec<(String, String)>,
}

impl Default for PromptTemplateSet {
    fn default() -> Self {
        Self::from_sources(DEFAULT_CHAIN_TEMPLATE, DEFAULT_EXTRACTION_TEMPLATE)
            .expect("bundled templates are well-formed")
    }
}

impl PromptTemplateSet {
    /// Loads `chain_generation.txt` and `extraction.txt` from `dir`.
    ///
    /// Each file holds the system text, then demos separated by `---` lines;
    /// inside a demo a `=>` line separates input from output.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let chain = std::fs::read_to_string(dir.join(CHAIN_TEMPLATE_FILE))?;
        let extraction = std::fs::read_to_string(dir.join(EXTRACTION_TEMPLATE_FILE))?;
        Self::from_sources(&chain, &extraction)
    }

    pub fn from_sources(chain_generation: &str, extraction: &str) -> Result<Self> {
        let (chain_generation_system, chain_generation_demos) =
            parse_template(CHAIN_TEMPLATE_FILE, chain_generation)?;
        let (extraction_system, extraction_demos) =
            parse_template(EXTRACTION_TEMPLATE_FILE, extraction)?;
        Ok(Self {
            chain_generation_system,
            chain_generation_demos,
            extraction_system,
            extraction_demos,
        })
    }

    /// Prompt asking for a reasoning chain.
    pub fn chain_request(&self, question: &str) -> OracleRequest {
        let mut user = String::new();
        for (q, chain) in &self.chain_generation_demos {
            user.push_str(&format!("Question: {q}\nChain:\n{chain}\n\n"));
        }
        user.push_str(&chain_prompt_key(question));
        OracleRequest::new(&self.chain_generation_system, user)
    }

    /// Prompt asking the oracle to restate the skeleton of `chain`.
    pub fn extraction_request(&self, chain: &ReasoningChain) -> OracleRequest {
        let mut user = String::new();
        for (chain_text, skeleton) in &self.extraction_demos {
            user.push_str(&format!("Chain:\n{chain_text}\nSkeleton:\n{skeleton}\n\n"));
        }
        user.push_str(&extraction_prompt_key(&chain.steps));
        OracleRequest::new(&self.extraction_system, user)
    }
}

/// Tail of the chain-generation prompt; unique per question.
pub fn chain_prompt_key(question: &str) -> String {
    format!("Question: {}\nChain:", question.trim())
}

/// Tail of the extraction prompt; unique per chain.
pub fn extraction_prompt_key(steps: &[FactTriple]) -> String {
    format!("Chain:\n{}\nSkeleton:", render_chain(steps))
}

fn parse_template(name: &str, text: &str) -> Result<(String, Vec<(String, String)>)> {
    let bad = |reason: String| Error::MalformedTemplate {
        name: name.to_string(),
        reason,
    };
    let mut sections = vec![Vec::new()];
    for line in text.lines() {
        if line.trim_end() == "---" {
            sections.push(Vec::new());
        } else {
            sections.last_mut().unwrap().push(line);
        }
    }
    let system = sections[0].join("\n").trim().to_string();
    let mut demos = Vec::new();
    for (i, section) in sections[1..].iter().enumerate() {
        let split = section
            .iter()
            .position(|l| l.trim() == "=>")
            .ok_or_else(|| bad(format!("demo {} has no `=>` separator", i + 1)))?;
        let input = section[..split].join("\n").trim().to_string();
        let output = section[split + 1..].join("\n").trim().to_string();
        if input.is_empty() || output.is_empty() {
            return Err(bad(format!("demo {} has an empty side", i + 1)));
        }
        demos.push((input, output));
    }
    if demos.is_empty() {
        return Err(bad("at least one demo is required".into()));
    }
    Ok((system, demos))
}

static CHAIN_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*(?:(?:\d+[.)]|[-*])\s*)?\(\s*([^;()]+?)\s*;\s*([^;()]+?)\s*;\s*([^;]+?)\s*\)\s*$")
        .unwrap()
});

/// Canonical one-triple-per-line rendering.
pub fn render_chain(steps: &[FactTriple]) -> String {
    steps
        .iter()
        .map(|t| format!("({} ; {} ; {})", t.subject, t.relation, t.object))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Keeps every line shaped like `(s ; r ; o)`, in order; everything else is ignored.
pub fn parse_chain_text(raw: &str) -> Result<Vec<FactTriple>> {
    let steps: Vec<FactTriple> = raw
        .lines()
        .filter_map(|line| CHAIN_LINE.captures(line))
        .filter_map(|c| FactTriple::new(&c[1], &c[2], &c[3]).ok())
        .collect();
    if steps.is_empty() {
        return Err(Error::MalformedChain(format!(
            "no `(subject ; relation ; object)` line in {:?}",
            truncate(raw, 120)
        )));
    }
    Ok(steps)
}

fn truncate(s: &str, max: usize) -> String {
    match s.char_indices().nth(max) {
        Some((i, _)) => format!("{}…", &s[..i]),
        None => s.to_string(),
    }
}

/// Asks the oracle for a chain; re-prompts once with a format reminder if
/// the first reply has no parsable line.
pub fn generate_chain(
    question: &str,
    oracle: &dyn Oracle,
    templates: &PromptTemplateSet,
) -> Result<ReasoningChain> {
    if question.trim().is_empty() {
        return Err(Error::InvalidRequest("question is empty".into()));
    }
    let request = templates.chain_request(question);
    let first = oracle.complete(&request)?;
    let (steps, raw) = match parse_chain_text(&first.text) {
        Ok(steps) => (steps, first.text),
        Err(_) => {
            let mut retry = request;
            retry.user_text = format!("{}\n{CHAIN_REPROMPT}", retry.user_text);
            let second = oracle.complete(&retry)?;
            let steps = parse_chain_text(&second.text).map_err(|_| {
                Error::MalformedChain(format!(
                    "two unparseable replies, last: {:?}",
                    truncate(&second.text, 120)
                ))
            })?;
            (steps, second.text)
        }
    };
    let chain = ReasoningChain::new(steps, raw)?;
    let breaks = chain.linkage_breaks();
    if !breaks.is_empty() {
        log::warn!("chain linkage broken at steps {breaks:?} for question {question:?}");
    }
    Ok(chain)
}

/// Reads `entity: <e0>` and `relations: <r1> -> … -> <rh>` lines.
pub fn parse_skeleton_text(raw: &str) -> Result<ReasoningSkeleton> {
    let mut entity = None;
    let mut relations = None;
    for line in raw.lines() {
        let line = line.trim();
        if let Some(rest) = strip_key(line, "entity:") {
            entity.get_or_insert(rest);
        } else if let Some(rest) = strip_key(line, "relations:") {
            relations.get_or_insert(rest);
        }
    }
    let entity = entity.ok_or_else(|| Error::MalformedSkeleton("missing `entity:` line".into()))?;
    let relations =
        relations.ok_or_else(|| Error::MalformedSkeleton("missing `relations:` line".into()))?;
    let source = EntityId::new(entity)
        .map_err(|_| Error::MalformedSkeleton("empty source entity".into()))?;
    let relations = relations
        .split("->")
        .map(|r| {
            RelationLabel::new(r)
                .map_err(|_| Error::MalformedSkeleton(format!("empty relation in {relations:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    ReasoningSkeleton::new(source, relations)
}

fn strip_key<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let head = line.get(..key.len())?;
    head.eq_ignore_ascii_case(key).then(|| line[key.len()..].trim())
}

/// Reduces a chain to its skeleton. Intermediate and terminal entities are
/// discarded in both modes.
pub fn extract_skeleton(
    chain: &ReasoningChain,
    oracle: &dyn Oracle,
    templates: &PromptTemplateSet,
    mode: ExtractionMode,
) -> Result<ReasoningSkeleton> {
    let Some(first) = chain.steps.first() else {
        return Err(Error::MalformedChain("chain has no steps".into()));
    };
    match mode {
        ExtractionMode::Deterministic => ReasoningSkeleton::new(
            first.subject.clone(),
            chain.steps.iter().map(|s| s.relation.clone()).collect(),
        ),
        ExtractionMode::Llm => {
            let request = templates.extraction_request(chain);
            let reply = oracle.complete(&request)?;
            match parse_skeleton_text(&reply.text) {
                Ok(sk) => Ok(sk),
                Err(_) => {
                    let mut retry = request;
                    retry.user_text = format!("{}\n{SKELETON_REPROMPT}", retry.user_text);
                    let reply = oracle.complete(&retry)?;
                    parse_skeleton_text(&reply.text)
                }
            }
        }
    }
}
