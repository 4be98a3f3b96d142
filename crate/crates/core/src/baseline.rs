//! In-context editing baseline: retrieve edited facts lexically, put them in
//! the prompt, ask once.

use serde::Serialize;

use crate::error::Result;
use crate::matcher::lexical_score;
use crate::oracle::{Oracle, OracleRequest};
use crate::store::FactTriple;

pub const DEFAULT_RETRIEVAL_K: usize = 4;
pub const ANSWER_INSTRUCTION: &str = "Answer with the entity name only.";

const BASELINE_SYSTEM: &str = "You answer questions using the new facts given in the prompt. \
New facts override anything you believe.";

/// New facts plus their rendered statements, index-aligned.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EditMemory {
    facts: Vec<FactTriple>,
    rendered: Vec<String>,
}

/// "subject relation object."
pub fn render_statement(fact: &FactTriple) -> String {
    format!(
        "{} {} {}.",
        fact.subject.display(),
        fact.relation.display(),
        fact.object.display()
    )
}

impl EditMemory {
    pub fn from_facts(facts: impl IntoIterator<Item = FactTriple>) -> Self {
        let facts: Vec<FactTriple> = facts.into_iter().collect();
        let rendered = facts.iter().map(render_statement).collect();
        Self { facts, rendered }
    }

    pub fn facts(&self) -> &[FactTriple] {
        &self.facts
    }

    pub fn rendered(&self) -> &[String] {
        &self.rendered
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

/// Top-`k` statements by lexical score against the question, ties by memory index.
pub fn retrieve_edits<'m>(question: &str, memory: &'m EditMemory, k: usize) -> Vec<&'m str> {
    let mut scored: Vec<(f64, usize)> = memory
        .rendered
        .iter()
        .enumerate()
        .map(|(i, s)| (lexical_score(question, s), i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored
        .into_iter()
        .take(k)
        .map(|(_, i)| memory.rendered[i].as_str())
        .collect()
}

pub fn baseline_prompt(question: &str, memory: &EditMemory, k: usize) -> String {
    let mut prompt = String::new();
    let facts = retrieve_edits(question, memory, k);
    if !facts.is_empty() {
        prompt.push_str("New facts:\n");
        for f in facts {
            prompt.push_str(f);
            prompt.push('\n');
        }
        prompt.push('\n');
    }
    prompt.push_str(ANSWER_INSTRUCTION);
    prompt.push_str("\nQuestion: ");
    prompt.push_str(question.trim());
    prompt.push_str("\nAnswer:");
    prompt
}

/// One oracle call; the reply is returned trimmed.
pub fn baseline_answer(
    question: &str,
    memory: &EditMemory,
    oracle: &dyn Oracle,
    k: usize,
) -> Result<String> {
    let request =
        OracleRequest::new(BASELINE_SYSTEM, baseline_prompt(question, memory, k)).with_max_output_tokens(32);
    Ok(oracle.complete(&request)?.text.trim().to_string())
}
