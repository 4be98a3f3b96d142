//! MQuAKE-format ingestion.
//!
//! Fields read from each case of the released files:
//!
//! ```text
//! case_id                      number or string
//! questions                    [string]
//! new_answer, new_answer_alias string, [string]
//! orig.triples_labeled         [[s, r, o]]   pre-edit chain
//! orig.new_triples_labeled     [[s, r, o]]   post-edit chain
//! requested_rewrite            [{subject, target_new.str, target_true.str}]
//! ```
//!
//! Everything else is ignored. Wrong JSON types are a [`Error::SchemaMismatch`]
//! naming the field path; missing content that makes a case unusable skips
//! the case and records why.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::store::{EditOperation, FactTriple};
use crate::text::normalize_label;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiHopCase {
    pub case_id: String,
    pub questions: Vec<String>,
    pub gold_new_answer: String,
    pub answer_aliases: Vec<String>,
    pub original_triples: Vec<FactTriple>,
    pub edited_triples: Vec<FactTriple>,
    pub rewrites: Vec<EditOperation>,
    pub hop_count: usize,
}

impl MultiHopCase {
    /// Checks the case invariants, returning the first violation.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.questions.is_empty() {
            return Err("no questions".into());
        }
        if self.edited_triples.is_empty() {
            return Err("no edited triples".into());
        }
        if self.hop_count != self.edited_triples.len() {
            return Err(format!(
                "hop_count {} differs from {} edited triples",
                self.hop_count,
                self.edited_triples.len()
            ));
        }
        if normalize_label(&self.gold_new_answer).is_empty() {
            return Err("empty gold answer".into());
        }
        for rw in &self.rewrites {
            let known = self
                .original_triples
                .iter()
                .chain(&self.edited_triples)
                .any(|t| t.subject == rw.subject);
            if !known {
                return Err(format!("rewrite subject {} is not in any triple", rw.subject));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedCase {
    /// Position in the file's top-level array.
    pub index: usize,
    pub case_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadedDataset {
    pub cases: Vec<MultiHopCase>,
    pub skipped: Vec<SkippedCase>,
}

pub fn load_mquake(path: impl AsRef<Path>) -> Result<LoadedDataset> {
    let path = path.as_ref();
    let unreadable = |reason: String| Error::DatasetUnreadable {
        path: path.to_path_buf(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| unreadable(e.to_string()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| unreadable(e.to_string()))?;
    parse_mquake_value(&value)
}

pub fn parse_mquake(text: &str) -> Result<LoadedDataset> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::DatasetUnreadable {
        path: "<memory>".into(),
        reason: e.to_string(),
    })?;
    parse_mquake_value(&value)
}

fn mismatch(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::SchemaMismatch {
        field: field.into(),
        reason: reason.into(),
    }
}

pub fn parse_mquake_value(value: &Value) -> Result<LoadedDataset> {
    let items = value
        .as_array()
        .ok_or_else(|| mismatch("$", "top level must be an array of cases"))?;
    let mut out = LoadedDataset::default();
    for (index, item) in items.iter().enumerate() {
        let at = format!("[{index}]");
        match parse_case(item, &at)? {
            Ok(case) => out.cases.push(case),
            Err((case_id, reason)) => {
                log::warn!("skipping case {at} ({case_id:?}): {reason}");
                out.skipped.push(SkippedCase {
                    index,
                    case_id,
                    reason,
                });
            }
        }
    }
    Ok(out)
}

type Skip = (Option<String>, String);

fn optional<'v>(obj: &'v Value, key: &str) -> Option<&'v Value> {
    obj.get(key).filter(|v| !v.is_null())
}

fn string_at(v: &Value, path: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| mismatch(path, "expected a string"))
}

fn strings_at(v: &Value, path: &str) -> Result<Vec<String>> {
    let arr = v.as_array().ok_or_else(|| mismatch(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, s)| string_at(s, &format!("{path}[{i}]")))
        .collect()
}

/// Labeled triples as `[[s, r, o], ...]`; `None` inside means an unusable label.
fn triples_at(v: &Value, path: &str) -> Result<std::result::Result<Vec<FactTriple>, String>> {
    let arr = v.as_array().ok_or_else(|| mismatch(path, "expected an array"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, t) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let parts = strings_at(t, &p)?;
        if parts.len() != 3 {
            return Err(mismatch(p, format!("expected 3 labels, found {}", parts.len())));
        }
        match FactTriple::new(&parts[0], &parts[1], &parts[2]) {
            Ok(triple) => out.push(triple),
            Err(e) => return Ok(Err(format!("{p}: {e}"))),
        }
    }
    Ok(Ok(out))
}

fn parse_case(item: &Value, at: &str) -> Result<std::result::Result<MultiHopCase, Skip>> {
    if !item.is_object() {
        return Err(mismatch(at, "expected an object"));
    }
    let case_id = match optional(item, "case_id") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        Some(_) => return Err(mismatch(format!("{at}.case_id"), "expected a number or string")),
    };
    let skip = |reason: String| Ok(Err((case_id.clone(), reason)));
    let Some(case_id_text) = case_id.clone() else {
        return skip("missing case_id".into());
    };

    let questions = match optional(item, "questions") {
        Some(v) => strings_at(v, &format!("{at}.questions"))?,
        None => return skip("missing questions".into()),
    };
    let questions: Vec<String> = questions
        .into_iter()
        .map(|q| q.trim().to_string())
        .filter(|q| !q.is_empty())
        .collect();
    let gold = match optional(item, "new_answer") {
        Some(v) => string_at(v, &format!("{at}.new_answer"))?,
        None => return skip("missing new_answer".into()),
    };
    let aliases = match optional(item, "new_answer_alias") {
        Some(v) => strings_at(v, &format!("{at}.new_answer_alias"))?,
        None => Vec::new(),
    };

    let Some(orig) = optional(item, "orig") else {
        return skip("missing orig".into());
    };
    if !orig.is_object() {
        return Err(mismatch(format!("{at}.orig"), "expected an object"));
    }
    let original_triples = match optional(orig, "triples_labeled") {
        Some(v) => match triples_at(v, &format!("{at}.orig.triples_labeled"))? {
            Ok(t) => t,
            Err(reason) => return skip(reason),
        },
        None => Vec::new(),
    };
    let edited_triples = match optional(orig, "new_triples_labeled") {
        Some(v) => match triples_at(v, &format!("{at}.orig.new_triples_labeled"))? {
            Ok(t) => t,
            Err(reason) => return skip(reason),
        },
        None => return skip("missing edited triples (orig.new_triples_labeled)".into()),
    };

    let mut rewrites = Vec::new();
    if let Some(v) = optional(item, "requested_rewrite") {
        let path = format!("{at}.requested_rewrite");
        let arr = v.as_array().ok_or_else(|| mismatch(&path, "expected an array"))?;
        for (i, rw) in arr.iter().enumerate() {
            let p = format!("{path}[{i}]");
            let field = |key: &str| -> Result<String> {
                let v = optional(rw, key).ok_or_else(|| mismatch(format!("{p}.{key}"), "missing"))?;
                string_at(v, &format!("{p}.{key}"))
            };
            let target = |key: &str| -> Result<String> {
                let v = optional(rw, key).ok_or_else(|| mismatch(format!("{p}.{key}"), "missing"))?;
                let s = optional(v, "str")
                    .ok_or_else(|| mismatch(format!("{p}.{key}.str"), "missing"))?;
                string_at(s, &format!("{p}.{key}.str"))
            };
            let subject = field("subject")?;
            let new = target("target_new")?;
            let old = target("target_true")?;
            match resolve_rewrite(&subject, &old, &new, &original_triples, &edited_triples) {
                Ok(op) => rewrites.push(op),
                Err(reason) => return skip(format!("{p}: {reason}")),
            }
        }
    }

    let hop_count = edited_triples.len();
    let case = MultiHopCase {
        case_id: case_id_text,
        questions,
        gold_new_answer: gold,
        answer_aliases: aliases,
        original_triples,
        edited_triples,
        rewrites,
        hop_count,
    };
    match case.check() {
        Ok(()) => Ok(Ok(case)),
        Err(reason) => skip(reason),
    }
}

/// The released rewrites carry a relation template and id, not a label; the
/// label is recovered from the chain holding the new (or, failing that, the
/// old) fact.
fn resolve_rewrite(
    subject: &str,
    old: &str,
    new: &str,
    original: &[FactTriple],
    edited: &[FactTriple],
) -> std::result::Result<EditOperation, String> {
    let s = normalize_label(subject);
    let find = |chain: &[FactTriple], object: &str| {
        let o = normalize_label(object);
        chain
            .iter()
            .find(|t| t.subject.label() == s && t.object.label() == o)
            .map(|t| t.relation.display().to_string())
    };
    let relation = find(edited, new)
        .or_else(|| find(original, old))
        .ok_or_else(|| format!("no triple links {subject} to {new} or {old}"))?;
    EditOperation::replace(subject, &relation, Some(old), new).map_err(|e| e.to_string())
}
