//! Immutable triple store with a subject → relation → objects index.
//!
//! Entities and relations are keyed by their normalized label; the original
//! surface form is kept for display and for candidate features. A structure
//! is never mutated in place: [`KnowledgeStructure::apply_edits`] returns a
//! new value so one base structure can serve many edit memories.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::text::normalize_label;

macro_rules! label_type {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Clone)]
        pub struct $name {
            label: String,
            display: String,
        }

        impl $name {
            /// Fails with [`Error::MalformedTriple`] when the text normalizes to nothing.
            pub fn new(display: impl Into<String>) -> Result<Self> {
                let display = display.into();
                let label = normalize_label(&display);
                if label.is_empty() {
                    return Err(Error::MalformedTriple(format!(
                        "empty {} after normalization: {:?}",
                        $what, display
                    )));
                }
                Ok(Self {
                    label,
                    display: display.trim().to_string(),
                })
            }

            /// Normalized key.
            pub fn label(&self) -> &str {
                &self.label
            }

            /// Surface form as it was supplied.
            pub fn display(&self) -> &str {
                &self.display
            }
        }

        impl PartialEq for $name {
            fn eq(&self, other: &Self) -> bool {
                self.label == other.label
            }
        }

        impl Eq for $name {}

        impl Hash for $name {
            fn hash<H: Hasher>(&self, state: &mut H) {
                self.label.hash(state);
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                self.label.cmp(&other.label)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), self.display)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.display)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.display)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
                let raw = String::deserialize(deserializer)?;
                Self::new(raw).map_err(serde::de::Error::custom)
            }
        }
    };
}

label_type!(
    /// An entity, compared by normalized label.
    EntityId,
    "entity"
);
label_type!(
    /// A relation, compared by normalized label.
    RelationLabel,
    "relation"
);

/// One `(subject, relation, object)` fact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactTriple {
    pub subject: EntityId,
    pub relation: RelationLabel,
    pub object: EntityId,
}

impl FactTriple {
    pub fn new(subject: &str, relation: &str, object: &str) -> Result<Self> {
        Ok(Self {
            subject: EntityId::new(subject)?,
            relation: RelationLabel::new(relation)?,
            object: EntityId::new(object)?,
        })
    }

    pub fn from_parts(subject: EntityId, relation: RelationLabel, object: EntityId) -> Self {
        Self {
            subject,
            relation,
            object,
        }
    }
}

impl fmt::Display for FactTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ; {} ; {})", self.subject, self.relation, self.object)
    }
}

/// Counterfactual edit: `(subject, relation, old) -> (subject, relation, new)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EditOperation {
    pub subject: EntityId,
    pub relation: RelationLabel,
    pub old_object: Option<EntityId>,
    pub new_object: EntityId,
}

impl EditOperation {
    pub fn new(
        subject: EntityId,
        relation: RelationLabel,
        old_object: Option<EntityId>,
        new_object: EntityId,
    ) -> Result<Self> {
        if old_object.as_ref() == Some(&new_object) {
            return Err(Error::MalformedEdit(format!(
                "old and new object are both {new_object}"
            )));
        }
        Ok(Self {
            subject,
            relation,
            old_object,
            new_object,
        })
    }

    /// Convenience constructor from surface strings.
    pub fn replace(subject: &str, relation: &str, old: Option<&str>, new: &str) -> Result<Self> {
        Self::new(
            EntityId::new(subject)?,
            RelationLabel::new(relation)?,
            old.map(EntityId::new).transpose()?,
            EntityId::new(new)?,
        )
    }

    /// The fact that holds once this edit is applied.
    pub fn new_fact(&self) -> FactTriple {
        FactTriple::from_parts(
            self.subject.clone(),
            self.relation.clone(),
            self.new_object.clone(),
        )
    }
}

/// A realized path `(e0, r1, e1), …, (e_{h-1}, r_h, e_h)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ReasoningPath {
    hops: Vec<FactTriple>,
}

impl ReasoningPath {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a path, checking that each hop starts where the previous ended.
    pub fn from_hops(hops: Vec<FactTriple>) -> Option<Self> {
        let linked = hops.windows(2).all(|w| w[1].subject == w[0].object);
        linked.then_some(Self { hops })
    }

    pub fn hops(&self) -> &[FactTriple] {
        &self.hops
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Terminal entity, `None` for the empty path.
    pub fn answer(&self) -> Option<&EntityId> {
        self.hops.last().map(|t| &t.object)
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationLabel> {
        self.hops.iter().map(|t| &t.relation)
    }

    pub(crate) fn push(&mut self, hop: FactTriple) {
        debug_assert!(self.hops.last().is_none_or(|last| last.object == hop.subject));
        self.hops.push(hop);
    }
}

type OutIndex = BTreeMap<EntityId, BTreeMap<RelationLabel, Vec<EntityId>>>;

/// Indexed, immutable set of fact triples.
#[derive(Clone, Default)]
pub struct KnowledgeStructure {
    triples: BTreeSet<FactTriple>,
    out_index: OutIndex,
    entity_catalog: Vec<EntityId>,
}

impl KnowledgeStructure {
    /// Collapses duplicates and builds the indices.
    ///
    /// When one label arrives under several surface forms the
    /// lexicographically smallest form is kept, so the result does not depend
    /// on input order.
    pub fn build(triples: impl IntoIterator<Item = FactTriple>) -> Self {
        let mut entity_display: BTreeMap<String, String> = BTreeMap::new();
        let mut relation_display: BTreeMap<String, String> = BTreeMap::new();
        let raw: Vec<FactTriple> = triples.into_iter().collect();
        for t in &raw {
            keep_min(&mut entity_display, &t.subject.label, &t.subject.display);
            keep_min(&mut relation_display, &t.relation.label, &t.relation.display);
            keep_min(&mut entity_display, &t.object.label, &t.object.display);
        }
        let canon_entity = |e: &EntityId| EntityId {
            label: e.label.clone(),
            display: entity_display[&e.label].clone(),
        };
        let triples: BTreeSet<FactTriple> = raw
            .iter()
            .map(|t| FactTriple {
                subject: canon_entity(&t.subject),
                relation: RelationLabel {
                    label: t.relation.label.clone(),
                    display: relation_display[&t.relation.label].clone(),
                },
                object: canon_entity(&t.object),
            })
            .collect();

        let mut out_index = OutIndex::new();
        // BTreeSet iteration is sorted by (s, r, o), so object lists come out sorted and unique.
        for t in &triples {
            out_index
                .entry(t.subject.clone())
                .or_default()
                .entry(t.relation.clone())
                .or_default()
                .push(t.object.clone());
        }
        let entity_catalog = entity_display
            .into_iter()
            .map(|(label, display)| EntityId { label, display })
            .collect();
        Self {
            triples,
            out_index,
            entity_catalog,
        }
    }

    /// Parses `(subject, relation, object)` strings and builds.
    pub fn from_text_triples<'a>(
        triples: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    ) -> Result<Self> {
        let parsed = triples
            .into_iter()
            .map(|(s, r, o)| FactTriple::new(s, r, o))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(parsed))
    }

    /// Applies edits in order, each replacing every object under its
    /// `(subject, relation)` key with the edit's new object.
    pub fn apply_edits(&self, edits: &[EditOperation]) -> Self {
        if edits.is_empty() {
            return self.clone();
        }
        let mut keyed: BTreeMap<(EntityId, RelationLabel), BTreeSet<EntityId>> = BTreeMap::new();
        for t in &self.triples {
            keyed
                .entry((t.subject.clone(), t.relation.clone()))
                .or_default()
                .insert(t.object.clone());
        }
        for edit in edits {
            keyed.insert(
                (edit.subject.clone(), edit.relation.clone()),
                BTreeSet::from([edit.new_object.clone()]),
            );
        }
        Self::build(keyed.into_iter().flat_map(|((s, r), objects)| {
            objects
                .into_iter()
                .map(move |o| FactTriple::from_parts(s.clone(), r.clone(), o))
        }))
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl ExactSizeIterator<Item = &FactTriple> {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &FactTriple) -> bool {
        self.triples.contains(triple)
    }

    /// Every entity appearing as subject or object, sorted by label.
    pub fn entities(&self) -> &[EntityId] {
        &self.entity_catalog
    }

    /// Looks up the stored entity with the same normalized label.
    pub fn find_entity(&self, label: &str) -> Option<&EntityId> {
        let key = normalize_label(label);
        self.entity_catalog
            .binary_search_by(|e| e.label.as_str().cmp(&key))
            .ok()
            .map(|i| &self.entity_catalog[i])
    }

    /// Distinct outgoing relations of `entity`, sorted by label.
    pub fn relations_of(&self, entity: &EntityId) -> Vec<&RelationLabel> {
        self.out_index
            .get(entity)
            .map(|rels| rels.keys().collect())
            .unwrap_or_default()
    }

    /// Objects under `(entity, relation)`, sorted and unique.
    pub fn objects_of(&self, entity: &EntityId, relation: &RelationLabel) -> &[EntityId] {
        self.out_index
            .get(entity)
            .and_then(|rels| rels.get(relation))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every length-`hops` path from `source`, in lexicographic order of
    /// `(relation, object)` at each hop. Cycles are allowed.
    pub fn brute_force_paths(&self, source: &EntityId, hops: usize) -> Vec<ReasoningPath> {
        let mut out = Vec::new();
        if hops == 0 {
            return out;
        }
        let mut current = ReasoningPath::new();
        self.extend_paths(source, hops, &mut current, &mut out);
        out
    }

    fn extend_paths(
        &self,
        at: &EntityId,
        remaining: usize,
        current: &mut ReasoningPath,
        out: &mut Vec<ReasoningPath>,
    ) {
        let Some(rels) = self.out_index.get(at) else {
            return;
        };
        for (relation, objects) in rels {
            for object in objects {
                current.push(FactTriple::from_parts(
                    at.clone(),
                    relation.clone(),
                    object.clone(),
                ));
                if remaining == 1 {
                    out.push(current.clone());
                } else {
                    self.extend_paths(object, remaining - 1, current, out);
                }
                current.hops.pop();
            }
        }
    }

    /// Serializes as tab-separated lines using display forms.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                t.subject.display, t.relation.display, t.object.display
            ));
        }
        out
    }

    pub fn save_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::build(parse_triple_lines(&text)?))
    }
}

impl PartialEq for KnowledgeStructure {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for KnowledgeStructure {}

impl fmt::Debug for KnowledgeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnowledgeStructure")
            .field("triples", &self.triples.len())
            .field("entities", &self.entity_catalog.len())
            .finish()
    }
}

fn keep_min(map: &mut BTreeMap<String, String>, label: &str, display: &str) {
    match map.get_mut(label) {
        Some(existing) if display < existing.as_str() => *existing = display.to_string(),
        Some(_) => {}
        None => {
            map.insert(label.to_string(), display.to_string());
        }
    }
}

/// Parses `subject<TAB>relation<TAB>object` lines; `#` lines and blank lines are skipped.
pub fn parse_triple_lines(text: &str) -> Result<Vec<FactTriple>> {
    let mut triples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [s, r, o] = fields.as_slice() else {
            return Err(Error::MalformedTriple(format!(
                "line {}: expected 3 tab-separated fields, got {}",
                lineno + 1,
                fields.len()
            )));
        };
        triples.push(FactTriple::new(s, r, o).map_err(|e| match e {
            Error::MalformedTriple(msg) => {
                Error::MalformedTriple(format!("line {}: {msg}", lineno + 1))
            }
            other => other,
        })?);
    }
    Ok(triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn e(s: &str) -> EntityId {
        EntityId::new(s).unwrap()
    }

    fn r(s: &str) -> RelationLabel {
        RelationLabel::new(s).unwrap()
    }

    fn t(s: &str, rel: &str, o: &str) -> FactTriple {
        FactTriple::new(s, rel, o).unwrap()
    }

    fn velocity_chain() -> KnowledgeStructure {
        KnowledgeStructure::build([
            t("WWE Velocity", "created by", "Vince McMahon"),
            t("Vince McMahon", "spouse", "Linda McMahon"),
        ])
    }

    #[test]
    fn empty_build() {
        let ks = KnowledgeStructure::build([]);
        assert_eq!(ks.len(), 0);
        assert!(ks.entities().is_empty());
    }

    #[test]
    fn two_hop_chain_build() {
        let ks = velocity_chain();
        assert_eq!(ks.len(), 2);
        assert_eq!(ks.entities().len(), 3);
        let objs = ks.objects_of(&e("wwe velocity"), &r("created by"));
        assert_eq!(objs.len(), 1);
        assert_eq!(objs[0].label(), "vince mcmahon");
        assert_eq!(objs[0].display(), "Vince McMahon");
    }

    #[test]
    fn malformed_fields_rejected() {
        assert!(matches!(
            FactTriple::new("a", " ; ", "b"),
            Err(Error::MalformedTriple(_))
        ));
        assert!(matches!(
            KnowledgeStructure::from_text_triples([("", "r", "b")]),
            Err(Error::MalformedTriple(_))
        ));
    }

    #[test]
    fn duplicates_collapse_against_set_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut triples = Vec::new();
        let mut seen = std::collections::HashSet::new();
        while triples.len() < 90 {
            let s = format!("e{}", rng.random_range(0..30));
            let rel = format!("r{}", rng.random_range(0..5));
            let o = format!("e{}", rng.random_range(0..30));
            if seen.insert((s.clone(), rel.clone(), o.clone())) {
                triples.push(t(&s, &rel, &o));
            }
        }
        for i in 0..10 {
            let dup = triples[i * 7].clone();
            triples.push(dup);
        }
        triples.shuffle(&mut rng);
        assert_eq!(triples.len(), 100);

        let ks = KnowledgeStructure::build(triples.clone());
        assert_eq!(ks.len(), 90);
        let mut reference_entities = std::collections::HashSet::new();
        for (s, _, o) in &seen {
            reference_entities.insert(s.clone());
            reference_entities.insert(o.clone());
        }
        assert_eq!(ks.entities().len(), reference_entities.len());
    }

    #[test]
    fn mixed_case_surface_forms_share_one_entity() {
        let ks = KnowledgeStructure::build([
            t("wwe velocity", "created by", "Vince McMahon"),
            t("WWE  Velocity", "aired on", "WWE Network"),
        ]);
        assert_eq!(ks.entities().len(), 3);
        assert_eq!(ks.find_entity("WWE VELOCITY").unwrap().display(), "WWE  Velocity");
    }

    #[test]
    fn edit_replaces_object() {
        let ks = velocity_chain();
        let edit = EditOperation::replace("WWE Velocity", "created by", None, "Stan Lee").unwrap();
        let edited = ks.apply_edits(&[edit]);
        assert!(edited.contains(&t("WWE Velocity", "created by", "Stan Lee")));
        assert!(!edited.contains(&t("WWE Velocity", "created by", "Vince McMahon")));
        // input untouched
        assert!(ks.contains(&t("WWE Velocity", "created by", "Vince McMahon")));
        let objs = edited.objects_of(&e("WWE Velocity"), &r("created by"));
        assert_eq!(objs, &[e("Stan Lee")]);
    }

    #[test]
    fn empty_edit_list_is_identity() {
        let ks = velocity_chain();
        assert_eq!(ks.apply_edits(&[]), ks);
    }

    #[test]
    fn later_edit_on_same_key_wins_against_naive_map() {
        let ks = velocity_chain();
        let edits = vec![
            EditOperation::replace("WWE Velocity", "created by", None, "Stan Lee").unwrap(),
            EditOperation::replace("WWE Velocity", "created by", Some("Stan Lee"), "Jack Kirby")
                .unwrap(),
        ];
        let mut naive: HashMap<(String, String), String> = HashMap::new();
        naive.insert(("wwe velocity".into(), "created by".into()), "vince mcmahon".into());
        for ed in &edits {
            naive.insert(
                (ed.subject.label().into(), ed.relation.label().into()),
                ed.new_object.label().into(),
            );
        }
        let edited = ks.apply_edits(&edits);
        let objs = edited.objects_of(&e("WWE Velocity"), &r("created by"));
        assert_eq!(objs.len(), 1);
        assert_eq!(
            objs[0].label(),
            naive[&("wwe velocity".to_string(), "created by".to_string())]
        );
    }

    #[test]
    fn edit_with_equal_old_and_new_rejected() {
        assert!(matches!(
            EditOperation::replace("a", "r", Some("B"), "b"),
            Err(Error::MalformedEdit(_))
        ));
    }

    #[test]
    fn relations_sorted_and_unknown_empty() {
        let ks = velocity_chain();
        let rels = ks.relations_of(&e("Vince McMahon"));
        assert_eq!(rels, vec![&r("spouse")]);
        assert!(ks.relations_of(&e("nobody")).is_empty());

        let mut names = vec!["place of birth", "employer", "citizenship"];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        names.shuffle(&mut rng);
        let ks = KnowledgeStructure::build(names.iter().map(|n| t("X", n, "Y")));
        let got: Vec<&str> = ks.relations_of(&e("X")).iter().map(|r| r.label()).collect();
        let mut reference = names.clone();
        reference.sort();
        assert_eq!(got, reference);
    }

    #[test]
    fn objects_of_absent_and_fanout() {
        let ks = KnowledgeStructure::build([t("a", "child", "Zed"), t("a", "child", "Bob")]);
        assert!(ks.objects_of(&e("a"), &r("parent")).is_empty());
        assert!(ks.objects_of(&e("q"), &r("child")).is_empty());
        let objs: Vec<&str> = ks
            .objects_of(&e("a"), &r("child"))
            .iter()
            .map(|o| o.label())
            .collect();
        assert_eq!(objs, vec!["bob", "zed"]);
    }

    #[test]
    fn brute_force_on_edited_chain() {
        let ks = KnowledgeStructure::build([
            t("WWE Velocity", "created by", "Vince McMahon"),
            t("Vince McMahon", "spouse", "Linda McMahon"),
            t("Stan Lee", "spouse", "Joan Lee"),
        ])
        .apply_edits(&[EditOperation::replace(
            "WWE Velocity",
            "created by",
            Some("Vince McMahon"),
            "Stan Lee",
        )
        .unwrap()]);
        let paths = ks.brute_force_paths(&e("WWE Velocity"), 2);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].answer().unwrap().display(), "Joan Lee");
        assert!(ks.brute_force_paths(&e("absent"), 2).is_empty());
    }

    fn reference_count(adj: &HashMap<String, Vec<String>>, at: &str, hops: usize) -> usize {
        if hops == 0 {
            return 1;
        }
        adj.get(at)
            .map(|next| next.iter().map(|o| reference_count(adj, o, hops - 1)).sum())
            .unwrap_or(0)
    }

    #[test]
    fn brute_force_count_matches_recursive_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut raw = std::collections::BTreeSet::new();
            while raw.len() < 20 {
                raw.insert((
                    format!("n{}", rng.random_range(0..8)),
                    format!("r{}", rng.random_range(0..3)),
                    format!("n{}", rng.random_range(0..8)),
                ));
            }
            let mut adj: HashMap<String, Vec<String>> = HashMap::new();
            for (s, _, o) in &raw {
                adj.entry(s.clone()).or_default().push(o.clone());
            }
            let ks = KnowledgeStructure::build(raw.iter().map(|(s, rel, o)| t(s, rel, o)));
            for source in 0..8 {
                let src = format!("n{source}");
                let paths = ks.brute_force_paths(&e(&src), 3);
                assert_eq!(paths.len(), reference_count(&adj, &src, 3));
                let keys: Vec<Vec<(String, String)>> = paths
                    .iter()
                    .map(|p| {
                        p.hops()
                            .iter()
                            .map(|h| (h.relation.label().to_string(), h.object.label().to_string()))
                            .collect()
                    })
                    .collect();
                let mut sorted = keys.clone();
                sorted.sort();
                assert_eq!(keys, sorted, "paths must come out in lexicographic order");
            }
        }
    }

    #[test]
    fn path_linkage_checked() {
        assert!(ReasoningPath::from_hops(vec![t("a", "r", "b"), t("b", "r", "c")]).is_some());
        assert!(ReasoningPath::from_hops(vec![t("a", "r", "b"), t("x", "r", "c")]).is_none());
    }

    #[test]
    fn tsv_round_trip_and_comments() {
        let text = "# header\nWWE Velocity\tcreated by\tVince McMahon\n\nVince McMahon\tspouse\tLinda McMahon\n";
        let triples = parse_triple_lines(text).unwrap();
        assert_eq!(triples.len(), 2);
        let ks = KnowledgeStructure::build(triples);
        let back = KnowledgeStructure::build(parse_triple_lines(&ks.to_tsv()).unwrap());
        assert_eq!(back, ks);
    }

    #[test]
    fn tsv_wrong_arity_reports_line() {
        let err = parse_triple_lines("a\tb\tc\nonly\ttwo\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
