//! Per-question knowledge: the structure the pipeline walks and the
//! statements the baseline retrieves from.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{HarnessConfig, MemoryMode};
use super::dataset::MultiHopCase;
use crate::baseline::EditMemory;
use crate::store::{EditOperation, FactTriple, KnowledgeStructure};

/// Case indices whose edits are active when answering `focus`, ascending.
pub fn edited_cases(cases: &[MultiHopCase], focus: usize, config: &HarnessConfig) -> Vec<usize> {
    match config.memory_mode {
        MemoryMode::RelevantOnly => vec![focus],
        MemoryMode::Full => (0..cases.len()).collect(),
        MemoryMode::FixedCount(n) => sample_with_focus(cases.len(), focus, n, config.seed),
    }
}

/// `n` distinct indices from `0..len`, always including `focus`. The draw
/// depends only on `(seed, focus, len, n)`.
fn sample_with_focus(len: usize, focus: usize, n: usize, seed: u64) -> Vec<usize> {
    let others = len.saturating_sub(1);
    let take = n.saturating_sub(1).min(others);
    let mixed = seed ^ (focus as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, others, take)
        .into_iter()
        .map(|i| if i >= focus { i + 1 } else { i })
        .collect();
    picked.push(focus);
    picked.sort_unstable();
    picked
}

/// Builds memory from an explicit set of edited cases.
///
/// Full-style memories hold every case's pre-edit chain (when
/// `full_includes_originals`), plus the edited chains of the active cases,
/// with the active cases' rewrites applied last, in case order.
pub fn memory_for(
    cases: &[MultiHopCase],
    active: &[usize],
    config: &HarnessConfig,
) -> (KnowledgeStructure, EditMemory) {
    let rewrites: Vec<EditOperation> = active
        .iter()
        .flat_map(|&i| cases[i].rewrites.iter().cloned())
        .collect();
    let memory = EditMemory::from_facts(rewrites.iter().map(EditOperation::new_fact));
    if config.memory_mode == MemoryMode::RelevantOnly {
        let structure = KnowledgeStructure::build(
            active
                .iter()
                .flat_map(|&i| cases[i].edited_triples.iter().cloned()),
        );
        return (structure, memory);
    }
    let mut triples: Vec<FactTriple> = Vec::new();
    if config.full_includes_originals {
        triples.extend(cases.iter().flat_map(|c| c.original_triples.iter().cloned()));
    }
    triples.extend(
        active
            .iter()
            .flat_map(|&i| cases[i].edited_triples.iter().cloned()),
    );
    let structure = KnowledgeStructure::build(triples).apply_edits(&rewrites);
    (structure, memory)
}

pub fn build_edit_memory(
    cases: &[MultiHopCase],
    focus: usize,
    config: &HarnessConfig,
) -> (KnowledgeStructure, EditMemory) {
    memory_for(cases, &edited_cases(cases, focus, config), config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(id: &str, orig: &[(&str, &str, &str)], edited: &[(&str, &str, &str)], rw: &[(&str, &str, &str, &str)]) -> MultiHopCase {
        let t = |v: &[(&str, &str, &str)]| {
            v.iter()
                .map(|(s, r, o)| FactTriple::new(s, r, o).unwrap())
                .collect::<Vec<_>>()
        };
        let edited_triples = t(edited);
        MultiHopCase {
            case_id: id.into(),
            questions: vec![format!("q{id}")],
            gold_new_answer: edited.last().unwrap().2.into(),
            answer_aliases: vec![],
            original_triples: t(orig),
            hop_count: edited_triples.len(),
            edited_triples,
            rewrites: rw
                .iter()
                .map(|(s, r, o, n)| EditOperation::replace(s, r, Some(o), n).unwrap())
                .collect(),
        }
    }

    fn velocity() -> MultiHopCase {
        case(
            "1",
            &[("WWE Velocity", "created by", "Vince McMahon"), ("Vince McMahon", "spouse", "Linda McMahon")],
            &[("WWE Velocity", "created by", "Stan Lee"), ("Stan Lee", "spouse", "Joan Lee")],
            &[("WWE Velocity", "created by", "Vince McMahon", "Stan Lee")],
        )
    }

    fn disjoint(k: usize) -> MultiHopCase {
        let n = |s: &str| format!("{s}{k}");
        let (a, b, c, d, e) = (n("a"), n("b"), n("c"), n("d"), n("e"));
        case(
            &k.to_string(),
            &[(&a, "r", &b), (&b, "s", &c)],
            &[(&a, "r", &d), (&d, "s", &e)],
            &[(&a, "r", &b, &d)],
        )
    }

    fn cfg(mode: MemoryMode) -> HarnessConfig {
        HarnessConfig {
            memory_mode: mode,
            ..HarnessConfig::default()
        }
    }

    #[test]
    fn relevant_only_is_the_edited_chain() {
        let (s, m) = build_edit_memory(&[velocity()], 0, &cfg(MemoryMode::RelevantOnly));
        assert_eq!(s.len(), 2);
        assert!(s.contains(&FactTriple::new("Stan Lee", "spouse", "Joan Lee").unwrap()));
        assert_eq!(m.rendered(), ["WWE Velocity created by Stan Lee."]);
    }

    #[test]
    fn full_on_disjoint_cases_adds_up() {
        let cases: Vec<_> = (0..3).map(disjoint).collect();
        let (s, m) = build_edit_memory(&cases, 1, &cfg(MemoryMode::Full));
        // per case: originals {a r b, b s c} + edited {a r d, d s e}, the edit drops a r b
        assert_eq!(s.len(), 3 * 3);
        assert_eq!(m.len(), 3);
        for k in 0..3 {
            let (one, _) = build_edit_memory(&cases[k..=k], 0, &cfg(MemoryMode::Full));
            assert!(one.triples().all(|t| s.contains(t)));
        }
    }

    #[test]
    fn full_rewrite_wins_over_originals() {
        let (s, _) = build_edit_memory(&[velocity()], 0, &cfg(MemoryMode::Full));
        let vel = s.find_entity("WWE Velocity").unwrap();
        let rel = crate::store::RelationLabel::new("created by").unwrap();
        assert_eq!(s.objects_of(vel, &rel)[0].display(), "Stan Lee");
    }

    #[test]
    fn fixed_count_one_is_relevant_plus_originals() {
        let cases: Vec<_> = (0..5).map(disjoint).collect();
        let (s, m) = build_edit_memory(&cases, 2, &cfg(MemoryMode::FixedCount(1)));
        assert_eq!(m.len(), 1);
        let (rel, _) = build_edit_memory(&cases, 2, &cfg(MemoryMode::RelevantOnly));
        assert!(rel.triples().all(|t| s.contains(t)));
        let originals: usize = cases.iter().map(|c| c.original_triples.len()).sum();
        assert_eq!(s.len(), originals - 1 + 2);
    }

    #[test]
    fn fixed_count_sampling_is_seeded_and_includes_focus() {
        for focus in 0..10 {
            let a = sample_with_focus(10, focus, 4, 7);
            assert_eq!(a, sample_with_focus(10, focus, 4, 7));
            assert_eq!(a.len(), 4);
            assert!(a.contains(&focus));
            assert!(a.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(sample_with_focus(3, 1, 50, 0), [0, 1, 2]);
    }

    #[test]
    fn relevant_subset_of_full_without_conflicts() {
        let cases: Vec<_> = (0..4).map(disjoint).collect();
        let (full, _) = build_edit_memory(&cases, 0, &cfg(MemoryMode::Full));
        for i in 0..4 {
            let (rel, _) = build_edit_memory(&cases, i, &cfg(MemoryMode::RelevantOnly));
            assert!(rel.triples().all(|t| full.contains(t)));
        }
    }

    #[test]
    fn originals_flag_off() {
        let config = HarnessConfig {
            full_includes_originals: false,
            ..cfg(MemoryMode::Full)
        };
        let cases: Vec<_> = (0..2).map(disjoint).collect();
        let (s, _) = build_edit_memory(&cases, 0, &config);
        assert_eq!(s.len(), 4);
    }
}
