use proptest::prelude::*;
use struedit::chain::SKELETON_REPROMPT;
use struedit::{
    parse_chain_text, parse_skeleton_text, render_chain, FactTriple, ReasoningSkeleton,
};

fn part() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 .'-]{0,14}[A-Za-z0-9]"
}

proptest! {
    #[test]
    fn render_parse_round_trip(parts in prop::collection::vec((part(), part(), part()), 1..6)) {
        let steps: Vec<FactTriple> = parts.iter().map(|(s, r, o)| FactTriple::new(s, r, o).unwrap()).collect();
        let parsed = parse_chain_text(&render_chain(&steps)).unwrap();
        prop_assert_eq!(parsed, steps);
    }

    #[test]
    fn chatter_between_lines_is_ignored(parts in prop::collection::vec((part(), part(), part()), 1..5)) {
        let steps: Vec<FactTriple> = parts.iter().map(|(s, r, o)| FactTriple::new(s, r, o).unwrap()).collect();
        let mut noisy = String::from("Let me think step by step.\n");
        for (i, t) in steps.iter().enumerate() {
            noisy.push_str(&format!("{}. {}\nso...\n", i + 1, t));
        }
        prop_assert_eq!(parse_chain_text(&noisy).unwrap(), steps);
    }

    #[test]
    fn skeleton_display_parses_back(source in part(), rels in prop::collection::vec(part(), 1..6)) {
        let rel_refs: Vec<&str> = rels.iter().map(String::as_str).collect();
        let sk = ReasoningSkeleton::from_text(&source, &rel_refs).unwrap();
        prop_assert_eq!(parse_skeleton_text(&sk.to_string()).unwrap(), sk);
    }
}

#[test]
fn reprompt_mentions_both_fields() {
    assert!(SKELETON_REPROMPT.contains("entity:"));
    assert!(SKELETON_REPROMPT.contains("relations:"));
}
