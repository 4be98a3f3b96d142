//! Candidate queries: rendering, parsing replies, and lexical fallback.
//!
//!     cargo run --example candidate_query

use struedit::{lexical_score, parse_selection, CandidateKind, CandidateQuery};

fn main() -> struedit::Result<()> {
    let candidates = ["Stan Lee", "Stan Lee Media", "Joan Lee", "Vince McMahon"];
    let query = CandidateQuery::new(CandidateKind::Entity, "stan lee (comics)", candidates)?;
    println!("{query}\n");

    for reply in ["c_3", "The answer is c_1.", "c_9", "probably stan lee media"] {
        let picked = parse_selection(reply, &candidates)?;
        println!("{reply:>28} -> c_{picked} ({})", candidates[picked - 1]);
    }

    println!();
    for c in candidates {
        println!("{:.3}  {c}", lexical_score("stan lee (comics)", c));
    }

    let relations = CandidateQuery::new(CandidateKind::Relation, "married to", ["spouse", "child"])?;
    println!("\n{relations}");
    Ok(())
}
