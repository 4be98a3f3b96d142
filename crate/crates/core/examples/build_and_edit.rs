//! Build a knowledge structure, apply a counterfactual edit, and walk it.
//!
//!     cargo run --example build_and_edit

use struedit::{EditOperation, KnowledgeStructure, RelationLabel};

fn main() -> struedit::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wwe_velocity.tsv");
    let before = KnowledgeStructure::load_tsv(path)?;
    println!("loaded {before:?}");

    let edit = EditOperation::replace("WWE Velocity", "created by", Some("Vince McMahon"), "Stan Lee")?;
    let after = before.apply_edits(&[edit]);

    let source = after.find_entity("wwe velocity").expect("source is present");
    for (name, ks) in [("before", &before), ("after", &after)] {
        let creator = &ks.objects_of(source, &RelationLabel::new("created by")?)[0];
        let spouse = &ks.objects_of(creator, &RelationLabel::new("spouse")?)[0];
        println!("{name}: created by {creator}, whose spouse is {spouse}");
    }

    // every 2-hop path out of the source, by exhaustive enumeration
    for path in after.brute_force_paths(source, 2) {
        let hops: Vec<String> = path.hops().iter().map(|h| h.to_string()).collect();
        println!("path: {}", hops.join(" "));
    }

    print!("{}", after.to_tsv());
    Ok(())
}
