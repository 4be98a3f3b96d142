//! Regenerate the scripted oracle that answers the bundled MQuAKE sample.
//!
//!     cargo run --example write_scripted_fixture [dataset.json] [script.json]

use struedit::harness::load_mquake;
use struedit::synthetic::faithful_script;

fn main() -> struedit::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let mut args = std::env::args().skip(1);
    let dataset = args.next().unwrap_or_else(|| format!("{dir}/mquake_sample.json"));
    let out = args.next().unwrap_or_else(|| format!("{dir}/mquake_sample.script.json"));

    let data = load_mquake(&dataset)?;
    let script = faithful_script(&data.cases).with_simulated_latency(std::time::Duration::from_millis(400));
    script.save(&out)?;
    println!("{} rules for {} cases -> {out}", script.rules().len(), data.cases.len());
    Ok(())
}
