//! Run a corpus file in parallel with self-verification, the way the
//! `seqcalc corpus` command does.
//!
//! cargo run --example corpus_run -- crates/core/corpus/prop.txt

use seqcalc::driver::{parse_corpus, run_corpus, RunConfig};

fn main() -> seqcalc::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/prop.txt").to_string());
    let lines = parse_corpus(&std::fs::read_to_string(path)?)?;
    let results = run_corpus(&lines, &RunConfig::default(), true);
    let ok = results.iter().filter(|r| r.ok()).count();
    for r in results.iter().filter(|r| !r.ok()) {
        println!("line {}: {}", r.line, r.text);
    }
    println!("{ok}/{} lines match and verify", results.len());
    Ok(())
}
