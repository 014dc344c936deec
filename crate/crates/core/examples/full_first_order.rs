//! Bounded staged search in full first-order LJm.
//!
//! Each stage alternates between analyzing the leaves of the truncation and
//! branching over their non-invertible formulas. A sequent is refuted only
//! when a closed subtree yields a countermodel that passes every check, so
//! hard non-theorems stay unknown.
//!
//! cargo run --example full_first_order -- 12 "|- ~~(forall x. (P(x) | ~P(x)))"

use seqcalc::parse_sequent;
use seqcalc::search::Verdict;
use seqcalc::staged::{search_staged_with_tree, DEFAULT_MAX_NODES};

fn main() -> seqcalc::Result<()> {
    let mut args = std::env::args().skip(1);
    let depth = args.next().and_then(|d| d.parse().ok()).unwrap_or(10);
    let inputs: Vec<String> = args.collect();
    let inputs = if inputs.is_empty() {
        ["forall x. P(x) |- exists y. P(y)", "exists y. P(y) |- forall x. P(x)", "|- ~~(forall x. (P(x) | ~P(x)))"].map(String::from).to_vec()
    } else {
        inputs
    };
    for text in inputs {
        let s = parse_sequent(&text)?;
        let (v, tree) = search_staged_with_tree(&s, depth, DEFAULT_MAX_NODES)?;
        println!("{:<12} stage {:>2}, {:>5} nodes  {text}", v.name(), tree.stage, tree.len());
        if let Verdict::Underivable(cm) = v {
            for (w, world) in cm.model.worlds.iter().enumerate() {
                let atoms: Vec<String> = world.atoms.iter().map(|a| a.to_string()).collect();
                println!("    w{w} D={:?} {{{}}} sees {:?}", world.vars, atoms.join(", "), cm.model.above(w));
            }
        }
    }
    Ok(())
}
