//! Map the refuting subtree of a search into an arbitrary countermodel.

use seqcalc::kripke::brute_force_countermodel;
use seqcalc::parse_sequent;
use seqcalc::search::{build_search_tree, embed, SearchMode};

fn main() -> seqcalc::Result<()> {
    let s = parse_sequent("|- (p -> q) | (q -> p)")?;
    let m = brute_force_countermodel(&s, 3).expect("a small countermodel exists");
    let tree = build_search_tree(&s, SearchMode::Prop)?;
    let e = embed(&m, m.root, &tree)?;
    for (node, h, atoms) in &e.nodes {
        let atoms: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        println!("node {node:>3} -> w{h}  V_T = {{{}}}", atoms.join(", "));
    }
    for &(i, j) in &e.edges {
        assert!(m.leq(e.nodes[i].1, e.nodes[j].1));
    }
    Ok(())
}
