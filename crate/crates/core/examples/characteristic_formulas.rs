//! The ⊕ merge of formulas and characteristic formulas of selected
//! subtrees of a staged truncation.

use seqcalc::characteristic::{chi_tree, oplus, select_tree};
use seqcalc::staged::StagedTree;
use seqcalc::{parse_formula, parse_sequent, Formula};

fn main() -> seqcalc::Result<()> {
    for (a, b) in [("p -> q", "r"), ("forall x. (P(x) -> Q(x))", "exists x. R(x)"), ("p & q", "r")] {
        let (a, b) = (parse_formula(a)?, parse_formula(b)?);
        println!("oplus({a}, {b}) = {}", oplus(&a, &b));
    }
    println!("oplus(p -> q, bot) = {}", oplus(&parse_formula("p -> q")?, &Formula::Bot));

    let mut tree = StagedTree::new(&parse_sequent("exists y. P(y) |- forall x. P(x)")?);
    for _ in 0..3 {
        tree.advance()?;
    }
    if let Some(t) = select_tree(&tree) {
        println!("selected {} of {} nodes, chi = {}", t.len(), tree.len(), chi_tree(&tree, &t)?);
    }
    Ok(())
}
