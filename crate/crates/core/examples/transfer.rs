//! Transfer on a truncation where an instance enters the continued line
//! after a non-invertible arm was split off, so the arm's succedent and a
//! later antecedent share an atom.

use seqcalc::parse_sequent;
use seqcalc::rules::Rule;
use seqcalc::staged::StagedTree;
use seqcalc::transfer::{TNode, TransferTree};

fn show(n: &TNode, depth: usize) {
    println!("{}{:<5} {:<9} {}", "  ".repeat(depth), n.gate.symbol(), n.rule.label(), n.sequent.display_marked());
    for c in &n.children {
        show(c, depth + 1);
    }
}

fn main() -> seqcalc::Result<()> {
    let mut staged = StagedTree::new(&parse_sequent("forall x. P(x) |- q -> P(f(a0))")?);
    for _ in 0..7 {
        staged.advance()?;
    }
    let mut tt = TransferTree::from_staged(&staged);
    let pairs = tt.find_transferable_pairs(None);
    println!("{} transferable pairs; first: rho {:?}, sigma0 {:?}, sigma1 {:?} on {}", pairs.len(), pairs[0].rho, pairs[0].sigma0, pairs[0].sigma1, pairs[0].atom);

    let report = tt.transfer_to_fixpoint(32, 100)?;
    println!("{} steps, axioms made at {:?}", report.steps, report.axioms);
    let mut circ = 0;
    fn count(n: &TNode, k: &mut usize) {
        *k += usize::from(n.rule == Rule::Circ);
        n.children.iter().for_each(|c| count(c, k));
    }
    count(&tt.root, &mut circ);
    println!("{circ} (o) nodes, {} nodes in all", tt.size());
    show(&tt.root, 0);
    Ok(())
}
