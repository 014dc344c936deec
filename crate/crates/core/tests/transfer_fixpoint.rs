mod common;

use seqcalc::parse_sequent;
use seqcalc::staged::StagedTree;
use seqcalc::transfer::TransferTree;

fn truncation(text: &str, stages: usize) -> TransferTree {
    let mut t = StagedTree::new(&parse_sequent(text).unwrap());
    for _ in 0..stages {
        t.advance().unwrap();
    }
    t.audit().unwrap();
    TransferTree::from_staged(&t)
}

#[test]
fn fixtures_reach_a_fixpoint() {
    for (text, stages) in common::TRANSFER_FIXTURES {
        let mut tt = truncation(text, stages);
        tt.audit().unwrap();
        assert!(!tt.find_transferable_pairs(None).is_empty(), "{text}");
        let report = tt.transfer_to_fixpoint(common::TRANSFER_DEPTH, 500).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!(report.steps >= 1);
        assert!(tt.find_transferable_pairs(Some(common::TRANSFER_DEPTH)).is_empty(), "{text}");
    }
}

#[test]
fn propositional_corpus_has_no_pairs() {
    for (text, _) in common::prop_corpus() {
        let tt = truncation(&text, 6);
        assert!(tt.find_transferable_pairs(None).is_empty(), "{text}");
    }
}
