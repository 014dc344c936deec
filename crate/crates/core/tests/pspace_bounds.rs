mod common;

use seqcalc::parse_sequent;
use seqcalc::pspace::decide_low_memory_with;
use seqcalc::search::{build_search_tree_with, evaluate_gates, SearchLimits, SearchMode};
use seqcalc::{Error, Sequent};

// Both deciders, with budgets small enough for sequents the positive search
// cannot finish. `None` when both give up.
fn compare(s: &Sequent, mode: SearchMode) -> Option<bool> {
    let (steps, visits) = match mode {
        SearchMode::Prop => (2_000_000, 5_000_000),
        SearchMode::Positive => (3_000, 1_000),
    };
    let tree = build_search_tree_with(s, mode, SearchLimits { max_steps: steps });
    let low = decide_low_memory_with(s, mode, visits);
    match (tree, low) {
        (Ok(mut t), Ok((v, stats))) => {
            assert_eq!(evaluate_gates(&mut t), Some(v), "{s}: verdicts differ");
            assert!(stats.within_bounds(s.size(), mode), "{s}: {stats:?} exceeds the committed bound");
            Some(v == 1)
        }
        (Err(Error::Limit(_)), Err(Error::Limit(_))) => None,
        (a, b) => panic!("{s}: tree {:?}, traversal {:?}", a.map(|t| t.value()), b.map(|r| r.0)),
    }
}

#[test]
fn named_corpora_agree_within_bounds() {
    for (text, _) in common::prop_corpus() {
        assert!(compare(&parse_sequent(&text).unwrap(), SearchMode::Prop).is_some(), "{text}");
    }
    for (text, _) in common::positive_corpus() {
        compare(&parse_sequent(&text).unwrap(), SearchMode::Positive);
    }
}

#[test]
fn random_prop_sequents_agree_within_bounds() {
    let mut r = common::rng(8);
    for k in 0..200 {
        let s = common::sequent(&mut r, 1 + k % 4, 1 + k % 5);
        assert!(compare(&s, SearchMode::Prop).is_some(), "{s}");
    }
}

#[test]
fn random_positive_sequents_agree_within_bounds() {
    let mut r = common::rng(12);
    for k in 0..100 {
        let s = common::positive_sequent(&mut r, 2 + k % 4);
        compare(&s, SearchMode::Positive);
    }
}
