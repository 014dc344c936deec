mod common;

use seqcalc::kripke::brute_force_countermodel;
use seqcalc::rules::check_derivation;
use seqcalc::search::{decide, SearchMode, Verdict};
use seqcalc::parse_sequent;

#[test]
fn named_corpus_verdicts() {
    for (text, expected) in common::prop_corpus() {
        let expected = expected.unwrap();
        let s = parse_sequent(&text).unwrap();
        match decide(&s, SearchMode::Prop).unwrap() {
            Verdict::Derivable(d) => {
                assert!(expected, "{text} should be underivable");
                check_derivation(&d).unwrap_or_else(|e| panic!("{text}: {e}"));
            }
            Verdict::Underivable(cm) => {
                assert!(!expected, "{text} should be derivable");
                assert!(cm.falsifies(&s).unwrap(), "{text}");
                cm.model.validate().unwrap();
                cm.check_facts().unwrap_or_else(|e| panic!("{text}: {e}"));
            }
            Verdict::Unknown => panic!("{text}"),
        }
    }
}

#[test]
fn random_sequents_self_verify_and_agree_with_oracle() {
    let mut r = common::rng(7);
    for k in 0..300 {
        let s = common::sequent(&mut r, 1 + k % 4, 1 + k % 5);
        let oracle = brute_force_countermodel(&s, 3);
        match decide(&s, SearchMode::Prop).unwrap() {
            Verdict::Derivable(d) => {
                check_derivation(&d).unwrap_or_else(|e| panic!("{s}: {e}"));
                assert!(oracle.is_none(), "{s}: oracle found a countermodel");
            }
            Verdict::Underivable(cm) => {
                assert!(cm.falsifies(&s).unwrap(), "{s}");
                cm.check_facts().unwrap_or_else(|e| panic!("{s}: {e}"));
            }
            Verdict::Unknown => panic!("{s}"),
        }
    }
}
