mod common;

use seqcalc::parse_sequent;
use seqcalc::rules::{audit_eigenvariables, check_derivation};
use seqcalc::search::{decide, decide_with, SearchLimits, SearchMode, Verdict};

#[test]
fn named_positive_corpus() {
    let corpus = common::positive_corpus();
    assert!(corpus.len() >= 50);
    for (text, expected) in corpus {
        let s = parse_sequent(&text).unwrap();
        assert!(s.is_positive(), "{text}");
        let v = decide(&s, SearchMode::Positive).unwrap_or_else(|e| panic!("{text}: {e}"));
        match v {
            Verdict::Derivable(d) => {
                check_derivation(&d).unwrap_or_else(|e| panic!("{text}: {e}"));
                audit_eigenvariables(&d).unwrap_or_else(|e| panic!("{text}: {e}"));
                assert_ne!(expected, Some(false), "{text}");
            }
            Verdict::Underivable(cm) => {
                cm.model.validate().unwrap_or_else(|e| panic!("{text}: {e}"));
                assert!(cm.falsifies(&s).unwrap(), "{text}: model does not falsify");
                assert_ne!(expected, Some(true), "{text}");
            }
            Verdict::Unknown => panic!("{text}"),
        }
    }
}

#[test]
fn sequents_without_finite_countermodels_exhaust_the_budget() {
    for (text, _) in common::positive_hard_corpus() {
        let s = parse_sequent(&text).unwrap();
        assert!(s.is_positive());
        let v = decide_with(&s, SearchMode::Positive, SearchLimits { max_steps: 3_000 }).unwrap();
        assert!(matches!(v, Verdict::Unknown), "{text}: {}", v.name());
    }
}

#[test]
fn non_positive_sequents_are_rejected() {
    for text in ["forall x. P(x) |- P(a0)", "forall x. forall y. R(x, y) |- forall y. forall x. R(x, y)", "|- exists x. P(x)"] {
        let err = decide(&parse_sequent(text).unwrap(), SearchMode::Positive).unwrap_err();
        assert!(err.to_string().contains("positive"), "{text}: {err}");
    }
}

#[test]
fn random_positive_sequents_self_verify() {
    let mut r = common::rng(11);
    for k in 0..100 {
        let s = common::positive_sequent(&mut r, 2 + k % 4);
        match decide_with(&s, SearchMode::Positive, SearchLimits { max_steps: 3_000 }).unwrap() {
            Verdict::Derivable(d) => {
                check_derivation(&d).unwrap_or_else(|e| panic!("{s}: {e}"));
                audit_eigenvariables(&d).unwrap_or_else(|e| panic!("{s}: {e}"));
            }
            Verdict::Underivable(cm) => {
                cm.model.validate().unwrap_or_else(|e| panic!("{s}: {e}"));
                cm.check_facts().unwrap_or_else(|e| panic!("{s}: {e}"));
                assert!(cm.falsifies(&s).unwrap(), "{s}");
            }
            Verdict::Unknown => {}
        }
    }
}
