mod common;

use seqcalc::driver::{run_corpus, Expectation, ModeChoice, RunConfig};
use seqcalc::rules::{audit_eigenvariables, check_derivation};
use seqcalc::search::Verdict;

#[test]
fn bundled_full_corpus_at_depth_ten() {
    let lines = common::full_corpus();
    let count = |e| lines.iter().filter(|l| l.expected == Some(e)).count();
    assert!(count(Expectation::Derivable) >= 15);
    assert!(count(Expectation::Underivable) >= 10);
    assert!(count(Expectation::Hard) >= 5);
    let cfg = RunConfig { mode: ModeChoice::Full, depth: Some(10), ..RunConfig::default() };
    for r in run_corpus(&lines, &cfg, false) {
        assert!(r.matches_expectation(), "line {}: {}", r.line, r.text);
        r.verified.as_ref().unwrap_or_else(|e| panic!("line {}: {e}", r.line));
        let o = r.outcome.unwrap();
        match &o.verdict {
            Verdict::Derivable(d) => {
                check_derivation(d).unwrap();
                audit_eigenvariables(d).unwrap();
            }
            Verdict::Underivable(c) => assert!(c.falsifies(&o.sequent).unwrap(), "line {}", r.line),
            Verdict::Unknown => {}
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_thread_count() {
    let lines = common::full_corpus();
    let cfg = RunConfig { mode: ModeChoice::Full, depth: Some(6), ..RunConfig::default() };
    let names = |rs: Vec<seqcalc::driver::CorpusResult>| rs.into_iter().map(|r| r.outcome.map(|o| o.verdict.name())).collect::<Vec<_>>();
    let parallel = names(run_corpus(&lines, &cfg, false));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| names(run_corpus(&lines, &cfg, false)));
    assert_eq!(parallel, serial);
}
