mod common;

use seqcalc::characteristic::oplus;
use seqcalc::rules::check_derivation;
use seqcalc::search::Verdict;
use seqcalc::staged::search_staged;
use seqcalc::{parse_formula, Formula, Sequent};

fn proves(goal: Formula) -> bool {
    let s = Sequent::marked([], [goal]);
    match search_staged(&s, common::OPLUS_DEPTH).unwrap() {
        Verdict::Derivable(d) => check_derivation(&d).is_ok(),
        _ => false,
    }
}

#[test]
fn disjunction_implies_oplus() {
    for (a, b) in common::OPLUS_PAIRS {
        let (a, b) = (parse_formula(a).unwrap(), parse_formula(b).unwrap());
        let g = Formula::implies(Formula::or(a.clone(), b.clone()), oplus(&a, &b));
        assert!(proves(g.clone()), "{g}");
    }
}

#[test]
fn oplus_with_bottom_is_equivalent() {
    for (a, _) in common::OPLUS_PAIRS {
        let a = parse_formula(a).unwrap();
        let o = oplus(&a, &Formula::Bot);
        assert!(proves(Formula::implies(o.clone(), a.clone())), "{o} -> {a}");
        assert!(proves(Formula::implies(a.clone(), o.clone())), "{a} -> {o}");
    }
}
