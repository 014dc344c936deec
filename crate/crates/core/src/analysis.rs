//! Saturation, the invertible deduction `Tr_S`, and the branching rule.
//!
//! Inversions keep the principal formula, unmarked. When the saturation
//! condition of a marked formula already holds, its mark is erased without an
//! inference: the rule instance would only reproduce its lower sequent. This
//! keeps sequents that re-enter analysis after (br) from growing identical
//! copies of themselves.

use std::collections::BTreeSet;

use crate::rules::{Deduction, Rule};
use crate::sequent::{Cedent, Sequent};
use crate::syntax::{Connective, Formula, Term};

/// Which calculus drives the analysis.
#[derive(Clone, Copy, Debug)]
pub enum Calculus<'a> {
    /// LJpm.
    Prop,
    /// LJm restricted to positive sequents.
    Positive,
    /// LJm with `(∀⇒)`/`(⇒∃)` instantiating the given terms `Tm(A)↾n`.
    Staged { terms: &'a [Term] },
}

/// Supply of eigenvariables. Every variable handed out is recorded.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    pub next: u32,
    pub introduced: Vec<u32>,
}

impl Fresh {
    /// Starts above every free variable of `s`, and above `a0`, which is
    /// reserved for the domain of sequents without free variables.
    pub fn above(s: &Sequent) -> Fresh {
        Fresh { next: s.max_free_var().map_or(1, |m| m + 1), introduced: Vec::new() }
    }

    pub fn starting_at(next: u32) -> Fresh {
        Fresh { next, introduced: Vec::new() }
    }

    pub fn take(&mut self) -> u32 {
        let a = self.next;
        self.next += 1;
        self.introduced.push(a);
        a
    }

    /// Makes sure later variables avoid everything in `s`.
    pub fn avoid(&mut self, s: &Sequent) {
        if let Some(m) = s.max_free_var() {
            self.next = self.next.max(m + 1);
        }
    }
}

/// How a saturated leaf of `Tr_S` continues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    Axiom,
    FullyAnalyzed,
    NonInvertible,
}

// A sequent without free variables talks about `a0`.
fn has_witness(gamma: &Cedent, f: &Formula, vars: &BTreeSet<u32>) -> bool {
    if vars.is_empty() {
        return gamma.contains(&f.instantiate(&Term::Free(0)).expect("quantifier"));
    }
    vars.iter().any(|&a| gamma.contains(&f.instantiate(&Term::Free(a)).expect("quantifier")))
}

/// Saturation conditions on unmarked formulas. With `terms`, also the
/// quantifier conditions of `(n,A)`-saturation for those terms; without, the
/// antecedent existential condition of the positive fragment.
pub fn is_saturated_with(s: &Sequent, terms: Option<&[Term]>) -> bool {
    let vars = s.free_vars();
    let g = &s.ante;
    let d = &s.succ;
    let ante_ok = g.iter().filter(|(_, m)| !m).all(|(f, _)| match f {
        Formula::Or(a, b) => g.contains(a) || g.contains(b),
        Formula::And(a, b) => g.contains(a) && g.contains(b),
        Formula::Implies(a, b) => d.contains(a) || g.contains(b),
        Formula::Exists(..) => has_witness(g, f, &vars),
        Formula::Forall(..) => match terms {
            Some(ts) => ts.iter().all(|t| g.contains(&f.instantiate(t).expect("quantifier"))),
            None => true,
        },
        _ => true,
    });
    let succ_ok = d.iter().filter(|(_, m)| !m).all(|(f, _)| match f {
        Formula::Or(a, b) => d.contains(a) && d.contains(b),
        Formula::And(a, b) => d.contains(a) || d.contains(b),
        Formula::Exists(..) => match terms {
            Some(ts) => ts.iter().all(|t| d.contains(&f.instantiate(t).expect("quantifier"))),
            None => true,
        },
        _ => true,
    });
    ante_ok && succ_ok
}

/// Propositional saturation (conditions 1-5) plus the antecedent
/// existential condition.
pub fn is_saturated(s: &Sequent) -> bool {
    is_saturated_with(s, None)
}

fn only_atoms_marked(s: &Sequent, allow_succ: &[Connective]) -> bool {
    s.ante.marked().all(|f| matches!(f, Formula::Atom(..) | Formula::Bot))
        && s.succ.marked().all(|f| matches!(f, Formula::Atom(..) | Formula::Bot) || allow_succ.contains(&f.connective()))
}

/// Saturated, not an axiom, and every marked formula atomic or `⊥`.
pub fn is_fully_analyzed(s: &Sequent) -> bool {
    is_saturated(s) && !s.is_axiom() && only_atoms_marked(s, &[])
}

fn noninvertible_connectives(calc: Calculus<'_>) -> &'static [Connective] {
    match calc {
        Calculus::Prop => &[Connective::Implies],
        _ => &[Connective::Implies, Connective::Forall],
    }
}

/// A fully analyzed sequent extended by marked succedent implications (and
/// universal formulas outside LJpm).
pub fn is_non_invertible(s: &Sequent, calc: Calculus<'_>) -> bool {
    let allow = noninvertible_connectives(calc);
    is_saturated(s)
        && !s.is_axiom()
        && only_atoms_marked(s, allow)
        && s.succ.marked().any(|f| allow.contains(&f.connective()))
}

/// Classifies a leaf of `Tr_S` (a saturated sequent).
pub fn classify_leaf(s: &Sequent, calc: Calculus<'_>) -> LeafKind {
    if s.is_axiom() {
        return LeafKind::Axiom;
    }
    let allow = noninvertible_connectives(calc);
    let pending_succ = s.succ.marked().any(|f| allow.contains(&f.connective()));
    let pending_quant = matches!(calc, Calculus::Staged { .. })
        && (s.ante.of(Connective::Forall).next().is_some() || s.succ.of(Connective::Exists).next().is_some());
    if pending_succ || pending_quant {
        LeafKind::NonInvertible
    } else {
        LeafKind::FullyAnalyzed
    }
}

fn invertible(f: &Formula, antecedent: bool, calc: Calculus<'_>) -> bool {
    let staged = matches!(calc, Calculus::Staged { .. });
    match f.connective() {
        Connective::Or | Connective::And => true,
        Connective::Implies => antecedent,
        Connective::Exists => antecedent || staged,
        Connective::Forall => antecedent && staged,
        _ => false,
    }
}

/// The least marked invertible formula, antecedent first.
fn next_principal(s: &Sequent, calc: Calculus<'_>) -> Option<(Formula, bool)> {
    if let Some(f) = s.ante.marked().find(|f| invertible(f, true, calc)) {
        return Some((f.clone(), true));
    }
    s.succ.marked().find(|f| invertible(f, false, calc)).map(|f| (f.clone(), false))
}

fn add_missing(c: &Cedent, fs: &[&Formula]) -> Cedent {
    let mut out = c.clone();
    for f in fs {
        if !out.contains(f) {
            out.insert((*f).clone(), true);
        }
    }
    out
}

/// One inversion step of `Tr_S`.
#[derive(Clone, Debug)]
pub enum TrStep {
    Axiom,
    /// Saturated: nothing left to invert.
    Leaf,
    Inference {
        rule: Rule,
        principal: Formula,
        eigenvariable: Option<u32>,
        terms: Vec<Term>,
        uppers: Vec<Sequent>,
    },
}

/// The next inversion at `s`, after erasing the marks of formulas whose
/// saturation condition already holds. Returns the sequent the step applies
/// to; it differs from `s` only in marks.
pub fn tr_step(s: &Sequent, calc: Calculus<'_>, fresh: &mut Fresh) -> (Sequent, TrStep) {
    let mut cur = s.clone();
    loop {
        if cur.is_axiom() {
            return (cur, TrStep::Axiom);
        }
        let Some((p, left)) = next_principal(&cur, calc) else {
            return (cur, TrStep::Leaf);
        };
        let mut base = cur.clone();
        if left {
            base.ante.unmark(&p);
        } else {
            base.succ.unmark(&p);
        }
        match inversion(&base, &p, left, calc, fresh, &cur) {
            Some(step) => return (cur, step),
            None => cur = base,
        }
    }
}

fn inference(rule: Rule, principal: &Formula, uppers: Vec<Sequent>) -> Option<TrStep> {
    Some(TrStep::Inference { rule, principal: principal.clone(), eigenvariable: None, terms: Vec::new(), uppers })
}

// `base` is the lower sequent with the principal unmarked; `None` means the
// saturation condition already holds.
fn inversion(base: &Sequent, p: &Formula, left: bool, calc: Calculus<'_>, fresh: &mut Fresh, lower: &Sequent) -> Option<TrStep> {
    let g = &base.ante;
    let d = &base.succ;
    match (p, left) {
        (Formula::Or(a, b), true) => {
            if g.contains(a) || g.contains(b) {
                return None;
            }
            let l = Sequent::new(g.clone().with((**a).clone(), true), d.clone());
            let r = Sequent::new(g.clone().with((**b).clone(), true), d.clone());
            inference(Rule::OrL, p, vec![l, r])
        }
        (Formula::And(a, b), true) => {
            if g.contains(a) && g.contains(b) {
                return None;
            }
            inference(Rule::AndL, p, vec![Sequent::new(add_missing(g, &[a, b]), d.clone())])
        }
        (Formula::Implies(a, b), true) => {
            if d.contains(a) || g.contains(b) {
                return None;
            }
            let l = Sequent::new(g.clone(), d.clone().with((**a).clone(), true));
            let r = Sequent::new(g.clone().with((**b).clone(), true), d.clone());
            inference(Rule::ImpL, p, vec![l, r])
        }
        (Formula::Exists(..), true) => {
            if has_witness(g, p, &base.free_vars()) {
                return None;
            }
            fresh.avoid(lower);
            let a = fresh.take();
            let inst = p.instantiate(&Term::Free(a)).expect("quantifier");
            Some(TrStep::Inference {
                rule: Rule::ExL,
                principal: p.clone(),
                eigenvariable: Some(a),
                terms: Vec::new(),
                uppers: vec![Sequent::new(g.clone().with(inst, true), d.clone())],
            })
        }
        (Formula::Forall(..), true) | (Formula::Exists(..), false) => {
            let Calculus::Staged { terms } = calc else {
                unreachable!("quantifier instantiation outside the staged calculus")
            };
            let side = if left { g } else { d };
            let missing: Vec<Term> =
                terms.iter().filter(|t| !side.contains(&p.instantiate(t).expect("quantifier"))).cloned().collect();
            if missing.is_empty() {
                return None;
            }
            let mut side = side.clone();
            for t in &missing {
                side.insert(p.instantiate(t).expect("quantifier"), true);
            }
            let upper = if left { Sequent::new(side, d.clone()) } else { Sequent::new(g.clone(), side) };
            Some(TrStep::Inference {
                rule: if left { Rule::AllL } else { Rule::ExR },
                principal: p.clone(),
                eigenvariable: None,
                terms: missing,
                uppers: vec![upper],
            })
        }
        (Formula::Or(a, b), false) => {
            if d.contains(a) && d.contains(b) {
                return None;
            }
            inference(Rule::OrR, p, vec![Sequent::new(g.clone(), add_missing(d, &[a, b]))])
        }
        (Formula::And(a, b), false) => {
            if d.contains(a) || d.contains(b) {
                return None;
            }
            let l = Sequent::new(g.clone(), d.clone().with((**a).clone(), true));
            let r = Sequent::new(g.clone(), d.clone().with((**b).clone(), true));
            inference(Rule::AndR, p, vec![l, r])
        }
        _ => unreachable!("not an invertible principal"),
    }
}

/// Builds `Tr_S`: applies inversions bottom-up until every leaf is saturated.
/// Axioms are not analyzed further.
pub fn build_tr(s: &Sequent, calc: Calculus<'_>, fresh: &mut Fresh) -> Deduction {
    let (cur, step) = tr_step(s, calc, fresh);
    match step {
        TrStep::Axiom => Deduction::axiom(cur),
        TrStep::Leaf => Deduction::leaf(cur),
        TrStep::Inference { rule, principal, eigenvariable, terms, uppers } => {
            let children = uppers.iter().map(|u| build_tr(u, calc, fresh)).collect();
            Deduction { sequent: cur, rule, principal: Some(principal), eigenvariable, terms, children }
        }
    }
}

/// One upper sequent of (br).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrSon {
    pub sequent: Sequent,
    /// The succedent formula analyzed; `None` for the continued sequent.
    pub principal: Option<Formula>,
    pub eigenvariable: Option<u32>,
}

fn remark(c: &Cedent, which: &[Connective]) -> Cedent {
    c.iter().map(|(f, m)| (f.clone(), m || which.contains(&f.connective()))).collect()
}

/// (br) for LJpm: one upper `γ°, Γ, Γ_⊃° ⇒ δ°` per marked succedent
/// implication, in cedent order.
pub fn branch_rule(s: &Sequent) -> Vec<Sequent> {
    let ante = remark(&s.ante, &[Connective::Implies]);
    s.succ
        .marked_of(Connective::Implies)
        .map(|f| {
            let Formula::Implies(g, d) = f else { unreachable!() };
            Sequent::new(ante.clone().with((**g).clone(), true), Cedent::new().with((**d).clone(), true))
        })
        .collect()
}

fn noninvertible_sons(s: &Sequent, ante: &Cedent, fresh: &mut Fresh) -> Vec<BrSon> {
    let mut out = Vec::new();
    for f in s.succ.marked() {
        match f {
            Formula::Implies(g, d) => out.push(BrSon {
                sequent: Sequent::new(ante.clone().with((**g).clone(), true), Cedent::new().with((**d).clone(), true)),
                principal: Some(f.clone()),
                eigenvariable: None,
            }),
            Formula::Forall(..) => {
                fresh.avoid(s);
                let a = fresh.take();
                let inst = f.instantiate(&Term::Free(a)).expect("quantifier");
                out.push(BrSon {
                    sequent: Sequent::new(ante.clone(), Cedent::new().with(inst, true)),
                    principal: Some(f.clone()),
                    eigenvariable: Some(a),
                });
            }
            _ => {}
        }
    }
    out
}

/// (br) for the positive fragment: implication uppers and, for each marked
/// succedent `∀y γ(y)`, an upper `Γ, Γ_⊃° ⇒ γ(a)°` with a fresh `a`.
pub fn branch_rule_positive(s: &Sequent, fresh: &mut Fresh) -> Vec<BrSon> {
    let ante = remark(&s.ante, &[Connective::Implies]);
    noninvertible_sons(s, &ante, fresh)
}

/// (br) for LJm. The continued sequent re-marks `Γ_∀` and `Δ_∃` and is
/// present iff one of them is non-empty.
pub fn branch_rule_full(s: &Sequent, fresh: &mut Fresh) -> (Option<BrSon>, Vec<BrSon>) {
    let has_quant = s.ante.of(Connective::Forall).next().is_some() || s.succ.of(Connective::Exists).next().is_some();
    let continued = has_quant.then(|| BrSon {
        sequent: Sequent::new(remark(&s.ante, &[Connective::Forall]), remark(&s.succ, &[Connective::Exists])),
        principal: None,
        eigenvariable: None,
    });
    let ante = remark(&s.ante, &[Connective::Implies, Connective::Forall]);
    (continued, noninvertible_sons(s, &ante, fresh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;

    fn s(t: &str) -> Sequent {
        parse_sequent(t).unwrap()
    }

    #[test]
    fn saturation_examples() {
        let fa = s("p, q |- r");
        assert!(is_saturated(&fa) && is_fully_analyzed(&fa));
        let mut not_sat = s("p | q |- r");
        not_sat.ante.unmark(&crate::parser::parse_formula("p | q").unwrap());
        assert!(!is_saturated(&not_sat));
        let ni = s("p |- q -> r");
        assert!(is_saturated(&ni) && is_non_invertible(&ni, Calculus::Prop));
    }

    #[test]
    fn conjunction_in_succedent_splits() {
        let tr = build_tr(&s("|- p & q"), Calculus::Prop, &mut Fresh::default());
        let leaves: Vec<String> = tr.leaves().iter().map(|l| l.sequent.display_marked()).collect();
        assert_eq!(leaves, vec![" |- p°, p & q", " |- q°, p & q"]);
    }

    #[test]
    fn nothing_to_invert() {
        let tr = build_tr(&s("p |- q"), Calculus::Prop, &mut Fresh::default());
        assert!(tr.is_leaf());
    }

    #[test]
    fn implication_left_closes() {
        let tr = build_tr(&s("p -> q, p |- q"), Calculus::Prop, &mut Fresh::default());
        assert_eq!(tr.rule, Rule::ImpL);
        assert!(tr.leaves().iter().all(|l| l.rule == Rule::AxiomT));
        let tr = build_tr(&s("p -> q, p |- r"), Calculus::Prop, &mut Fresh::default());
        assert_eq!(tr.rule, Rule::ImpL);
        let kinds: Vec<_> = tr.leaves().iter().map(|l| l.rule).collect();
        assert_eq!(kinds, vec![Rule::AxiomT, Rule::Leaf]);
    }

    #[test]
    fn branch_examples() {
        let ups = branch_rule(&s("p |- q -> r"));
        assert_eq!(ups.len(), 1);
        assert_eq!(ups[0].display_marked(), "p°, q° |- r°");
        let mut lower = s("p -> q, r |- s -> t");
        lower.ante.unmark(&crate::parser::parse_formula("p -> q").unwrap());
        let ups = branch_rule(&lower);
        assert!(ups[0].ante.is_marked(&crate::parser::parse_formula("p -> q").unwrap()));
        assert_eq!(branch_rule(&s("|- p -> q, r -> s")).len(), 2);
    }

    #[test]
    fn positive_branch_uses_fresh_variable() {
        let mut fresh = Fresh::default();
        let sons = branch_rule_positive(&s("P(a0) |- forall x. P(x)"), &mut fresh);
        assert_eq!(sons[0].eigenvariable, Some(1));
        assert_eq!(sons[0].sequent.to_string(), "P(a0) |- P(a1)");
    }
}
