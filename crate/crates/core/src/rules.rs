//! Deduction trees and an independent derivation checker.
//!
//! The checker works on erased sequents: cedents are sets of formulas, every
//! logical rule keeps its principal formula in the upper sequents, and a step
//! is accepted when the upper cedents are exactly the ones the rule instance
//! prescribes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::sequent::Sequent;
use crate::syntax::{Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Rule {
    OrL,
    OrR,
    AndL,
    AndR,
    ImpL,
    ImpR,
    ExL,
    ExR,
    AllL,
    AllR,
    Br,
    Wbr,
    Circ,
    Weakening,
    AxiomT,
    AxiomBot,
    Leaf,
}

impl Rule {
    pub fn label(self) -> &'static str {
        match self {
            Rule::OrL => "(or=>)",
            Rule::OrR => "(=>or)",
            Rule::AndL => "(and=>)",
            Rule::AndR => "(=>and)",
            Rule::ImpL => "(imp=>)",
            Rule::ImpR => "(=>imp)",
            Rule::ExL => "(ex=>)",
            Rule::ExR => "(=>ex)",
            Rule::AllL => "(all=>)",
            Rule::AllR => "(=>all)",
            Rule::Br => "(br)",
            Rule::Wbr => "(wbr)",
            Rule::Circ => "(o)",
            Rule::Weakening => "(w)",
            Rule::AxiomT => "axiom-T",
            Rule::AxiomBot => "axiom-bot",
            Rule::Leaf => "leaf",
        }
    }

    pub fn from_label(s: &str) -> Option<Rule> {
        const ALL: [Rule; 17] = [
            Rule::OrL,
            Rule::OrR,
            Rule::AndL,
            Rule::AndR,
            Rule::ImpL,
            Rule::ImpR,
            Rule::ExL,
            Rule::ExR,
            Rule::AllL,
            Rule::AllR,
            Rule::Br,
            Rule::Wbr,
            Rule::Circ,
            Rule::Weakening,
            Rule::AxiomT,
            Rule::AxiomBot,
            Rule::Leaf,
        ];
        ALL.into_iter().find(|r| r.label() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A labelled finite tree of sequents. `rule` names the inference whose lower
/// sequent is `sequent` and whose uppers are the children's sequents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deduction {
    pub sequent: Sequent,
    pub rule: Rule,
    pub principal: Option<Formula>,
    pub eigenvariable: Option<u32>,
    pub terms: Vec<Term>,
    pub children: Vec<Deduction>,
}

impl Deduction {
    pub fn leaf(sequent: Sequent) -> Deduction {
        Deduction { sequent, rule: Rule::Leaf, principal: None, eigenvariable: None, terms: Vec::new(), children: Vec::new() }
    }

    pub fn axiom(sequent: Sequent) -> Deduction {
        let rule = if sequent.ante.contains(&Formula::Bot) { Rule::AxiomBot } else { Rule::AxiomT };
        Deduction { rule, ..Deduction::leaf(sequent) }
    }

    pub fn node(sequent: Sequent, rule: Rule, principal: Formula, children: Vec<Deduction>) -> Deduction {
        Deduction { sequent, rule, principal: Some(principal), eigenvariable: None, terms: Vec::new(), children }
    }

    /// Renames free variables throughout, eigenvariables included.
    pub fn rename_free(&self, map: &BTreeMap<u32, u32>) -> Deduction {
        Deduction {
            sequent: self.sequent.rename_free(map),
            rule: self.rule,
            principal: self.principal.as_ref().map(|p| p.rename_free(map)),
            eigenvariable: self.eigenvariable.map(|a| *map.get(&a).unwrap_or(&a)),
            terms: self.terms.iter().map(|t| t.rename_free(map)).collect(),
            children: self.children.iter().map(|c| c.rename_free(map)).collect(),
        }
    }

    /// Gives every eigenvariable introduction its own variable. A subtree
    /// that reuses an eigenvariable already introduced elsewhere is renamed
    /// apart; the variable does not occur below its introduction, so the
    /// renamed subtree derives the same sequent.
    pub fn freshen_eigenvariables(self) -> Deduction {
        fn walk(d: Deduction, seen: &mut BTreeSet<u32>, next: &mut u32) -> Deduction {
            let d = match d.eigenvariable {
                Some(a) if !seen.insert(a) => {
                    let b = *next;
                    *next += 1;
                    seen.insert(b);
                    d.rename_free(&BTreeMap::from([(a, b)]))
                }
                _ => d,
            };
            let Deduction { sequent, rule, principal, eigenvariable, terms, children } = d;
            let children = children.into_iter().map(|c| walk(c, seen, next)).collect();
            Deduction { sequent, rule, principal, eigenvariable, terms, children }
        }
        let mut next = self.max_free_var().map_or(1, |m| m + 1);
        walk(self, &mut BTreeSet::new(), &mut next)
    }

    fn max_free_var(&self) -> Option<u32> {
        let own = self.sequent.max_free_var().into_iter().chain(self.eigenvariable);
        own.chain(self.children.iter().filter_map(Deduction::max_free_var)).max()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Deduction> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            if d.children.is_empty() {
                out.push(d);
            } else {
                stack.extend(d.children.iter().rev());
            }
        }
        out
    }

    /// Replaces the leaves, in left-to-right order, by the given trees.
    pub fn graft(self, replacements: &mut impl Iterator<Item = Deduction>) -> Deduction {
        if self.children.is_empty() {
            return replacements.next().expect("one replacement per leaf");
        }
        let children = self.children.into_iter().map(|c| c.graft(replacements)).collect();
        Deduction { children, ..self }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Deduction::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Deduction::height).max().unwrap_or(0)
    }

    /// Marks erased throughout.
    pub fn erased(&self) -> Deduction {
        Deduction {
            sequent: self.sequent.erase(),
            children: self.children.iter().map(Deduction::erased).collect(),
            ..self.clone()
        }
    }

    /// Indented text rendering, leaves last.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        let mut extra = String::new();
        if let Some(p) = &self.principal {
            extra.push_str(&format!(" on {p}"));
        }
        if let Some(a) = self.eigenvariable {
            extra.push_str(&format!(" eigenvariable a{a}"));
        }
        if !self.terms.is_empty() {
            let ts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
            extra.push_str(&format!(" term {}", ts.join(", ")));
        }
        out.push_str(&format!("{}{}   {}{}\n", "  ".repeat(indent), self.sequent, self.rule, extra));
        for c in &self.children {
            c.render_into(indent + 1, out);
        }
    }
}

/// Why a deduction failed to check, and where. `path` lists child indices
/// from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub path: Vec<usize>,
    pub sequent: String,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?} ({}): {}", self.path, self.sequent, self.reason)
    }
}

type Sets = (BTreeSet<Formula>, BTreeSet<Formula>);

fn with(set: &BTreeSet<Formula>, extra: &[&Formula]) -> BTreeSet<Formula> {
    let mut s = set.clone();
    s.extend(extra.iter().map(|f| (*f).clone()));
    s
}

fn free_in(sets: &Sets, a: u32) -> bool {
    sets.0.iter().chain(sets.1.iter()).any(|f| f.free_vars().contains(&a))
}

fn expect_uppers(got: &[Sets], want: &[Sets]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("expected {} upper sequents, found {}", want.len(), got.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if g != w {
            return Err(format!("upper sequent {i} does not match the rule instance"));
        }
    }
    Ok(())
}

fn check_step(d: &Deduction) -> Result<(), String> {
    let lower = d.sequent.erased();
    let (gamma, delta) = &lower;
    let uppers: Vec<Sets> = d.children.iter().map(|c| c.sequent.erased()).collect();
    let principal = || d.principal.as_ref().ok_or_else(|| "missing principal formula".to_string());
    let term = || match d.terms.as_slice() {
        [t] => Ok(t.clone()),
        _ => Err("expected exactly one instantiating term".to_string()),
    };
    let eigen = || d.eigenvariable.ok_or_else(|| "missing eigenvariable".to_string());
    match d.rule {
        Rule::AxiomT => {
            if d.sequent.ante.formulas().any(|f| f.is_atomic() && delta.contains(f)) {
                Ok(())
            } else {
                Err("not an axiom: no shared atom".into())
            }
        }
        Rule::AxiomBot => {
            if gamma.contains(&Formula::Bot) {
                Ok(())
            } else {
                Err("not an axiom: bot not in the antecedent".into())
            }
        }
        Rule::Leaf | Rule::Br | Rule::Wbr | Rule::Circ => Err(format!("{} is not an inference of the calculus", d.rule)),
        Rule::Weakening => {
            let [(g2, d2)] = uppers.as_slice() else {
                return Err("weakening has one upper sequent".into());
            };
            if g2.is_subset(gamma) && d2.is_subset(delta) {
                Ok(())
            } else {
                Err("weakening upper is not contained in the lower sequent".into())
            }
        }
        rule => {
            let p = principal()?;
            let in_ante = gamma.contains(p);
            let in_succ = delta.contains(p);
            match (rule, p) {
                (Rule::OrL, Formula::Or(a, b)) if in_ante => expect_uppers(
                    &uppers,
                    &[(with(gamma, &[a]), delta.clone()), (with(gamma, &[b]), delta.clone())],
                ),
                (Rule::OrR, Formula::Or(a, b)) if in_succ => {
                    expect_uppers(&uppers, &[(gamma.clone(), with(delta, &[a, b]))])
                }
                (Rule::AndL, Formula::And(a, b)) if in_ante => {
                    expect_uppers(&uppers, &[(with(gamma, &[a, b]), delta.clone())])
                }
                (Rule::AndR, Formula::And(a, b)) if in_succ => expect_uppers(
                    &uppers,
                    &[(gamma.clone(), with(delta, &[a])), (gamma.clone(), with(delta, &[b]))],
                ),
                (Rule::ImpL, Formula::Implies(a, b)) if in_ante => expect_uppers(
                    &uppers,
                    &[(gamma.clone(), with(delta, &[a])), (with(gamma, &[b]), delta.clone())],
                ),
                (Rule::ImpR, Formula::Implies(a, b)) if in_succ => {
                    expect_uppers(&uppers, &[(with(gamma, &[a]), [(**b).clone()].into())])
                }
                (Rule::ExL, Formula::Exists(..)) if in_ante => {
                    let a = eigen()?;
                    if free_in(&lower, a) {
                        return Err(format!("eigenvariable a{a} occurs in the lower sequent"));
                    }
                    let inst = p.instantiate(&Term::Free(a)).expect("quantifier");
                    expect_uppers(&uppers, &[(with(gamma, &[&inst]), delta.clone())])
                }
                (Rule::AllR, Formula::Forall(..)) if in_succ => {
                    let a = eigen()?;
                    if free_in(&lower, a) {
                        return Err(format!("eigenvariable a{a} occurs in the lower sequent"));
                    }
                    let inst = p.instantiate(&Term::Free(a)).expect("quantifier");
                    expect_uppers(&uppers, &[(gamma.clone(), [inst].into())])
                }
                (Rule::AllL, Formula::Forall(..)) if in_ante => {
                    let t = term()?;
                    if !t.is_closed() {
                        return Err("instantiating term has bound variables".into());
                    }
                    let inst = p.instantiate(&t).expect("quantifier");
                    expect_uppers(&uppers, &[(with(gamma, &[&inst]), delta.clone())])
                }
                (Rule::ExR, Formula::Exists(..)) if in_succ => {
                    let t = term()?;
                    if !t.is_closed() {
                        return Err("instantiating term has bound variables".into());
                    }
                    let inst = p.instantiate(&t).expect("quantifier");
                    expect_uppers(&uppers, &[(gamma.clone(), with(delta, &[&inst]))])
                }
                _ => Err(format!("{} does not apply to principal {p} on this side", d.rule)),
            }
        }
    }
}

/// Checks that `d` is a derivation: every leaf an axiom, every step an
/// instance of a rule of the calculus.
pub fn check_derivation(d: &Deduction) -> Result<(), CheckFailure> {
    let mut stack = vec![(d, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if node.children.is_empty() && !matches!(node.rule, Rule::AxiomT | Rule::AxiomBot) {
            return Err(CheckFailure {
                path,
                sequent: node.sequent.to_string(),
                reason: format!("leaf labelled {} is not an axiom", node.rule),
            });
        }
        if let Err(reason) = check_step(node) {
            return Err(CheckFailure { path, sequent: node.sequent.to_string(), reason });
        }
        for (i, c) in node.children.iter().enumerate() {
            let mut p = path.clone();
            p.push(i);
            stack.push((c, p));
        }
    }
    Ok(())
}

/// Audits eigenvariables: each is introduced once, and occurs only above its
/// introduction or to the right of it. In pre-order the nodes before a node
/// are exactly those below it or to its left.
pub fn audit_eigenvariables(d: &Deduction) -> Result<(), CheckFailure> {
    fn walk(
        node: &Deduction,
        path: &mut Vec<usize>,
        seen: &mut BTreeSet<u32>,
        introduced: &mut BTreeSet<u32>,
    ) -> Result<(), CheckFailure> {
        let fail = |reason: String| CheckFailure { path: path.clone(), sequent: node.sequent.to_string(), reason };
        seen.extend(node.sequent.free_vars());
        if let Some(a) = node.eigenvariable {
            if !introduced.insert(a) {
                return Err(fail(format!("eigenvariable a{a} introduced twice")));
            }
            if seen.contains(&a) {
                return Err(fail(format!("eigenvariable a{a} occurs below or to the left of its introduction")));
            }
        }
        for (i, c) in node.children.iter().enumerate() {
            path.push(i);
            walk(c, path, seen, introduced)?;
            path.pop();
        }
        Ok(())
    }
    walk(d, &mut Vec::new(), &mut BTreeSet::new(), &mut BTreeSet::new())
}

/// Checks local correctness only; leaves may be arbitrary sequents.
pub fn check_deduction(d: &Deduction) -> Result<(), CheckFailure> {
    let mut stack = vec![(d, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if node.children.is_empty() && node.rule == Rule::Leaf {
            continue;
        }
        if let Err(reason) = check_step(node) {
            return Err(CheckFailure { path, sequent: node.sequent.to_string(), reason });
        }
        for (i, c) in node.children.iter().enumerate() {
            let mut p = path.clone();
            p.push(i);
            stack.push((c, p));
        }
    }
    Ok(())
}
