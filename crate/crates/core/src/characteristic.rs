//! Characteristic formulas of selected trees, built with `⊕`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rules::{Deduction, Rule};
use crate::search::Gate;
use crate::staged::StagedTree;
use crate::syntax::{Formula, Term};

fn fresh_name(taken: &BTreeSet<String>) -> String {
    (0..).map(|i| format!("x{i}")).find(|n| !taken.contains(n)).expect("unbounded supply")
}

/// `⊕(α, β)`: `∀x⃗(γ ⊃ (δ ∨ β))` when `α` is `∀x⃗(γ ⊃ δ)`, otherwise `α ∨ β`.
/// Binders of `x⃗` whose names occur in `β` are renamed first.
pub fn oplus(alpha: &Formula, beta: &Formula) -> Formula {
    let mut names = Vec::new();
    let mut body = alpha.clone();
    while let Formula::Forall(x, b) = &body {
        names.push(x.to_string());
        body = (**b).clone();
    }
    let Formula::Implies(g, d) = &body else {
        return Formula::or(alpha.clone(), beta.clone());
    };
    let (mut g, mut d) = ((**g).clone(), (**d).clone());
    let mut taken = BTreeSet::new();
    beta.bound_names(&mut taken);
    alpha.bound_names(&mut taken);
    for x in names.iter_mut() {
        let mut in_beta = BTreeSet::new();
        beta.bound_names(&mut in_beta);
        if in_beta.contains(x.as_str()) {
            let y = fresh_name(&taken);
            taken.insert(y.clone());
            g = g.subst(x, &Term::Bound(y.as_str().into()));
            d = d.subst(x, &Term::Bound(y.as_str().into()));
            *x = y;
        }
    }
    let core = Formula::implies(g, Formula::or(d, beta.clone()));
    names.iter().rev().fold(core, |acc, x| Formula::forall(x, acc))
}

/// `⊕(α⃗, β) = ⊕(α₀, ⊕(α₁, … ⊕(α_{n-1}, β)…))`.
pub fn oplus_all(alphas: &[Formula], beta: &Formula) -> Formula {
    alphas.iter().rev().fold(beta.clone(), |acc, a| oplus(a, &acc))
}

/// Binds the free variables `vars` of `f` by universal quantifiers, the
/// first variable outermost.
pub fn close_universally(f: &Formula, vars: &[u32]) -> Formula {
    let mut taken = BTreeSet::new();
    f.bound_names(&mut taken);
    let mut named = Vec::new();
    let mut body = f.clone();
    for &a in vars {
        if !body.free_vars().contains(&a) {
            continue;
        }
        let x = fresh_name(&taken);
        taken.insert(x.clone());
        body = body.abstract_free(a, &x);
        named.push(x);
    }
    named.iter().rev().fold(body, |acc, x| Formula::forall(x, acc))
}

/// Whether `t` is a selected tree: each ∧-node has one son in `t`, each
/// ∨-node is a leaf of `t` or has all its sons there, and every leaf has
/// gate 0 or ∨.
pub fn is_selected(tree: &StagedTree, t: &BTreeSet<usize>) -> std::result::Result<(), String> {
    if !t.contains(&0) {
        return Err("the root is missing".into());
    }
    for &i in t {
        let n = &tree.nodes[i];
        if n.parent.is_some_and(|p| !t.contains(&p)) {
            return Err(format!("node {:?} has no parent in the tree", n.addr));
        }
        let inside = n.children.iter().filter(|c| t.contains(c)).count();
        let ok = match (n.gate, inside) {
            (Gate::Zero | Gate::Or, 0) => true,
            (Gate::And, 1) => true,
            (Gate::Or, k) => k == n.children.len(),
            _ => false,
        };
        if !ok {
            return Err(format!("node {:?} with gate {} has {inside} sons in the tree", n.addr, n.gate.symbol()));
        }
    }
    Ok(())
}

/// A selected tree: the first son that can be continued at each ∧-node, all
/// sons at each ∨-node unless one of them has gate 1 or cannot be
/// continued, in which case the ∨-node is a leaf.
pub fn select_tree(tree: &StagedTree) -> Option<BTreeSet<usize>> {
    fn go(tree: &StagedTree, i: usize, out: &mut BTreeSet<usize>) -> bool {
        let n = &tree.nodes[i];
        match n.gate {
            Gate::One => false,
            Gate::Zero => {
                out.insert(i);
                true
            }
            Gate::And => {
                for &c in &n.children {
                    let mut sub = BTreeSet::new();
                    if go(tree, c, &mut sub) {
                        out.insert(i);
                        out.extend(sub);
                        return true;
                    }
                }
                false
            }
            Gate::Or => {
                out.insert(i);
                let mut sub = BTreeSet::new();
                if n.stable.is_none() && n.children.iter().all(|&c| go(tree, c, &mut sub)) {
                    out.extend(sub);
                }
                true
            }
        }
    }
    let mut out = BTreeSet::new();
    go(tree, 0, &mut out).then_some(out)
}

/// `χ(σ) ≡ ⋀Γ(σ) ⊃ ⋁Δ(σ)`, marks erased.
pub fn chi_leaf(tree: &StagedTree, i: usize) -> Formula {
    let (g, d) = tree.nodes[i].sequent.erased();
    Formula::implies(Formula::conj(g), Formula::disj(d))
}

// The `(∃⇒)` eigenvariables between the root of `d` and each of its leaves.
fn exists_eigenvariables(d: &Deduction, above: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if d.children.is_empty() {
        out.push(above.clone());
        return;
    }
    let pushed = d.rule == Rule::ExL && d.eigenvariable.is_some();
    if pushed {
        above.push(d.eigenvariable.expect("checked"));
    }
    for c in &d.children {
        exists_eigenvariables(c, above, out);
    }
    if pushed {
        above.pop();
    }
}

/// `χ(σ;T)`.
pub fn chi(tree: &StagedTree, t: &BTreeSet<usize>, i: usize) -> Result<Formula> {
    is_selected(tree, t).map_err(Error::Mode)?;
    chi_at(tree, t, i)
}

/// `χ(T)`, the characteristic formula at the root.
pub fn chi_tree(tree: &StagedTree, t: &BTreeSet<usize>) -> Result<Formula> {
    chi(tree, t, 0)
}

fn chi_at(tree: &StagedTree, t: &BTreeSet<usize>, i: usize) -> Result<Formula> {
    let n = &tree.nodes[i];
    let sons: Vec<usize> = n.children.iter().copied().filter(|c| t.contains(c)).collect();
    if sons.is_empty() {
        return Ok(chi_leaf(tree, i));
    }
    match n.gate {
        Gate::And => {
            let c = sons[0];
            let k = n.children.iter().position(|&x| x == c).expect("a son");
            let d = n.deduction.as_ref().ok_or_else(|| Error::Mode("∧-node without Tr".into()))?;
            let mut paths = Vec::new();
            exists_eigenvariables(d, &mut Vec::new(), &mut paths);
            Ok(close_universally(&chi_at(tree, t, c)?, &paths[k]))
        }
        _ => {
            let mut first = None;
            let mut rest = Vec::new();
            for c in sons {
                let son = &tree.nodes[c];
                let f = chi_at(tree, t, c)?;
                match son.eigenvariable {
                    _ if son.is_continued() => first = Some(f),
                    Some(a) => rest.push(close_universally(&f, &[a])),
                    None => rest.push(f),
                }
            }
            let rest = Formula::disj(rest);
            Ok(match first {
                Some(f) => oplus(&f, &rest),
                None => rest,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_sequent};

    fn f(t: &str) -> Formula {
        parse_formula(t).unwrap()
    }

    #[test]
    fn oplus_of_universal_implication() {
        assert_eq!(oplus(&f("forall x. (P(x) -> Q(x))"), &f("r")), f("forall x. (P(x) -> (Q(x) | r))"));
        assert_eq!(oplus(&f("p"), &f("q")), f("p | q"));
        assert_eq!(oplus(&f("p -> q"), &f("r")), f("p -> (q | r)"));
    }

    #[test]
    fn oplus_renames_clashing_binders() {
        let g = oplus(&f("forall x. (P(x) -> Q(x))"), &f("exists x. R(x)"));
        let Formula::Forall(y, _) = &g else { panic!("{g}") };
        assert_ne!(&**y, "x");
        assert_eq!(g.to_string(), f(&format!("forall {y}. (P({y}) -> (Q({y}) | exists x. R(x)))")).to_string());
    }

    #[test]
    fn chi_of_a_root_leaf() {
        let tree = StagedTree::new(&parse_sequent("p |- q").unwrap());
        let t = select_tree(&tree).unwrap();
        assert_eq!(chi_tree(&tree, &t).unwrap(), f("p -> q"));
    }

    #[test]
    fn chi_closes_over_existential_eigenvariables() {
        let mut tree = StagedTree::new(&parse_sequent("exists y. P(y) |- forall x. P(x)").unwrap());
        tree.advance().unwrap();
        tree.advance().unwrap();
        let t = select_tree(&tree).unwrap();
        let c = chi_tree(&tree, &t).unwrap();
        assert!(c.free_vars().is_empty(), "{c}");
        assert!(matches!(c, Formula::Forall(..)), "{c}");
    }

    #[test]
    fn empty_cedents() {
        let tree = StagedTree::new(&parse_sequent("|-").unwrap());
        assert_eq!(chi_leaf(&tree, 0), f("(bot -> bot) -> bot"));
    }
}
