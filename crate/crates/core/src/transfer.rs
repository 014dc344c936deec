//! Transfer: removing cross-branch clashes of one atom from a tree of
//! deductions.
//!
//! The staged tree is unfolded into explicit deductions in which every (br)
//! is read as a (wbr) with empty `Π` and `Λ`. A transferable pair
//! `(σ₀, σ₁)` has a marked atom `α°` in the antecedent of `S(σ₀)` and the
//! succedent of `S(σ₁)`, with `σ₀` on the continued line of the (wbr) at the
//! infimum `ρ` and `σ₁` in one of its non-invertible arms. A transfer step
//! replaces the (wbr) at `ρ` by `(∘)` and re-applies it at `σ₀`, where the
//! arms carry `α°` and `σ₁` becomes an axiom.
//!
//! Paths are child indices from the root; `lh` of a node is its path length.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rules::{CheckFailure, Deduction, Rule};
use crate::search::Gate;
use crate::sequent::{Cedent, Sequent};
use crate::staged::StagedTree;
use crate::syntax::{Formula, Term};

/// A node of a tree of deductions with gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TNode {
    /// Stable identity: kept when a node is moved or rebuilt in place, fresh
    /// for copies.
    pub id: usize,
    pub sequent: Sequent,
    pub rule: Rule,
    pub principal: Option<Formula>,
    /// `(∃⇒)` eigenvariable.
    pub eigenvariable: Option<u32>,
    pub terms: Vec<Term>,
    pub gate: Gate,
    pub children: Vec<TNode>,
    /// At (wbr): whether son 0 is the continued sequent.
    pub continued: bool,
    /// At (wbr): per son, the analyzed succedent formula and eigenvariable.
    pub son_principals: Vec<Option<Formula>>,
    pub son_eigenvariables: Vec<Option<u32>>,
}

impl TNode {
    fn leaf(id: usize, sequent: Sequent, rule: Rule, gate: Gate) -> TNode {
        TNode {
            id,
            sequent,
            rule,
            principal: None,
            eigenvariable: None,
            terms: Vec::new(),
            gate,
            children: Vec::new(),
            continued: false,
            son_principals: Vec::new(),
            son_eigenvariables: Vec::new(),
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&TNode> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get(i)?.at(rest),
        }
    }

    fn at_mut(&mut self, path: &[usize]) -> Option<&mut TNode> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get_mut(i)?.at_mut(rest),
        }
    }

    /// Whether son `i` of a (wbr) is a non-invertible upper.
    fn is_arm(&self, i: usize) -> bool {
        self.rule == Rule::Wbr && !(self.continued && i == 0)
    }

    fn visit<'a>(&'a self, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a TNode)) {
        f(path, self);
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.visit(path, f);
            path.pop();
        }
    }

    fn max_var(&self) -> Option<u32> {
        let own = self.sequent.max_free_var().into_iter().chain(self.eigenvariable).chain(self.son_eigenvariables.iter().flatten().copied());
        own.chain(self.children.iter().filter_map(TNode::max_var)).max()
    }

    /// The deduction with gates dropped; a (wbr) son with an eigenvariable
    /// hangs under a node recording it.
    pub fn to_deduction(&self) -> Deduction {
        let children = self
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let sub = c.to_deduction();
                match (self.son_eigenvariables.get(i).copied().flatten(), self.son_principals.get(i).cloned().flatten()) {
                    (Some(a), Some(p)) => Deduction {
                        eigenvariable: Some(a),
                        ..Deduction::node(self.sequent.clone(), Rule::AllR, p, vec![sub])
                    },
                    _ => sub,
                }
            })
            .collect();
        Deduction {
            sequent: self.sequent.clone(),
            rule: self.rule,
            principal: self.principal.clone(),
            eigenvariable: self.eigenvariable,
            terms: self.terms.clone(),
            children,
        }
    }
}

/// One side of a transferable pair, with the atom they share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferablePair {
    pub sigma0: Vec<usize>,
    pub sigma1: Vec<usize>,
    pub rho: Vec<usize>,
    pub atom: Formula,
}

/// A tree of deductions under transfer, with the ledger of used variables
/// and node identities.
#[derive(Clone, Debug)]
pub struct TransferTree {
    pub root: TNode,
    next_id: usize,
    next_var: u32,
}

fn rank(g: Gate) -> u8 {
    match g {
        Gate::Or | Gate::And => 0,
        Gate::Zero => 1,
        Gate::One => 2,
    }
}

fn union_into(c: &Cedent, extra: &Cedent) -> Cedent {
    let mut out = c.clone();
    for (f, m) in extra.iter() {
        if !out.contains(f) || m {
            out.insert(f.clone(), m);
        }
    }
    out
}

fn widen_sequent(s: &Sequent, ante: &Cedent, succ: &Cedent) -> Sequent {
    Sequent::new(union_into(&s.ante, ante), union_into(&s.succ, succ))
}

// Appends `ante`/`succ` throughout; (wbr) arms receive `ante` only when
// `arms_ante`, and never `succ`.
fn widen_all(n: &TNode, ante: &Cedent, succ: &Cedent, arms_ante: bool) -> TNode {
    let empty = Cedent::new();
    let children = n
        .children
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if n.is_arm(i) {
                if arms_ante {
                    widen_all(c, ante, &empty, true)
                } else {
                    c.clone()
                }
            } else {
                widen_all(c, ante, succ, arms_ante)
            }
        })
        .collect();
    TNode { sequent: widen_sequent(&n.sequent, ante, succ), children, ..n.clone() }
}

fn eigenvariables_in(n: &TNode, out: &mut BTreeSet<u32>) {
    out.extend(n.eigenvariable);
    out.extend(n.son_eigenvariables.iter().flatten().copied());
    for c in &n.children {
        eigenvariables_in(c, out);
    }
}

impl TransferTree {
    /// Unfolds a staged truncation. Gates of unexpanded leaves are kept,
    /// inferences inside `Tr` are ∧, (br) is ∨.
    pub fn from_staged(tree: &StagedTree) -> TransferTree {
        let mut t = TransferTree { root: TNode::leaf(0, Sequent::default(), Rule::Leaf, Gate::Zero), next_id: 0, next_var: 0 };
        t.root = t.unfold(tree, 0);
        t.next_var = t.root.max_var().map_or(1, |m| m + 1);
        t.recompute_gates();
        t
    }

    fn id(&mut self) -> usize {
        self.next_id += 1;
        self.next_id - 1
    }

    fn unfold(&mut self, tree: &StagedTree, i: usize) -> TNode {
        let n = &tree.nodes[i];
        if !n.expanded {
            let rule = match n.gate {
                Gate::One if n.sequent.ante.contains(&Formula::Bot) => Rule::AxiomBot,
                Gate::One => Rule::AxiomT,
                _ => Rule::Leaf,
            };
            return TNode::leaf(self.id(), n.sequent.clone(), rule, n.gate);
        }
        match n.gate {
            Gate::And => {
                let d = n.deduction.clone().expect("expanded ∧-nodes carry Tr");
                let mut sons = n.children.iter().map(|&c| self.unfold(tree, c)).collect::<Vec<_>>().into_iter();
                self.unfold_tr(&d, &mut sons)
            }
            _ => {
                let id = self.id();
                let children: Vec<TNode> = n.children.iter().map(|&c| self.unfold(tree, c)).collect();
                TNode {
                    continued: n.children.first().is_some_and(|&c| tree.nodes[c].is_continued()),
                    son_principals: n.children.iter().map(|&c| tree.nodes[c].principal.clone()).collect(),
                    son_eigenvariables: n.children.iter().map(|&c| tree.nodes[c].eigenvariable).collect(),
                    children,
                    ..TNode::leaf(id, n.sequent.clone(), Rule::Wbr, Gate::Or)
                }
            }
        }
    }

    fn unfold_tr(&mut self, d: &Deduction, sons: &mut impl Iterator<Item = TNode>) -> TNode {
        if d.children.is_empty() {
            return sons.next().expect("one son per leaf of Tr");
        }
        let id = self.id();
        let children = d.children.iter().map(|c| self.unfold_tr(c, sons)).collect();
        TNode {
            principal: d.principal.clone(),
            eigenvariable: d.eigenvariable,
            terms: d.terms.clone(),
            children,
            ..TNode::leaf(id, d.sequent.clone(), d.rule, Gate::And)
        }
    }

    /// Gate propagation: a ∨ (wbr) gets 1 from a son of gate 1 and 0 when all
    /// sons have gate 0; other inferences dually. Gates never decrease in the
    /// order `∨, ∧ < 0 < 1`.
    pub fn recompute_gates(&mut self) {
        fn go(n: &mut TNode) {
            for c in &mut n.children {
                go(c);
            }
            if n.children.is_empty() {
                return;
            }
            let gs: Vec<Gate> = n.children.iter().map(|c| c.gate).collect();
            let (unit, zero) = if n.rule == Rule::Wbr { (Gate::One, Gate::Zero) } else { (Gate::Zero, Gate::One) };
            let new = if gs.contains(&unit) {
                Some(unit)
            } else if gs.iter().all(|&g| g == zero) {
                Some(zero)
            } else {
                None
            };
            if let Some(g) = new {
                if rank(g) > rank(n.gate) {
                    n.gate = g;
                }
            }
        }
        go(&mut self.root);
    }

    pub fn gates(&self) -> BTreeMap<usize, Gate> {
        let mut out = BTreeMap::new();
        self.root.visit(&mut Vec::new(), &mut |_, n| {
            out.insert(n.id, n.gate);
        });
        out
    }

    pub fn size(&self) -> usize {
        let mut k = 0;
        self.root.visit(&mut Vec::new(), &mut |_, _| k += 1);
        k
    }

    /// The eigenvariable condition: each eigenvariable is introduced once
    /// and occurs only above or to the right of its introduction.
    pub fn audit(&self) -> std::result::Result<(), CheckFailure> {
        fn go(n: &TNode, path: &mut Vec<usize>, seen: &mut BTreeSet<u32>, intro: &mut BTreeSet<u32>) -> std::result::Result<(), CheckFailure> {
            let fail = |path: &[usize], reason: String| CheckFailure { path: path.to_vec(), sequent: n.sequent.to_string(), reason };
            seen.extend(n.sequent.free_vars());
            if let Some(a) = n.eigenvariable {
                if !intro.insert(a) || seen.contains(&a) {
                    return Err(fail(path, format!("eigenvariable a{a} is not fresh")));
                }
            }
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                if let Some(a) = n.son_eigenvariables.get(i).copied().flatten() {
                    if !intro.insert(a) || seen.contains(&a) {
                        return Err(fail(path, format!("eigenvariable a{a} is not fresh")));
                    }
                }
                go(c, path, seen, intro)?;
                path.pop();
            }
            Ok(())
        }
        go(&self.root, &mut Vec::new(), &mut BTreeSet::new(), &mut BTreeSet::new())
    }

    /// All transferable pairs with `lh(ρ) ≤ max_lh`, shortest `ρ` first.
    pub fn find_transferable_pairs(&self, max_lh: Option<usize>) -> Vec<TransferablePair> {
        let mut out = Vec::new();
        self.root.visit(&mut Vec::new(), &mut |rho_path, rho| {
            if rho.rule != Rule::Wbr || !rho.continued || max_lh.is_some_and(|k| rho_path.len() > k) {
                return;
            }
            let mut zeros = Vec::new();
            zero_line(&rho.children[0], &mut vec![0], &mut zeros);
            let mut arms = Vec::new();
            for (i, c) in rho.children.iter().enumerate().skip(1) {
                c.visit(&mut vec![i], &mut |p, n| {
                    if !n.sequent.is_axiom() {
                        arms.push((p.to_vec(), n));
                    }
                });
            }
            for (k0, s0) in &zeros {
                let atoms: Vec<&Formula> = s0.sequent.ante.marked().filter(|f| matches!(f, Formula::Atom(..))).collect();
                for (k1, s1) in &arms {
                    if let Some(a) = atoms.iter().find(|a| s1.sequent.succ.is_marked(a)) {
                        let join = |k: &[usize]| rho_path.iter().chain(k).copied().collect::<Vec<_>>();
                        out.push(TransferablePair { sigma0: join(k0), sigma1: join(k1), rho: rho_path.to_vec(), atom: (*a).clone() });
                    }
                }
            }
        });
        out.sort_by(|a, b| (a.rho.len(), &a.rho, &a.sigma0, &a.sigma1).cmp(&(b.rho.len(), &b.rho, &b.sigma0, &b.sigma1)));
        out
    }

    fn is_transferable(&self, p: &TransferablePair) -> bool {
        self.find_transferable_pairs(Some(p.rho.len())).iter().any(|q| q.sigma0 == p.sigma0 && q.sigma1 == p.sigma1 && q.rho == p.rho && q.atom == p.atom)
    }

    fn renumber(&mut self, n: &TNode, map: &BTreeMap<u32, u32>) -> TNode {
        let children = n.children.iter().map(|c| self.renumber(c, map)).collect();
        let r = |v: Option<u32>| v.map(|a| *map.get(&a).unwrap_or(&a));
        TNode {
            id: self.id(),
            sequent: n.sequent.rename_free(map),
            principal: n.principal.as_ref().map(|f| f.rename_free(map)),
            eigenvariable: r(n.eigenvariable),
            terms: n.terms.iter().map(|t| t.rename_free(map)).collect(),
            son_principals: n.son_principals.iter().map(|p| p.as_ref().map(|f| f.rename_free(map))).collect(),
            son_eigenvariables: n.son_eigenvariables.iter().map(|&v| r(v)).collect(),
            children,
            ..n.clone()
        }
    }

    /// Transfers the tree by `pair`.
    pub fn transfer_step(&mut self, pair: &TransferablePair) -> Result<()> {
        if !self.is_transferable(pair) {
            return Err(Error::Mode("the pair is not transferable in the current tree".into()));
        }
        let rho = self.root.at(&pair.rho).expect("checked").clone();
        let k0 = &pair.sigma0[pair.rho.len()..];
        let k1 = &pair.sigma1[pair.rho.len()..];
        let sigma0 = rho.at(k0).expect("checked").clone();
        let sigma1 = rho.at(k1).expect("checked").clone();
        let lower = rho.sequent.clone();
        let d0 = rho.children[0].clone();

        // α°Π₀ * d₀′ * Λ₀: d₀ up to σ₀ with fresh eigenvariables, ending in
        // the leaf `α°, Π₀, α′°, Π₀′ ⇒ Λ₀′, Λ₀`.
        let mut used = BTreeSet::new();
        eigenvariables_in(&truncate(&d0, &k0[1..]), &mut used);
        let mut map = BTreeMap::new();
        for a in used {
            map.insert(a, self.next_var);
            self.next_var += 1;
        }
        let copy = self.renumber(&truncate(&d0, &k0[1..]), &map);
        let mut copy = widen_all(&copy, &sigma0.sequent.ante, &sigma0.sequent.succ, true);
        let leaf_id = self.id();
        let tip = copy.at_mut(&k0[1..]).expect("same shape");
        *tip = TNode::leaf(leaf_id, tip.sequent.clone(), Rule::Leaf, Gate::Or);

        // α° * d₁ for every arm; σ₁ becomes the axiom.
        let alpha = Cedent::new().with(pair.atom.clone(), true);
        let empty = Cedent::new();
        let mut arms: Vec<TNode> = rho.children[1..].iter().map(|c| widen_all(c, &alpha, &empty, true)).collect();
        let ax = arms[k1[0] - 1].at_mut(&k1[1..]).expect("same shape");
        *ax = TNode::leaf(sigma1.id, widen_sequent(&sigma1.sequent, &alpha, &empty), Rule::AxiomT, Gate::One);

        let mut children = vec![copy];
        children.extend(arms);
        let new_wbr = TNode {
            id: sigma0.id,
            sequent: widen_sequent(&sigma0.sequent, &lower.ante, &lower.succ),
            rule: Rule::Wbr,
            principal: None,
            eigenvariable: None,
            terms: Vec::new(),
            gate: sigma0.gate,
            children,
            continued: true,
            son_principals: rho.son_principals.clone(),
            son_eigenvariables: rho.son_eigenvariables.clone(),
        };

        // Γ₂ * d₀ * Δ₂ below the new (wbr), under (∘).
        let upper = replace_widened(&d0, &k0[1..], &lower.ante, &lower.succ, new_wbr);
        let circ = TNode {
            rule: Rule::Circ,
            continued: false,
            son_principals: Vec::new(),
            son_eigenvariables: Vec::new(),
            children: vec![upper],
            ..rho
        };
        *self.root.at_mut(&pair.rho).expect("checked") = circ;
        self.next_var = self.next_var.max(self.root.max_var().map_or(0, |m| m + 1));
        Ok(())
    }

    /// Transfers minimal pairs with `lh(ρ) ≤ depth` until none is left,
    /// auditing eigenvariables and gate monotonicity after every step.
    pub fn transfer_to_fixpoint(&mut self, depth: usize, max_steps: usize) -> Result<TransferReport> {
        let mut report = TransferReport::default();
        loop {
            let pairs = self.find_transferable_pairs(Some(depth));
            let Some(p) = pairs.first() else { return Ok(report) };
            if report.steps == max_steps {
                return Err(Error::Limit(format!("no transfer fixpoint within {max_steps} steps")));
            }
            let before = self.gates();
            self.transfer_step(p)?;
            self.recompute_gates();
            self.audit().map_err(|e| Error::Check(e.to_string()))?;
            let after = self.gates();
            for (id, g) in &before {
                if let Some(&h) = after.get(id) {
                    if rank(h) < rank(*g) {
                        return Err(Error::Check(format!("gate of node {id} decreased from {} to {}", g.symbol(), h.symbol())));
                    }
                }
            }
            report.steps += 1;
            report.axioms.push(p.sigma1.clone());
        }
    }
}

/// What a transfer loop did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferReport {
    pub steps: usize,
    /// The `σ₁` of every step, which became an axiom.
    pub axioms: Vec<Vec<usize>>,
}

// (wbr) nodes on the continued line of `n`, with their paths.
fn zero_line<'a>(n: &'a TNode, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a TNode)>) {
    if n.rule == Rule::Wbr {
        out.push((path.clone(), n));
        if n.continued {
            path.push(0);
            zero_line(&n.children[0], path, out);
            path.pop();
        }
        return;
    }
    for (i, c) in n.children.iter().enumerate() {
        path.push(i);
        zero_line(c, path, out);
        path.pop();
    }
}

// `n` with the subtree at `path` cut to a leaf.
fn truncate(n: &TNode, path: &[usize]) -> TNode {
    match path.split_first() {
        None => TNode { children: Vec::new(), son_principals: Vec::new(), son_eigenvariables: Vec::new(), continued: false, ..n.clone() },
        Some((&i, rest)) => {
            let mut out = n.clone();
            out.children[i] = truncate(&n.children[i], rest);
            out
        }
    }
}

// `n` widened along `path`, with the node at `path` replaced by `tip`. Off
// the path, inversion branches are widened and (wbr) arms left alone.
fn replace_widened(n: &TNode, path: &[usize], ante: &Cedent, succ: &Cedent, tip: TNode) -> TNode {
    let Some((&i, rest)) = path.split_first() else { return tip };
    let mut tip = Some(tip);
    let children = n
        .children
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if j == i {
                replace_widened(c, rest, ante, succ, tip.take().expect("once"))
            } else if n.is_arm(j) {
                c.clone()
            } else {
                widen_all(c, ante, succ, false)
            }
        })
        .collect();
    TNode { sequent: widen_sequent(&n.sequent, ante, succ), children, ..n.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;

    fn staged(t: &str, stages: usize) -> StagedTree {
        let mut tree = StagedTree::new(&parse_sequent(t).unwrap());
        for _ in 0..stages {
            tree.advance().unwrap();
        }
        tree
    }

    #[test]
    fn propositional_trees_have_no_pairs() {
        for t in ["|- (p -> q) | (q -> p)", "p -> q |- (r -> p) -> (r -> q)", "|- ~~(p | ~p)"] {
            let tt = TransferTree::from_staged(&staged(t, 6));
            assert!(tt.find_transferable_pairs(None).is_empty(), "{t}");
        }
    }

    const LATE: &str = "forall x. P(x) |- q -> P(f(a0))";

    #[test]
    fn late_instance_clashes_with_an_arm() {
        assert!(TransferTree::from_staged(&staged(LATE, 5)).find_transferable_pairs(None).is_empty());
        let tt = TransferTree::from_staged(&staged(LATE, 7));
        let pairs = tt.find_transferable_pairs(None);
        assert!(!pairs.is_empty());
        assert_eq!(pairs[0].atom.to_string(), "P(f(a0))");
        assert!(pairs[0].rho.is_empty());
        assert!(pairs.windows(2).all(|w| w[0].rho.len() <= w[1].rho.len()));
    }

    #[test]
    fn transfer_makes_an_axiom_and_removes_the_pair() {
        let mut tt = TransferTree::from_staged(&staged(LATE, 7));
        let p = tt.find_transferable_pairs(None)[0].clone();
        tt.transfer_step(&p).unwrap();
        tt.audit().unwrap();
        assert_eq!(tt.root.at(&p.rho).unwrap().rule, Rule::Circ);
        assert!(tt.find_transferable_pairs(None).iter().all(|q| q.rho != p.rho));
        let moved: Vec<usize> = p.sigma0.iter().chain(&p.sigma1[p.rho.len()..]).copied().collect();
        let ax = tt.root.at(&moved).unwrap();
        assert_eq!(ax.rule, Rule::AxiomT);
        assert_eq!(ax.gate, Gate::One);
        assert!(ax.sequent.is_axiom());
        assert!(tt.transfer_step(&p).is_err());
    }

    #[test]
    fn copies_get_fresh_eigenvariables() {
        let mut tt = TransferTree::from_staged(&staged("forall x. exists y. Q(x, y), forall x. P(x) |- q -> P(f(a0))", 7));
        let before = tt.root.max_var().unwrap();
        let p = tt.find_transferable_pairs(None)[0].clone();
        tt.transfer_step(&p).unwrap();
        assert!(tt.root.max_var().unwrap() > before);
        tt.audit().unwrap();
    }

    #[test]
    fn fixpoint_with_monotone_gates() {
        let mut tt = TransferTree::from_staged(&staged("forall x. P(x) |- (q -> P(f(a0))) & (r -> P(f(f(a0))))", 9));
        let r = tt.transfer_to_fixpoint(8, 100).unwrap();
        assert!(r.steps >= 2);
        assert!(tt.find_transferable_pairs(Some(8)).is_empty());
        assert_eq!(tt.root.gate, Gate::One);
    }

    #[test]
    fn gatechange_is_monotone() {
        let mut tt = TransferTree::from_staged(&staged(LATE, 3));
        let leaf = tt.root.at_mut(&[0, 0]).unwrap();
        assert_eq!(leaf.rule, Rule::Leaf);
        let before = tt.gates();
        tt.root.at_mut(&[0, 0]).unwrap().gate = Gate::One;
        tt.recompute_gates();
        assert_eq!(tt.root.gate, Gate::One);
        for (id, g) in before {
            assert!(rank(tt.gates()[&id]) >= rank(g));
        }
    }
}
