//! Bounded staged search for full LJm.
//!
//! `TR(S₀)_n` is grown stage by stage: even stages put `Tr_σ` on every
//! ∧-leaf, odd stages put (br) on every ∨-leaf. Only finite truncations are
//! built, so the search semi-decides derivability and reports underivability
//! only from finite closed evidence, checked semantically.
//!
//! A ∨-leaf is *stable* when it repeats the sequent of a ∨-ancestor (marks
//! included) and no new term can ever be tested at it: the signature has no
//! function symbols and every variable in play is already instantiated. Its
//! (br) would reproduce the ancestor's sons up to eigenvariables, so it is not
//! expanded; in the countermodel it loops back to the ancestor.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::{self, Calculus, Fresh, LeafKind};
use crate::error::{Error, Result};
use crate::kripke::{self, KripkeModel, ModelKind, World};
use crate::rules::{self, CheckFailure, Deduction, Rule};
use crate::search::{expand_instances, Countermodel, Gate, Verdict};
use crate::sequent::Sequent;
use crate::syntax::{enumerate_terms, Connective, Formula, Signature, Term};

/// Default cap on the number of nodes of a truncation.
pub const DEFAULT_MAX_NODES: usize = 200_000;

#[derive(Clone, Debug)]
pub struct StagedNode {
    pub addr: Vec<usize>,
    pub parent: Option<usize>,
    pub sequent: Sequent,
    pub gate: Gate,
    /// `d(σ)`: `Tr_σ` at expanded ∧-nodes.
    pub deduction: Option<Deduction>,
    pub children: Vec<usize>,
    pub expanded: bool,
    /// For non-invertible (br) uppers: the analyzed succedent formula.
    pub principal: Option<Formula>,
    pub eigenvariable: Option<u32>,
    /// `FV(σ)`; `{a0}` at a root without free variables.
    pub fv: BTreeSet<u32>,
    /// `FV_⊂ₑ(σ)` as used for `Tr_σ`.
    pub fv_e: Option<BTreeSet<u32>>,
    /// For stable ∨-leaves: the ancestor they repeat.
    pub stable: Option<usize>,
}

impl StagedNode {
    pub fn lh(&self) -> usize {
        self.addr.len()
    }

    /// Son of a ∨-node through the continued sequent.
    pub fn is_continued(&self) -> bool {
        self.addr.last() == Some(&0) && self.principal.is_none()
    }
}

/// A finite piece `TR(S₀)_n` with its labels.
#[derive(Clone, Debug)]
pub struct StagedTree {
    pub nodes: Vec<StagedNode>,
    /// The next stage to run; every node has `lh(σ) ≤ stage`.
    pub stage: usize,
    pub sig: Signature,
    pub fresh: Fresh,
    pub max_nodes: usize,
}

fn fv_of_root(s: &Sequent) -> BTreeSet<u32> {
    let fv = s.free_vars();
    if fv.is_empty() {
        [0].into()
    } else {
        fv
    }
}

fn has_pending_quantifier(s: &Sequent) -> bool {
    s.ante.of(Connective::Forall).next().is_some() || s.succ.of(Connective::Exists).next().is_some()
}

fn gate_of_upper(s: &Sequent) -> Gate {
    if s.is_axiom() {
        Gate::One
    } else if analysis::is_fully_analyzed(s) && !has_pending_quantifier(s) {
        Gate::Zero
    } else {
        Gate::And
    }
}

impl StagedTree {
    pub fn new(s0: &Sequent) -> StagedTree {
        let root = s0.mark_all();
        let gate = gate_of_upper(&root);
        let node = StagedNode {
            addr: Vec::new(),
            parent: None,
            fv: fv_of_root(&root),
            sequent: root,
            gate,
            deduction: None,
            children: Vec::new(),
            expanded: false,
            principal: None,
            eigenvariable: None,
            fv_e: None,
            stable: None,
        };
        StagedTree {
            nodes: vec![node],
            stage: 0,
            sig: s0.signature(),
            fresh: Fresh::above(s0),
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn root(&self) -> &StagedNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Leaves still waiting for the stage of their gate.
    pub fn frontier(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| {
                let n = &self.nodes[i];
                !n.expanded && n.stable.is_none() && matches!(n.gate, Gate::And | Gate::Or)
            })
            .collect()
    }

    /// `⋃{FV(τ) : σ ⊂ₑ⁰ τ}` for every node.
    fn fv_zero_reach(&self) -> Vec<BTreeSet<u32>> {
        let mut out: Vec<BTreeSet<u32>> = self.nodes.iter().map(|n| n.fv.clone()).collect();
        for i in (0..self.nodes.len()).rev() {
            let n = &self.nodes[i];
            let sons: Vec<usize> = match n.gate {
                Gate::Or => n.children.iter().copied().filter(|&c| self.nodes[c].is_continued()).collect(),
                _ => n.children.clone(),
            };
            for c in sons {
                let extra = out[c].clone();
                out[i].extend(extra);
            }
        }
        out
    }

    /// `FV_⊂ₑ(σ)` for every node of the current piece.
    pub fn fv_e_all(&self) -> Vec<BTreeSet<u32>> {
        let zero = self.fv_zero_reach();
        let mut out: Vec<BTreeSet<u32>> = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let mut s = n.parent.map(|p| out[p].clone()).unwrap_or_default();
            s.extend(zero[i].iter().copied());
            out.push(s);
        }
        out
    }

    fn push(&mut self, parent: usize, index: usize, sequent: Sequent, gate: Gate) -> Result<usize> {
        if self.nodes.len() >= self.max_nodes {
            return Err(Error::Limit(format!("truncation exceeded {} nodes", self.max_nodes)));
        }
        let mut addr = self.nodes[parent].addr.clone();
        addr.push(index);
        let i = self.nodes.len();
        self.nodes.push(StagedNode {
            addr,
            parent: Some(parent),
            fv: sequent.free_vars(),
            sequent,
            gate,
            deduction: None,
            children: Vec::new(),
            expanded: false,
            principal: None,
            eigenvariable: None,
            fv_e: None,
            stable: None,
        });
        self.nodes[parent].children.push(i);
        Ok(i)
    }

    fn stable_target(&self, leaf: usize, vars: &BTreeSet<u32>) -> Option<usize> {
        let s = &self.nodes[leaf].sequent;
        if has_pending_quantifier(s) {
            if self.sig.has_functions() {
                return None;
            }
            let mut all = vars.clone();
            all.extend(s.free_vars());
            let terms: Vec<Term> = all.into_iter().map(Term::Free).collect();
            if !analysis::is_saturated_with(s, Some(&terms)) {
                return None;
            }
        }
        let mut cur = self.nodes[leaf].parent;
        while let Some(a) = cur {
            let n = &self.nodes[a];
            if n.gate == Gate::Or && n.sequent == *s {
                return Some(a);
            }
            cur = n.parent;
        }
        None
    }

    fn and_stage(&mut self, frontier: &[usize]) -> Result<()> {
        let fve = self.fv_e_all();
        let n = self.stage;
        for &i in frontier {
            let a = fve[i].clone();
            let terms = enumerate_terms(&a, n, &self.sig);
            let calc = Calculus::Staged { terms: &terms };
            let d = analysis::build_tr(&self.nodes[i].sequent, calc, &mut self.fresh);
            let leaves: Vec<(Sequent, Rule)> = d.leaves().iter().map(|l| (l.sequent.clone(), l.rule)).collect();
            for (k, (s, rule)) in leaves.into_iter().enumerate() {
                let gate = if matches!(rule, Rule::AxiomT | Rule::AxiomBot) {
                    Gate::One
                } else {
                    match analysis::classify_leaf(&s, calc) {
                        LeafKind::Axiom => Gate::One,
                        LeafKind::FullyAnalyzed => Gate::Zero,
                        LeafKind::NonInvertible => Gate::Or,
                    }
                };
                let c = self.push(i, k, s, gate)?;
                if gate == Gate::Or {
                    self.nodes[c].stable = self.stable_target(c, &a);
                }
            }
            let node = &mut self.nodes[i];
            node.deduction = Some(d);
            node.fv_e = Some(a);
            node.expanded = true;
        }
        Ok(())
    }

    fn or_stage(&mut self, frontier: &[usize]) -> Result<()> {
        for &i in frontier {
            let s = self.nodes[i].sequent.clone();
            let (continued, uppers) = analysis::branch_rule_full(&s, &mut self.fresh);
            if let Some(c) = continued {
                self.push(i, 0, c.sequent, Gate::And)?;
            }
            for (j, u) in uppers.into_iter().enumerate() {
                let gate = gate_of_upper(&u.sequent);
                let c = self.push(i, j + 1, u.sequent, gate)?;
                self.nodes[c].principal = u.principal;
                self.nodes[c].eigenvariable = u.eigenvariable;
            }
            self.nodes[i].expanded = true;
        }
        Ok(())
    }

    /// Runs stage `n`, producing `TR(S₀)_{n+1}`. Returns whether anything
    /// was extended.
    pub fn advance(&mut self) -> Result<bool> {
        let want = if self.stage.is_multiple_of(2) { Gate::And } else { Gate::Or };
        let frontier: Vec<usize> = self.frontier().into_iter().filter(|&i| self.nodes[i].gate == want).collect();
        let any = !self.frontier().is_empty();
        if want == Gate::And {
            self.and_stage(&frontier)?;
        } else {
            self.or_stage(&frontier)?;
        }
        self.stage += 1;
        Ok(any)
    }

    /// Three-valued gate values: unexpanded leaves are unknown, stable
    /// leaves count as 0.
    pub fn values(&self) -> Vec<Option<u8>> {
        let mut v: Vec<Option<u8>> = vec![None; self.nodes.len()];
        for i in (0..self.nodes.len()).rev() {
            let n = &self.nodes[i];
            v[i] = match n.gate {
                Gate::One => Some(1),
                Gate::Zero => Some(0),
                _ if n.stable.is_some() => Some(0),
                _ if !n.expanded => None,
                Gate::And => and_value(n.children.iter().map(|&c| v[c])),
                Gate::Or => or_value(n.children.iter().map(|&c| v[c])),
            };
        }
        v
    }

    pub fn root_value(&self) -> Option<u8> {
        self.values()[0]
    }

    /// `De(S₀)` as a single deduction: `Tr_σ` at ∧-nodes, (br) at ∨-nodes,
    /// unexpanded leaves as leaves. A (br) son with an eigenvariable sits
    /// under a node that records it.
    pub fn de(&self) -> Deduction {
        self.de_at(0)
    }

    fn de_at(&self, i: usize) -> Deduction {
        let n = &self.nodes[i];
        if !n.expanded {
            return match n.gate {
                Gate::One => Deduction::axiom(n.sequent.clone()),
                _ => Deduction::leaf(n.sequent.clone()),
            };
        }
        match n.gate {
            Gate::And => {
                let d = n.deduction.clone().expect("expanded ∧-nodes carry Tr");
                d.graft(&mut n.children.iter().map(|&c| self.de_at(c)))
            }
            _ => {
                let children = n
                    .children
                    .iter()
                    .map(|&c| {
                        let son = &self.nodes[c];
                        let sub = self.de_at(c);
                        match (son.eigenvariable, &son.principal) {
                            (Some(a), Some(p)) => Deduction {
                                eigenvariable: Some(a),
                                ..Deduction::node(n.sequent.clone(), Rule::AllR, p.clone(), vec![sub])
                            },
                            _ => sub,
                        }
                    })
                    .collect();
                Deduction { sequent: n.sequent.clone(), rule: Rule::Br, principal: None, eigenvariable: None, terms: Vec::new(), children }
            }
        }
    }

    /// The eigenvariable condition on the whole of `De(S₀)`.
    pub fn audit(&self) -> std::result::Result<(), CheckFailure> {
        rules::audit_eigenvariables(&self.de())
    }
}

fn and_value(vs: impl Iterator<Item = Option<u8>>) -> Option<u8> {
    let mut all = true;
    for v in vs {
        match v {
            Some(0) => return Some(0),
            Some(_) => {}
            None => all = false,
        }
    }
    all.then_some(1)
}

fn or_value(vs: impl Iterator<Item = Option<u8>>) -> Option<u8> {
    let mut all = true;
    for v in vs {
        match v {
            Some(1) => return Some(1),
            Some(_) => {}
            None => all = false,
        }
    }
    all.then_some(0)
}

fn derivation_at(tree: &StagedTree, values: &[Option<u8>], i: usize) -> Deduction {
    let n = &tree.nodes[i];
    match n.gate {
        Gate::One => Deduction::axiom(n.sequent.clone()),
        Gate::And => {
            let d = n.deduction.clone().expect("expanded ∧-nodes carry Tr");
            d.graft(&mut n.children.iter().map(|&c| derivation_at(tree, values, c)))
        }
        Gate::Or => {
            let &c = n.children.iter().find(|&&c| values[c] == Some(1)).expect("value-1 son");
            let son = &tree.nodes[c];
            let Some(p) = son.principal.clone() else {
                return derivation_at(tree, values, c);
            };
            let rule = if p.connective() == Connective::Forall { Rule::AllR } else { Rule::ImpR };
            Deduction {
                eigenvariable: son.eigenvariable,
                ..Deduction::node(n.sequent.clone(), rule, p, vec![derivation_at(tree, values, c)])
            }
        }
        Gate::Zero => unreachable!("value-1 nodes have no gate-0 sons on the chosen path"),
    }
}

/// The cut-free derivation read off a truncation of value 1, marks erased.
pub fn extract_staged_derivation(tree: &StagedTree) -> Result<Deduction> {
    let values = tree.values();
    if values[0] != Some(1) {
        return Err(Error::Mode("the truncation does not evaluate to 1".into()));
    }
    Ok(expand_instances(derivation_at(tree, &values, 0)).erased().freshen_eigenvariables())
}

/// The subtree `T` of a truncation of value 0: one value-0 son at each
/// ∧-node, every son at each ∨-node.
pub fn select_refuting_subtree(tree: &StagedTree) -> Option<BTreeSet<usize>> {
    let values = tree.values();
    if values[0] != Some(0) {
        return None;
    }
    let mut t = BTreeSet::new();
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        t.insert(i);
        let n = &tree.nodes[i];
        if !n.expanded || n.stable.is_some() {
            continue;
        }
        match n.gate {
            Gate::And => stack.push(*n.children.iter().find(|&&c| values[c] == Some(0))?),
            _ => stack.extend(n.children.iter().copied()),
        }
    }
    Some(t)
}

/// `Γ∞`, `Γ∞_⊂ₑ`, `Δ∞`, `FV∞` and `FV∞_⊂ₑ` over a subtree `T`, marks erased.
#[derive(Clone, Debug, Default)]
pub struct TruncationSets {
    pub gamma_inf: BTreeMap<usize, BTreeSet<Formula>>,
    pub gamma_inf_e: BTreeMap<usize, BTreeSet<Formula>>,
    pub delta_inf: BTreeMap<usize, BTreeSet<Formula>>,
    pub fv_inf: BTreeMap<usize, BTreeSet<u32>>,
    pub fv_inf_e: BTreeMap<usize, BTreeSet<u32>>,
}

/// The sons of `i` reachable through `⊂ₑ⁰` inside `t`.
fn zero_sons<'a>(tree: &'a StagedTree, t: &'a BTreeSet<usize>, i: usize) -> impl Iterator<Item = usize> + 'a {
    let n = &tree.nodes[i];
    n.children
        .iter()
        .copied()
        .filter(move |c| t.contains(c) && (n.gate != Gate::Or || tree.nodes[*c].is_continued()))
}

/// Computes the sets for every node of `t`.
pub fn truncation_sets(tree: &StagedTree, t: &BTreeSet<usize>) -> Result<TruncationSets> {
    check_subtree(tree, t)?;
    let mut sets = TruncationSets::default();
    for &i in t.iter().rev() {
        let n = &tree.nodes[i];
        let (g, d) = n.sequent.erased();
        let mut g = g;
        let mut d = d;
        let mut fv = n.fv.clone();
        for c in zero_sons(tree, t, i).collect::<Vec<_>>() {
            g.extend(sets.gamma_inf[&c].iter().cloned());
            d.extend(sets.delta_inf[&c].iter().cloned());
            fv.extend(sets.fv_inf[&c].iter().copied());
        }
        sets.gamma_inf.insert(i, g);
        sets.delta_inf.insert(i, d);
        sets.fv_inf.insert(i, fv);
    }
    for &i in t {
        let parent = tree.nodes[i].parent;
        let mut g = parent.map(|p| sets.gamma_inf_e[&p].clone()).unwrap_or_default();
        let mut fv = parent.map(|p| sets.fv_inf_e[&p].clone()).unwrap_or_default();
        g.extend(sets.gamma_inf[&i].iter().cloned());
        fv.extend(sets.fv_inf[&i].iter().copied());
        sets.gamma_inf_e.insert(i, g);
        sets.fv_inf_e.insert(i, fv);
    }
    Ok(sets)
}

fn check_subtree(tree: &StagedTree, t: &BTreeSet<usize>) -> Result<()> {
    if !t.contains(&0) {
        return Err(Error::Mode("a subtree must contain the root".into()));
    }
    for &i in t {
        let n = tree.nodes.get(i).ok_or_else(|| Error::Mode(format!("no node {i}")))?;
        if n.gate == Gate::One {
            return Err(Error::Mode(format!("node {i} has gate 1")));
        }
        if let Some(p) = n.parent {
            if !t.contains(&p) {
                return Err(Error::Mode(format!("node {i} is in the subtree but its parent is not")));
            }
        }
    }
    Ok(())
}

/// A subtree together with its Kripke model `⟨T, ⊂ₑ, D_T, I_T⟩`.
#[derive(Clone, Debug)]
pub struct SubtreeModel {
    pub subtree: BTreeSet<usize>,
    pub sets: TruncationSets,
    pub model: KripkeModel,
    /// World of each node of the subtree.
    pub world_of: BTreeMap<usize, usize>,
    pub world_nodes: Vec<usize>,
    pub tree_edges: Vec<(usize, usize)>,
    /// Edges from stable leaves back to the ∨-nodes they repeat.
    pub loop_edges: Vec<(usize, usize)>,
}

/// Builds the model of `t`: worlds are the nodes of `t`, `D_T(σ)` is
/// `Tm(FV∞_⊂ₑ(σ;T))` and `R^σ` is read from `Γ∞_⊂ₑ(σ;T)`.
pub fn build_model_from_subtree(tree: &StagedTree, t: &BTreeSet<usize>) -> Result<SubtreeModel> {
    let sets = truncation_sets(tree, t)?;
    let world_nodes: Vec<usize> = t.iter().copied().collect();
    let world_of: BTreeMap<usize, usize> = world_nodes.iter().enumerate().map(|(w, &i)| (i, w)).collect();
    let worlds = world_nodes
        .iter()
        .map(|i| {
            let vars = sets.fv_inf_e[i].clone();
            let atoms = sets.gamma_inf_e[i]
                .iter()
                .filter(|f| matches!(f, Formula::Atom(..)) && f.free_vars().is_subset(&vars))
                .cloned()
                .collect();
            World { atoms, vars }
        })
        .collect();
    let mut tree_edges = Vec::new();
    let mut loop_edges = Vec::new();
    for &i in &world_nodes {
        if let Some(p) = tree.nodes[i].parent {
            tree_edges.push((world_of[&p], world_of[&i]));
        }
        if let Some(a) = tree.nodes[i].stable {
            loop_edges.push((world_of[&i], world_of[&a]));
        }
    }
    let edges = tree_edges.iter().chain(&loop_edges).copied().collect();
    let model = KripkeModel::new(ModelKind::Predicate, worlds, edges, 0).with_functions(&tree.sig);
    Ok(SubtreeModel { subtree: t.clone(), sets, model, world_of, world_nodes, tree_edges, loop_edges })
}

fn instances(f: &Formula, vars: &BTreeSet<u32>) -> Vec<Formula> {
    vars.iter().map(|&a| f.instantiate(&Term::Free(a)).expect("quantifier")).collect()
}

impl SubtreeModel {
    /// The conditions under which the model refutes every node: each
    /// `Γ∞_⊂ₑ ⇒ Δ∞` pair is `FV∞_⊂ₑ`-analyzed, succedent implications and
    /// universal formulas have witnessing extensions, and each ∧-node has a
    /// unique son in the subtree. Returns the first violation.
    pub fn check_countermodel_conditions(&self, tree: &StagedTree) -> std::result::Result<(), String> {
        for &i in &self.subtree {
            let n = &tree.nodes[i];
            if n.gate == Gate::And && n.expanded && n.children.iter().filter(|c| self.subtree.contains(c)).count() != 1 {
                return Err(format!("∧-node {:?} has no unique son in the subtree", n.addr));
            }
            let g = &self.sets.gamma_inf_e[&i];
            let d = &self.sets.delta_inf[&i];
            let a = &self.sets.fv_inf_e[&i];
            let w = self.world_of[&i];
            let at = |what: String| format!("node {:?}: {what}", n.addr);
            if g.contains(&Formula::Bot) {
                return Err(at("⊥ in the antecedent".into()));
            }
            if let Some(f) = g.iter().find(|f| f.is_atomic() && d.contains(f)) {
                return Err(at(format!("common atom {f}")));
            }
            let infinite = tree.sig.has_functions();
            for f in g {
                let ok = match f {
                    Formula::Or(x, y) => g.contains(x) || g.contains(y),
                    Formula::And(x, y) => g.contains(x) && g.contains(y),
                    Formula::Implies(x, y) => d.contains(x) || g.contains(y),
                    Formula::Exists(..) => g.iter().any(|h| h.free_vars().iter().any(|&v| f.instantiate(&Term::Free(v)).as_ref() == Some(h))),
                    Formula::Forall(..) => !infinite && instances(f, a).iter().all(|h| g.contains(h)),
                    _ => true,
                };
                if !ok {
                    return Err(at(format!("{f} is not analyzed in the antecedent")));
                }
            }
            for f in d {
                let ok = match f {
                    Formula::Or(x, y) => d.contains(x) && d.contains(y),
                    Formula::And(x, y) => d.contains(x) || d.contains(y),
                    Formula::Exists(..) => !infinite && instances(f, a).iter().all(|h| d.contains(h)),
                    Formula::Implies(x, y) => self.model.above(w).iter().any(|&v| {
                        let j = self.world_nodes[v];
                        self.sets.gamma_inf_e[&j].contains(x) && self.sets.delta_inf[&j].contains(y)
                    }),
                    Formula::Forall(..) => self.model.above(w).iter().any(|&v| {
                        let j = self.world_nodes[v];
                        instances(f, &self.sets.fv_inf_e[&j]).iter().any(|h| self.sets.delta_inf[&j].contains(h))
                    }),
                    _ => true,
                };
                if !ok {
                    return Err(at(format!("{f} is not analyzed in the succedent")));
                }
            }
        }
        Ok(())
    }

    pub fn countermodel(&self, tree: &StagedTree) -> Countermodel {
        Countermodel {
            model: self.model.clone(),
            world_nodes: self.world_nodes.clone(),
            world_sequents: self.world_nodes.iter().map(|&i| tree.nodes[i].sequent.erase()).collect(),
            tree_edges: self.tree_edges.clone(),
            loop_edges: self.loop_edges.clone(),
        }
    }
}

/// Why a staged search stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct StagedStats {
    pub stages: usize,
    pub nodes: usize,
}

/// Grows `TR(S₀)_n` up to `n = depth_budget` and reads off a verdict.
pub fn search_staged(s0: &Sequent, depth_budget: usize) -> Result<Verdict> {
    Ok(search_staged_with_tree(s0, depth_budget, DEFAULT_MAX_NODES)?.0)
}

/// As [`search_staged`], also returning the final truncation.
pub fn search_staged_with_tree(s0: &Sequent, depth_budget: usize, max_nodes: usize) -> Result<(Verdict, StagedTree)> {
    if depth_budget == 0 {
        return Err(Error::Mode("the depth budget must be at least 1".into()));
    }
    let mut tree = StagedTree::new(s0);
    tree.max_nodes = max_nodes;
    loop {
        match tree.root_value() {
            Some(1) => {
                let d = extract_staged_derivation(&tree)?;
                return Ok((Verdict::Derivable(d), tree));
            }
            Some(0) => {
                let verdict = refute(&tree, s0)?.map_or(Verdict::Unknown, Verdict::Underivable);
                return Ok((verdict, tree));
            }
            _ => {}
        }
        if tree.stage >= depth_budget {
            return Ok((Verdict::Unknown, tree));
        }
        match tree.advance() {
            Ok(true) => {}
            Ok(false) => return Ok((Verdict::Unknown, tree)),
            Err(Error::Limit(_)) => return Ok((Verdict::Unknown, tree)),
            Err(e) => return Err(e),
        }
    }
}

fn refute(tree: &StagedTree, s0: &Sequent) -> Result<Option<Countermodel>> {
    let Some(t) = select_refuting_subtree(tree) else { return Ok(None) };
    let sm = build_model_from_subtree(tree, &t)?;
    if sm.model.validate().is_err() || sm.check_countermodel_conditions(tree).is_err() {
        return Ok(None);
    }
    if !kripke::falsifies(&sm.model, sm.model.root, s0)? {
        return Ok(None);
    }
    Ok(Some(sm.countermodel(tree)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;

    fn run(t: &str, depth: usize) -> Verdict {
        search_staged(&parse_sequent(t).unwrap(), depth).unwrap()
    }

    #[test]
    fn universal_gives_existential() {
        let Verdict::Derivable(d) = run("forall x. P(x) |- exists y. P(y)", 6) else { panic!("not derived") };
        rules::check_derivation(&d).unwrap();
        rules::audit_eigenvariables(&d).unwrap();
    }

    #[test]
    fn instance_of_universal() {
        let Verdict::Derivable(d) = run("forall x. P(x) |- P(a0)", 6) else { panic!("not derived") };
        rules::check_derivation(&d).unwrap();
    }

    #[test]
    fn existential_does_not_give_universal() {
        let s = parse_sequent("exists y. P(y) |- forall x. P(x)").unwrap();
        let Verdict::Underivable(m) = search_staged(&s, 6).unwrap() else { panic!("not refuted") };
        assert!(m.falsifies(&s).unwrap());
        m.model.validate().unwrap();
    }

    #[test]
    fn double_negated_excluded_middle_is_unknown() {
        assert!(matches!(run("|- ~~(forall x. (P(x) | ~P(x)))", 6), Verdict::Unknown));
    }

    #[test]
    fn stable_leaf_refutes_unused_universal() {
        let s = parse_sequent("forall x. P(x) |- q").unwrap();
        let Verdict::Underivable(m) = search_staged(&s, 10).unwrap() else { panic!("not refuted") };
        assert!(m.falsifies(&s).unwrap());
        assert!(!m.loop_edges.is_empty());
    }

    #[test]
    fn construction_respects_eigenvariable_condition() {
        let s = parse_sequent("exists x. P(x), forall x. (P(x) -> Q(x)) |- forall y. Q(y) | exists z. R(z)").unwrap();
        let (_, tree) = search_staged_with_tree(&s, 8, 10_000).unwrap();
        tree.audit().unwrap();
    }

    #[test]
    fn continued_sequent_only() {
        let mut tree = StagedTree::new(&parse_sequent("forall x. P(x) |- q").unwrap());
        tree.advance().unwrap();
        tree.advance().unwrap();
        let sons = &tree.nodes[tree.nodes[1].children[0]];
        assert!(sons.is_continued());
        assert_eq!(tree.nodes[1].children.len(), 1);
    }
}
