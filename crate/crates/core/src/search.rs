//! The gated search tree `TR(S₀)` for LJpm and the positive fragment of LJm,
//! with derivation and countermodel extraction.
//!
//! An (br) upper sequent that repeats a sequent already analyzed on its
//! branch is closed as a loop leaf with gate 0. In the positive fragment two
//! sequents count as repeats when they agree after renaming the upper's
//! eigenvariable. The countermodel maps a loop leaf back onto the world of the
//! repeated sequent, so such models contain clusters.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::analysis::{self, BrSon, Calculus, Fresh, LeafKind};
use crate::error::{Error, Result};
use crate::kripke::{self, KripkeModel, ModelKind, World};
use crate::rules::{Deduction, Rule};
use crate::sequent::{MeasureMode, Sequent};
use crate::syntax::{Connective, Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    Or,
    And,
    Zero,
    One,
}

impl Gate {
    pub fn symbol(self) -> &'static str {
        match self {
            Gate::Or => "or",
            Gate::And => "and",
            Gate::Zero => "0",
            Gate::One => "1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Prop,
    Positive,
}

impl SearchMode {
    pub fn calculus(self) -> Calculus<'static> {
        match self {
            SearchMode::Prop => Calculus::Prop,
            SearchMode::Positive => Calculus::Positive,
        }
    }

    pub fn measure_mode(self) -> MeasureMode {
        match self {
            SearchMode::Prop => MeasureMode::Prop,
            SearchMode::Positive => MeasureMode::Predicate,
        }
    }

    /// Rejects sequents outside the fragment.
    pub fn admits(self, s: &Sequent) -> Result<()> {
        match self {
            SearchMode::Prop if !s.is_propositional() => {
                Err(Error::Mode("propositional mode needs a quantifier-free sequent of propositional variables".into()))
            }
            SearchMode::Positive if !s.is_positive() => Err(Error::Mode("the sequent is not positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub addr: Vec<usize>,
    pub parent: Option<usize>,
    pub sequent: Sequent,
    pub gate: Gate,
    /// `Tr_S(σ)` at expanded gate-∧ nodes.
    pub deduction: Option<Deduction>,
    pub children: Vec<usize>,
    /// Whether the sons of this node have been generated.
    pub expanded: bool,
    /// For (br) uppers: the analyzed succedent formula and eigenvariable.
    pub principal: Option<Formula>,
    pub eigenvariable: Option<u32>,
    /// For loop leaves: the ancestor with the same sequent.
    pub loop_to: Option<usize>,
    /// A node elsewhere with the same sequent whose subtree is reused.
    pub same_as: Option<usize>,
}

impl SearchNode {
    /// Root or (br) upper: a node whose sequent is analyzed by `Tr`.
    pub fn is_tr_input(&self) -> bool {
        self.parent.is_none() || self.principal.is_some()
    }

    pub fn depth(&self) -> usize {
        self.addr.len()
    }
}

/// `TR(S₀)`, built depth-first. Sons of a gate-∧ node are not explored past
/// the first son of value 0, and sons of a gate-∨ node not past the first
/// son of value 1; such unexplored sons stay unexpanded with no value.
#[derive(Clone, Debug)]
pub struct SearchTree {
    pub mode: SearchMode,
    pub nodes: Vec<SearchNode>,
    pub values: Vec<Option<u8>>,
    fresh: Fresh,
    limits: SearchLimits,
    steps: usize,
    memo: HashMap<Sequent, usize>,
    floor: Vec<usize>,
}

/// Caps the work of one search: tree nodes plus inferences inside each `Tr`.
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    pub max_steps: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_steps: 2_000_000 }
    }
}

/// Default step budget for positive-fragment searches.
pub const POSITIVE_STEPS: usize = 3_000;

impl SearchLimits {
    /// Positive searches can run forever on sequents without finite
    /// countermodels, so they get a smaller budget.
    pub fn for_mode(mode: SearchMode) -> SearchLimits {
        match mode {
            SearchMode::Prop => SearchLimits::default(),
            SearchMode::Positive => SearchLimits { max_steps: POSITIVE_STEPS },
        }
    }
}

pub(crate) fn is_repeat(son: &Sequent, eigen: Option<u32>, earlier: &Sequent) -> bool {
    if son == earlier {
        return true;
    }
    let Some(a) = eigen else { return false };
    if son.ante != earlier.ante || son.succ.len() != earlier.succ.len() {
        return false;
    }
    earlier.free_vars().into_iter().any(|b| son.rename_free(&BTreeMap::from([(a, b)])) == *earlier)
}

/// The (br) sons of a non-invertible leaf, in rule order.
pub(crate) fn br_sons(mode: SearchMode, s: &Sequent, fresh: &mut Fresh) -> Vec<BrSon> {
    match mode {
        SearchMode::Prop => analysis::branch_rule(s)
            .into_iter()
            .zip(s.succ.marked_of(Connective::Implies))
            .map(|(sequent, p)| BrSon { sequent, principal: Some(p.clone()), eigenvariable: None })
            .collect(),
        SearchMode::Positive => analysis::branch_rule_positive(s, fresh),
    }
}

impl SearchTree {
    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }

    /// Root value; 1 derivable, 0 underivable.
    pub fn value(&self) -> u8 {
        self.values[0].expect("the root is evaluated")
    }

    fn push(&mut self, node: SearchNode) -> Result<usize> {
        self.charge(1)?;
        let v = match node.gate {
            Gate::One => Some(1),
            Gate::Zero => Some(0),
            _ => None,
        };
        self.nodes.push(node);
        self.values.push(v);
        self.floor.push(usize::MAX);
        Ok(self.nodes.len() - 1)
    }

    fn charge(&mut self, n: usize) -> Result<()> {
        self.steps += n;
        if self.steps > self.limits.max_steps {
            return Err(Error::Limit(format!("search exceeded {} steps", self.limits.max_steps)));
        }
        Ok(())
    }

    /// Work done so far, in the units of [`SearchLimits`].
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn repeat_of(&self, parent: usize, son: &BrSon) -> Option<usize> {
        let mut at = Some(parent);
        while let Some(i) = at {
            let n = &self.nodes[i];
            if n.is_tr_input() && is_repeat(&son.sequent, son.eigenvariable, &n.sequent) {
                return Some(i);
            }
            at = n.parent;
        }
        None
    }

    fn child(&self, parent: usize, k: usize, sequent: Sequent, gate: Gate) -> SearchNode {
        let mut addr = self.nodes[parent].addr.clone();
        addr.push(k);
        SearchNode {
            addr,
            parent: Some(parent),
            sequent,
            gate,
            deduction: None,
            children: Vec::new(),
            expanded: false,
            principal: None,
            eigenvariable: None,
            loop_to: None,
            same_as: None,
        }
    }

    fn expand(&mut self, i: usize) -> Result<()> {
        if self.nodes[i].expanded {
            return Ok(());
        }
        self.nodes[i].expanded = true;
        let calc = self.mode.calculus();
        let s = self.nodes[i].sequent.clone();
        match self.nodes[i].gate {
            Gate::And => {
                let d = analysis::build_tr(&s, calc, &mut self.fresh);
                self.charge(d.size())?;
                let leaves: Vec<Sequent> = d.leaves().into_iter().map(|l| l.sequent.clone()).collect();
                self.nodes[i].deduction = Some(d);
                for (k, leaf) in leaves.into_iter().enumerate() {
                    let gate = match analysis::classify_leaf(&leaf, calc) {
                        LeafKind::Axiom => Gate::One,
                        LeafKind::FullyAnalyzed => Gate::Zero,
                        LeafKind::NonInvertible => Gate::Or,
                    };
                    let node = self.child(i, k, leaf, gate);
                    let c = self.push(node)?;
                    self.nodes[i].children.push(c);
                }
            }
            Gate::Or => {
                let sons = br_sons(self.mode, &s, &mut self.fresh);
                for (k, son) in sons.into_iter().enumerate() {
                    let looped = self.repeat_of(i, &son);
                    let gate = if looped.is_some() {
                        Gate::Zero
                    } else if son.sequent.is_axiom() {
                        Gate::One
                    } else if analysis::is_fully_analyzed(&son.sequent) {
                        Gate::Zero
                    } else {
                        Gate::And
                    };
                    let mut node = self.child(i, k, son.sequent, gate);
                    node.principal = son.principal;
                    node.eigenvariable = son.eigenvariable;
                    node.loop_to = looped;
                    if let Some(t) = looped {
                        node.expanded = true;
                        let c = self.push(node)?;
                        self.floor[c] = self.nodes[t].depth();
                        self.nodes[i].children.push(c);
                        continue;
                    }
                    if gate == Gate::And {
                        if let Some(&j) = self.memo.get(&node.sequent) {
                            node.same_as = Some(j);
                            node.expanded = true;
                            let c = self.push(node)?;
                            self.values[c] = self.values[j];
                            self.nodes[i].children.push(c);
                            continue;
                        }
                    }
                    let c = self.push(node)?;
                    self.nodes[i].children.push(c);
                }
            }
            Gate::Zero | Gate::One => {}
        }
        Ok(())
    }

    /// Evaluates node `i`, expanding as needed.
    pub fn solve(&mut self, i: usize) -> Result<u8> {
        if let Some(v) = self.values[i] {
            return Ok(v);
        }
        self.expand(i)?;
        let gate = self.nodes[i].gate;
        let (stop, default) = if gate == Gate::And { (0, 1) } else { (1, 0) };
        let mut value = default;
        let mut floor = usize::MAX;
        let children = self.nodes[i].children.clone();
        for c in children {
            let v = self.solve(c)?;
            floor = floor.min(self.floor[c]);
            if v == stop {
                value = stop;
                break;
            }
        }
        self.values[i] = Some(value);
        self.floor[i] = floor;
        let n = &self.nodes[i];
        if n.is_tr_input() && n.parent.is_some() && (value == 1 || floor >= n.depth()) {
            self.memo.entry(n.sequent.clone()).or_insert(i);
        }
        Ok(value)
    }

    /// Edges `(lower, upper)` of the constructed part of `De(S₀)`.
    pub fn de_edges(&self) -> Vec<(Sequent, Sequent)> {
        let mut out = Vec::new();
        for n in &self.nodes {
            if let Some(d) = &n.deduction {
                let mut stack = vec![d];
                while let Some(x) = stack.pop() {
                    for c in &x.children {
                        out.push((x.sequent.clone(), c.sequent.clone()));
                        stack.push(c);
                    }
                }
            }
            if n.gate == Gate::Or {
                for &c in &n.children {
                    out.push((n.sequent.clone(), self.nodes[c].sequent.clone()));
                }
            }
        }
        out
    }

    /// Number of loop leaves.
    pub fn loop_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.loop_to.is_some()).count()
    }

    /// The node whose subtree stands for `i`.
    pub fn resolve(&self, i: usize) -> usize {
        self.nodes[i].same_as.unwrap_or(i)
    }
}

/// Builds `TR(S₀)` with the default limits of `mode`.
pub fn build_search_tree(s0: &Sequent, mode: SearchMode) -> Result<SearchTree> {
    build_search_tree_with(s0, mode, SearchLimits::for_mode(mode))
}

pub fn build_search_tree_with(s0: &Sequent, mode: SearchMode, limits: SearchLimits) -> Result<SearchTree> {
    mode.admits(s0)?;
    let s0 = s0.mark_all();
    let root_gate = if s0.is_axiom() {
        Gate::One
    } else if analysis::is_fully_analyzed(&s0) {
        Gate::Zero
    } else {
        Gate::And
    };
    let mut tree = SearchTree {
        mode,
        nodes: Vec::new(),
        values: Vec::new(),
        fresh: Fresh::above(&s0),
        limits,
        steps: 0,
        memo: HashMap::new(),
        floor: Vec::new(),
    };
    let root = SearchNode {
        addr: Vec::new(),
        parent: None,
        sequent: s0,
        gate: root_gate,
        deduction: None,
        children: Vec::new(),
        expanded: false,
        principal: None,
        eigenvariable: None,
        loop_to: None,
        same_as: None,
    };
    tree.push(root)?;
    tree.solve(0)?;
    Ok(tree)
}

/// Recomputes values bottom-up from the leaf gates over the constructed
/// tree; unexplored nodes count as unknown. Returns the root value.
pub fn evaluate_gates(tree: &mut SearchTree) -> Option<u8> {
    let mut values: Vec<Option<u8>> = vec![None; tree.nodes.len()];
    for i in (0..tree.nodes.len()).rev() {
        let n = &tree.nodes[i];
        values[i] = match (n.gate, n.same_as) {
            (_, Some(j)) => values[j].or(tree.values[j]),
            (Gate::One, _) => Some(1),
            (Gate::Zero, _) => Some(0),
            (_, None) if !n.expanded => None,
            (gate, None) => {
                let sons: Vec<Option<u8>> = n.children.iter().map(|&c| values[c]).collect();
                let (stop, other) = if gate == Gate::And { (0, 1) } else { (1, 0) };
                if sons.contains(&Some(stop)) {
                    Some(stop)
                } else if sons.iter().all(|v| *v == Some(other)) {
                    Some(other)
                } else {
                    None
                }
            }
        };
    }
    for i in (0..tree.nodes.len()).rev() {
        if let Some(j) = tree.nodes[i].same_as {
            values[i] = values[j];
        }
    }
    tree.values = values;
    tree.values[0]
}

/// Splits multi-term `(∀⇒)` and `(⇒∃)` steps into single-instance chains.
pub fn expand_instances(d: Deduction) -> Deduction {
    let children: Vec<Deduction> = d.children.into_iter().map(expand_instances).collect();
    if !matches!(d.rule, Rule::AllL | Rule::ExR) || d.terms.len() <= 1 {
        return Deduction { children, ..d };
    }
    let p = d.principal.clone().expect("quantifier step has a principal");
    let left = d.rule == Rule::AllL;
    let mut upper = children.into_iter().next().expect("one upper");
    let mut current = d.sequent.clone();
    let mut chain = Vec::new();
    for t in &d.terms[..d.terms.len() - 1] {
        let inst = p.instantiate(t).expect("quantifier");
        let mut next = current.clone();
        if left {
            next.ante.insert(inst, true);
        } else {
            next.succ.insert(inst, true);
        }
        chain.push((current, t.clone()));
        current = next;
    }
    let last = d.terms.last().cloned().expect("non-empty");
    upper = Deduction { terms: vec![last], ..Deduction::node(current, d.rule, p.clone(), vec![upper]) };
    for (seq, t) in chain.into_iter().rev() {
        upper = Deduction { terms: vec![t], ..Deduction::node(seq, d.rule, p.clone(), vec![upper]) };
    }
    upper
}

fn derivation_at(tree: &SearchTree, i: usize) -> Deduction {
    let n = &tree.nodes[tree.resolve(i)];
    match n.gate {
        Gate::One => Deduction::axiom(n.sequent.clone()),
        Gate::And => {
            let d = n.deduction.clone().expect("gate-and nodes carry Tr");
            let mut subs = n.children.iter().map(|&c| derivation_at(tree, c));
            d.graft(&mut subs)
        }
        Gate::Or => {
            let &c = n.children.iter().find(|&&c| tree.values[c] == Some(1)).expect("value-1 son");
            let son = &tree.nodes[c];
            let p = son.principal.clone().expect("(br) uppers carry a principal");
            let rule = if p.connective() == Connective::Forall { Rule::AllR } else { Rule::ImpR };
            Deduction {
                eigenvariable: son.eigenvariable,
                ..Deduction::node(n.sequent.clone(), rule, p, vec![derivation_at(tree, c)])
            }
        }
        Gate::Zero => unreachable!("value-1 subtrees have no gate-0 nodes on the chosen path"),
    }
}

/// Extracts a cut-free derivation of `S₀`, marks erased.
pub fn extract_derivation(tree: &SearchTree) -> Result<Deduction> {
    if tree.values[0] != Some(1) {
        return Err(Error::Mode("the search tree does not evaluate to 1".into()));
    }
    Ok(expand_instances(derivation_at(tree, 0)).erased().freshen_eigenvariables())
}

/// The shrunken tree `T′` and its Kripke model.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: KripkeModel,
    /// For each world, the search node it stands for.
    pub world_nodes: Vec<usize>,
    /// For each world, the chosen leaf sequent `Γ(σ) ⇒ Δ(σ)`.
    pub world_sequents: Vec<Sequent>,
    /// Tree edges of `T′` (the model's edges minus loop edges).
    pub tree_edges: Vec<(usize, usize)>,
    /// Edges from a loop leaf's parent world back to the repeated world.
    pub loop_edges: Vec<(usize, usize)>,
}

/// The index of the chosen Tr leaf for a gate-∧ or gate-0 node.
fn chosen_leaf(tree: &SearchTree, i: usize) -> usize {
    let n = &tree.nodes[i];
    match n.gate {
        Gate::And => *n.children.iter().find(|&&c| tree.values[c] == Some(0)).expect("value-0 son"),
        _ => i,
    }
}

#[derive(Default)]
struct Shrink {
    world_nodes: Vec<usize>,
    world_sequents: Vec<Sequent>,
    vars: Vec<BTreeSet<u32>>,
    tree_edges: Vec<(usize, usize)>,
    loop_edges: Vec<(usize, usize)>,
}

impl Shrink {
    // `path` maps the search nodes on the current branch to their worlds.
    fn visit(&mut self, tree: &SearchTree, i: usize, parent: Option<usize>, path: &mut Vec<(usize, usize)>) {
        if let Some(target) = tree.nodes[i].loop_to {
            let pw = parent.expect("loop leaves have a parent world");
            let &(_, tw) = path.iter().rev().find(|(n, _)| *n == target).expect("loop target on the branch");
            self.loop_edges.push((pw, tw));
            return;
        }
        let i = tree.resolve(i);
        let leaf = chosen_leaf(tree, i);
        let w = self.world_sequents.len();
        let mut vars = parent.map(|p| self.vars[p].clone()).unwrap_or_default();
        vars.extend(tree.nodes[i].sequent.free_vars());
        vars.extend(tree.nodes[leaf].sequent.free_vars());
        self.world_nodes.push(i);
        self.world_sequents.push(tree.nodes[leaf].sequent.clone());
        self.vars.push(vars);
        if let Some(p) = parent {
            self.tree_edges.push((p, w));
        }
        if tree.nodes[leaf].gate == Gate::Or {
            path.push((i, w));
            for &c in &tree.nodes[leaf].children {
                self.visit(tree, c, Some(w), path);
            }
            path.pop();
        }
    }
}

/// Shrinks `TR(S₀)` to `T′` and builds `⟨T′, ⊂ₑ, V_T⟩`.
pub fn extract_countermodel(tree: &SearchTree) -> Result<Countermodel> {
    if tree.values[0] != Some(0) {
        return Err(Error::Mode("the search tree does not evaluate to 0".into()));
    }
    let mut sh = Shrink::default();
    sh.visit(tree, 0, None, &mut Vec::new());
    let kind = match tree.mode {
        SearchMode::Prop => ModelKind::Prop,
        SearchMode::Positive => ModelKind::Predicate,
    };
    let worlds: Vec<World> = sh
        .world_sequents
        .iter()
        .zip(&sh.vars)
        .map(|(s, vars)| World {
            atoms: s.ante.formulas().filter(|f| f.is_atomic()).cloned().collect(),
            vars: if kind == ModelKind::Prop { BTreeSet::new() } else { vars.clone() },
        })
        .collect();
    let edges: Vec<(usize, usize)> = sh.tree_edges.iter().chain(&sh.loop_edges).copied().collect();
    let mut model = KripkeModel::new(kind, worlds, edges, 0).with_functions(&tree.root().sequent.signature());
    if kind == ModelKind::Predicate {
        close_domains(&mut model);
    }
    Ok(Countermodel {
        model,
        world_nodes: sh.world_nodes,
        world_sequents: sh.world_sequents,
        tree_edges: sh.tree_edges,
        loop_edges: sh.loop_edges,
    })
}

/// `D(w) := ⋃{A_v : v ⪯ w}`, seeded with `a₀` when empty.
fn close_domains(m: &mut KripkeModel) {
    let n = m.len();
    let mut vars: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for v in 0..n {
        for &w in m.above(v) {
            vars[w].extend(m.worlds[v].vars.iter().copied());
        }
    }
    // With no free variable at the root the domain is seeded with `a0`.
    if vars[m.root].is_empty() {
        for vs in &mut vars {
            vs.insert(0);
        }
    }
    for (w, vs) in vars.into_iter().enumerate() {
        m.worlds[w].vars = vs;
    }
}

impl Countermodel {
    /// The four facts about `T′`: `Γ^×` grows along edges, each chosen
    /// sequent is saturated, each succedent implication (or universal
    /// formula) has a witnessing extension, and no chosen sequent shares an
    /// atom between its sides or has `⊥` on the left.
    pub fn check_facts(&self) -> std::result::Result<(), String> {
        let n = self.world_sequents.len();
        for &(p, c) in self.tree_edges.iter().chain(&self.loop_edges) {
            let (gp, gc) = (&self.world_sequents[p].ante, &self.world_sequents[c].ante);
            if let Some(f) = gp.formulas().find(|f| !gc.contains(f)) {
                return Err(format!("{f} is lost between worlds {p} and {c}"));
            }
        }
        for (w, s) in self.world_sequents.iter().enumerate() {
            if !analysis::is_saturated(s) {
                return Err(format!("world {w}: {} is not saturated", s.display_marked()));
            }
            if s.is_axiom() {
                return Err(format!("world {w}: chosen sequent is an axiom"));
            }
            for f in s.succ.formulas() {
                let witness = (0..n).filter(|&v| self.model.leq(w, v)).any(|v| {
                    let t = &self.world_sequents[v];
                    match f {
                        Formula::Implies(a, b) => t.ante.contains(a) && t.succ.contains(b),
                        Formula::Forall(..) => t.succ.formulas().any(|g| {
                            self.model.worlds[v].vars.iter().any(|&x| f.instantiate(&Term::Free(x)).as_ref() == Some(g))
                        }),
                        _ => true,
                    }
                });
                if !witness {
                    return Err(format!("world {w}: no witnessing extension for {f}"));
                }
            }
        }
        Ok(())
    }

    /// `falsifies(M, root, S₀)`.
    pub fn falsifies(&self, s0: &Sequent) -> Result<bool> {
        kripke::falsifies(&self.model, self.model.root, s0)
    }
}

/// Outcome of deciding a sequent.
#[derive(Clone, Debug)]
pub enum Verdict {
    Derivable(Deduction),
    Underivable(Countermodel),
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Derivable(_) => "derivable",
            Verdict::Underivable(_) => "underivable",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn is_derivable(&self) -> bool {
        matches!(self, Verdict::Derivable(_))
    }

    pub fn is_underivable(&self) -> bool {
        matches!(self, Verdict::Underivable(_))
    }
}

/// Builds the search tree and extracts the matching artifact.
/// Decides `s0`. A search that exhausts `limits` gives `Unknown`.
pub fn decide_with(s0: &Sequent, mode: SearchMode, limits: SearchLimits) -> Result<Verdict> {
    match build_search_tree_with(s0, mode, limits) {
        Ok(tree) => verdict_of(&tree),
        Err(Error::Limit(_)) => Ok(Verdict::Unknown),
        Err(e) => Err(e),
    }
}

pub fn decide(s0: &Sequent, mode: SearchMode) -> Result<Verdict> {
    decide_with(s0, mode, SearchLimits::for_mode(mode))
}

pub fn verdict_of(tree: &SearchTree) -> Result<Verdict> {
    if tree.value() == 1 {
        Ok(Verdict::Derivable(extract_derivation(tree)?))
    } else {
        Ok(Verdict::Underivable(extract_countermodel(tree)?))
    }
}

/// Decides a positive sequent of LJm.
pub fn decide_positive(s0: &Sequent) -> Result<Verdict> {
    decide(s0, SearchMode::Positive)
}

/// A homomorphism `h` from a semantically steered `T′` into an external model.
#[derive(Clone, Debug)]
pub struct Embedding {
    /// `(search node, h(node), V_T(node))`, one entry per node of `T′`.
    pub nodes: Vec<(usize, usize, BTreeSet<Formula>)>,
    /// Tree edges of `T′` as indices into `nodes`.
    pub edges: Vec<(usize, usize)>,
}

/// Maps `T′`, chosen by following the external model `m` from `a0`, into `m`.
///
/// At gate-∧ nodes the first `Tr` leaf falsified at the current world is
/// chosen; each (br) upper for `γ ⊃ δ` goes to a world `b ⪰ a` with `b ⊨ γ`
/// and `b ⊭ δ`. Loop leaves are not followed. Both containments
/// `a₀ ⪯ h(σ) ⪯ h(τ)` and `V_T(σ) ⊆ V(h(σ))` are asserted before returning.
pub fn embed(m: &KripkeModel, a0: usize, tree: &SearchTree) -> Result<Embedding> {
    if tree.mode != SearchMode::Prop {
        return Err(Error::Mode("embedding is defined for propositional search trees".into()));
    }
    if !kripke::falsifies(m, a0, &tree.root().sequent)? {
        return Err(Error::Model("the model does not falsify the sequent at the given world".into()));
    }
    let mut tree = tree.clone();
    let mut out = Embedding { nodes: Vec::new(), edges: Vec::new() };
    let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(0, a0, None)];
    while let Some((i, a, parent)) = stack.pop() {
        if tree.nodes[i].loop_to.is_some() {
            continue;
        }
        let i = tree.resolve(i);
        tree.solve(i)?;
        let n = &tree.nodes[i];
        let leaf = match n.gate {
            Gate::And => {
                let mut found = None;
                for &c in &n.children {
                    if kripke::falsifies(m, a, &tree.nodes[c].sequent)? {
                        found = Some(c);
                        break;
                    }
                }
                found.ok_or_else(|| Error::Model(format!("no Tr leaf of node {i} is falsified at world {a}")))?
            }
            _ => i,
        };
        tree.solve(leaf)?;
        let ls = &tree.nodes[leaf];
        let atoms: BTreeSet<Formula> = ls.sequent.ante.formulas().filter(|f| f.is_atomic()).cloned().collect();
        let k = out.nodes.len();
        out.nodes.push((i, a, atoms));
        if let Some(p) = parent {
            out.edges.push((p, k));
        }
        if ls.gate == Gate::Or {
            for &c in ls.children.iter().rev() {
                let Some(Formula::Implies(g, d)) = &tree.nodes[c].principal else { continue };
                let mut b = None;
                for &v in m.above(a) {
                    if kripke::model_check(m, v, g)? && !kripke::model_check(m, v, d)? {
                        b = Some(v);
                        break;
                    }
                }
                let b = b.ok_or_else(|| Error::Model(format!("no witness world for {g} -> {d} above {a}")))?;
                stack.push((c, b, Some(k)));
            }
        }
    }
    for (_, h, atoms) in &out.nodes {
        assert!(m.leq(a0, *h), "root world must lie below every image");
        assert!(atoms.is_subset(&m.worlds[*h].atoms), "V_T must be contained in V(h)");
    }
    for &(p, c) in &out.edges {
        assert!(m.leq(out.nodes[p].1, out.nodes[c].1), "h must be monotone along tree edges");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;
    use crate::rules::check_derivation;

    fn tree(t: &str) -> SearchTree {
        build_search_tree(&parse_sequent(t).unwrap(), SearchMode::Prop).unwrap()
    }

    #[test]
    fn identity_shape() {
        let t = tree("|- p -> p");
        assert_eq!(t.root().gate, Gate::And);
        assert_eq!(t.nodes[1].gate, Gate::Or);
        assert_eq!(t.nodes[2].gate, Gate::One);
        assert_eq!(t.value(), 1);
        let d = extract_derivation(&t).unwrap();
        assert_eq!(d.rule, Rule::ImpR);
        assert!(check_derivation(&d).is_ok());
    }

    #[test]
    fn axiom_root() {
        let t = tree("p, q |- p");
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(extract_derivation(&t).unwrap().rule, Rule::AxiomT);
    }

    #[test]
    fn excluded_middle_refuted() {
        let t = tree("|- p | ~p");
        assert_eq!(t.value(), 0);
        let cm = extract_countermodel(&t).unwrap();
        assert_eq!(cm.model.len(), 2);
        assert!(cm.model.worlds[0].atoms.is_empty());
        assert_eq!(cm.model.worlds[1].atoms.len(), 1);
        assert!(cm.falsifies(&t.root().sequent).unwrap());
        assert!(cm.check_facts().is_ok());
    }

    #[test]
    fn peirce_refuted() {
        let t = tree("|- ((p -> q) -> p) -> p");
        assert_eq!(t.value(), 0);
        let cm = extract_countermodel(&t).unwrap();
        assert!(cm.falsifies(&t.root().sequent).unwrap());
    }

    #[test]
    fn double_negation_of_excluded_middle() {
        let t = tree("|- ~~(p | ~p)");
        assert_eq!(t.value(), 1);
        assert!(check_derivation(&extract_derivation(&t).unwrap()).is_ok());
    }

    #[test]
    fn repeated_sequent_is_closed() {
        let t = tree("p, (p -> q) -> r |- r");
        assert!(t.loop_count() > 0 || t.value() == 1);
        let v = verdict_of(&t).unwrap();
        match v {
            Verdict::Derivable(d) => assert!(check_derivation(&d).is_ok()),
            Verdict::Underivable(cm) => assert!(cm.falsifies(&t.root().sequent).unwrap()),
            Verdict::Unknown => unreachable!(),
        }
    }

    #[test]
    fn embedding_of_two_world_model() {
        let t = tree("|- p | ~p");
        let m = KripkeModel::prop(vec![vec![], vec!["p"]], vec![(0, 1)]);
        let e = embed(&m, 0, &t).unwrap();
        let images: Vec<usize> = e.nodes.iter().map(|n| n.1).collect();
        assert_eq!(images, vec![0, 1]);
    }

    #[test]
    fn positive_examples() {
        let s = parse_sequent("exists x. exists y. R(x, y) |- forall z. (q -> exists y. exists x. R(x, y)) -> forall w. (q -> q)").unwrap();
        assert!(decide_positive(&s).unwrap().is_derivable());
        let s = parse_sequent("P(a0) |- forall x. P(x)").unwrap();
        match decide_positive(&s).unwrap() {
            Verdict::Underivable(cm) => {
                assert!(cm.falsifies(&s).unwrap());
                assert!(cm.model.validate().is_ok());
            }
            other => panic!("{}", other.name()),
        }
    }
}
