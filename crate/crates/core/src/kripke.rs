//! Kripke models and the forcing relation.
//!
//! A model is a finite set of worlds with a quasi-order given by the
//! reflexive-transitive closure of its edges. Predicate models use term
//! domains: `D(w) = Tm(A_w)` for a set `A_w` of free variables, function
//! symbols interpreted literally, and `R^w` the atomic formulas listed at `w`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::sequent::Sequent;
use crate::syntax::{Formula, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    /// Atomic formulas true here: `V(w)`, or the relations `R^w`.
    pub atoms: BTreeSet<Formula>,
    /// `A_w`; the domain is `Tm(A_w)`. Empty in propositional models.
    pub vars: BTreeSet<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Prop,
    Predicate,
}

#[derive(Clone, Debug)]
pub struct KripkeModel {
    pub kind: ModelKind,
    pub worlds: Vec<World>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    /// Function symbols, for the predicate domain.
    pub functions: BTreeMap<String, usize>,
    above: Vec<Vec<usize>>,
}

pub type PropKripkeModel = KripkeModel;
pub type PredKripkeModel = KripkeModel;

impl KripkeModel {
    pub fn new(kind: ModelKind, worlds: Vec<World>, edges: Vec<(usize, usize)>, root: usize) -> KripkeModel {
        let n = worlds.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &edges {
            reach[a][b] = true;
        }
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let above = reach.iter().map(|row| (0..n).filter(|&j| row[j]).collect()).collect();
        KripkeModel { kind, worlds, edges, root, functions: BTreeMap::new(), above }
    }

    /// A propositional model; `atoms[w]` lists the propositional variables true at `w`.
    pub fn prop(atoms: Vec<Vec<&str>>, edges: Vec<(usize, usize)>) -> KripkeModel {
        let worlds = atoms
            .into_iter()
            .map(|ps| World { atoms: ps.into_iter().map(Formula::prop).collect(), vars: BTreeSet::new() })
            .collect();
        KripkeModel::new(ModelKind::Prop, worlds, edges, 0)
    }

    pub fn with_functions(mut self, sig: &Signature) -> KripkeModel {
        self.functions = sig.functions.clone();
        self
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    /// `w ⪯ v`.
    pub fn leq(&self, w: usize, v: usize) -> bool {
        self.above[w].binary_search(&v).is_ok()
    }

    /// All `v ⪰ w`.
    pub fn above(&self, w: usize) -> &[usize] {
        &self.above[w]
    }

    fn max_depth(&self) -> usize {
        self.worlds
            .iter()
            .flat_map(|w| w.atoms.iter())
            .filter_map(|a| match a {
                Formula::Atom(_, args) => args.iter().map(Term::height).max(),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Terms over `A_w` of height at most the deepest relation term, plus one
    /// deeper term. Terms deeper than every relation term satisfy no atom, so
    /// the deeper one stands for all of them.
    fn quantifier_domain(&self, w: usize) -> Vec<Term> {
        let vars = &self.worlds[w].vars;
        let mut layer: Vec<Term> = vars.iter().map(|&a| Term::Free(a)).collect();
        if self.functions.is_empty() || layer.is_empty() {
            return layer;
        }
        let depth = self.max_depth();
        let mut all: BTreeSet<Term> = layer.iter().cloned().collect();
        for _ in 0..depth {
            let current: Vec<Term> = all.iter().cloned().collect();
            for (f, &arity) in &self.functions {
                for args in tuples(&current, arity) {
                    all.insert(Term::app(f, args));
                }
            }
        }
        layer = all.into_iter().collect();
        let (f, &arity) = self.functions.iter().next().expect("non-empty");
        let mut deep = Term::Free(*vars.iter().next().expect("non-empty"));
        for _ in 0..=depth {
            deep = Term::app(f, vec![deep; arity]);
        }
        layer.push(deep);
        layer
    }

    fn check_terms(&self, w: usize, f: &Formula) -> Result<()> {
        if self.kind == ModelKind::Prop {
            return Ok(());
        }
        let fv = f.free_vars();
        if fv.is_subset(&self.worlds[w].vars) {
            Ok(())
        } else {
            Err(Error::Model(format!("{f} has free variables outside the domain of world {w}")))
        }
    }

    fn force(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Bot => false,
            Formula::Atom(..) => self.worlds[w].atoms.contains(f),
            Formula::And(a, b) => self.force(w, a) && self.force(w, b),
            Formula::Or(a, b) => self.force(w, a) || self.force(w, b),
            Formula::Implies(a, b) => self.above(w).iter().all(|&v| !self.force(v, a) || self.force(v, b)),
            Formula::Exists(..) => self.quantifier_domain(w).iter().any(|t| self.force(w, &f.instantiate(t).unwrap())),
            Formula::Forall(..) => self
                .above(w)
                .iter()
                .all(|&v| self.quantifier_domain(v).iter().all(|t| self.force(v, &f.instantiate(t).unwrap()))),
        }
    }

    /// Checks the model conditions: monotone valuation or relations, non-empty
    /// growing domains, and atoms over the local domain. Returns a witness on
    /// failure.
    pub fn validate(&self) -> Result<()> {
        if self.root >= self.worlds.len() {
            return Err(Error::Model("root is not a world".into()));
        }
        for (w, world) in self.worlds.iter().enumerate() {
            if self.kind == ModelKind::Predicate {
                if world.vars.is_empty() {
                    return Err(Error::Model(format!("world {w} has an empty domain")));
                }
                for a in &world.atoms {
                    if !a.free_vars().is_subset(&world.vars) {
                        return Err(Error::Model(format!("relation atom {a} at world {w} lies outside D({w})")));
                    }
                }
            }
            for &v in self.above(w) {
                if let Some(a) = world.atoms.difference(&self.worlds[v].atoms).next() {
                    return Err(Error::Model(format!("{a} holds at {w} but not at {v} although {w} <= {v}")));
                }
                if let Some(a) = world.vars.difference(&self.worlds[v].vars).next() {
                    return Err(Error::Model(format!("a{a} is in D({w}) but not in D({v}) although {w} <= {v}")));
                }
            }
        }
        Ok(())
    }
}

fn tuples(items: &[Term], k: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for prefix in &out {
            for t in items {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `w ⊨ f`.
///
/// ```
/// use seqcalc::kripke::{model_check, KripkeModel};
/// use seqcalc::parse_formula;
/// let m = KripkeModel::prop(vec![vec![], vec!["p"]], vec![(0, 1)]);
/// assert!(model_check(&m, 0, &parse_formula("~~p").unwrap()).unwrap());
/// assert!(!model_check(&m, 0, &parse_formula("p").unwrap()).unwrap());
/// ```
pub fn model_check(m: &KripkeModel, w: usize, f: &Formula) -> Result<bool> {
    if w >= m.len() {
        return Err(Error::Model(format!("no world {w}")));
    }
    m.check_terms(w, f)?;
    Ok(m.force(w, f))
}

/// `w` forces every antecedent formula of `s` and no succedent formula.
pub fn falsifies(m: &KripkeModel, w: usize, s: &Sequent) -> Result<bool> {
    for f in s.ante.formulas() {
        if !model_check(m, w, f)? {
            return Ok(false);
        }
    }
    for f in s.succ.formulas() {
        if model_check(m, w, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rooted partial orders on `0..n` whose order extends the index order.
/// Every finite rooted poset is isomorphic to one of these.
fn rooted_orders(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let rel: BTreeSet<(usize, usize)> =
            pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, p)| *p).collect();
        let rooted = (1..n).all(|j| rel.contains(&(0, j)));
        let transitive = rel.iter().all(|&(a, b)| rel.iter().filter(|p| p.0 == b).all(|&(_, c)| rel.contains(&(a, c))));
        if rooted && transitive {
            out.push(rel.into_iter().collect());
        }
    }
    out
}

/// Exhaustive search for a propositional countermodel with at most
/// `max_worlds` worlds, falsifying `s` at the root.
pub fn brute_force_countermodel(s: &Sequent, max_worlds: usize) -> Option<KripkeModel> {
    let mut names = BTreeSet::new();
    for f in s.formulas() {
        f.atoms(&mut names);
    }
    let atoms: Vec<Formula> = names.iter().map(|p| Formula::prop(p)).collect();
    let subsets: Vec<BTreeSet<Formula>> = (0u32..(1 << atoms.len()))
        .map(|mask| atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect();
    for n in 1..=max_worlds.max(1) {
        for order in rooted_orders(n) {
            let skeleton = KripkeModel::new(
                ModelKind::Prop,
                vec![World { atoms: BTreeSet::new(), vars: BTreeSet::new() }; n],
                order.clone(),
                0,
            );
            let mut choice = vec![0usize; n];
            if let Some(m) = search_valuations(&skeleton, &subsets, &mut choice, 0, s) {
                return Some(m);
            }
        }
    }
    None
}

fn search_valuations(
    skel: &KripkeModel,
    subsets: &[BTreeSet<Formula>],
    choice: &mut Vec<usize>,
    w: usize,
    s: &Sequent,
) -> Option<KripkeModel> {
    if w == choice.len() {
        let worlds = choice.iter().map(|&c| World { atoms: subsets[c].clone(), vars: BTreeSet::new() }).collect();
        let m = KripkeModel::new(ModelKind::Prop, worlds, skel.edges.clone(), 0);
        return falsifies(&m, 0, s).ok().filter(|&b| b).map(|_| m);
    }
    for c in 0..subsets.len() {
        let monotone = (0..w).all(|v| !skel.leq(v, w) || subsets[choice[v]].is_subset(&subsets[c]));
        if monotone {
            choice[w] = c;
            if let Some(m) = search_valuations(skel, subsets, choice, w + 1, s) {
                return Some(m);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_sequent};

    #[test]
    fn forcing_examples() {
        let m = KripkeModel::prop(vec![vec![], vec!["p"]], vec![(0, 1)]);
        assert!(!model_check(&m, 0, &Formula::Bot).unwrap());
        assert!(model_check(&m, 0, &parse_formula("~~p").unwrap()).unwrap());
        assert!(!model_check(&m, 0, &parse_formula("p").unwrap()).unwrap());
        assert!(falsifies(&m, 0, &parse_sequent("|- p | ~p").unwrap()).unwrap());
    }

    #[test]
    fn predicate_forcing() {
        let w = World { atoms: BTreeSet::new(), vars: [0].into() };
        let m = KripkeModel::new(ModelKind::Predicate, vec![w], vec![], 0);
        assert!(!model_check(&m, 0, &parse_formula("forall x. P(x)").unwrap()).unwrap());
        assert!(model_check(&m, 0, &parse_formula("P(a3)").unwrap()).is_err());
    }

    #[test]
    fn deep_terms_are_represented() {
        let w = World { atoms: [parse_formula("P(a0)").unwrap()].into(), vars: [0].into() };
        let mut sig = Signature::default();
        sig.functions.insert("f".into(), 1);
        let m = KripkeModel::new(ModelKind::Predicate, vec![w], vec![], 0).with_functions(&sig);
        assert!(!model_check(&m, 0, &parse_formula("forall x. P(x)").unwrap()).unwrap());
        assert!(model_check(&m, 0, &parse_formula("exists x. P(x)").unwrap()).unwrap());
    }

    #[test]
    fn validation_rejects_non_monotone() {
        let m = KripkeModel::prop(vec![vec!["p"], vec![]], vec![(0, 1)]);
        assert!(m.validate().is_err());
        let w0 = World { atoms: BTreeSet::new(), vars: [0, 1].into() };
        let w1 = World { atoms: BTreeSet::new(), vars: [0].into() };
        let m = KripkeModel::new(ModelKind::Predicate, vec![w0, w1], vec![(0, 1)], 0);
        assert!(m.validate().unwrap_err().to_string().contains("a1"));
    }

    #[test]
    fn oracle_examples() {
        assert!(brute_force_countermodel(&parse_sequent("|- p | ~p").unwrap(), 2).is_some());
        assert!(brute_force_countermodel(&parse_sequent("p |- p").unwrap(), 3).is_none());
        assert!(brute_force_countermodel(&parse_sequent("|- ((p -> q) -> p) -> p").unwrap(), 2).is_some());
        assert!(brute_force_countermodel(&parse_sequent("|- ~~(p | ~p)").unwrap(), 3).is_none());
    }

    #[test]
    fn order_counts() {
        assert_eq!(rooted_orders(1).len(), 1);
        assert_eq!(rooted_orders(2).len(), 1);
        assert_eq!(rooted_orders(3).len(), 2);
    }
}
