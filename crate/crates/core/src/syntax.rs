//! Terms and formulas of first-order intuitionistic logic without equality.
//!
//! Free variables `a0, a1, ...` and bound variables live in disjoint
//! namespaces: a free variable is an index, a bound variable is a name that
//! only ever occurs under its binding quantifier. Because substituted terms
//! never contain bound variables, instantiation cannot capture.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A term: a free variable `a_n`, an occurrence of a bound variable inside a
/// quantifier body, or a function application.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Free(u32),
    Bound(Arc<str>),
    App(Arc<str>, Vec<Term>),
}

impl Term {
    pub fn free(n: u32) -> Term {
        Term::Free(n)
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.into(), args)
    }

    /// Number of nodes in the term tree.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::node_count).sum::<usize>(),
        }
    }

    /// Height of the term tree; variables have height 0.
    pub fn height(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Free(_) => true,
            Term::Bound(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn collect_free(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Free(n) => {
                out.insert(*n);
            }
            Term::Bound(_) => {}
            Term::App(_, args) => args.iter().for_each(|t| t.collect_free(out)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn subst_bound(&self, var: &str, t: &Term) -> Term {
        match self {
            Term::Bound(x) if &**x == var => t.clone(),
            Term::Free(_) | Term::Bound(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst_bound(var, t)).collect()),
        }
    }

    pub fn rename_free(&self, map: &BTreeMap<u32, u32>) -> Term {
        match self {
            Term::Free(n) => Term::Free(*map.get(n).unwrap_or(n)),
            Term::Bound(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename_free(map)).collect()),
        }
    }

    fn abstract_free(&self, n: u32, name: &Arc<str>) -> Term {
        match self {
            Term::Free(m) if *m == n => Term::Bound(name.clone()),
            Term::Free(_) | Term::Bound(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.abstract_free(n, name)).collect()),
        }
    }

    /// Symbol count, where `a_n` costs the binary length of `n`.
    pub fn size(&self) -> usize {
        match self {
            Term::Free(n) => binary_len(*n),
            Term::Bound(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    fn collect_functions(&self, sig: &mut Signature) {
        if let Term::App(f, args) = self {
            sig.functions.insert(f.to_string(), args.len());
            args.iter().for_each(|a| a.collect_functions(sig));
        }
    }
}

/// Binary length of `n`, with `|0| = 1`.
pub fn binary_len(n: u32) -> usize {
    if n == 0 {
        1
    } else {
        (32 - n.leading_zeros()) as usize
    }
}

/// A formula. `¬α` is sugar for `α ⊃ ⊥`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bot,
    Atom(Arc<str>, Vec<Term>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Forall(Arc<str>, Arc<Formula>),
    Exists(Arc<str>, Arc<Formula>),
}

/// The principal connective of a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    Bot,
    Atom,
    And,
    Or,
    Implies,
    Forall,
    Exists,
}

impl Formula {
    pub fn prop(name: &str) -> Formula {
        Formula::Atom(name.into(), Vec::new())
    }

    pub fn atom(name: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(name.into(), args)
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::implies(f, Formula::Bot)
    }

    /// `⊤`, represented as `⊥ ⊃ ⊥`.
    pub fn top() -> Formula {
        Formula::implies(Formula::Bot, Formula::Bot)
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.into(), Arc::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.into(), Arc::new(body))
    }

    /// Conjunction of a list; the empty conjunction is `⊥ ⊃ ⊥`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.pop() {
            None => Formula::top(),
            Some(last) => items.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Disjunction of a list; the empty disjunction is `⊥`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.pop() {
            None => Formula::Bot,
            Some(last) => items.into_iter().rev().fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn connective(&self) -> Connective {
        match self {
            Formula::Bot => Connective::Bot,
            Formula::Atom(..) => Connective::Atom,
            Formula::And(..) => Connective::And,
            Formula::Or(..) => Connective::Or,
            Formula::Implies(..) => Connective::Implies,
            Formula::Forall(..) => Connective::Forall,
            Formula::Exists(..) => Connective::Exists,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Bot | Formula::Atom(..) => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// True when the formula has no quantifiers and every atom is 0-ary.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Bot => true,
            Formula::Atom(_, args) => args.is_empty(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.is_propositional() && r.is_propositional()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// Capture-avoiding instantiation of the bound variable `var` by `t`.
    ///
    /// Inner quantifiers that rebind `var` shadow it.
    pub fn subst(&self, var: &str, t: &Term) -> Formula {
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.subst_bound(var, t)).collect()),
            Formula::And(l, r) => Formula::and(l.subst(var, t), r.subst(var, t)),
            Formula::Or(l, r) => Formula::or(l.subst(var, t), r.subst(var, t)),
            Formula::Implies(l, r) => Formula::implies(l.subst(var, t), r.subst(var, t)),
            Formula::Forall(x, _) | Formula::Exists(x, _) if &**x == var => self.clone(),
            Formula::Forall(x, body) => Formula::Forall(x.clone(), Arc::new(body.subst(var, t))),
            Formula::Exists(x, body) => Formula::Exists(x.clone(), Arc::new(body.subst(var, t))),
        }
    }

    /// For `∀x α(x)` or `∃x α(x)`, returns `α(t)`.
    pub fn instantiate(&self, t: &Term) -> Option<Formula> {
        match self {
            Formula::Forall(x, body) | Formula::Exists(x, body) => Some(body.subst(x, t)),
            _ => None,
        }
    }

    pub fn collect_free(&self, out: &mut BTreeSet<u32>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_free(out)),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.collect_free(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    pub fn rename_free(&self, map: &BTreeMap<u32, u32>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.rename_free(map)).collect()),
            Formula::And(l, r) => Formula::and(l.rename_free(map), r.rename_free(map)),
            Formula::Or(l, r) => Formula::or(l.rename_free(map), r.rename_free(map)),
            Formula::Implies(l, r) => Formula::implies(l.rename_free(map), r.rename_free(map)),
            Formula::Forall(x, b) => Formula::Forall(x.clone(), Arc::new(b.rename_free(map))),
            Formula::Exists(x, b) => Formula::Exists(x.clone(), Arc::new(b.rename_free(map))),
        }
    }

    /// Replaces the free variable `a_n` by the bound variable `name`.
    pub fn abstract_free(&self, n: u32, name: &str) -> Formula {
        let name: Arc<str> = name.into();
        self.abstract_with(n, &name)
    }

    fn abstract_with(&self, n: u32, name: &Arc<str>) -> Formula {
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.abstract_free(n, name)).collect()),
            Formula::And(l, r) => Formula::and(l.abstract_with(n, name), r.abstract_with(n, name)),
            Formula::Or(l, r) => Formula::or(l.abstract_with(n, name), r.abstract_with(n, name)),
            Formula::Implies(l, r) => Formula::implies(l.abstract_with(n, name), r.abstract_with(n, name)),
            Formula::Forall(x, b) => Formula::Forall(x.clone(), Arc::new(b.abstract_with(n, name))),
            Formula::Exists(x, b) => Formula::Exists(x.clone(), Arc::new(b.abstract_with(n, name))),
        }
    }

    /// Bound variable names used anywhere in the formula.
    pub fn bound_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bot | Formula::Atom(..) => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.bound_names(out);
                r.bound_names(out);
            }
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                out.insert(x.to_string());
                b.bound_names(out);
            }
        }
    }

    /// Renames a bound variable throughout its binder's scope.
    pub fn rename_binder(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Forall(x, b) if &**x == from => Formula::forall(to, b.subst(from, &Term::Bound(to.into()))),
            Formula::Exists(x, b) if &**x == from => Formula::exists(to, b.subst(from, &Term::Bound(to.into()))),
            _ => self.clone(),
        }
    }

    /// Symbol count: each connective, quantifier, bound variable, predicate
    /// and function symbol counts one; `a_n` counts `|n|`.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot => 1,
            Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => 1 + l.size() + r.size(),
            Formula::Forall(_, b) | Formula::Exists(_, b) => 2 + b.size(),
        }
    }

    /// Maximum nesting depth of connectives and quantifiers.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(..) => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + b.depth(),
        }
    }

    pub fn collect_signature(&self, sig: &mut Signature) {
        match self {
            Formula::Bot => {}
            Formula::Atom(p, args) => {
                sig.predicates.insert(p.to_string(), args.len());
                args.iter().for_each(|a| a.collect_functions(sig));
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_signature(sig);
                r.collect_signature(sig);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.collect_signature(sig),
        }
    }

    /// Propositional atom names.
    pub fn atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(p, _) => {
                out.insert(p.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.atoms(out);
                r.atoms(out);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.atoms(out),
        }
    }

    /// Counts connective occurrences by polarity. `positive` is the polarity
    /// of this occurrence; the callback receives each non-atomic subformula
    /// occurrence together with its polarity.
    pub fn visit_polarized(&self, positive: bool, f: &mut impl FnMut(&Formula, bool)) {
        f(self, positive);
        match self {
            Formula::Bot | Formula::Atom(..) => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.visit_polarized(positive, f);
                r.visit_polarized(positive, f);
            }
            Formula::Implies(l, r) => {
                l.visit_polarized(!positive, f);
                r.visit_polarized(positive, f);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.visit_polarized(positive, f),
        }
    }

    /// Returns a quantifier occurrence violating positivity, if any.
    ///
    /// A formula is positive at polarity `positive` when every `∀` occurs
    /// positively and every `∃` occurs negatively.
    pub fn polarity_violation(&self, positive: bool) -> Option<Formula> {
        let mut bad = None;
        self.visit_polarized(positive, &mut |g, pos| {
            if bad.is_none() {
                match g {
                    Formula::Forall(..) if !pos => bad = Some(g.clone()),
                    Formula::Exists(..) if pos => bad = Some(g.clone()),
                    _ => {}
                }
            }
        });
        bad
    }
}

/// True iff `f` is positive at the given polarity.
pub fn classify_positive(f: &Formula, positive: bool) -> bool {
    f.polarity_violation(positive).is_none()
}

/// Predicate and function symbols with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
}

impl Signature {
    pub fn of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Signature {
        let mut sig = Signature::default();
        for f in formulas {
            f.collect_signature(&mut sig);
        }
        sig
    }

    pub fn has_functions(&self) -> bool {
        !self.functions.is_empty()
    }
}

/// Enumeration weight of a term: node count plus the largest variable index.
///
/// Only finitely many terms share a weight, so ordering by weight and then by
/// the structural order yields one fixed enumeration of all terms.
pub fn term_weight(t: &Term) -> usize {
    let max_var = t.free_vars().into_iter().max().unwrap_or(0) as usize;
    t.node_count() + max_var
}

fn terms_with_nodes(nodes: usize, max_var: u32, sig: &Signature, cache: &mut BTreeMap<usize, Vec<Term>>) -> Vec<Term> {
    if let Some(v) = cache.get(&nodes) {
        return v.clone();
    }
    let mut out = Vec::new();
    if nodes == 1 {
        out.extend((0..=max_var).map(Term::Free));
    } else if nodes > 1 {
        for (f, &arity) in &sig.functions {
            if arity == 0 || arity > nodes - 1 {
                continue;
            }
            for split in compositions(nodes - 1, arity) {
                let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
                for part in split {
                    let options = terms_with_nodes(part, max_var, sig, cache);
                    let mut next = Vec::new();
                    for prefix in &partial {
                        for o in &options {
                            let mut p = prefix.clone();
                            p.push(o.clone());
                            next.push(p);
                        }
                    }
                    partial = next;
                }
                out.extend(partial.into_iter().map(|args| Term::app(f, args)));
            }
        }
    }
    cache.insert(nodes, out.clone());
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The first `n` terms of the global enumeration of all terms over all free
/// variables, in order.
pub fn global_terms(n: usize, sig: &Signature) -> Vec<Term> {
    let mut out = Vec::new();
    let mut weight = 1;
    while out.len() < n {
        let mut layer = Vec::new();
        for max_var in 0..weight as u32 {
            let nodes = weight - max_var as usize;
            let mut cache = BTreeMap::new();
            for t in terms_with_nodes(nodes, max_var, sig, &mut cache) {
                if term_weight(&t) == weight {
                    layer.push(t);
                }
            }
        }
        layer.sort();
        layer.dedup();
        out.extend(layer);
        weight += 1;
    }
    out.truncate(n);
    out
}

/// `Tm(A)↾n`: members of `Tm(A)` among the first `n` terms of the global
/// enumeration.
pub fn enumerate_terms(vars: &BTreeSet<u32>, n: usize, sig: &Signature) -> Vec<Term> {
    if vars.is_empty() {
        return Vec::new();
    }
    global_terms(n, sig)
        .into_iter()
        .filter(|t| t.free_vars().is_subset(vars))
        .collect()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Free(n) => write!(f, "a{n}"),
            Term::Bound(x) => write!(f, "{x}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

// Binding strength used by the printer; higher binds tighter.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Bot | Formula::Atom(..) => 5,
        Formula::Implies(_, r) if **r == Formula::Bot => 4,
        Formula::And(..) => 3,
        Formula::Or(..) => 2,
        Formula::Implies(..) => 1,
        Formula::Forall(..) | Formula::Exists(..) => 0,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
    if prec(g) < min {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bot => write!(f, "bot"),
            Formula::Atom(p, args) => {
                write!(f, "{p}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Implies(l, r) if **r == Formula::Bot => {
                write!(f, "~")?;
                write_operand(f, l, 4)
            }
            Formula::And(l, r) => {
                write_operand(f, l, 4)?;
                write!(f, " & ")?;
                write_operand(f, r, 3)
            }
            Formula::Or(l, r) => {
                write_operand(f, l, 3)?;
                write!(f, " | ")?;
                write_operand(f, r, 2)
            }
            Formula::Implies(l, r) => {
                write_operand(f, l, 2)?;
                write!(f, " -> ")?;
                write_operand(f, r, 1)
            }
            Formula::Forall(x, b) => write!(f, "forall {x}. {b}"),
            Formula::Exists(x, b) => write!(f, "exists {x}. {b}"),
        }
    }
}
