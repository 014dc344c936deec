//! Marked formulas, cedents and sequents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Connective, Formula, Signature};

/// A formula together with its mark. A marked formula has not been analyzed yet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkedFormula {
    pub formula: Formula,
    pub marked: bool,
}

/// A finite set of formulas. Each formula occurs at most once; inserting a
/// formula that is already present keeps it marked if either copy was marked.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cedent {
    items: BTreeMap<Formula, bool>,
}

impl Cedent {
    pub fn new() -> Cedent {
        Cedent::default()
    }

    pub fn insert(&mut self, f: Formula, marked: bool) {
        let e = self.items.entry(f).or_insert(marked);
        *e |= marked;
    }

    pub fn with(mut self, f: Formula, marked: bool) -> Cedent {
        self.insert(f, marked);
        self
    }

    /// Clears the mark on `f`, if present.
    pub fn unmark(&mut self, f: &Formula) {
        if let Some(m) = self.items.get_mut(f) {
            *m = false;
        }
    }

    pub fn remove(&mut self, f: &Formula) -> Option<bool> {
        self.items.remove(f)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.items.contains_key(f)
    }

    pub fn is_marked(&self, f: &Formula) -> bool {
        self.items.get(f).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Formula, bool)> {
        self.items.iter().map(|(f, m)| (f, *m))
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.items.keys()
    }

    pub fn marked(&self) -> impl Iterator<Item = &Formula> {
        self.items.iter().filter(|(_, m)| **m).map(|(f, _)| f)
    }

    /// Marked formulas with the given principal connective.
    pub fn marked_of(&self, c: Connective) -> impl Iterator<Item = &Formula> {
        self.marked().filter(move |f| f.connective() == c)
    }

    /// Formulas with the given principal connective, marked or not.
    pub fn of(&self, c: Connective) -> impl Iterator<Item = &Formula> {
        self.formulas().filter(move |f| f.connective() == c)
    }

    /// `Γ^×`: the set of formulas with marks erased.
    pub fn erased(&self) -> BTreeSet<Formula> {
        self.items.keys().cloned().collect()
    }

    /// The same cedent with every formula marked.
    pub fn all_marked(&self) -> Cedent {
        Cedent { items: self.items.keys().map(|f| (f.clone(), true)).collect() }
    }

    /// The same cedent with every formula unmarked.
    pub fn all_unmarked(&self) -> Cedent {
        Cedent { items: self.items.keys().map(|f| (f.clone(), false)).collect() }
    }

    pub fn union(&self, other: &Cedent) -> Cedent {
        let mut out = self.clone();
        for (f, m) in other.iter() {
            out.insert(f.clone(), m);
        }
        out
    }

    pub fn map_formulas(&self, mut g: impl FnMut(&Formula) -> Formula) -> Cedent {
        let mut out = Cedent::new();
        for (f, m) in self.iter() {
            out.insert(g(f), m);
        }
        out
    }
}

impl FromIterator<(Formula, bool)> for Cedent {
    fn from_iter<I: IntoIterator<Item = (Formula, bool)>>(iter: I) -> Cedent {
        let mut c = Cedent::new();
        for (f, m) in iter {
            c.insert(f, m);
        }
        c
    }
}

/// A sequent `Γ ⇒ Δ` of marked formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub ante: Cedent,
    pub succ: Cedent,
}

/// Whether measures count quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureMode {
    Prop,
    Predicate,
}

/// Complexity measures of a sequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Measures {
    pub a: usize,
    pub b: usize,
    pub n: usize,
    pub dp: usize,
    pub size: usize,
}

impl Sequent {
    pub fn new(ante: Cedent, succ: Cedent) -> Sequent {
        Sequent { ante, succ }
    }

    /// Builds a sequent with every formula marked.
    pub fn marked(ante: impl IntoIterator<Item = Formula>, succ: impl IntoIterator<Item = Formula>) -> Sequent {
        Sequent {
            ante: ante.into_iter().map(|f| (f, true)).collect(),
            succ: succ.into_iter().map(|f| (f, true)).collect(),
        }
    }

    /// Marks erased: `(Γ^×, Δ^×)`.
    pub fn erased(&self) -> (BTreeSet<Formula>, BTreeSet<Formula>) {
        (self.ante.erased(), self.succ.erased())
    }

    pub fn erase(&self) -> Sequent {
        Sequent { ante: self.ante.all_unmarked(), succ: self.succ.all_unmarked() }
    }

    pub fn mark_all(&self) -> Sequent {
        Sequent { ante: self.ante.all_marked(), succ: self.succ.all_marked() }
    }

    /// Same formulas, ignoring marks.
    pub fn same_erased(&self, other: &Sequent) -> bool {
        self.ante.formulas().eq(other.ante.formulas()) && self.succ.formulas().eq(other.succ.formulas())
    }

    /// `S ∪ S'` cedentwise.
    pub fn union(&self, other: &Sequent) -> Sequent {
        Sequent { ante: self.ante.union(&other.ante), succ: self.succ.union(&other.succ) }
    }

    /// Every formula of `self` occurs in `other` (marks ignored).
    pub fn erased_subset_of(&self, other: &Sequent) -> bool {
        self.ante.formulas().all(|f| other.ante.contains(f)) && self.succ.formulas().all(|f| other.succ.contains(f))
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.ante.formulas().chain(self.succ.formulas())
    }

    pub fn free_vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.collect_free(&mut out);
        }
        out
    }

    pub fn max_free_var(&self) -> Option<u32> {
        self.free_vars().into_iter().max()
    }

    pub fn signature(&self) -> Signature {
        Signature::of(self.formulas())
    }

    pub fn is_propositional(&self) -> bool {
        self.formulas().all(Formula::is_propositional)
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.formulas().all(Formula::is_quantifier_free)
    }

    /// Axiom test on erased cedents: a shared atom, or `⊥` in the antecedent.
    pub fn is_axiom(&self) -> bool {
        self.ante.contains(&Formula::Bot)
            || self.ante.formulas().any(|f| f.is_atomic() && self.succ.contains(f))
    }

    /// Succedent formulas positive and antecedent formulas negative.
    pub fn is_positive(&self) -> bool {
        self.ante.formulas().all(|f| crate::syntax::classify_positive(f, false))
            && self.succ.formulas().all(|f| crate::syntax::classify_positive(f, true))
    }

    /// Symbol count `#S`, one extra for `⇒`.
    pub fn size(&self) -> usize {
        1 + self.formulas().map(Formula::size).sum::<usize>()
    }

    pub fn rename_free(&self, map: &BTreeMap<u32, u32>) -> Sequent {
        Sequent {
            ante: self.ante.map_formulas(|f| f.rename_free(map)),
            succ: self.succ.map_formulas(|f| f.rename_free(map)),
        }
    }

    /// `a_S`, `b_S`, `dp` and `#S` relative to the bound `big_n`.
    pub fn measures(&self, big_n: usize, mode: MeasureMode) -> Measures {
        let mut a = 0;
        let mut b = 0;
        let pred = mode == MeasureMode::Predicate;
        let mut count = |f: &Formula, pos: bool| {
            f.visit_polarized(pos, &mut |g, p| match g {
                Formula::Implies(..) => {
                    b += 1;
                    if p {
                        a += 1;
                    }
                }
                Formula::And(..) | Formula::Or(..) => b += 1,
                Formula::Forall(..) if pred && p => a += 1,
                Formula::Exists(..) if pred => b += 1,
                _ => {}
            })
        };
        for f in self.ante.marked() {
            count(f, false);
        }
        for f in self.succ.marked() {
            count(f, true);
        }
        Measures { a, b, n: big_n, dp: (big_n + 1) * a + b, size: self.size() }
    }

    /// Total marked connective count, used as `N` for a root sequent.
    pub fn marked_connectives(&self, mode: MeasureMode) -> usize {
        let pred = mode == MeasureMode::Predicate;
        let mut n = 0;
        for f in self.ante.marked().chain(self.succ.marked()) {
            f.visit_polarized(true, &mut |g, _| match g {
                Formula::And(..) | Formula::Or(..) | Formula::Implies(..) => n += 1,
                Formula::Forall(..) | Formula::Exists(..) if pred => n += 1,
                _ => {}
            });
        }
        n
    }

    /// Text with marks shown as `°`.
    pub fn display_marked(&self) -> String {
        let side = |c: &Cedent| {
            c.iter()
                .map(|(f, m)| if m { format!("{}°", paren_if_compound(f)) } else { format!("{f}") })
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("{} |- {}", side(&self.ante), side(&self.succ))
    }
}

fn paren_if_compound(f: &Formula) -> String {
    match f {
        Formula::Bot | Formula::Atom(..) => format!("{f}"),
        _ => format!("({f})"),
    }
}

/// Prints in the input grammar; marks are not shown.
impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |c: &Cedent| c.formulas().map(|g| g.to_string()).collect::<Vec<_>>().join(", ");
        let (l, r) = (side(&self.ante), side(&self.succ));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(f, "|-"),
            (true, false) => write!(f, "|- {r}"),
            (false, true) => write!(f, "{l} |-"),
            (false, false) => write!(f, "{l} |- {r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marked_wins_on_collision() {
        let mut c = Cedent::new();
        c.insert(Formula::prop("p"), false);
        c.insert(Formula::prop("p"), true);
        assert_eq!(c.len(), 1);
        assert!(c.is_marked(&Formula::prop("p")));
        c.insert(Formula::prop("p"), false);
        assert!(c.is_marked(&Formula::prop("p")));
    }

    #[test]
    fn measure_examples() {
        let pq = Formula::implies(Formula::prop("p"), Formula::prop("q"));
        let s = Sequent::marked([], [pq]);
        let m = s.measures(1, MeasureMode::Prop);
        assert_eq!((m.a, m.b, m.dp), (1, 1, 3));
        let s = Sequent::marked([Formula::prop("p"), Formula::prop("q")], [Formula::prop("r")]);
        let m = s.measures(0, MeasureMode::Prop);
        assert_eq!((m.a, m.b, m.dp), (0, 0, 0));
    }

    #[test]
    fn unmarked_formulas_do_not_count() {
        let pq = Formula::implies(Formula::prop("p"), Formula::prop("q"));
        let s = Sequent::new(Cedent::new(), Cedent::new().with(pq, false));
        assert_eq!(s.measures(5, MeasureMode::Prop).dp, 0);
    }

    #[test]
    fn axioms_use_erased_atoms() {
        let s = Sequent::new(
            Cedent::new().with(Formula::prop("p"), false),
            Cedent::new().with(Formula::prop("p"), true),
        );
        assert!(s.is_axiom());
        assert!(Sequent::marked([Formula::Bot], []).is_axiom());
        assert!(!Sequent::marked([], [Formula::Bot]).is_axiom());
    }
}
