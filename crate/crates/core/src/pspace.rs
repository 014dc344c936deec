//! Depth-first traversal of `De(S₀)` in polynomial space.
//!
//! Only the current branch is stored: each frame keeps its sequent and the
//! index of the son being visited. Sons are recomputed from the frame when
//! needed, and eigenvariables are chosen above every variable on the branch,
//! so the same frame always yields the same sons.

use serde::Serialize;

use crate::analysis::{self, Fresh, LeafKind, TrStep};
use crate::error::{Error, Result};
use crate::search::{br_sons, is_repeat, SearchLimits, SearchMode};
use crate::sequent::Sequent;

/// Constant of the space bound `max_record_size ≤ C·(#S₀)^k`, with `k = 4`
/// in propositional mode and `k = 5` in positive mode. Fitted once on the
/// bundled corpora and the seeded random corpora, then frozen.
pub const SPACE_BOUND_C: f64 = 0.125;

/// Constant of the branch length bound `branch_max_len ≤ B·(#S₀)²`, fitted
/// with [`SPACE_BOUND_C`].
pub const BRANCH_BOUND_B: f64 = 0.25;

/// Space accounting for one traversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PspaceStats {
    /// Largest total size of the stored branch.
    pub max_record_size: usize,
    /// Longest branch, in frames.
    pub branch_max_len: usize,
    pub nodes_visited: usize,
}

impl PspaceStats {
    /// Whether the stats respect the committed bounds for a root of size `n`.
    pub fn within_bounds(&self, n: usize, mode: SearchMode) -> bool {
        let n = n as f64;
        let k = if mode == SearchMode::Prop { 4 } else { 5 };
        self.max_record_size as f64 <= SPACE_BOUND_C * n.powi(k)
            && self.branch_max_len as f64 <= BRANCH_BOUND_B * n * n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// An inversion; all uppers must be derivable.
    And,
    /// (br); one upper suffices.
    Or,
}

#[derive(Clone, Debug)]
struct Frame {
    sequent: Sequent,
    kind: Kind,
    /// The sequent that started this `Tr`, kept for the loop check.
    tr_input: Option<Sequent>,
    /// Lowest variable index unused on the branch up to this frame.
    next: u32,
    cursor: usize,
}

impl Frame {
    fn size(&self) -> usize {
        self.sequent.size() + self.tr_input.as_ref().map_or(0, Sequent::size)
    }

    fn sons(&self, mode: SearchMode) -> Vec<(Sequent, Option<u32>)> {
        let mut fresh = Fresh::starting_at(self.next);
        match self.kind {
            Kind::And => match analysis::tr_step(&self.sequent, mode.calculus(), &mut fresh).1 {
                TrStep::Inference { uppers, .. } => uppers.into_iter().map(|u| (u, None)).collect(),
                _ => unreachable!("an inversion frame has uppers"),
            },
            Kind::Or => br_sons(mode, &self.sequent, &mut fresh).into_iter().map(|b| (b.sequent, b.eigenvariable)).collect(),
        }
    }
}

enum Opened {
    Value(u8),
    Frame(Frame),
}

fn next_after(next: u32, s: &Sequent) -> u32 {
    next.max(s.max_free_var().map_or(0, |v| v + 1))
}

fn open(s: Sequent, tr_input: bool, next: u32, mode: SearchMode) -> Opened {
    let calc = mode.calculus();
    let next = next_after(next, &s);
    let (cur, step) = analysis::tr_step(&s, calc, &mut Fresh::starting_at(next));
    let kind = match step {
        TrStep::Axiom => return Opened::Value(1),
        TrStep::Inference { .. } => Kind::And,
        TrStep::Leaf => match analysis::classify_leaf(&cur, calc) {
            LeafKind::Axiom => return Opened::Value(1),
            LeafKind::FullyAnalyzed => return Opened::Value(0),
            LeafKind::NonInvertible => Kind::Or,
        },
    };
    Opened::Frame(Frame { sequent: cur, kind, tr_input: tr_input.then_some(s), next, cursor: 0 })
}

// Passes `v` to the frame on top, popping every frame it decides.
fn deliver(stack: &mut Vec<Frame>, mut v: u8, record: &mut usize) -> Option<u8> {
    loop {
        let Some(top) = stack.last_mut() else { return Some(v) };
        let stop = if top.kind == Kind::And { 0 } else { 1 };
        if v != stop {
            top.cursor += 1;
            return None;
        }
        *record -= top.size();
        stack.pop();
        v = stop;
    }
}

/// Decides `s0` storing one branch at a time. Returns 1 for derivable.
pub fn decide_low_memory(s0: &Sequent, mode: SearchMode) -> Result<(u8, PspaceStats)> {
    decide_low_memory_with(s0, mode, SearchLimits::for_mode(mode).max_steps)
}

/// As [`decide_low_memory`], failing with [`Error::Limit`] after `max_visits`
/// visited nodes.
pub fn decide_low_memory_with(s0: &Sequent, mode: SearchMode, max_visits: usize) -> Result<(u8, PspaceStats)> {
    mode.admits(s0)?;
    let mut stats = PspaceStats { nodes_visited: 1, ..Default::default() };
    let mut stack = Vec::new();
    let mut record = 0;
    let push = |stack: &mut Vec<Frame>, f: Frame, record: &mut usize, stats: &mut PspaceStats| {
        *record += f.size();
        stack.push(f);
        stats.max_record_size = stats.max_record_size.max(*record);
        stats.branch_max_len = stats.branch_max_len.max(stack.len());
    };
    match open(s0.clone(), true, 1, mode) {
        Opened::Value(v) => {
            stats.max_record_size = s0.size();
            stats.branch_max_len = 1;
            return Ok((v, stats));
        }
        Opened::Frame(f) => push(&mut stack, f, &mut record, &mut stats),
    }
    loop {
        let top = stack.last().expect("non-empty branch");
        let mut sons = top.sons(mode);
        let value = if top.cursor == sons.len() {
            let v = if top.kind == Kind::And { 1 } else { 0 };
            record -= top.size();
            stack.pop();
            v
        } else {
            stats.nodes_visited += 1;
            if stats.nodes_visited > max_visits {
                return Err(Error::Limit(format!("traversal exceeded {max_visits} nodes")));
            }
            let (son, eigen) = sons.swap_remove(top.cursor);
            let is_br = top.kind == Kind::Or;
            let looped = is_br
                && stack.iter().any(|f| f.tr_input.as_ref().is_some_and(|t| is_repeat(&son, eigen, t)));
            if looped {
                0
            } else {
                match open(son, is_br, top.next, mode) {
                    Opened::Value(v) => v,
                    Opened::Frame(f) => {
                        push(&mut stack, f, &mut record, &mut stats);
                        continue;
                    }
                }
            }
        };
        if let Some(v) = deliver(&mut stack, value, &mut record) {
            return Ok((v, stats));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;
    use crate::search::{build_search_tree, evaluate_gates};

    fn both(t: &str, mode: SearchMode) -> (u8, u8) {
        let s = parse_sequent(t).unwrap();
        let mut tree = build_search_tree(&s, mode).unwrap();
        let v = evaluate_gates(&mut tree).unwrap();
        (decide_low_memory(&s, mode).unwrap().0, v)
    }

    #[test]
    fn agrees_with_tree_mode() {
        assert_eq!(both("|- p -> p", SearchMode::Prop), (1, 1));
        assert_eq!(both("|- p | ~p", SearchMode::Prop), (0, 0));
        assert_eq!(both("|- ~~(p | ~p)", SearchMode::Prop), (1, 1));
        assert_eq!(both("|- ((p -> q) -> p) -> p", SearchMode::Prop), (0, 0));
        assert_eq!(both("P(a0) |- forall x. (q -> P(a0))", SearchMode::Positive), (1, 1));
        assert_eq!(both("P(a0) |- forall x. P(x)", SearchMode::Positive), (0, 0));
    }

    #[test]
    fn axiom_root_has_one_frame() {
        let (v, st) = decide_low_memory(&parse_sequent("p |- p").unwrap(), SearchMode::Prop).unwrap();
        assert_eq!((v, st.branch_max_len, st.nodes_visited), (1, 1, 1));
    }

    #[test]
    fn rejects_non_positive_input() {
        let s = parse_sequent("forall x. P(x) |- P(a0)").unwrap();
        assert!(decide_low_memory(&s, SearchMode::Positive).is_err());
    }
}
