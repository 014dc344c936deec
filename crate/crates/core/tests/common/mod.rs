#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqcalc::{Formula, Sequent, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random propositional formula over `atoms` variables with depth at most `depth`.
pub fn formula(r: &mut ChaCha8Rng, atoms: usize, depth: usize) -> Formula {
    if depth == 0 || r.gen_bool(0.25) {
        return if r.gen_bool(0.08) { Formula::Bot } else { Formula::prop(["p", "q", "r", "s"][r.gen_range(0..atoms)]) };
    }
    let a = formula(r, atoms, depth - 1);
    match r.gen_range(0..5) {
        0 => Formula::and(a, formula(r, atoms, depth - 1)),
        1 => Formula::or(a, formula(r, atoms, depth - 1)),
        2 => Formula::not(a),
        _ => Formula::implies(a, formula(r, atoms, depth - 1)),
    }
}

pub fn sequent(r: &mut ChaCha8Rng, atoms: usize, depth: usize) -> Sequent {
    let ante = (0..r.gen_range(0..3)).map(|_| formula(r, atoms, depth - 1)).collect::<Vec<_>>();
    let succ = (0..r.gen_range(1..3)).map(|_| formula(r, atoms, depth)).collect::<Vec<_>>();
    Sequent::marked(ante, succ)
}

/// Parses a corpus file: one sequent per line, `# expected: ...` optional.
pub fn corpus(text: &str) -> Vec<(String, Option<bool>)> {
    text.lines()
        .filter_map(|l| {
            let (seq, comment) = l.split_once('#').unwrap_or((l, ""));
            let seq = seq.trim();
            if seq.is_empty() {
                return None;
            }
            let expected = comment.trim().strip_prefix("expected:").map(|e| e.trim() == "derivable");
            Some((seq.to_string(), expected))
        })
        .collect()
}

pub fn prop_corpus() -> Vec<(String, Option<bool>)> {
    corpus(include_str!("../../corpus/prop.txt"))
}

pub fn positive_corpus() -> Vec<(String, Option<bool>)> {
    corpus(include_str!("../../corpus/positive.txt"))
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn term(r: &mut ChaCha8Rng, bound: &[&'static str]) -> Term {
    if bound.is_empty() || r.gen_bool(0.2) {
        Term::Free(0)
    } else {
        Term::Bound(bound[r.gen_range(0..bound.len())].into())
    }
}

/// Random formula whose quantifiers respect polarity: `∀` only at positive
/// positions, `∃` only at negative ones. `positive` is the polarity of the
/// position being filled.
pub fn positive_formula(r: &mut ChaCha8Rng, positive: bool, depth: usize, bound: &mut Vec<&'static str>) -> Formula {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..6) {
            0 => Formula::prop("q"),
            1 => Formula::Bot,
            2 | 3 => Formula::atom("P", vec![term(r, bound)]),
            4 => Formula::atom("Q", vec![term(r, bound)]),
            _ => Formula::atom("R", vec![term(r, bound), term(r, bound)]),
        };
    }
    match r.gen_range(0..6) {
        0 => Formula::and(positive_formula(r, positive, depth - 1, bound), positive_formula(r, positive, depth - 1, bound)),
        1 => Formula::or(positive_formula(r, positive, depth - 1, bound), positive_formula(r, positive, depth - 1, bound)),
        2 | 3 => Formula::implies(
            positive_formula(r, !positive, depth - 1, bound),
            positive_formula(r, positive, depth - 1, bound),
        ),
        _ if bound.len() < VARS.len() => {
            let v = VARS[bound.len()];
            bound.push(v);
            let body = positive_formula(r, positive, depth - 1, bound);
            bound.pop();
            if positive {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
        _ => positive_formula(r, positive, depth - 1, bound),
    }
}

pub fn positive_sequent(r: &mut ChaCha8Rng, depth: usize) -> Sequent {
    let ante = (0..r.gen_range(0..3)).map(|_| positive_formula(r, false, depth - 1, &mut Vec::new())).collect::<Vec<_>>();
    let succ = (0..r.gen_range(1..3)).map(|_| positive_formula(r, true, depth, &mut Vec::new())).collect::<Vec<_>>();
    Sequent::marked(ante, succ)
}

pub fn positive_hard_corpus() -> Vec<(String, Option<bool>)> {
    corpus(include_str!("../../corpus/positive_hard.txt"))
}

pub fn full_corpus() -> Vec<seqcalc::driver::CorpusLine> {
    seqcalc::driver::parse_corpus(include_str!("../../corpus/full.txt")).expect("bundled corpus parses")
}

/// `(α, β)` pairs for the `⊕` checks: propositional and universally bound
/// implications.
pub const OPLUS_PAIRS: [(&str, &str); 20] = [
    ("p", "q"),
    ("p -> q", "r"),
    ("p & q", "s"),
    ("~p", "q"),
    ("p | q", "r"),
    ("p -> (q -> r)", "s"),
    ("bot", "p"),
    ("~~p", "q"),
    ("(p -> q) -> p", "r"),
    ("p -> q | r", "s"),
    ("forall x. (P(x) -> Q(x))", "r"),
    ("forall x. forall y. (R(x, y) -> Q(x))", "p"),
    ("forall x. (P(x) -> bot)", "q"),
    ("forall x. (P(x) -> Q(x) | R(x))", "exists x. S(x)"),
    ("forall x. (P(x) & Q(x) -> R(x))", "q | r"),
    ("forall x. ((exists y. R(x, y)) -> P(x))", "forall x. S(x)"),
    ("forall x. (P(x) -> forall y. R(x, y))", "p"),
    ("forall x. P(x)", "q"),
    ("exists x. P(x)", "r"),
    ("forall x. (q -> P(x))", "s"),
];

/// Depth at which every `⊕` goal is proved.
pub const OPLUS_DEPTH: usize = 24;

/// Sequents whose staged truncations contain transferable pairs, with the
/// number of stages to build.
pub const TRANSFER_FIXTURES: [(&str, usize); 6] = [
    ("forall x. P(x) |- q -> P(f(a0))", 7),
    ("forall x. P(x) |- (q -> P(f(a0))) | (r -> P(f(a0)))", 7),
    ("forall x. exists y. Q(x, y), forall x. P(x) |- q -> P(f(a0))", 7),
    ("forall x. P(x) |- (q -> P(f(a0))) & (r -> P(f(f(a0))))", 9),
    ("forall x. (Q(x) -> P(x)), forall x. Q(x) |- q -> P(f(a0))", 7),
    ("forall x. P(x) |- ~~P(f(a0))", 9),
];

/// Working depth of the transfer loop.
pub const TRANSFER_DEPTH: usize = 64;
