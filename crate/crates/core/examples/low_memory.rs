//! The depth-first decider that stores only the current branch, with its
//! space statistics next to the committed polynomial bounds.

use seqcalc::pspace::{decide_low_memory, SPACE_BOUND_C};
use seqcalc::search::SearchMode;
use seqcalc::parse_sequent;

fn main() -> seqcalc::Result<()> {
    println!("{:>4} {:>8} {:>10}  sequent", "n", "record", "C*n^4");
    for text in ["|- ~~(p | ~p)", "|- ((p -> q) -> p) -> p", "(p -> q) -> r, (q -> p) -> r |- r", "|- ~~(((p -> q) -> p) -> p)"] {
        let s = parse_sequent(text)?;
        let (v, stats) = decide_low_memory(&s, SearchMode::Prop)?;
        let n = s.size();
        println!("{n:>4} {:>8} {:>10.0}  {text}  value {v}", stats.max_record_size, SPACE_BOUND_C * (n as f64).powi(4));
    }
    Ok(())
}
