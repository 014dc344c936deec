//! Sequents of the positive fragment: universal quantifiers only at positive
//! positions, existential ones only at negative positions. Search on this
//! fragment is bounded by a step budget.

use seqcalc::parse_sequent;
use seqcalc::rules::audit_eigenvariables;
use seqcalc::search::{decide_positive, Verdict};

fn main() -> seqcalc::Result<()> {
    for text in [
        "P(a0) |- forall x. P(x)",
        "exists x. P(x) |- forall y. (P(y) -> P(y))",
        "exists x. (P(x) & q) |- forall y. (r -> q)",
        "q |- forall y. ((exists x. P(x)) -> q)",
    ] {
        let s = parse_sequent(text)?;
        match decide_positive(&s)? {
            Verdict::Derivable(d) => {
                audit_eigenvariables(&d).expect("eigenvariables are fresh");
                println!("derivable    {text}");
            }
            Verdict::Underivable(cm) => {
                println!("underivable  {text}");
                for (w, world) in cm.model.worlds.iter().enumerate() {
                    let atoms: Vec<String> = world.atoms.iter().map(|a| a.to_string()).collect();
                    println!("    w{w} D={:?} {{{}}}", world.vars, atoms.join(", "));
                }
            }
            Verdict::Unknown => println!("unknown      {text}"),
        }
    }
    Ok(())
}
