//! Decide a few propositional sequents and print the derivation or the
//! Kripke countermodel for each.
//!
//! cargo run --example prove_propositional -- "|- ((p -> q) -> p) -> p"

use seqcalc::parse_sequent;
use seqcalc::rules::check_derivation;
use seqcalc::search::{decide, SearchMode, Verdict};

fn main() -> seqcalc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if args.is_empty() {
        vec!["|- p -> ~~p".to_string(), "|- ~~p -> p".to_string(), "|- (p -> q) | (q -> p)".to_string()]
    } else {
        args
    };
    for text in inputs {
        let s = parse_sequent(&text)?;
        match decide(&s, SearchMode::Prop)? {
            Verdict::Derivable(d) => {
                check_derivation(&d).expect("search output checks");
                println!("{text}\n  derivable, {} inferences\n{}", d.size(), d.render());
            }
            Verdict::Underivable(cm) => {
                println!("{text}\n  underivable, countermodel with {} worlds", cm.model.len());
                for (w, world) in cm.model.worlds.iter().enumerate() {
                    let atoms: Vec<String> = world.atoms.iter().map(|a| a.to_string()).collect();
                    println!("    w{w} {{{}}} sees {:?}", atoms.join(", "), cm.model.above(w));
                }
                assert!(cm.falsifies(&s)?);
            }
            Verdict::Unknown => println!("{text}\n  unknown"),
        }
    }
    Ok(())
}
