//! Build a Kripke model by hand, evaluate the forcing relation, and compare
//! with the brute-force small-model search.

use seqcalc::kripke::{brute_force_countermodel, falsifies, model_check, KripkeModel};
use seqcalc::{parse_formula, parse_sequent};

fn main() -> seqcalc::Result<()> {
    // w0 below w1 and w2; p holds only at w1.
    let m = KripkeModel::prop(vec![vec![], vec!["p"], vec!["q"]], vec![(0, 1), (0, 2)]);
    m.validate()?;
    for f in ["p | ~p", "~~p", "~p | ~~p", "(p -> q) | (q -> p)"] {
        let forced: Vec<bool> = (0..m.len()).map(|w| model_check(&m, w, &parse_formula(f).unwrap()).unwrap()).collect();
        println!("{f:<22} forced at {forced:?}");
    }

    let s = parse_sequent("|- ~p | ~~p")?;
    println!("model falsifies {s}: {}", falsifies(&m, 0, &s)?);
    match brute_force_countermodel(&s, 3) {
        Some(found) => println!("oracle found a {}-world countermodel", found.len()),
        None => println!("no countermodel with at most 3 worlds"),
    }
    Ok(())
}
