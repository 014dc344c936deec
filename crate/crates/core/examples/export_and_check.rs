//! Emit derivations and countermodels as versioned JSON and DOT, then check
//! them again from the serialized text alone.

use seqcalc::export::{check_document, countermodel_document, derivation_document, derivation_dot, model_dot, Document};
use seqcalc::parse_sequent;
use seqcalc::search::{decide, SearchMode, Verdict};

fn main() -> seqcalc::Result<()> {
    for text in ["|- ~~(p | ~p)", "|- (p -> q) | (q -> p)"] {
        let s = parse_sequent(text)?;
        let (json, dot) = match decide(&s, SearchMode::Prop)? {
            Verdict::Derivable(d) => (derivation_document(&d).to_json(), derivation_dot(&d)),
            Verdict::Underivable(cm) => (countermodel_document(&cm.model, &s).to_json(), model_dot(&cm.model)),
            Verdict::Unknown => continue,
        };
        let back = Document::from_json(&json)?;
        println!("{text}: {} bytes of JSON, check {:?}", json.len(), check_document(&back)?);
        println!("{dot}");
    }
    Ok(())
}
