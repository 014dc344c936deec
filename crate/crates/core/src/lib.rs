//! Decide-or-refute proof search for intuitionistic logic in the
//! multi-succedent sequent calculi LJpm (propositional) and LJm (first
//! order).
//!
//! Every search either ends in a cut-free derivation, checked by
//! [`rules::check_derivation`], or in a Kripke countermodel, checked by
//! [`kripke::falsifies`].

pub mod analysis;
pub mod characteristic;
pub mod driver;
pub mod error;
pub mod export;
pub mod kripke;
pub mod parser;
pub mod pspace;
pub mod rules;
pub mod search;
pub mod sequent;
pub mod staged;
pub mod syntax;
pub mod transfer;

pub use error::{Error, Result};
pub use parser::{parse_formula, parse_sequent};
pub use sequent::{Cedent, MeasureMode, Measures, Sequent};
pub use syntax::{Formula, Term};
