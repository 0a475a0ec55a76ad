//! Syntax, measures and global semantics of graded universal modal logic.

mod formula;
mod model;
mod parse;
mod vocab;

pub use formula::{Formula, FormulaDisplay, Modality};
pub use model::{evaluate, evaluate_pointed, ModelProfile, PointedProfile};
pub use parse::{parse_formula, parse_formula_with, ParseOptions, DEFAULT_MAX_GRADE};
pub use vocab::{Vocabulary, MAX_SYMBOLS};

pub(crate) use vocab::type_has_positive;
