//! First-order logic with incomplete information over finite model sets.

pub mod counting;
pub mod eval;
pub mod formula;
pub mod lex;
pub mod model;
pub mod perspective;
pub mod quantifier;
pub mod random;
pub mod suite;
pub mod symbol;
pub mod systems;
pub mod translate;
pub mod weights;

pub use eval::{eval_fo, eval_neg, eval_pos, eval_variant_singleton, Evaluator, Verdict};
pub use formula::{Formula, Fragment, Signature};
pub use model::{ChoiceFunction, Elem, Interpretation, ModelSet, Structure};
pub use symbol::{RelName, Symbol, Var};
