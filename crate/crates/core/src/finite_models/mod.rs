//! Finite structures, evaluation, direct products and term searches.

mod eval;
mod product;
mod search;
mod structure;

pub use eval::{eval, eval_term, holds_universally, Assignment, EvalError, Evaluator};
pub use product::{product, ProductStructure};
pub use search::{
    corollary3_search, corollary5_search, distinct_terms, positive_prefix_search, search_conjuncts, DefinabilityError,
    DefinedFunctionFamily, PositiveWitness, PrefixWitness, SearchError, MAX_PRODUCT_SIZE,
};
pub use structure::{all_structures, AllStructures, FiniteStructure, StructureError};
