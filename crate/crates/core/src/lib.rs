//! Model checking of MSO and CMSO sentences on rooted labelled trees of
//! bounded height by kernelization, and on graphs of bounded tree-depth or
//! given by tree-models through simple interpretations into such trees.
//!
//! The pipeline for trees is: parse a sentence ([`formula`]), compute its
//! quantifier counts on the prenex form, cut surplus l-isomorphic limbs
//! ([`kernelize`]), and evaluate the sentence on the remaining kernel by
//! exhaustive expansion ([`checker`]). Graphs are first turned into labelled
//! trees together with an interpretation ([`interpret`]).

pub mod checker;
pub mod formula;
pub mod interpret;
pub mod kernelize;
pub mod tree;

pub use checker::{
    check_with_kernel, eval, model_check, Budget, FiniteStructure, KernelOptions, Logic,
};
pub use formula::{
    lcm_moduli, parse, parse_sentence, to_prenex, Formula, PrenexFormula, Signature,
};
pub use interpret::{
    check_graph, shrub_interpret, td_interpret, translate, tree_depth_exact, EliminationForest,
    FrontEnd, Graph, TreeModel,
};
pub use kernelize::{reduce, reduce_cmso, ThresholdFn};
pub use tree::{CanonicalCode, LabelledTree};
