//! Propositional abduction over Boolean constraint languages.
//!
//! An instance asks for a set `E` of hypotheses such that `KB ∧ E` is
//! satisfiable and entails every manifestation. The crate places a
//! constraint language in Post's lattice of co-clones, derives the
//! parameterised complexity of the problem from that position, and solves
//! instances with the matching specialised algorithm. Exhaustive oracles
//! in [`oracle`] serve as ground truth for all of it.

pub mod clause;
pub mod dispatch;
pub mod error;
pub mod format;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod schaefer;
pub mod solvers;
pub mod verdict;

pub use error::{AbdError, Result};
pub use format::{parse_instance, serialize_instance};
pub use model::{
    AbductionInstance, Assignment, Constraint, ConstraintLanguage, Explanation, InstanceBuilder, KnowledgeBase, Param,
    Relation, Var, Variant,
};
pub use dispatch::{solve, verify, EngineChoice, SolveResult, VerifyReport};
pub use lattice::{identify_coclone, CoClone, CoCloneLabel};
pub use verdict::{classify, Verdict, VerdictLabel};
