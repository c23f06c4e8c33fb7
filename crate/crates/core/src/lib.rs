pub mod action;
pub mod deorder;
pub mod doc;
pub mod fixtures;
pub mod generators;
pub mod literal;
pub mod oracles;
pub mod order;
pub mod parallel;
pub mod plan;
pub mod refalgs;
pub mod render;
pub mod semantics;

pub use action::{Action, ActionId};
pub use literal::{Atom, Literal};
pub use oracles::{OracleAnswer, OracleBudget, OracleError};
pub use order::OrderRelation;
pub use parallel::{Execution, NonConcurrency, ParallelPlan};
pub use plan::{PartialOrderPlan, Ppi};
pub use semantics::{SelfContainedPlan, Validator};
