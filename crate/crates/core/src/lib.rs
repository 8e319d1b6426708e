pub mod baselines;
pub mod bench;
pub mod coevo;
pub mod csp;
pub mod error;
pub mod gen;
pub mod io;
pub mod search;

pub use csp::{Assignment, Constraint, ConstraintId, CspInstance, Domain, Relation, Semantics, Value};
pub use error::{Error, Result};
pub use search::{
    ac3, mac_search, revise, select_variable, static_order_by_wdeg, ConstraintWeights, DirectedArc,
    DomainStore, HeuristicSpec, Outcome, SearchLimits, SearchStats,
};
