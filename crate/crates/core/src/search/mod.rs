//! Arc consistency, MAC backtracking search with conflict-driven weighting,
//! and the variable-ordering heuristics.

mod ac3;
mod heuristic;
mod mac;
mod store;
mod weights;

pub use ac3::{ac3, all_arcs, arcs_toward, revise, Ac3Result, DirectedArc, Revision};
pub use heuristic::{select_variable, static_order_by_wdeg, HeuristicSpec, SelectionContext};
pub use mac::{mac_search, Outcome, SearchLimits, SearchStats};
pub use store::{DomainStore, TrailEntry};
pub use weights::ConstraintWeights;
