use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ac3::ArcQueue;
use super::heuristic::{select_variable, HeuristicSpec, SelectionContext};
use super::{ConstraintWeights, DomainStore};
use crate::csp::{Assignment, CspInstance};
use crate::error::{Error, Result};

/// Optional node and wall-clock caps for one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub node_cap: Option<u64>,
    pub timeout_secs: Option<f64>,
}

impl SearchLimits {
    pub fn new(node_cap: Option<u64>, timeout_secs: Option<f64>) -> Result<Self> {
        if node_cap == Some(0) {
            return Err(Error::Param("node cap must be positive".into()));
        }
        if let Some(t) = timeout_secs {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::Param(format!("timeout must be positive, got {t}")));
            }
        }
        Ok(SearchLimits { node_cap, timeout_secs })
    }

    pub fn unlimited() -> Self {
        SearchLimits::default()
    }

    pub fn nodes(cap: u64) -> Self {
        SearchLimits { node_cap: Some(cap), timeout_secs: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Assignment),
    Unsat,
    Timeout,
    NodeLimit,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Sat(_) => "sat",
            Outcome::Unsat => "unsat",
            Outcome::Timeout => "timeout",
            Outcome::NodeLimit => "node_limit",
        }
    }

    /// Whether the search proved satisfiability or unsatisfiability.
    pub fn is_decided(&self) -> bool {
        matches!(self, Outcome::Sat(_) | Outcome::Unsat)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchStats {
    pub nodes: u64,
    pub wipeouts: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
    pub outcome: Outcome,
}

impl SearchStats {
    /// Equality on everything except `elapsed`.
    pub fn same_run(&self, other: &SearchStats) -> bool {
        self.nodes == other.nodes && self.wipeouts == other.wipeouts && self.outcome == other.outcome
    }
}

enum Step {
    Solved,
    Exhausted,
    Stopped(Outcome),
}

struct Mac<'a> {
    inst: &'a CspInstance,
    heuristic: HeuristicSpec,
    weights: &'a mut ConstraintWeights,
    limits: SearchLimits,
    store: DomainStore,
    queue: ArcQueue,
    assigned: Vec<bool>,
    chosen: Vec<usize>,
    rng: ChaCha8Rng,
    nodes: u64,
    wipeouts: u64,
    start: Instant,
}

impl Mac<'_> {
    fn limit_hit(&self) -> Option<Outcome> {
        if let Some(cap) = self.limits.node_cap {
            if self.nodes >= cap {
                return Some(Outcome::NodeLimit);
            }
        }
        if let Some(t) = self.limits.timeout_secs {
            if self.start.elapsed().as_secs_f64() >= t {
                return Some(Outcome::Timeout);
            }
        }
        None
    }

    fn search(&mut self, depth: usize) -> Result<Step> {
        if depth == self.inst.num_vars() {
            return Ok(Step::Solved);
        }
        let var = {
            let ctx = SelectionContext {
                inst: self.inst,
                store: &self.store,
                weights: self.weights,
                assigned: &self.assigned,
            };
            select_variable(self.heuristic, &ctx, &mut self.rng)?
        };
        let candidates: Vec<usize> = self.store.indices(var).collect();
        self.assigned[var] = true;
        for index in candidates {
            if let Some(outcome) = self.limit_hit() {
                return Ok(Step::Stopped(outcome));
            }
            self.nodes += 1;
            let level = self.store.level();
            self.store.push_level();
            self.store.assign(var, index);
            self.chosen[var] = index;
            self.queue.push_toward(self.inst, var);
            if self.queue.propagate(self.inst, &mut self.store, self.weights).is_none() {
                match self.search(depth + 1)? {
                    Step::Exhausted => {}
                    done => return Ok(done),
                }
            } else {
                self.wipeouts += 1;
            }
            self.store.undo_to(level);
        }
        self.assigned[var] = false;
        Ok(Step::Exhausted)
    }
}

/// d-way MAC backtracking. Values are tried in ascending order; every
/// assignment counts as one node and is followed by AC-3 over the arcs
/// pointing at the assigned variable. Wipeouts charge the culprit
/// constraint's weight in place.
pub fn mac_search(
    inst: &CspInstance,
    heuristic: HeuristicSpec,
    weights: &mut ConstraintWeights,
    limits: SearchLimits,
    rng_seed: u64,
) -> Result<SearchStats> {
    if weights.len() != inst.num_constraints() {
        return Err(Error::Contract(format!(
            "{} weights for {} constraints",
            weights.len(),
            inst.num_constraints()
        )));
    }
    let start = Instant::now();
    let mut mac = Mac {
        inst,
        heuristic,
        weights,
        limits,
        store: DomainStore::new(inst),
        queue: ArcQueue::new(inst),
        assigned: vec![false; inst.num_vars()],
        chosen: vec![0; inst.num_vars()],
        rng: ChaCha8Rng::seed_from_u64(rng_seed),
        nodes: 0,
        wipeouts: 0,
        start,
    };
    mac.queue.push_all(inst);
    let outcome = if mac.queue.propagate(inst, &mut mac.store, mac.weights).is_some() {
        mac.wipeouts += 1;
        Outcome::Unsat
    } else {
        match mac.search(0)? {
            Step::Solved => Outcome::Sat(inst.from_indices(&mac.chosen)),
            Step::Exhausted => Outcome::Unsat,
            Step::Stopped(o) => o,
        }
    };
    Ok(SearchStats {
        nodes: mac.nodes,
        wipeouts: mac.wipeouts,
        elapsed: start.elapsed().as_secs_f64(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Relation};

    fn triangle(d: i64) -> CspInstance {
        let dom = Domain::range(0, d - 1).unwrap();
        let ne = Relation::not_equal(&dom, &dom);
        CspInstance::new(
            "triangle",
            vec![dom.clone(), dom.clone(), dom],
            vec![((0, 1), ne.clone()), ((1, 2), ne.clone()), ((0, 2), ne)],
        )
        .unwrap()
    }

    #[test]
    fn three_colour_triangle_is_sat() {
        let inst = triangle(3);
        let mut w = ConstraintWeights::uniform(3);
        let stats = mac_search(&inst, HeuristicSpec::Lex, &mut w, SearchLimits::unlimited(), 0).unwrap();
        match &stats.outcome {
            Outcome::Sat(a) => assert!(inst.is_solution(a).unwrap()),
            other => panic!("expected sat, got {other:?}"),
        }
        assert_eq!(stats.nodes, 3);
    }

    #[test]
    fn two_colour_triangle_is_unsat_with_matching_weight_growth() {
        let inst = triangle(2);
        for h in HeuristicSpec::ALL {
            let mut w = ConstraintWeights::uniform(3);
            let stats = mac_search(&inst, h, &mut w, SearchLimits::unlimited(), 3).unwrap();
            assert_eq!(stats.outcome, Outcome::Unsat);
            assert!(stats.wipeouts > 0);
            assert_eq!(w.excess(), stats.wipeouts as f64);
        }
    }

    #[test]
    fn node_cap_of_one_binds_immediately() {
        let inst = triangle(2);
        let mut w = ConstraintWeights::uniform(3);
        let stats = mac_search(&inst, HeuristicSpec::Lex, &mut w, SearchLimits::nodes(1), 0).unwrap();
        assert_eq!(stats.outcome, Outcome::NodeLimit);
        assert_eq!(stats.nodes, 1);
    }

    #[test]
    fn root_wipeout_is_unsat_without_nodes() {
        let d = Domain::range(0, 1).unwrap();
        let inst =
            CspInstance::new("e", vec![d.clone(), d], vec![((0, 1), Relation::supports([]))]).unwrap();
        let mut w = ConstraintWeights::uniform(1);
        let stats = mac_search(&inst, HeuristicSpec::Wdeg, &mut w, SearchLimits::unlimited(), 0).unwrap();
        assert_eq!((stats.outcome, stats.nodes, stats.wipeouts), (Outcome::Unsat, 0, 1));
        assert_eq!(w.get(0), 2.0);
    }

    #[test]
    fn weight_length_mismatch_is_rejected() {
        let inst = triangle(2);
        let mut w = ConstraintWeights::uniform(2);
        assert!(mac_search(&inst, HeuristicSpec::Lex, &mut w, SearchLimits::unlimited(), 0).is_err());
    }

    #[test]
    fn limits_must_be_positive() {
        assert!(SearchLimits::new(Some(0), None).is_err());
        assert!(SearchLimits::new(None, Some(0.0)).is_err());
        assert!(SearchLimits::new(Some(5), Some(1.5)).is_ok());
    }
}
