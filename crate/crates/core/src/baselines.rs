//! Comparison weight learners: randomized restarts with wipeout counting
//! (RNDI) and weighted hill climbing with restarts (HC).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, ConstraintId, CspInstance};
use crate::error::{Error, Result};
use crate::search::{mac_search, ConstraintWeights, HeuristicSpec, SearchLimits, SearchStats};

/// Restart counts swept by the experiments.
pub const RNDI_RESTART_PRESETS: [usize; 6] = [5, 25, 50, 100, 150, 500];
/// Total hill-climbing step budgets swept by the experiments.
pub const HC_ITERATION_PRESETS: [usize; 6] = [5, 10, 25, 50, 100, 500];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RndiParams {
    /// R: probes plus the final run.
    pub restarts: usize,
    /// Per-probe node cap is `node_cap_factor · n`.
    pub node_cap_factor: u64,
    pub final_heuristic: HeuristicSpec,
    pub seed: u64,
}

impl Default for RndiParams {
    fn default() -> Self {
        RndiParams { restarts: 50, node_cap_factor: 10, final_heuristic: HeuristicSpec::Wdeg, seed: 0 }
    }
}

impl RndiParams {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.node_cap_factor == 0 {
            return Err(Error::Param("RNDI restarts and node cap factor must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RndiLearned {
    pub weights: ConstraintWeights,
    /// One entry per probe, in order.
    pub probes: Vec<SearchStats>,
}

impl RndiLearned {
    pub fn total_wipeouts(&self) -> u64 {
        self.probes.iter().map(|p| p.wipeouts).sum()
    }

    pub fn total_nodes(&self) -> u64 {
        self.probes.iter().map(|p| p.nodes).sum()
    }

    /// The probe that decided the instance, if probing stopped early.
    pub fn decided(&self) -> Option<&SearchStats> {
        self.probes.last().filter(|p| p.outcome.is_decided())
    }
}

/// R − 1 node-capped MAC probes with random variable selection, all charging
/// the same weight vector. Probing stops as soon as one probe decides the
/// instance.
pub fn rndi_learn(inst: &CspInstance, p: &RndiParams) -> Result<RndiLearned> {
    p.validate()?;
    let mut weights = ConstraintWeights::uniform(inst.num_constraints());
    let cap = p.node_cap_factor * inst.num_vars().max(1) as u64;
    let mut probes = Vec::new();
    for probe in 0..p.restarts - 1 {
        let stats = mac_search(
            inst,
            HeuristicSpec::Random,
            &mut weights,
            SearchLimits::nodes(cap),
            p.seed.wrapping_add(probe as u64),
        )?;
        let decided = stats.outcome.is_decided();
        probes.push(stats);
        if decided {
            break;
        }
    }
    Ok(RndiLearned { weights, probes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HcParams {
    pub iterations_total: usize,
    pub cutoff: usize,
    pub seed: u64,
}

impl Default for HcParams {
    fn default() -> Self {
        HcParams { iterations_total: 100, cutoff: 50, seed: 0 }
    }
}

impl HcParams {
    pub fn validate(&self) -> Result<()> {
        if self.iterations_total == 0 || self.cutoff == 0 {
            return Err(Error::Param("HC iterations and cutoff must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClimbEnd {
    LocalMinimum,
    Cutoff,
}

/// A finished climb and the constraints whose weight it incremented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Climb {
    pub steps: usize,
    pub end: ClimbEnd,
    pub incremented: Vec<ConstraintId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HcLearned {
    pub weights: ConstraintWeights,
    pub climbs: Vec<Climb>,
    pub steps: usize,
    /// Set when a climb reached zero violations.
    pub solution: Option<Assignment>,
}

struct Climber<'a> {
    inst: &'a CspInstance,
    weights: ConstraintWeights,
    values: Vec<usize>,
}

impl Climber<'_> {
    fn violated(&self, c: ConstraintId) -> bool {
        let con = self.inst.constraint(c);
        let (x, y) = con.scope();
        !con.allows_idx(self.values[x], self.values[y])
    }

    fn violated_set(&self) -> Vec<ConstraintId> {
        (0..self.inst.num_constraints()).filter(|&c| self.violated(c)).collect()
    }

    /// Weighted violation of the constraints incident to `var` if it took `index`.
    fn cost_at(&self, var: usize, index: usize) -> f64 {
        self.inst
            .neighbors(var)
            .iter()
            .filter(|&&(c, z)| !self.inst.constraint(c).allows_from(var, index, self.values[z]))
            .map(|&(c, _)| self.weights.get(c))
            .sum()
    }

    /// Smallest-index value minimizing the incident weighted violation.
    fn best_value(&self, var: usize) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for index in 0..self.inst.domain(var).len() {
            let cost = self.cost_at(var, index);
            if cost < best.1 {
                best = (index, cost);
            }
        }
        best
    }

    fn at_local_minimum(&self) -> bool {
        (0..self.inst.num_vars()).all(|v| self.best_value(v).1 >= self.cost_at(v, self.values[v]))
    }

    fn randomize<R: Rng>(&mut self, rng: &mut R) {
        for (v, slot) in self.values.iter_mut().enumerate() {
            *slot = rng.gen_range(0..self.inst.domain(v).len());
        }
    }
}

/// Weighted min-conflicts hill climbing with restarts. A climb ends at a
/// local minimum or after `cutoff` steps; either way every constraint it
/// leaves violated gains one unit of weight before the next restart. Stops
/// when `iterations_total` steps have been spent or a climb solves the
/// instance.
pub fn hc_learn(inst: &CspInstance, p: &HcParams) -> Result<HcLearned> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut climber = Climber {
        inst,
        weights: ConstraintWeights::uniform(inst.num_constraints()),
        values: vec![0; inst.num_vars()],
    };
    let mut climbs = Vec::new();
    let mut steps = 0;
    let mut solution = None;
    'restarts: while steps < p.iterations_total {
        climber.randomize(&mut rng);
        let mut climb_steps = 0;
        loop {
            let violated = climber.violated_set();
            if violated.is_empty() {
                solution = Some(inst.from_indices(&climber.values));
                break 'restarts;
            }
            if steps >= p.iterations_total {
                break 'restarts;
            }
            let mut conflicted: Vec<usize> = violated
                .iter()
                .flat_map(|&c| {
                    let (x, y) = inst.constraint(c).scope();
                    [x, y]
                })
                .collect();
            conflicted.sort_unstable();
            conflicted.dedup();
            let var = conflicted[rng.gen_range(0..conflicted.len())];
            climber.values[var] = climber.best_value(var).0;
            steps += 1;
            climb_steps += 1;

            let violated = climber.violated_set();
            if violated.is_empty() {
                solution = Some(inst.from_indices(&climber.values));
                break 'restarts;
            }
            let end = if climber.at_local_minimum() {
                Some(ClimbEnd::LocalMinimum)
            } else if climb_steps >= p.cutoff {
                Some(ClimbEnd::Cutoff)
            } else {
                None
            };
            if let Some(end) = end {
                for &c in &violated {
                    climber.weights.increment(c);
                }
                climbs.push(Climb { steps: climb_steps, end, incremented: violated });
                continue 'restarts;
            }
        }
    }
    Ok(HcLearned { weights: climber.weights, climbs, steps, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Relation};
    use crate::search::Outcome;

    fn empty_pair() -> CspInstance {
        let d = Domain::range(0, 2).unwrap();
        CspInstance::new("e", vec![d.clone(), d], vec![((0, 1), Relation::supports([]))]).unwrap()
    }

    #[test]
    fn single_restart_means_no_probes() {
        let learned = rndi_learn(&empty_pair(), &RndiParams { restarts: 1, ..RndiParams::default() }).unwrap();
        assert!(learned.probes.is_empty());
        assert_eq!(learned.weights, ConstraintWeights::uniform(1));
    }

    #[test]
    fn rndi_stops_on_a_decided_probe() {
        let learned = rndi_learn(&empty_pair(), &RndiParams { restarts: 5, ..RndiParams::default() }).unwrap();
        assert_eq!(learned.probes.len(), 1);
        assert_eq!(learned.probes[0].outcome, Outcome::Unsat);
        assert_eq!(learned.weights.get(0), 1.0 + learned.total_wipeouts() as f64);
        assert_eq!(learned.weights.get(0), 2.0);
        assert!(learned.decided().is_some());
    }

    #[test]
    fn hc_without_constraints_returns_immediately() {
        let d = Domain::range(0, 4).unwrap();
        let inst = CspInstance::new("free", vec![d.clone(), d], vec![]).unwrap();
        let learned = hc_learn(&inst, &HcParams::default()).unwrap();
        assert_eq!(learned.steps, 0);
        assert!(learned.solution.is_some());
        assert!(learned.weights.is_empty());
    }

    #[test]
    fn hc_on_an_empty_relation_counts_climbs() {
        for total in [1, 7, 30] {
            let learned =
                hc_learn(&empty_pair(), &HcParams { iterations_total: total, cutoff: 50, seed: 3 }).unwrap();
            // every climb is one step long and ends at a local minimum
            assert_eq!(learned.climbs.len(), total);
            assert!(learned.climbs.iter().all(|c| c.end == ClimbEnd::LocalMinimum && c.steps == 1));
            assert_eq!(learned.weights.get(0), 1.0 + total as f64);
            assert_eq!(learned.steps, total);
        }
    }

    #[test]
    fn hc_increments_exactly_the_logged_constraints() {
        let d = Domain::range(0, 1).unwrap();
        let ne = Relation::not_equal(&d, &d);
        let inst = CspInstance::new(
            "tri",
            vec![d.clone(), d.clone(), d],
            vec![((0, 1), ne.clone()), ((1, 2), ne.clone()), ((0, 2), ne)],
        )
        .unwrap();
        let learned = hc_learn(&inst, &HcParams { iterations_total: 40, cutoff: 3, seed: 9 }).unwrap();
        let mut expected = vec![1.0; 3];
        for climb in &learned.climbs {
            for &c in &climb.incremented {
                expected[c] += 1.0;
            }
        }
        assert_eq!(learned.weights.as_slice(), expected.as_slice());
        assert!(learned.solution.is_none());
        assert!(learned.steps <= 40);
    }

    #[test]
    fn hc_budget_of_one_takes_at_most_one_step() {
        let d = Domain::range(0, 1).unwrap();
        let ne = Relation::not_equal(&d, &d);
        let inst = CspInstance::new(
            "tri",
            vec![d.clone(), d.clone(), d],
            vec![((0, 1), ne.clone()), ((1, 2), ne.clone()), ((0, 2), ne)],
        )
        .unwrap();
        let learned = hc_learn(&inst, &HcParams { iterations_total: 1, cutoff: 50, seed: 0 }).unwrap();
        assert!(learned.steps <= 1);
    }

    #[test]
    fn params_validation() {
        assert!(RndiParams { restarts: 0, ..RndiParams::default() }.validate().is_err());
        assert!(HcParams { cutoff: 0, ..HcParams::default() }.validate().is_err());
    }
}
