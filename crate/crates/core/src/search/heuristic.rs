use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ConstraintWeights, DomainStore};
use crate::csp::CspInstance;
use crate::error::{Error, Result};

/// Variable-ordering heuristic. Ties are always broken by smallest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicSpec {
    Lex,
    /// Uniform over unassigned variables, driven by the search seed.
    Random,
    Dom,
    Deg,
    Ddeg,
    DomDdeg,
    Wdeg,
    DomWdeg,
}

impl HeuristicSpec {
    pub const ALL: [HeuristicSpec; 8] = [
        HeuristicSpec::Lex,
        HeuristicSpec::Random,
        HeuristicSpec::Dom,
        HeuristicSpec::Deg,
        HeuristicSpec::Ddeg,
        HeuristicSpec::DomDdeg,
        HeuristicSpec::Wdeg,
        HeuristicSpec::DomWdeg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeuristicSpec::Lex => "lex",
            HeuristicSpec::Random => "random",
            HeuristicSpec::Dom => "dom",
            HeuristicSpec::Deg => "deg",
            HeuristicSpec::Ddeg => "ddeg",
            HeuristicSpec::DomDdeg => "dom_ddeg",
            HeuristicSpec::Wdeg => "wdeg",
            HeuristicSpec::DomWdeg => "dom_wdeg",
        }
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace(['/', '-'], "_");
        HeuristicSpec::ALL
            .into_iter()
            .find(|h| h.name() == norm)
            .ok_or_else(|| Error::Param(format!("unknown heuristic '{s}'")))
    }
}

/// Search state seen by [`select_variable`].
pub struct SelectionContext<'a> {
    pub inst: &'a CspInstance,
    pub store: &'a DomainStore,
    pub weights: &'a ConstraintWeights,
    pub assigned: &'a [bool],
}

impl SelectionContext<'_> {
    /// Incident constraints whose other end is still unassigned.
    fn ddeg(&self, var: usize) -> usize {
        self.inst.neighbors(var).iter().filter(|(_, z)| !self.assigned[*z]).count()
    }

    fn wdeg(&self, var: usize) -> f64 {
        self.inst
            .neighbors(var)
            .iter()
            .filter(|(_, z)| !self.assigned[*z])
            .map(|(c, _)| self.weights.get(*c))
            .sum()
    }
}

/// `num / den`, with a zero denominator treated as +∞.
#[derive(Clone, Copy)]
struct Ratio {
    num: f64,
    den: f64,
}

impl Ratio {
    fn cmp(self, other: Ratio) -> Ordering {
        match (self.den > 0.0, other.den > 0.0) {
            (true, true) => (self.num * other.den).total_cmp(&(other.num * self.den)),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => Ordering::Equal,
        }
    }
}

/// First candidate whose key is strictly best under `better`.
fn best_by<K: Copy>(
    candidates: impl Iterator<Item = usize>,
    key: impl Fn(usize) -> K,
    better: impl Fn(K, K) -> bool,
) -> Option<usize> {
    let mut best: Option<(usize, K)> = None;
    for v in candidates {
        let k = key(v);
        match best {
            Some((_, bk)) if !better(k, bk) => {}
            _ => best = Some((v, k)),
        }
    }
    best.map(|(v, _)| v)
}

pub fn select_variable<R: Rng + ?Sized>(
    spec: HeuristicSpec,
    ctx: &SelectionContext<'_>,
    rng: &mut R,
) -> Result<usize> {
    let unassigned = || (0..ctx.assigned.len()).filter(|&v| !ctx.assigned[v]);
    if unassigned().next().is_none() {
        return Err(Error::Contract("no unassigned variable to select".into()));
    }
    let chosen = match spec {
        HeuristicSpec::Lex => unassigned().next(),
        HeuristicSpec::Random => {
            let pool: Vec<usize> = unassigned().collect();
            Some(pool[rng.gen_range(0..pool.len())])
        }
        HeuristicSpec::Dom => best_by(unassigned(), |v| ctx.store.size(v), |a, b| a < b),
        HeuristicSpec::Deg => best_by(unassigned(), |v| ctx.inst.degree(v), |a, b| a > b),
        HeuristicSpec::Ddeg => best_by(unassigned(), |v| ctx.ddeg(v), |a, b| a > b),
        HeuristicSpec::Wdeg => best_by(unassigned(), |v| ctx.wdeg(v), |a, b| a > b),
        HeuristicSpec::DomDdeg => best_by(
            unassigned(),
            |v| Ratio { num: ctx.store.size(v) as f64, den: ctx.ddeg(v) as f64 },
            |a, b| a.cmp(b) == Ordering::Less,
        ),
        HeuristicSpec::DomWdeg => best_by(
            unassigned(),
            |v| Ratio { num: ctx.store.size(v) as f64, den: ctx.wdeg(v) },
            |a, b| a.cmp(b) == Ordering::Less,
        ),
    };
    Ok(chosen.expect("non-empty candidate set"))
}

/// Pre-search ordering: descending by the sum of weights over all incident
/// constraints, ties by smallest index.
pub fn static_order_by_wdeg(inst: &CspInstance, weights: &ConstraintWeights) -> Vec<usize> {
    let wdeg: Vec<f64> = (0..inst.num_vars())
        .map(|v| inst.neighbors(v).iter().map(|(c, _)| weights.get(*c)).sum())
        .collect();
    let mut order: Vec<usize> = (0..inst.num_vars()).collect();
    order.sort_by(|&a, &b| wdeg[b].total_cmp(&wdeg[a]).then(a.cmp(&b)));
    order
}
