use std::collections::VecDeque;

use super::{ConstraintWeights, DomainStore};
use crate::csp::{ConstraintId, CspInstance, Value};
use crate::error::{Error, Result};

/// Revise `var` against `toward` through `constraint`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedArc {
    pub var: usize,
    pub constraint: ConstraintId,
    pub toward: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Revision {
    pub revised: bool,
    pub wipeout: bool,
    pub removed: Vec<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ac3Result {
    pub consistent: bool,
    pub culprit: Option<ConstraintId>,
}

/// Both directed arcs of every constraint, in constraint order.
pub fn all_arcs(inst: &CspInstance) -> Vec<DirectedArc> {
    inst.constraints()
        .iter()
        .flat_map(|c| {
            let (x, y) = c.scope();
            [
                DirectedArc { var: x, constraint: c.id(), toward: y },
                DirectedArc { var: y, constraint: c.id(), toward: x },
            ]
        })
        .collect()
}

/// Arcs revising each neighbor of `var` against `var`.
pub fn arcs_toward(inst: &CspInstance, var: usize) -> Vec<DirectedArc> {
    inst.neighbors(var)
        .iter()
        .map(|&(c, z)| DirectedArc { var: z, constraint: c, toward: var })
        .collect()
}

fn validate(inst: &CspInstance, arc: &DirectedArc) -> Result<()> {
    let c = inst
        .constraints()
        .get(arc.constraint)
        .ok_or_else(|| Error::Contract(format!("constraint {} does not exist", arc.constraint)))?;
    if arc.var == arc.toward || c.other(arc.var) != Some(arc.toward) {
        return Err(Error::Contract(format!(
            "arc {} -> {} is not covered by constraint {} with scope {:?}",
            arc.var,
            arc.toward,
            arc.constraint,
            c.scope()
        )));
    }
    Ok(())
}

/// Removes from the current domain of `arc.var` every value without a support
/// in the current domain of `arc.toward`. Removals are trailed.
pub fn revise(inst: &CspInstance, arc: DirectedArc, store: &mut DomainStore) -> Result<Revision> {
    validate(inst, &arc)?;
    let mut removed = Vec::new();
    revise_with(inst, arc.constraint, arc.var, arc.toward, store, |i| {
        removed.push(inst.domain(arc.var).value(i))
    });
    Ok(Revision {
        revised: !removed.is_empty(),
        wipeout: store.size(arc.var) == 0,
        removed,
    })
}

fn revise_with(
    inst: &CspInstance,
    cid: ConstraintId,
    var: usize,
    toward: usize,
    store: &mut DomainStore,
    mut on_remove: impl FnMut(usize),
) -> bool {
    let c = inst.constraint(cid);
    let own_len = inst.domain(var).len();
    let other_len = inst.domain(toward).len();
    let mut revised = false;
    for a in 0..own_len {
        if !store.contains_index(var, a) {
            continue;
        }
        let supported =
            (0..other_len).any(|b| store.contains_index(toward, b) && c.allows_from(var, a, b));
        if !supported {
            store.remove(var, a);
            on_remove(a);
            revised = true;
        }
    }
    revised
}

/// Reusable AC-3 work queue over arc ids `2c` (revise the first scope
/// variable) and `2c + 1` (revise the second).
#[derive(Debug, Clone)]
pub(crate) struct ArcQueue {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl ArcQueue {
    pub(crate) fn new(inst: &CspInstance) -> Self {
        ArcQueue { queue: VecDeque::new(), queued: vec![false; 2 * inst.num_constraints()] }
    }

    fn push_id(&mut self, id: usize) {
        if !self.queued[id] {
            self.queued[id] = true;
            self.queue.push_back(id);
        }
    }

    pub(crate) fn push(&mut self, inst: &CspInstance, var: usize, cid: ConstraintId) {
        let dir = usize::from(inst.constraint(cid).scope().0 != var);
        self.push_id(2 * cid + dir);
    }

    pub(crate) fn push_all(&mut self, inst: &CspInstance) {
        for cid in 0..inst.num_constraints() {
            self.push_id(2 * cid);
            self.push_id(2 * cid + 1);
        }
    }

    pub(crate) fn push_toward(&mut self, inst: &CspInstance, var: usize) {
        for &(cid, z) in inst.neighbors(var) {
            self.push(inst, z, cid);
        }
    }

    fn clear(&mut self) {
        for id in self.queue.drain(..) {
            self.queued[id] = false;
        }
    }

    /// Runs to a fixpoint or the first wipeout, returning the culprit
    /// constraint on wipeout (after incrementing its weight).
    pub(crate) fn propagate(
        &mut self,
        inst: &CspInstance,
        store: &mut DomainStore,
        weights: &mut ConstraintWeights,
    ) -> Option<ConstraintId> {
        while let Some(id) = self.queue.pop_front() {
            self.queued[id] = false;
            let cid = id / 2;
            let (x, y) = inst.constraint(cid).scope();
            let (var, toward) = if id % 2 == 0 { (x, y) } else { (y, x) };
            if revise_with(inst, cid, var, toward, store, |_| {}) {
                if store.size(var) == 0 {
                    weights.increment(cid);
                    self.clear();
                    return Some(cid);
                }
                for &(c2, z) in inst.neighbors(var) {
                    if c2 != cid {
                        self.push(inst, z, c2);
                    }
                }
            }
        }
        None
    }
}

/// Queue-based AC-3 seeded with `seed_arcs`. Stops at the first wipeout,
/// charging the revising constraint one unit of weight.
pub fn ac3(
    inst: &CspInstance,
    store: &mut DomainStore,
    weights: &mut ConstraintWeights,
    seed_arcs: &[DirectedArc],
) -> Result<Ac3Result> {
    if weights.len() != inst.num_constraints() {
        return Err(Error::Contract(format!(
            "{} weights for {} constraints",
            weights.len(),
            inst.num_constraints()
        )));
    }
    let mut queue = ArcQueue::new(inst);
    for arc in seed_arcs {
        validate(inst, arc)?;
        queue.push(inst, arc.var, arc.constraint);
    }
    let culprit = queue.propagate(inst, store, weights);
    Ok(Ac3Result { consistent: culprit.is_none(), culprit })
}
