//! Binary CSP data model: domains, extensional relations, constraints and
//! the constraint graph.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Value = i64;
pub type ConstraintId = usize;

/// A finite, non-empty set of integer values kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domain {
    values: Vec<Value>,
}

impl Domain {
    /// Sorts and deduplicates `values`. Fails on an empty input.
    pub fn new(values: impl IntoIterator<Item = Value>) -> Result<Self> {
        let mut values: Vec<Value> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err(Error::Contract("domain must be non-empty".into()));
        }
        Ok(Domain { values })
    }

    /// `lo..=hi`
    pub fn range(lo: Value, hi: Value) -> Result<Self> {
        Domain::new(lo..=hi)
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, value: Value) -> Option<usize> {
        self.values.binary_search(&value).ok()
    }

    pub fn contains(&self, value: Value) -> bool {
        self.index_of(value).is_some()
    }

    pub fn value(&self, index: usize) -> Value {
        self.values[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Supports,
    Conflicts,
}

impl Semantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Supports => "supports",
            Semantics::Conflicts => "conflicts",
        }
    }
}

impl std::str::FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "supports" => Ok(Semantics::Supports),
            "conflicts" => Ok(Semantics::Conflicts),
            other => Err(Error::Parse(format!("unknown relation semantics '{other}'"))),
        }
    }
}

/// A binary extensional relation given by allowed or forbidden value pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub semantics: Semantics,
    pub tuples: BTreeSet<(Value, Value)>,
}

impl Relation {
    pub fn supports(tuples: impl IntoIterator<Item = (Value, Value)>) -> Self {
        Relation { semantics: Semantics::Supports, tuples: tuples.into_iter().collect() }
    }

    pub fn conflicts(tuples: impl IntoIterator<Item = (Value, Value)>) -> Self {
        Relation { semantics: Semantics::Conflicts, tuples: tuples.into_iter().collect() }
    }

    /// `x != y` over the given domains, as a conflicts relation.
    pub fn not_equal(dx: &Domain, dy: &Domain) -> Self {
        Relation::conflicts(dx.values().iter().filter(|v| dy.contains(**v)).map(|&v| (v, v)))
    }

    pub fn allows(&self, x: Value, y: Value) -> bool {
        let listed = self.tuples.contains(&(x, y));
        match self.semantics {
            Semantics::Supports => listed,
            Semantics::Conflicts => !listed,
        }
    }

    /// The equivalent relation under the opposite semantics.
    pub fn complement(&self, dx: &Domain, dy: &Domain) -> Self {
        let mut tuples = BTreeSet::new();
        for &x in dx.values() {
            for &y in dy.values() {
                if !self.tuples.contains(&(x, y)) {
                    tuples.insert((x, y));
                }
            }
        }
        let semantics = match self.semantics {
            Semantics::Supports => Semantics::Conflicts,
            Semantics::Conflicts => Semantics::Supports,
        };
        Relation { semantics, tuples }
    }
}

/// A binary constraint. `allowed` caches the relation as a dense matrix over
/// domain indices, row-major in the first scope variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    id: ConstraintId,
    scope: (usize, usize),
    relation: Relation,
    allowed: Vec<bool>,
    width: usize,
}

impl Constraint {
    pub fn id(&self) -> ConstraintId {
        self.id
    }

    pub fn scope(&self) -> (usize, usize) {
        self.scope
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn involves(&self, var: usize) -> bool {
        self.scope.0 == var || self.scope.1 == var
    }

    /// The other end of the scope, if `var` is in it.
    pub fn other(&self, var: usize) -> Option<usize> {
        if self.scope.0 == var {
            Some(self.scope.1)
        } else if self.scope.1 == var {
            Some(self.scope.0)
        } else {
            None
        }
    }

    /// Index-level check: `a` indexes the first scope variable's domain, `b` the second's.
    #[inline]
    pub fn allows_idx(&self, a: usize, b: usize) -> bool {
        self.allowed[a * self.width + b]
    }

    /// Index-level check seen from `var`: `own` indexes `var`'s domain and
    /// `other` the opposite endpoint's.
    #[inline]
    pub fn allows_from(&self, var: usize, own: usize, other: usize) -> bool {
        if var == self.scope.0 {
            self.allows_idx(own, other)
        } else {
            self.allows_idx(other, own)
        }
    }

    /// Number of allowed pairs over the original domains.
    pub fn allowed_count(&self) -> usize {
        self.allowed.iter().filter(|&&b| b).count()
    }
}

/// A partial map from variables to values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Option<Value>>,
}

impl Assignment {
    pub fn empty(n: usize) -> Self {
        Assignment { values: vec![None; n] }
    }

    pub fn total(values: impl IntoIterator<Item = Value>) -> Self {
        Assignment { values: values.into_iter().map(Some).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: usize) -> Option<Value> {
        self.values.get(var).copied().flatten()
    }

    pub fn set(&mut self, var: usize, value: Value) {
        self.values[var] = Some(value);
    }

    pub fn unset(&mut self, var: usize) {
        self.values[var] = None;
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn as_slice(&self) -> &[Option<Value>] {
        &self.values
    }

    /// Values of a total assignment; `None` if any variable is unbound.
    pub fn to_values(&self) -> Option<Vec<Value>> {
        self.values.iter().copied().collect()
    }
}

/// Immutable binary CSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CspInstance {
    name: String,
    domains: Vec<Domain>,
    constraints: Vec<Constraint>,
    adjacency: Vec<Vec<(ConstraintId, usize)>>,
}

impl CspInstance {
    /// Builds and validates an instance. Constraint ids are positions in
    /// `constraints`.
    pub fn new(
        name: impl Into<String>,
        domains: Vec<Domain>,
        constraints: Vec<((usize, usize), Relation)>,
    ) -> Result<Self> {
        let n = domains.len();
        if let Some(var) = domains.iter().position(Domain::is_empty) {
            return Err(Error::EmptyDomain { var });
        }
        let mut pairs = HashSet::new();
        let mut built = Vec::with_capacity(constraints.len());
        for (id, ((x, y), relation)) in constraints.into_iter().enumerate() {
            if x >= n || y >= n || x == y {
                return Err(Error::InvalidScope(x, y));
            }
            if !pairs.insert((x.min(y), x.max(y))) {
                return Err(Error::DuplicatePair(x, y));
            }
            let (dx, dy) = (&domains[x], &domains[y]);
            if let Some(&(a, b)) =
                relation.tuples.iter().find(|(a, b)| !dx.contains(*a) || !dy.contains(*b))
            {
                return Err(Error::TupleOutOfDomain { constraint: id, x: a, y: b });
            }
            let width = dy.len();
            let mut allowed = vec![relation.semantics == Semantics::Conflicts; dx.len() * width];
            for &(a, b) in &relation.tuples {
                let i = dx.index_of(a).unwrap() * width + dy.index_of(b).unwrap();
                allowed[i] = relation.semantics == Semantics::Supports;
            }
            built.push(Constraint { id, scope: (x, y), relation, allowed, width });
        }
        let adjacency = build_adjacency(n, &built);
        Ok(CspInstance { name: name.into(), domains, constraints: built, adjacency })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn domain(&self, var: usize) -> &Domain {
        &self.domains[var]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn constraint(&self, id: ConstraintId) -> &Constraint {
        &self.constraints[id]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// `(constraint id, neighbor)` pairs incident to `var`, in constraint order.
    pub fn neighbors(&self, var: usize) -> &[(ConstraintId, usize)] {
        &self.adjacency[var]
    }

    pub fn adjacency(&self) -> &[Vec<(ConstraintId, usize)>] {
        &self.adjacency
    }

    pub fn degree(&self, var: usize) -> usize {
        self.adjacency[var].len()
    }

    /// Recomputes the inverted index of constraint scopes.
    pub fn rebuild_adjacency(&self) -> Vec<Vec<(ConstraintId, usize)>> {
        build_adjacency(self.num_vars(), &self.constraints)
    }

    /// Whether the constraint allows `(x_val, y_val)` on its ordered scope.
    pub fn check(&self, id: ConstraintId, x_val: Value, y_val: Value) -> Result<bool> {
        let c = self.constraints.get(id).ok_or_else(|| {
            Error::Contract(format!("constraint {id} does not exist"))
        })?;
        let (x, y) = c.scope;
        let a = self.domains[x]
            .index_of(x_val)
            .ok_or(Error::ValueOutOfDomain { var: x, value: x_val })?;
        let b = self.domains[y]
            .index_of(y_val)
            .ok_or(Error::ValueOutOfDomain { var: y, value: y_val })?;
        Ok(c.allows_idx(a, b))
    }

    pub fn is_solution(&self, a: &Assignment) -> Result<bool> {
        Ok(self.violated_constraints(a)?.is_empty())
    }

    /// Ids of the constraints a total assignment violates, ascending.
    pub fn violated_constraints(&self, a: &Assignment) -> Result<Vec<ConstraintId>> {
        if a.len() != self.num_vars() {
            return Err(Error::Contract(format!(
                "assignment covers {} variables, instance has {}",
                a.len(),
                self.num_vars()
            )));
        }
        if let Some(var) = a.values.iter().position(Option::is_none) {
            return Err(Error::PartialAssignment { var });
        }
        let mut violated = Vec::new();
        for c in &self.constraints {
            let (x, y) = c.scope;
            if !self.check(c.id, a.values[x].unwrap(), a.values[y].unwrap())? {
                violated.push(c.id);
            }
        }
        Ok(violated)
    }

    /// Domain-index form of a total assignment.
    pub fn to_indices(&self, a: &Assignment) -> Result<Vec<usize>> {
        (0..self.num_vars())
            .map(|v| {
                let value = a.get(v).ok_or(Error::PartialAssignment { var: v })?;
                self.domains[v].index_of(value).ok_or(Error::ValueOutOfDomain { var: v, value })
            })
            .collect()
    }

    pub fn from_indices(&self, indices: &[usize]) -> Assignment {
        Assignment::total(indices.iter().enumerate().map(|(v, &k)| self.domains[v].value(k)))
    }
}

fn build_adjacency(n: usize, constraints: &[Constraint]) -> Vec<Vec<(ConstraintId, usize)>> {
    let mut adjacency = vec![Vec::new(); n];
    for c in constraints {
        let (x, y) = c.scope;
        adjacency[x].push((c.id, y));
        adjacency[y].push((c.id, x));
    }
    adjacency
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bool_domain() -> Domain {
        Domain::range(0, 1).unwrap()
    }

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
    fn check_listed_conflict_is_rejected() {
        let d = Domain::range(1, 2).unwrap();
        let inst = CspInstance::new(
            "c",
            vec![d.clone(), d],
            vec![((0, 1), Relation::conflicts([(1, 1)]))],
        )
        .unwrap();
        assert!(!inst.check(0, 1, 1).unwrap());
        assert!(inst.check(0, 1, 2).unwrap());
    }

    #[test]
    fn empty_supports_allow_nothing() {
        let inst = CspInstance::new(
            "s",
            vec![bool_domain(), bool_domain()],
            vec![((0, 1), Relation::supports([]))],
        )
        .unwrap();
        for v in 0..2 {
            for w in 0..2 {
                assert!(!inst.check(0, v, w).unwrap());
            }
        }
        let a = Assignment::total([0, 1]);
        assert_eq!(inst.violated_constraints(&a).unwrap(), vec![0]);
    }

    #[test]
    fn check_rejects_out_of_domain_values() {
        let inst = triangle(2);
        assert_eq!(inst.check(0, 5, 0), Err(Error::ValueOutOfDomain { var: 0, value: 5 }));
    }

    #[test]
    fn is_solution_on_two_var_not_equal() {
        let inst = CspInstance::new(
            "ne",
            vec![bool_domain(), bool_domain()],
            vec![((0, 1), Relation::not_equal(&bool_domain(), &bool_domain()))],
        )
        .unwrap();
        assert!(inst.is_solution(&Assignment::total([0, 1])).unwrap());
        assert!(!inst.is_solution(&Assignment::total([1, 1])).unwrap());
    }

    #[test]
    fn no_constraints_is_vacuously_solved() {
        let inst = CspInstance::new("free", vec![bool_domain(); 3], vec![]).unwrap();
        assert!(inst.is_solution(&Assignment::total([1, 0, 1])).unwrap());
    }

    #[test]
    fn partial_assignment_is_a_contract_violation() {
        let inst = triangle(2);
        let mut a = Assignment::empty(3);
        a.set(0, 0);
        a.set(2, 1);
        assert_eq!(inst.is_solution(&a), Err(Error::PartialAssignment { var: 1 }));
    }

    #[test]
    fn triangle_violation_is_the_outer_edge() {
        let inst = triangle(2);
        // v0=0, v1=1, v2=0: (0,1) ok, (1,2) ok, (0,2) equal
        assert_eq!(inst.violated_constraints(&Assignment::total([0, 1, 0])).unwrap(), vec![2]);
        let sol = triangle(3);
        assert!(sol.violated_constraints(&Assignment::total([0, 1, 2])).unwrap().is_empty());
    }

    #[test]
    fn construction_rejects_bad_scopes() {
        let d = vec![bool_domain(), bool_domain()];
        let r = Relation::supports([]);
        assert_eq!(
            CspInstance::new("x", d.clone(), vec![((0, 0), r.clone())]),
            Err(Error::InvalidScope(0, 0))
        );
        assert_eq!(
            CspInstance::new("x", d.clone(), vec![((0, 3), r.clone())]),
            Err(Error::InvalidScope(0, 3))
        );
        assert_eq!(
            CspInstance::new("x", d.clone(), vec![((0, 1), r.clone()), ((1, 0), r)]),
            Err(Error::DuplicatePair(1, 0))
        );
        assert_eq!(
            CspInstance::new("x", d, vec![((0, 1), Relation::conflicts([(0, 7)]))]),
            Err(Error::TupleOutOfDomain { constraint: 0, x: 0, y: 7 })
        );
    }

    #[test]
    fn domains_are_sorted_and_distinct() {
        let d = Domain::new([3, 1, 2, 3, 1]).unwrap();
        assert_eq!(d.values(), &[1, 2, 3]);
        assert!(Domain::new([]).is_err());
    }

    #[test]
    fn adjacency_is_the_inverted_scope_index() {
        let inst = triangle(3);
        assert_eq!(inst.adjacency(), inst.rebuild_adjacency().as_slice());
        assert_eq!(inst.neighbors(0), &[(0, 1), (2, 2)]);
        for v in 0..3 {
            assert_eq!(inst.degree(v), 2);
        }
    }

    #[test]
    fn complement_preserves_check_exhaustively() {
        for d in 1..=6i64 {
            let dom = Domain::range(0, d - 1).unwrap();
            // arbitrary but fixed relation: pairs with (x*3 + y) % 4 == 0
            let supports = Relation::supports(
                (0..d).flat_map(|x| (0..d).map(move |y| (x, y))).filter(|(x, y)| (x * 3 + y) % 4 == 0),
            );
            let conflicts = supports.complement(&dom, &dom);
            assert_eq!(conflicts.semantics, Semantics::Conflicts);
            let a = CspInstance::new("a", vec![dom.clone(), dom.clone()], vec![((0, 1), supports)])
                .unwrap();
            let b = CspInstance::new("b", vec![dom.clone(), dom.clone()], vec![((0, 1), conflicts)])
                .unwrap();
            for x in 0..d {
                for y in 0..d {
                    assert_eq!(a.check(0, x, y).unwrap(), b.check(0, x, y).unwrap());
                }
            }
        }
    }
}
