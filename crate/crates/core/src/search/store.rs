use crate::csp::{CspInstance, Value};

/// A value removal recorded for undo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailEntry {
    pub var: usize,
    /// Index into the variable's original domain.
    pub index: usize,
    pub level: usize,
}

/// Current domains during search, as presence flags over the original
/// domain indices, with a trail of removals grouped by decision level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainStore {
    present: Vec<Vec<bool>>,
    size: Vec<usize>,
    trail: Vec<TrailEntry>,
    marks: Vec<usize>,
}

impl DomainStore {
    pub fn new(inst: &CspInstance) -> Self {
        let present: Vec<Vec<bool>> = inst.domains().iter().map(|d| vec![true; d.len()]).collect();
        let size = present.iter().map(Vec::len).collect();
        DomainStore { present, size, trail: Vec::new(), marks: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.present.len()
    }

    pub fn level(&self) -> usize {
        self.marks.len()
    }

    pub fn push_level(&mut self) {
        self.marks.push(self.trail.len());
    }

    /// Restores every domain to its state when `level` was current.
    pub fn undo_to(&mut self, level: usize) {
        while self.marks.len() > level {
            let mark = self.marks.pop().unwrap();
            for entry in self.trail.drain(mark..).rev() {
                self.present[entry.var][entry.index] = true;
                self.size[entry.var] += 1;
            }
        }
    }

    #[inline]
    pub fn size(&self, var: usize) -> usize {
        self.size[var]
    }

    #[inline]
    pub fn contains_index(&self, var: usize, index: usize) -> bool {
        self.present[var][index]
    }

    /// Removes a value by domain index; returns false if it was already gone.
    pub fn remove(&mut self, var: usize, index: usize) -> bool {
        if !self.present[var][index] {
            return false;
        }
        self.present[var][index] = false;
        self.size[var] -= 1;
        self.trail.push(TrailEntry { var, index, level: self.level() });
        true
    }

    /// Reduces the domain of `var` to the single index `keep`.
    pub fn assign(&mut self, var: usize, keep: usize) {
        for index in 0..self.present[var].len() {
            if index != keep {
                self.remove(var, index);
            }
        }
    }

    pub fn indices(&self, var: usize) -> impl Iterator<Item = usize> + '_ {
        self.present[var].iter().enumerate().filter(|(_, p)| **p).map(|(i, _)| i)
    }

    pub fn values(&self, inst: &CspInstance, var: usize) -> Vec<Value> {
        let dom = inst.domain(var);
        self.indices(var).map(|i| dom.value(i)).collect()
    }

    /// Current domains of every variable as value lists.
    pub fn snapshot(&self, inst: &CspInstance) -> Vec<Vec<Value>> {
        (0..self.num_vars()).map(|v| self.values(inst, v)).collect()
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }
}
