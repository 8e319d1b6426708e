use crate::csp::ConstraintId;
use crate::error::{Error, Result};

/// One non-negative weight per constraint, indexed by constraint id.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintWeights {
    w: Vec<f64>,
}

impl ConstraintWeights {
    /// All weights set to 1.
    pub fn uniform(num_constraints: usize) -> Self {
        ConstraintWeights { w: vec![1.0; num_constraints] }
    }

    pub fn from_vec(w: Vec<f64>) -> Result<Self> {
        if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Contract(format!("constraint weight {bad} is not a finite non-negative number")));
        }
        Ok(ConstraintWeights { w })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    #[inline]
    pub fn get(&self, c: ConstraintId) -> f64 {
        self.w[c]
    }

    pub fn increment(&mut self, c: ConstraintId) {
        self.w[c] += 1.0;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    /// Σ (w[c] − 1): the total increase over a uniform start.
    pub fn excess(&self) -> f64 {
        self.w.iter().map(|w| w - 1.0).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ConstraintWeights { w: self.w.iter().map(|w| w * factor).collect() }
    }
}
