use std::fmt;
use std::sync::Arc;

use super::DixmierError;

/// An element of ℓ^∞ given by a rule j ↦ β_j (j ≥ 1) and a declared bound
/// on |β_j|. The bound is checked at every evaluated index.
#[derive(Clone)]
pub struct BoundedSequence {
    rule: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    bound: f64,
}

impl fmt::Debug for BoundedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundedSequence")
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl BoundedSequence {
    pub fn new(rule: impl Fn(u64) -> f64 + Send + Sync + 'static, bound: f64) -> Self {
        Self {
            rule: Arc::new(rule),
            bound,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, c.abs())
    }

    /// e_k: 1 at index k, 0 elsewhere.
    pub fn atom(k: u64) -> Self {
        Self::new(move |j| if j == k { 1.0 } else { 0.0 }, 1.0)
    }

    /// β_j = values[j−1], zero beyond the list.
    pub fn from_values(values: Vec<f64>) -> Self {
        let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let values: Arc<[f64]> = values.into();
        Self::new(
            move |j| values.get((j - 1) as usize).copied().unwrap_or(0.0),
            bound,
        )
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn get(&self, j: u64) -> Result<f64, DixmierError> {
        if j == 0 {
            return Err(DixmierError::Parameter("indices start at 1".into()));
        }
        let v = (self.rule)(j);
        if !(v.abs() <= self.bound) {
            return Err(DixmierError::Unbounded {
                index: j,
                value: v,
                bound: self.bound,
            });
        }
        Ok(v)
    }

    /// β_1, …, β_n.
    pub fn values(&self, n: u64) -> Result<Vec<f64>, DixmierError> {
        (1..=n).map(|j| self.get(j)).collect()
    }
}

/// s(β)_j = β_{2j}
pub fn scaling_map(beta: &BoundedSequence) -> BoundedSequence {
    let rule = beta.rule.clone();
    BoundedSequence {
        rule: Arc::new(move |j| rule(2 * j)),
        bound: beta.bound,
    }
}

/// d(β)_j = β_{⌊(1+j)/2⌋}
pub fn doubling_map(beta: &BoundedSequence) -> BoundedSequence {
    let rule = beta.rule.clone();
    BoundedSequence {
        rule: Arc::new(move |j| rule((1 + j) / 2)),
        bound: beta.bound,
    }
}

/// m(β)_n = (ln 2 / ln(n+1))·β_n
pub fn m_map(beta: &BoundedSequence) -> BoundedSequence {
    let rule = beta.rule.clone();
    BoundedSequence {
        rule: Arc::new(move |n| std::f64::consts::LN_2 / ((n + 1) as f64).ln() * rule(n)),
        bound: beta.bound,
    }
}
