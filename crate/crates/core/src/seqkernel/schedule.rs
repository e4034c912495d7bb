use serde::{Deserialize, Serialize};

use super::SeqError;

/// Strictly increasing evaluation indices, all ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSchedule(Vec<u64>);

impl IndexSchedule {
    pub fn new(mut indices: Vec<u64>) -> Result<Self, SeqError> {
        if indices.is_empty() {
            return Err(SeqError::Schedule("empty schedule".into()));
        }
        for w in indices.windows(2) {
            if w[1] <= w[0] {
                return Err(SeqError::Schedule(format!(
                    "indices must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if indices[0] < 2 {
            return Err(SeqError::Schedule("first index must be at least 2".into()));
        }
        indices.shrink_to_fit();
        Ok(Self(indices))
    }

    /// 2, 4, …, 2^max_exponent.
    pub fn dyadic(max_exponent: u32) -> Self {
        assert!((1..63).contains(&max_exponent), "exponent out of range");
        Self((1..=max_exponent).map(|e| 1u64 << e).collect())
    }

    /// Dyadic schedule with extra indices merged in.
    pub fn dyadic_with(max_exponent: u32, extra: &[u64]) -> Result<Self, SeqError> {
        let mut all = Self::dyadic(max_exponent).0;
        all.extend_from_slice(extra);
        all.sort_unstable();
        all.dedup();
        Self::new(all)
    }

    pub fn indices(&self) -> &[u64] {
        &self.0
    }

    pub fn max(&self) -> u64 {
        *self.0.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops indices above `cap`; fails if nothing is left.
    pub fn capped(&self, cap: u64) -> Result<Self, SeqError> {
        Self::new(self.0.iter().copied().filter(|&k| k <= cap).collect())
    }
}
