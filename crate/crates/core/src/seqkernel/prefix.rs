use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::sequence::{CharacteristicSequence, Repr};
use super::SeqError;
use crate::numeric::Neumaier;

const CHUNK: usize = 1 << 15;

/// Compensated partial sums σ_k of one sequence.
///
/// Piecewise sequences are summed in closed form. Everything else is summed
/// once, front to back, with the running `(sum, compensation)` pair saved at
/// every power of two and at every requested index; a query below the
/// frontier resumes from the nearest saved point. Reads and extensions are
/// serialized behind one lock.
pub struct PrefixSumTable {
    seq: Arc<CharacteristicSequence>,
    state: Mutex<Stream>,
}

struct Stream {
    /// σ has been accumulated through this index
    position: u64,
    acc: Neumaier,
    last_term: f64,
    checkpoints: BTreeMap<u64, (f64, f64)>,
    buf: Vec<f64>,
}

impl PrefixSumTable {
    pub fn new(seq: CharacteristicSequence) -> Self {
        Self::shared(Arc::new(seq))
    }

    pub fn shared(seq: Arc<CharacteristicSequence>) -> Self {
        let mut checkpoints = BTreeMap::new();
        checkpoints.insert(0, (0.0, 0.0));
        Self {
            seq,
            state: Mutex::new(Stream {
                position: 0,
                acc: Neumaier::new(),
                last_term: f64::INFINITY,
                checkpoints,
                buf: Vec::new(),
            }),
        }
    }

    pub fn sequence(&self) -> &CharacteristicSequence {
        &self.seq
    }

    /// σ_k = Σ_{j≤k} μ_j.
    pub fn sigma(&self, k: u64) -> Result<f64, SeqError> {
        if k == 0 {
            return Err(SeqError::ZeroIndex);
        }
        if let Some(s) = self.seq.piecewise_sigma(k) {
            return s;
        }
        if let Some(support) = self.seq.support() {
            if k > support && matches!(self.seq.repr, Repr::Explicit(_)) {
                if support == 0 {
                    return Ok(0.0);
                }
                return self.sigma(support);
            }
        }
        let mut st = self.state.lock().expect("prefix table poisoned");
        if k <= st.position {
            if let Some(&(s, c)) = st.checkpoints.get(&k) {
                return Ok(Neumaier::from_parts(s, c).value());
            }
            let (&from, &(s, c)) = st
                .checkpoints
                .range(..k)
                .next_back()
                .expect("checkpoint at zero");
            let mut acc = Neumaier::from_parts(s, c);
            let mut buf = vec![0.0; (k - from) as usize];
            self.seq.fill(from + 1, &mut buf)?;
            acc.extend(buf);
            return Ok(acc.value());
        }
        self.advance(&mut st, k)?;
        Ok(st.acc.value())
    }

    /// γ_k = σ_k / ln k for k ≥ 2.
    pub fn gamma(&self, k: u64) -> Result<f64, SeqError> {
        if k < 2 {
            return Err(SeqError::GammaIndex(k));
        }
        Ok(self.sigma(k)? / (k as f64).ln())
    }

    /// Evaluates σ at several indices in one pass.
    pub fn sigmas(&self, ks: &[u64]) -> Result<Vec<f64>, SeqError> {
        ks.iter().map(|&k| self.sigma(k)).collect()
    }

    fn advance(&self, st: &mut Stream, target: u64) -> Result<(), SeqError> {
        let mut buf = std::mem::take(&mut st.buf);
        while st.position < target {
            let start = st.position + 1;
            // never step over a power of two so that it can be checkpointed
            let next_pow = (start).next_power_of_two();
            let stop = target.min(next_pow).min(st.position + CHUNK as u64);
            let len = (stop - st.position) as usize;
            buf.resize(len, 0.0);
            self.seq.fill(start, &mut buf)?;
            for (j, &v) in buf.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(SeqError::Negative {
                        index: start + j as u64,
                    });
                }
                if v > st.last_term {
                    return Err(SeqError::NotMonotone {
                        index: start + j as u64,
                    });
                }
                st.last_term = v;
                st.acc.add(v);
            }
            st.position = stop;
            if stop.is_power_of_two() || stop == target {
                let parts = st.acc.parts();
                st.checkpoints.insert(stop, parts);
            }
        }
        st.buf = buf;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqkernel::{Rule, TailDescriptor};

    fn harmonic() -> CharacteristicSequence {
        let rule: Rule = Arc::new(|k| 1.0 / k as f64);
        CharacteristicSequence::closed_form("harmonic", rule, TailDescriptor::InverseBound { c: 1.0 })
            .unwrap()
    }

    #[test]
    fn harmonic_sigma_small() {
        let t = PrefixSumTable::new(harmonic());
        assert_eq!(t.sigma(1).unwrap(), 1.0);
        assert!((t.sigma(4).unwrap() - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn queries_below_frontier_agree_with_forward_sums() {
        let t = PrefixSumTable::new(harmonic());
        let far = t.sigma(100_000).unwrap();
        let mid = t.sigma(777).unwrap();
        let fresh = PrefixSumTable::new(harmonic());
        assert_eq!(fresh.sigma(777).unwrap(), mid);
        assert_eq!(fresh.sigma(100_000).unwrap(), far);
    }

    #[test]
    fn monotonicity_violation_deep_in_the_stream_is_reported() {
        let rule: Rule = Arc::new(|k| if k == 10_000 { 1.0 } else { 1.0 / k as f64 });
        let s = CharacteristicSequence::closed_form("bump", rule, TailDescriptor::Decaying).unwrap();
        let t = PrefixSumTable::new(s);
        assert!(matches!(t.sigma(20_000), Err(SeqError::NotMonotone { index: 10_000 })));
    }

    #[test]
    fn gamma_requires_index_two() {
        let t = PrefixSumTable::new(harmonic());
        assert!(matches!(t.gamma(1), Err(SeqError::GammaIndex(1))));
    }
}
