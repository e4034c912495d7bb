//! The factorial-block sequence: μ_1 = 1 and μ_k = ln m / m! for
//! (m−1)! < k ≤ m!. It lies in L^{1,∞} although k·μ_k is unbounded.

use super::{ModelError, SpectralModel};
use crate::numeric::ln_gamma;
use crate::seqkernel::{
    Block, BlockBound, BlockValue, CharacteristicSequence, TailDescriptor, EXACT_INDEX_LIMIT,
};

/// Largest m with m! representable in f64.
pub const VARILLY_LAST_BLOCK: u32 = 170;

fn ln_factorial(m: u32) -> f64 {
    ln_gamma(m as f64 + 1.0)
}

fn exact_factorial(m: u32) -> Option<u64> {
    (1..=m as u64).try_fold(1u64, |acc, j| acc.checked_mul(j))
}

fn block_last(m: u32) -> BlockBound {
    match exact_factorial(m) {
        Some(f) if f <= EXACT_INDEX_LIMIT => BlockBound::Exact(f),
        _ => BlockBound::Log(ln_factorial(m)),
    }
}

pub fn varilly_model() -> Result<SpectralModel, ModelError> {
    let mut blocks = vec![Block {
        last: BlockBound::Exact(1),
        value: BlockValue::constant(1.0),
    }];
    for m in 2..=VARILLY_LAST_BLOCK {
        let ln_mu = (m as f64).ln().ln() - ln_factorial(m);
        blocks.push(Block {
            last: block_last(m),
            value: BlockValue::constant_ln(ln_mu),
        });
    }
    // σ_k ≤ 1 + ln k for all k
    let sequence =
        CharacteristicSequence::piecewise("varilly", blocks, TailDescriptor::LogAverage { c: 1.0 })?;
    Ok(SpectralModel::new("varilly", 0, sequence, None))
}

/// Quantities at the end k = m! of block m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarillyBlockEnd {
    pub m: u32,
    pub ln_index: f64,
    pub sigma: f64,
    /// γ_{m!} = σ_{m!} / ln m!
    pub gamma: f64,
    /// m!·μ_{m!}
    pub index_times_mu: f64,
}

/// Block-end data for 2 ≤ m ≤ 170, read from the model's block table.
pub fn varilly_block_end(model: &SpectralModel, m: u32) -> Option<VarillyBlockEnd> {
    if !(2..=VARILLY_LAST_BLOCK).contains(&m) {
        return None;
    }
    let ends = model.sequence().block_ends()?;
    let e = ends.get(m as usize - 1)?;
    Some(VarillyBlockEnd {
        m,
        ln_index: e.ln_index,
        sigma: e.sigma,
        gamma: e.sigma / e.ln_index,
        index_times_mu: (e.ln_mu + e.ln_index).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms() {
        let s = varilly_model().unwrap().into_sequence();
        assert_eq!(s.mu(1).unwrap(), 1.0);
        assert!((s.mu(2).unwrap() - 2f64.ln() / 2.0).abs() < 1e-16);
        for k in 3..=6 {
            assert!((s.mu(k).unwrap() - 3f64.ln() / 6.0).abs() < 1e-16);
        }
        assert!((s.mu(7).unwrap() - 4f64.ln() / 24.0).abs() < 1e-16);
    }

    #[test]
    fn block_end_sums_match_closed_form() {
        let model = varilly_model().unwrap();
        let mut closed = 1.0;
        for m in 2..=VARILLY_LAST_BLOCK {
            // (m! − (m−1)!)·ln m / m! = (1 − 1/m)·ln m
            closed += (1.0 - 1.0 / m as f64) * (m as f64).ln();
            let end = varilly_block_end(&model, m).unwrap();
            assert!(((end.sigma - closed) / closed).abs() < 1e-12, "m={m}");
        }
    }
}
