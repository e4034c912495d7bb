//! Piecewise-analytic sequences: consecutive index blocks with a constant or
//! `c/n` value on each block.
//!
//! Block boundaries are held exactly while they fit in 2^62 and as natural
//! logarithms of the index beyond that, which is what factorial-sized blocks
//! need. Partial sums are closed-form per block.

use serde::{Deserialize, Serialize};

use super::SeqError;
use crate::numeric::{harmonic_range, Neumaier};

/// Largest index stored exactly.
pub const EXACT_INDEX_LIMIT: u64 = 1 << 62;

/// Last index (inclusive) of a block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlockBound {
    Exact(u64),
    /// ln of the index
    Log(f64),
}

impl BlockBound {
    pub fn from_ln(ln_index: f64) -> Self {
        if ln_index < (EXACT_INDEX_LIMIT as f64).ln() {
            let k = ln_index.exp().round();
            BlockBound::Exact(k as u64)
        } else {
            BlockBound::Log(ln_index)
        }
    }

    pub fn ln(&self) -> f64 {
        match *self {
            BlockBound::Exact(k) => (k as f64).ln(),
            BlockBound::Log(l) => l,
        }
    }

    pub fn exact(&self) -> Option<u64> {
        match *self {
            BlockBound::Exact(k) => Some(k),
            BlockBound::Log(_) => None,
        }
    }

    /// Is `k` at most this bound?
    fn covers(&self, k: u64) -> bool {
        match *self {
            BlockBound::Exact(b) => k <= b,
            BlockBound::Log(l) => (k as f64).ln() <= l,
        }
    }

    fn as_f64(&self) -> f64 {
        match *self {
            BlockBound::Exact(k) => k as f64,
            BlockBound::Log(l) => l.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlockValue {
    Constant { value: f64, ln_value: f64 },
    /// μ_n = coef / n
    Harmonic { coef: f64 },
}

impl BlockValue {
    pub fn constant(value: f64) -> Self {
        BlockValue::Constant {
            value,
            ln_value: value.ln(),
        }
    }

    pub fn constant_ln(ln_value: f64) -> Self {
        BlockValue::Constant {
            value: ln_value.exp(),
            ln_value,
        }
    }

    fn at(&self, k: f64) -> f64 {
        match *self {
            BlockValue::Constant { value, .. } => value,
            BlockValue::Harmonic { coef } => coef / k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub last: BlockBound,
    pub value: BlockValue,
}

/// A block's last index together with σ there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEnd {
    pub ln_index: f64,
    pub index: Option<u64>,
    pub sigma: f64,
    /// ln μ at the block's last index
    pub ln_mu: f64,
}

#[derive(Debug, Clone)]
pub struct Blocks {
    blocks: Vec<Block>,
    /// σ through the end of block i
    sigma_through: Vec<f64>,
}

impl Blocks {
    pub fn new(blocks: Vec<Block>) -> Result<Self, SeqError> {
        if blocks.is_empty() {
            return Err(SeqError::InvalidBlocks("no blocks".into()));
        }
        let mut prev_last = BlockBound::Exact(0);
        let mut prev_tail_value = f64::INFINITY;
        for (i, b) in blocks.iter().enumerate() {
            let increasing = match (prev_last, b.last) {
                (BlockBound::Exact(p), BlockBound::Exact(q)) => q > p,
                (p, q) => q.ln() > p.ln(),
            };
            if !increasing {
                return Err(SeqError::InvalidBlocks(format!(
                    "block {i} does not advance the index"
                )));
            }
            let first = match prev_last {
                BlockBound::Exact(p) => (p + 1) as f64,
                BlockBound::Log(l) => l.exp(),
            };
            let head = b.value.at(first);
            let tail = b.value.at(b.last.as_f64());
            if let BlockValue::Harmonic { coef } = b.value {
                if !(coef >= 0.0 && coef.is_finite()) {
                    return Err(SeqError::InvalidBlocks(format!("block {i}: bad coefficient")));
                }
            }
            if !(head >= 0.0) || !head.is_finite() || !(tail >= 0.0) {
                return Err(SeqError::Negative { index: i as u64 });
            }
            if head > prev_tail_value * (1.0 + 4.0 * f64::EPSILON) {
                return Err(SeqError::NotMonotone {
                    index: first as u64,
                });
            }
            prev_tail_value = tail;
            prev_last = b.last;
        }
        let mut acc = Neumaier::new();
        let mut sigma_through = Vec::with_capacity(blocks.len());
        let mut prev = BlockBound::Exact(0);
        for b in &blocks {
            acc.add(block_sum(prev, b.last, b.value));
            sigma_through.push(acc.value());
            prev = b.last;
        }
        Ok(Self {
            blocks,
            sigma_through,
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Last covered index, when exact.
    pub fn coverage(&self) -> BlockBound {
        self.blocks.last().expect("non-empty").last
    }

    fn locate(&self, k: u64) -> Option<usize> {
        let i = self.blocks.partition_point(|b| !b.last.covers(k));
        (i < self.blocks.len()).then_some(i)
    }

    fn prev_last(&self, i: usize) -> BlockBound {
        if i == 0 {
            BlockBound::Exact(0)
        } else {
            self.blocks[i - 1].last
        }
    }

    pub fn mu(&self, k: u64) -> Result<f64, SeqError> {
        let i = self.locate(k).ok_or(SeqError::IndexOverflow { index: k })?;
        Ok(self.blocks[i].value.at(k as f64))
    }

    pub fn sigma(&self, k: u64) -> Result<f64, SeqError> {
        let i = self.locate(k).ok_or(SeqError::IndexOverflow { index: k })?;
        let before = if i == 0 { 0.0 } else { self.sigma_through[i - 1] };
        let partial = block_sum(self.prev_last(i), BlockBound::Exact(k), self.blocks[i].value);
        Ok(before + partial)
    }

    /// Fills `out[j]` with μ_{start+j}.
    pub fn fill(&self, start: u64, out: &mut [f64]) -> Result<(), SeqError> {
        if out.is_empty() {
            return Ok(());
        }
        let mut i = self
            .locate(start)
            .ok_or(SeqError::IndexOverflow { index: start })?;
        for (j, slot) in out.iter_mut().enumerate() {
            let k = start + j as u64;
            while !self.blocks[i].last.covers(k) {
                i += 1;
                if i == self.blocks.len() {
                    return Err(SeqError::IndexOverflow { index: k });
                }
            }
            *slot = self.blocks[i].value.at(k as f64);
        }
        Ok(())
    }

    pub fn block_ends(&self) -> impl Iterator<Item = BlockEnd> + '_ {
        self.blocks.iter().zip(&self.sigma_through).map(|(b, &sigma)| {
            let ln_index = b.last.ln();
            let ln_mu = match b.value {
                BlockValue::Constant { ln_value, .. } => ln_value,
                BlockValue::Harmonic { coef } => coef.ln() - ln_index,
            };
            BlockEnd {
                ln_index,
                index: b.last.exact(),
                sigma,
                ln_mu,
            }
        })
    }

    /// Smallest block-end index ≥ k (exact blocks only).
    pub fn block_end_at_or_after(&self, k: u64) -> Option<u64> {
        self.locate(k).and_then(|i| self.blocks[i].last.exact())
    }

    /// Largest block-end index ≤ k.
    pub fn block_end_at_or_before(&self, k: u64) -> Option<u64> {
        let i = self.locate(k)?;
        match self.blocks[i].last {
            BlockBound::Exact(last) if last == k => Some(k),
            _ if i == 0 => None,
            _ => self.blocks[i - 1].last.exact(),
        }
    }

    /// Count of indices ≤ last with μ ≥ threshold.
    pub fn count_at_least(&self, threshold: f64) -> Result<u64, SeqError> {
        if threshold <= 0.0 {
            return Err(SeqError::IndexOverflow { index: u64::MAX });
        }
        let mut prev = BlockBound::Exact(0);
        for b in &self.blocks {
            let first = match prev {
                BlockBound::Exact(p) => p + 1,
                BlockBound::Log(_) => return Err(SeqError::IndexOverflow { index: u64::MAX }),
            };
            match b.value {
                BlockValue::Constant { value, .. } => {
                    if value < threshold {
                        return Ok(first - 1);
                    }
                }
                BlockValue::Harmonic { coef } => {
                    // coef/n ≥ threshold  ⟺  n ≤ coef/threshold, up to rounding
                    let mut n = (coef / threshold).floor().min(u64::MAX as f64 / 2.0) as u64;
                    while n > 0 && coef / (n as f64) < threshold {
                        n -= 1;
                    }
                    while coef / ((n + 1) as f64) >= threshold {
                        n += 1;
                    }
                    if n < first {
                        return Ok(first - 1);
                    }
                    match b.last {
                        BlockBound::Exact(l) if n < l => return Ok(n),
                        _ => {}
                    }
                }
            }
            prev = b.last;
        }
        Err(SeqError::IndexOverflow {
            index: prev.exact().unwrap_or(u64::MAX),
        })
    }
}

/// Σ μ_n over prev < n ≤ last within one block.
fn block_sum(prev: BlockBound, last: BlockBound, value: BlockValue) -> f64 {
    match (prev, last, value) {
        (BlockBound::Exact(p), BlockBound::Exact(q), BlockValue::Constant { value, .. }) => {
            (q - p) as f64 * value
        }
        (BlockBound::Exact(p), BlockBound::Exact(q), BlockValue::Harmonic { coef }) => {
            coef * harmonic_range(p + 1, q)
        }
        (p, q, BlockValue::Constant { ln_value, .. }) => {
            // (q − p)·v = exp(ln v + ln q)·(1 − p/q)
            let (lp, lq) = (p.ln(), q.ln());
            (ln_value + lq).exp() * -(lp - lq).exp_m1()
        }
        (p, q, BlockValue::Harmonic { coef }) => coef * (q.ln() - p.ln()),
    }
}
