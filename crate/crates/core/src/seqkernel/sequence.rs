use std::fmt;
use std::sync::{Arc, RwLock};

use super::blocks::{Block, BlockEnd, Blocks};
use super::tail::{AsymptoticClass, TailDescriptor};
use super::SeqError;

/// Rule k ↦ μ_k for closed-form sequences (k ≥ 1).
pub type Rule = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// Number of leading terms checked when a closed-form sequence is built.
const VALIDATION_PREFIX: u64 = 4096;

#[derive(Clone)]
pub(crate) enum Repr {
    Explicit(Arc<[f64]>),
    ClosedForm(Rule),
    Piecewise(Arc<Blocks>),
    Merged(Arc<MergeCache>),
}

/// Sorted merge of two sequences, materialized on demand.
pub(crate) struct MergeCache {
    left: CharacteristicSequence,
    right: CharacteristicSequence,
    terms: RwLock<Vec<f64>>,
}

impl MergeCache {
    fn ensure(&self, k: u64) -> Result<(), SeqError> {
        if (self.terms.read().expect("merge cache poisoned").len() as u64) >= k {
            return Ok(());
        }
        let mut terms = self.terms.write().expect("merge cache poisoned");
        let have = terms.len() as u64;
        if have >= k {
            return Ok(());
        }
        // the first K merged terms only ever use the first K of each side
        let want = k.max(2 * have).max(1024);
        let want = cap_to_coverage(want, &self.left, &self.right);
        let a = self.left.prefix(want)?;
        let b = self.right.prefix(want)?;
        let mut merged = Vec::with_capacity(want as usize);
        let (mut i, mut j) = (0usize, 0usize);
        while (merged.len() as u64) < want {
            if j >= b.len() || (i < a.len() && a[i] >= b[j]) {
                merged.push(a[i]);
                i += 1;
            } else {
                merged.push(b[j]);
                j += 1;
            }
        }
        *terms = merged;
        if (terms.len() as u64) < k {
            return Err(SeqError::IndexOverflow { index: k });
        }
        Ok(())
    }
}

fn cap_to_coverage(want: u64, a: &CharacteristicSequence, b: &CharacteristicSequence) -> u64 {
    let cap = match (a.coverage(), b.coverage()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => u64::MAX,
    };
    want.min(cap)
}

/// A nonincreasing, nonnegative sequence μ_1 ≥ μ_2 ≥ … → 0 standing in for
/// the singular values of a compact operator.
///
/// Cloning is cheap; all representations are shared behind `Arc`s.
#[derive(Clone)]
pub struct CharacteristicSequence {
    pub(crate) repr: Repr,
    scale: f64,
    tail: TailDescriptor,
    name: String,
    claim: AsymptoticClass,
}

impl fmt::Debug for CharacteristicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Explicit(v) => format!("Explicit(len={})", v.len()),
            Repr::ClosedForm(_) => "ClosedForm".to_string(),
            Repr::Piecewise(b) => format!("Piecewise(blocks={})", b.len()),
            Repr::Merged(_) => "Merged".to_string(),
        };
        f.debug_struct("CharacteristicSequence")
            .field("name", &self.name)
            .field("kind", &kind)
            .field("scale", &self.scale)
            .field("tail", &self.tail)
            .field("claim", &self.claim)
            .finish()
    }
}

impl CharacteristicSequence {
    /// Finite list, zero beyond its length. Unsorted input is an error.
    pub fn explicit(values: Vec<f64>) -> Result<Self, SeqError> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(SeqError::NonFinite { index: i as u64 + 1 });
            }
            if v < 0.0 {
                return Err(SeqError::Negative { index: i as u64 + 1 });
            }
            if i > 0 && v > values[i - 1] {
                return Err(SeqError::NotMonotone { index: i as u64 + 1 });
            }
        }
        let support = values.iter().rposition(|&v| v > 0.0).map_or(0, |p| p + 1) as u64;
        Ok(Self {
            repr: Repr::Explicit(values.into()),
            scale: 1.0,
            tail: TailDescriptor::Finite { support },
            name: "explicit".into(),
            claim: AsymptoticClass::Unspecified,
        })
    }

    pub fn zero() -> Self {
        Self::explicit(Vec::new()).expect("empty list is valid")
    }

    /// Closed-form rule. The tail descriptor is the decay witness; the
    /// leading terms are checked for sign and monotonicity here, the rest
    /// whenever they are materialized.
    pub fn closed_form(
        name: impl Into<String>,
        rule: Rule,
        tail: TailDescriptor,
    ) -> Result<Self, SeqError> {
        let mut prev = f64::INFINITY;
        for k in 1..=VALIDATION_PREFIX {
            let v = rule(k);
            if !v.is_finite() {
                return Err(SeqError::NonFinite { index: k });
            }
            if v < 0.0 {
                return Err(SeqError::Negative { index: k });
            }
            if v > prev {
                return Err(SeqError::NotMonotone { index: k });
            }
            prev = v;
        }
        Ok(Self {
            repr: Repr::ClosedForm(rule),
            scale: 1.0,
            tail,
            name: name.into(),
            claim: AsymptoticClass::Unspecified,
        })
    }

    pub fn piecewise(
        name: impl Into<String>,
        blocks: Vec<Block>,
        tail: TailDescriptor,
    ) -> Result<Self, SeqError> {
        let blocks = Blocks::new(blocks)?;
        Ok(Self {
            repr: Repr::Piecewise(Arc::new(blocks)),
            scale: 1.0,
            tail,
            name: name.into(),
            claim: AsymptoticClass::Unspecified,
        })
    }

    /// Sorted merge of the terms of `x` and `y`: the characteristic sequence
    /// of the direct sum of two commuting diagonal operators.
    pub fn merge(x: &CharacteristicSequence, y: &CharacteristicSequence) -> Self {
        let tail = TailDescriptor::merged(&x.tail, x.head(), &y.tail, y.head());
        let claim = match (x.limit_claim(), y.limit_claim()) {
            (Some(a), Some(b)) => AsymptoticClass::Harmonic { l: a + b },
            _ => AsymptoticClass::Unspecified,
        };
        Self {
            repr: Repr::Merged(Arc::new(MergeCache {
                left: x.clone(),
                right: y.clone(),
                terms: RwLock::new(Vec::new()),
            })),
            scale: 1.0,
            tail,
            name: format!("merge({},{})", x.name, y.name),
            claim,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_claim(mut self, claim: AsymptoticClass) -> Self {
        self.claim = claim;
        self
    }

    /// λ·μ for λ ≥ 0.
    pub fn scaled(&self, lambda: f64) -> Result<Self, SeqError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(SeqError::InvalidScale(lambda));
        }
        let mut out = self.clone();
        out.scale *= lambda;
        out.tail = self.tail.scaled(lambda);
        out.claim = self.claim.scaled(lambda);
        Ok(out)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tail(&self) -> &TailDescriptor {
        &self.tail
    }

    pub fn claim(&self) -> &AsymptoticClass {
        &self.claim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Limit of n·μ_n implied by the claim or by a summable tail.
    pub fn limit_claim(&self) -> Option<f64> {
        if self.tail.summable() {
            return Some(0.0);
        }
        self.claim.harmonic_constant()
    }

    /// μ_1, or 0 for the zero sequence.
    pub fn head(&self) -> f64 {
        self.mu(1).unwrap_or(0.0)
    }

    pub fn blocks(&self) -> Option<&Blocks> {
        match &self.repr {
            Repr::Piecewise(b) => Some(b),
            _ => None,
        }
    }

    pub fn explicit_values(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Explicit(v) => Some(v),
            _ => None,
        }
    }

    /// Largest index whose value is known, or `None` when the rule covers
    /// every index. Finitely supported explicit lists are known everywhere.
    pub fn coverage(&self) -> Option<u64> {
        match &self.repr {
            Repr::Explicit(_) | Repr::ClosedForm(_) => None,
            Repr::Piecewise(b) => b.coverage().exact(),
            Repr::Merged(m) => match (m.left.coverage(), m.right.coverage()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            },
        }
    }

    /// Finite support length, if the sequence vanishes eventually.
    pub fn support(&self) -> Option<u64> {
        match self.tail {
            TailDescriptor::Finite { support } => Some(support),
            _ => None,
        }
    }

    /// μ_k for k ≥ 1.
    pub fn mu(&self, k: u64) -> Result<f64, SeqError> {
        if k == 0 {
            return Err(SeqError::ZeroIndex);
        }
        let raw = match &self.repr {
            Repr::Explicit(v) => v.get((k - 1) as usize).copied().unwrap_or(0.0),
            Repr::ClosedForm(rule) => rule(k),
            Repr::Piecewise(b) => b.mu(k)?,
            Repr::Merged(m) => {
                m.ensure(k)?;
                m.terms.read().expect("merge cache poisoned")[(k - 1) as usize]
            }
        };
        Ok(self.scale * raw)
    }

    /// Writes μ_{start}, …, μ_{start+out.len()-1} into `out`.
    pub fn fill(&self, start: u64, out: &mut [f64]) -> Result<(), SeqError> {
        if start == 0 {
            return Err(SeqError::ZeroIndex);
        }
        match &self.repr {
            Repr::Explicit(v) => {
                for (j, slot) in out.iter_mut().enumerate() {
                    let idx = (start - 1) as usize + j;
                    *slot = v.get(idx).copied().unwrap_or(0.0);
                }
            }
            Repr::ClosedForm(rule) => {
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot = rule(start + j as u64);
                }
            }
            Repr::Piecewise(b) => b.fill(start, out)?,
            Repr::Merged(m) => {
                let end = start + out.len() as u64 - 1;
                m.ensure(end)?;
                let terms = m.terms.read().expect("merge cache poisoned");
                out.copy_from_slice(&terms[(start - 1) as usize..end as usize]);
            }
        }
        if self.scale != 1.0 {
            for v in out.iter_mut() {
                *v *= self.scale;
            }
        }
        Ok(())
    }

    /// μ_1, …, μ_n.
    pub fn prefix(&self, n: u64) -> Result<Vec<f64>, SeqError> {
        let mut out = vec![0.0; n as usize];
        if n > 0 {
            self.fill(1, &mut out)?;
        }
        Ok(out)
    }

    /// Block ends with σ in closed form, for piecewise sequences.
    pub fn block_ends(&self) -> Option<Vec<BlockEnd>> {
        let b = self.blocks()?;
        let ln_scale = self.scale.ln();
        Some(
            b.block_ends()
                .map(|e| BlockEnd {
                    sigma: e.sigma * self.scale,
                    ln_mu: e.ln_mu + ln_scale,
                    ..e
                })
                .collect(),
        )
    }

    /// The two operands of a merged sequence and the merge's own scale.
    pub(crate) fn merge_parts(&self) -> Option<(&CharacteristicSequence, &CharacteristicSequence)> {
        match &self.repr {
            Repr::Merged(m) => Some((&m.left, &m.right)),
            _ => None,
        }
    }

    pub(crate) fn piecewise_sigma(&self, k: u64) -> Option<Result<f64, SeqError>> {
        self.blocks().map(|b| b.sigma(k).map(|s| s * self.scale))
    }
}
