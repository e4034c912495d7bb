use serde::{Deserialize, Serialize};

use super::{CharacteristicSequence, IndexSchedule, PrefixSumTable, SeqError, TailDescriptor};
use crate::numeric::Neumaier;

/// μ_k.
pub fn mu(seq: &CharacteristicSequence, k: u64) -> Result<f64, SeqError> {
    seq.mu(k)
}

/// σ_k.
pub fn sigma(table: &PrefixSumTable, k: u64) -> Result<f64, SeqError> {
    table.sigma(k)
}

/// γ_k = σ_k / ln k.
pub fn gamma(table: &PrefixSumTable, k: u64) -> Result<f64, SeqError> {
    table.gamma(k)
}

/// Analytic bound σ_n ≤ offset + slope·ln n, valid for every n ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaBound {
    pub offset: f64,
    pub slope: f64,
    /// where the bound comes from
    pub source: WitnessSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    FiniteSupport,
    GeometricTail,
    InverseBound,
    AsymptoticHarmonic,
    LogAverage,
}

impl SigmaBound {
    pub fn at(&self, n: u64) -> f64 {
        self.offset + self.slope * (n as f64).ln()
    }

    /// Upper bound on sup_{n≥2} γ_n implied by the witness.
    pub fn gamma_sup(&self) -> f64 {
        // offset/ln n + slope is largest at n = 2
        let l2 = std::f64::consts::LN_2;
        self.offset.max(0.0) / l2 + self.slope
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1InfDiagnostic {
    pub sup_gamma_observed: f64,
    pub bound_witness: Option<SigmaBound>,
    pub verdict: Membership,
}

/// The σ-growth certificate carried by a sequence's tail descriptor.
pub fn sigma_witness(seq: &CharacteristicSequence) -> Result<Option<SigmaBound>, SeqError> {
    let table = PrefixSumTable::new(seq.clone());
    sigma_witness_with(seq, &table)
}

fn sigma_witness_with(
    seq: &CharacteristicSequence,
    table: &PrefixSumTable,
) -> Result<Option<SigmaBound>, SeqError> {
    let w = match *seq.tail() {
        TailDescriptor::Finite { support } => Some(SigmaBound {
            offset: if support == 0 { 0.0 } else { table.sigma(support)? },
            slope: 0.0,
            source: WitnessSource::FiniteSupport,
        }),
        TailDescriptor::Geometric { c, ratio } => Some(SigmaBound {
            offset: c * ratio / (1.0 - ratio),
            slope: 0.0,
            source: WitnessSource::GeometricTail,
        }),
        TailDescriptor::InverseBound { c } => Some(SigmaBound {
            // σ_n ≤ c·H_n ≤ c·(1 + ln n)
            offset: c,
            slope: c,
            source: WitnessSource::InverseBound,
        }),
        TailDescriptor::Asymptotic { l, eps, from, .. } => {
            // μ_n ≤ s/n from f on, so σ_n ≤ σ_{f−1} + s/f + s·ln(n/f); f may
            // lie just past the represented range
            let f = from.max(1);
            let slope = l + eps.at(f.max(2));
            let head = if f > 1 { table.sigma(f - 1)? } else { 0.0 };
            Some(SigmaBound {
                offset: head + slope / f as f64,
                slope,
                source: WitnessSource::AsymptoticHarmonic,
            })
        }
        TailDescriptor::LogAverage { c } => Some(SigmaBound {
            offset: c,
            slope: c,
            source: WitnessSource::LogAverage,
        }),
        TailDescriptor::InverseLog { .. } | TailDescriptor::Decaying => None,
    };
    Ok(w)
}

/// Membership in L^{1,∞}. Only an analytic witness certifies membership;
/// the observed supremum over a finite schedule is reported but proves
/// nothing on its own.
pub fn l1inf_diagnostic(
    seq: &CharacteristicSequence,
    schedule: &IndexSchedule,
) -> Result<L1InfDiagnostic, SeqError> {
    let table = PrefixSumTable::new(seq.clone());
    let schedule = match seq.coverage() {
        Some(cap) => schedule.capped(cap)?,
        None => schedule.clone(),
    };
    let gammas: Vec<f64> = schedule
        .indices()
        .iter()
        .map(|&k| table.gamma(k))
        .collect::<Result<_, _>>()?;
    let sup_gamma_observed = gammas.iter().copied().fold(0.0, f64::max);
    let bound_witness = sigma_witness_with(seq, &table)?;
    let verdict = if bound_witness.is_some() {
        Membership::Member
    } else if seq.tail().certifies_divergence() && tail_increasing(&gammas) {
        Membership::NonMember
    } else {
        Membership::Inconclusive
    };
    Ok(L1InfDiagnostic {
        sup_gamma_observed,
        bound_witness,
        verdict,
    })
}

fn tail_increasing(gammas: &[f64]) -> bool {
    let half = &gammas[gammas.len() / 2..];
    half.len() >= 2 && half.windows(2).all(|w| w[1] > w[0])
}

/// Σ_{n≤N} μ_n(x)·μ_n(y).
pub fn pairing_bound(
    x: &CharacteristicSequence,
    y: &CharacteristicSequence,
    n: u64,
) -> Result<f64, SeqError> {
    const CHUNK: u64 = 1 << 14;
    let mut acc = Neumaier::new();
    let mut bx = Vec::new();
    let mut by = Vec::new();
    let mut start = 1;
    while start <= n {
        let len = CHUNK.min(n - start + 1) as usize;
        bx.resize(len, 0.0);
        by.resize(len, 0.0);
        x.fill(start, &mut bx)?;
        y.fill(start, &mut by)?;
        acc.extend(bx.iter().zip(&by).map(|(a, b)| a * b));
        start += len as u64;
    }
    Ok(acc.value())
}
