//! Named test sequences: harmonic and perturbed ∼L/n classes, summable and
//! divergent controls, and block sequences whose logarithmic means oscillate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ModelError, SpectralModel};
use crate::seqkernel::{
    AsymptoticClass, Block, BlockBound, BlockValue, CharacteristicSequence, Epsilon, Rule,
    TailDescriptor, EXACT_INDEX_LIMIT,
};

fn default_one() -> f64 {
    1.0
}
fn default_ratio() -> f64 {
    0.5
}
fn default_high() -> f64 {
    2.0
}
fn default_low() -> f64 {
    0.5
}
fn default_growth() -> f64 {
    1.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticKind {
    /// μ_n = l/n
    Harmonic {
        #[serde(default = "default_one")]
        l: f64,
    },
    /// μ_n = c·ratio^n
    Geometric {
        #[serde(default = "default_ratio")]
        ratio: f64,
        #[serde(default = "default_one")]
        c: f64,
    },
    /// μ_n = l/n·(1 + δ·sin(ln n)/ln n), |δ| ≤ 0.2
    Perturbed {
        #[serde(default = "default_one")]
        l: f64,
        delta: f64,
    },
    /// Segments [B_j, B_{j+1}) with B_j = round(2^{growth^j}), alternating
    /// between high/n and low/n, clamped to stay nonincreasing.
    Oscillating {
        #[serde(default = "default_high")]
        high: f64,
        #[serde(default = "default_low")]
        low: f64,
        #[serde(default = "default_growth")]
        growth: f64,
    },
    /// 2/n on [4^j, 2·4^j), 1/(2n) on [2·4^j, 4^{j+1}), clamped.
    AlternatingDyadic,
    /// μ_n = c/ln(n+1); σ_n/ln n → ∞.
    InverseLog {
        #[serde(default = "default_one")]
        c: f64,
    },
    /// Finite list, zero afterwards.
    Finite { values: Vec<f64> },
}

impl SyntheticKind {
    pub fn name(&self) -> &'static str {
        match self {
            SyntheticKind::Harmonic { .. } => "harmonic",
            SyntheticKind::Geometric { .. } => "geometric",
            SyntheticKind::Perturbed { .. } => "perturbed",
            SyntheticKind::Oscillating { .. } => "oscillating",
            SyntheticKind::AlternatingDyadic => "alternating_dyadic",
            SyntheticKind::InverseLog { .. } => "inverse_log",
            SyntheticKind::Finite { .. } => "finite",
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, ModelError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ModelError::Parameter(format!("{name} must be positive, got {v}")))
    }
}

pub fn synthetic_model(kind: &SyntheticKind) -> Result<SpectralModel, ModelError> {
    let name = kind.name();
    let sequence = match *kind {
        SyntheticKind::Harmonic { l } => {
            let l = positive("l", l)?;
            let rule: Rule = Arc::new(move |k| l / k as f64);
            let tail = TailDescriptor::Asymptotic {
                l,
                eps: Epsilon::Constant { eps: 0.0 },
                from: 1,
                prefix_bound: l,
            };
            CharacteristicSequence::closed_form(name, rule, tail)?
                .with_claim(AsymptoticClass::Harmonic { l })
        }
        SyntheticKind::Geometric { ratio, c } => {
            let c = positive("c", c)?;
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(ModelError::Parameter(format!(
                    "ratio must lie in (0, 1), got {ratio}"
                )));
            }
            let rule: Rule = Arc::new(move |k| c * ratio.powf(k as f64));
            CharacteristicSequence::closed_form(name, rule, TailDescriptor::Geometric { c, ratio })?
                .with_claim(AsymptoticClass::Harmonic { l: 0.0 })
        }
        SyntheticKind::Perturbed { l, delta } => {
            let l = positive("l", l)?;
            if !(delta.abs() <= 0.2) {
                return Err(ModelError::Parameter(format!(
                    "|delta| must be at most 0.2, got {delta}"
                )));
            }
            let rule: Rule = Arc::new(move |k| {
                if k == 1 {
                    // sin(ln n)/ln n → 1 as n → 1
                    l * (1.0 + delta)
                } else {
                    let ln = (k as f64).ln();
                    l / k as f64 * (1.0 + delta * ln.sin() / ln)
                }
            });
            let tail = TailDescriptor::Asymptotic {
                l,
                eps: Epsilon::InverseLog { c: l * delta.abs() },
                from: 2,
                prefix_bound: l * (1.0 + delta.abs()),
            };
            CharacteristicSequence::closed_form(name, rule, tail)?
                .with_claim(AsymptoticClass::Harmonic { l })
        }
        SyntheticKind::Oscillating { high, low, growth } => {
            let high = positive("high", high)?;
            let low = positive("low", low)?;
            if !(growth > 1.0) || !growth.is_finite() {
                return Err(ModelError::Parameter(format!("growth must exceed 1, got {growth}")));
            }
            let mut bounds = vec![1u64];
            let mut j = 0i32;
            loop {
                let b = 2f64.powf(growth.powi(j)).round();
                j += 1;
                if b >= EXACT_INDEX_LIMIT as f64 {
                    break;
                }
                let b = b as u64;
                if b > *bounds.last().expect("nonempty") {
                    bounds.push(b);
                }
            }
            let coefs = (0..bounds.len()).map(|i| if i % 2 == 0 { high } else { low });
            let segments: Vec<(u64, f64)> = bounds.iter().copied().zip(coefs).collect();
            clamped_blocks(name, &segments, EXACT_INDEX_LIMIT, high)?
        }
        SyntheticKind::AlternatingDyadic => {
            let segments: Vec<(u64, f64)> = (0..62)
                .map(|e| (1u64 << e, if e % 2 == 0 { 2.0 } else { 0.5 }))
                .collect();
            clamped_blocks(name, &segments, EXACT_INDEX_LIMIT, 2.0)?
        }
        SyntheticKind::InverseLog { c } => {
            let c = positive("c", c)?;
            let rule: Rule = Arc::new(move |k| c / ((k + 1) as f64).ln());
            CharacteristicSequence::closed_form(name, rule, TailDescriptor::InverseLog { lower: c })?
        }
        SyntheticKind::Finite { ref values } => {
            CharacteristicSequence::explicit(values.clone())?.with_name(name)
        }
    };
    Ok(SpectralModel::new(name, 0, sequence, None))
}

/// μ_n = min(coef_j/n, μ_{n−1}) on segment j = [start_j, start_{j+1}),
/// the last segment ending at `end`. Each segment becomes a constant
/// plateau (where clamping is active) followed by a harmonic block.
fn clamped_blocks(
    name: &str,
    segments: &[(u64, f64)],
    end: u64,
    inverse_bound: f64,
) -> Result<CharacteristicSequence, ModelError> {
    let mut blocks = Vec::new();
    let mut prev = f64::INFINITY;
    for (i, &(start, coef)) in segments.iter().enumerate() {
        let stop = segments.get(i + 1).map_or(end, |s| s.0 - 1);
        // first index where coef/n ≤ prev
        let free_from = if coef / start as f64 <= prev {
            start
        } else {
            let n = (coef / prev).ceil() as u64;
            let n = if coef / n as f64 > prev { n + 1 } else { n };
            n.max(start)
        };
        if free_from > start {
            blocks.push(Block {
                last: BlockBound::Exact((free_from - 1).min(stop)),
                value: BlockValue::constant(prev),
            });
        }
        if free_from <= stop {
            blocks.push(Block {
                last: BlockBound::Exact(stop),
                value: BlockValue::Harmonic { coef },
            });
            prev = coef / stop as f64;
        }
    }
    Ok(CharacteristicSequence::piecewise(
        name,
        blocks,
        TailDescriptor::InverseBound { c: inverse_bound },
    )?)
}
