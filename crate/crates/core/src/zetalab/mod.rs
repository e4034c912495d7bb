//! Spectral zeta functions ζ(s) = Σ μ_n^s with certified tail brackets, the
//! residue lim_{s→1+} (s−1)ζ(s), the counting function α(t) and Weyl-slope
//! diagnostics.

mod counting;
mod residue;

pub use counting::{counting, default_t_schedule, weyl_slope, WeylSlope};
pub use residue::{residue_at_one, residue_curve, zeta_csv, ResidueConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Neumaier;
use crate::seqkernel::{BlockBound, BlockValue, CharacteristicSequence, SeqError, TailDescriptor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("zeta needs s > 1, got {0}")]
    InvalidS(f64),
    #[error("tail descriptor {0} admits no certified zeta bracket")]
    NoTailCertificate(String),
    #[error("tail bracket too wide at s = {s}: width {width} against value {value}")]
    BracketTooWide { s: f64, width: f64, value: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

/// ζ(s) bracketed as partial sum over n ≤ N plus a certified tail interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEval {
    pub s: f64,
    pub n_cut: u64,
    pub partial_sum: f64,
    pub tail_low: f64,
    pub tail_high: f64,
    pub value_low: f64,
    pub value_high: f64,
}

impl ZetaEval {
    pub fn mid(&self) -> f64 {
        0.5 * (self.value_low + self.value_high)
    }

    pub fn width(&self) -> f64 {
        self.value_high - self.value_low
    }
}

const CHUNK: u64 = 1 << 15;

/// ζ(s) with the partial sum over n ≤ n_cut and a tail bracket from the
/// sequence's tail descriptor. Sequences with μ_1 > 1 are evaluated as
/// μ_1^s·ζ_{μ/μ_1}(s).
pub fn zeta(seq: &CharacteristicSequence, s: f64, n_cut: u64) -> Result<ZetaEval, ZetaError> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(ZetaError::InvalidS(s));
    }
    let head = seq.head();
    if head > 1.0 {
        let normalized = seq.scaled(1.0 / head)?;
        let e = zeta(&normalized, s, n_cut)?;
        let f = head.powf(s);
        return Ok(ZetaEval {
            partial_sum: e.partial_sum * f,
            tail_low: e.tail_low * f,
            tail_high: e.tail_high * f,
            value_low: e.value_low * f,
            value_high: e.value_high * f,
            ..e
        });
    }
    let n_cut = match *seq.tail() {
        TailDescriptor::Finite { support } => n_cut.min(support),
        _ => n_cut,
    };
    if let Some(cap) = seq.coverage() {
        if n_cut > cap {
            return Err(ZetaError::Parameter(format!(
                "N_cut = {n_cut} lies beyond the {cap} enumerated terms"
            )));
        }
    }
    let (tail_low, tail_high) = tail_bracket(seq.tail(), seq.head(), s, n_cut)?;
    let partial_sum = power_sum(seq, s, n_cut)?;
    Ok(ZetaEval {
        s,
        n_cut,
        partial_sum,
        tail_low,
        tail_high,
        value_low: partial_sum + tail_low,
        value_high: partial_sum + tail_high,
    })
}

/// ∫_N^∞ x^{−s} dx = N^{1−s}/(s−1)
fn integral_power(n: f64, s: f64) -> f64 {
    n.powf(1.0 - s) / (s - 1.0)
}

/// Bracket of Σ_{n>N} μ_n^s.
fn tail_bracket(
    tail: &TailDescriptor,
    mu_1: f64,
    s: f64,
    n: u64,
) -> Result<(f64, f64), ZetaError> {
    let nf = n as f64;
    Ok(match *tail {
        TailDescriptor::Finite { support } => {
            debug_assert!(n >= support);
            (0.0, 0.0)
        }
        TailDescriptor::Geometric { c, ratio } => {
            // Σ_{m>N} (c r^m)^s = c^s r^{s(N+1)} / (1 − r^s)
            let rs = ratio.powf(s);
            let high = c.powf(s) * (s * (nf + 1.0) * ratio.ln()).exp() / (1.0 - rs);
            (0.0, high)
        }
        TailDescriptor::InverseBound { c } => {
            if n == 0 {
                return Err(ZetaError::Parameter("N_cut must be >= 1".into()));
            }
            (0.0, c.powf(s) * integral_power(nf, s))
        }
        TailDescriptor::Asymptotic {
            l,
            eps,
            from,
            prefix_bound,
        } => {
            if n == 0 {
                return Err(ZetaError::Parameter("N_cut must be >= 1".into()));
            }
            if n + 1 < from {
                // only n·μ_n ≤ max(prefix_bound, l + ε) is certified here
                let c = tail.inverse_bound(mu_1).unwrap_or(prefix_bound);
                (0.0, c.powf(s) * integral_power(nf, s))
            } else {
                let e = eps.at((n + 1).max(from));
                let low = (l - e).max(0.0).powf(s) * integral_power(nf + 1.0, s);
                let high = (l + e).powf(s) * integral_power(nf, s);
                (low, high)
            }
        }
        TailDescriptor::LogAverage { .. }
        | TailDescriptor::InverseLog { .. }
        | TailDescriptor::Decaying => {
            return Err(ZetaError::NoTailCertificate(format!("{tail:?}")));
        }
    })
}

/// Σ_{n≤N} μ_n^s; closed form per block for piecewise sequences.
fn power_sum(seq: &CharacteristicSequence, s: f64, n: u64) -> Result<f64, ZetaError> {
    if n == 0 {
        return Ok(0.0);
    }
    if let Some(blocks) = seq.blocks() {
        let scale_s = seq.scale().powf(s);
        let mut acc = Neumaier::new();
        let mut prev = 0u64;
        for b in blocks.blocks() {
            if prev >= n {
                break;
            }
            let last = match b.last {
                BlockBound::Exact(l) => l.min(n),
                BlockBound::Log(_) => n,
            };
            let count = last - prev;
            acc.add(match b.value {
                BlockValue::Constant { ln_value, .. } => {
                    (s * ln_value + (count as f64).ln()).exp()
                }
                BlockValue::Harmonic { coef } => coef.powf(s) * power_range(prev + 1, last, s),
            });
            prev = last;
        }
        return Ok(acc.value() * scale_s);
    }
    let mut acc = Neumaier::new();
    let mut buf = Vec::new();
    let mut start = 1u64;
    while start <= n {
        let len = CHUNK.min(n - start + 1);
        buf.resize(len as usize, 0.0);
        seq.fill(start, &mut buf)?;
        acc.extend(buf.iter().map(|&v| if v > 0.0 { v.powf(s) } else { 0.0 }));
        start += len;
    }
    Ok(acc.value())
}

/// Σ_{k=a}^{b} k^{−s}: directly for short ranges, by Euler–Maclaurin otherwise.
fn power_range(a: u64, b: u64, s: f64) -> f64 {
    if b < a {
        return 0.0;
    }
    if b - a < 4096 || a < 64 {
        let direct_end = if b - a < 4096 { b } else { 63 };
        let head: f64 = (a..=direct_end).rev().map(|k| (k as f64).powf(-s)).sum();
        return if direct_end == b {
            head
        } else {
            head + power_range(64, b, s)
        };
    }
    let (af, bf) = (a as f64, b as f64);
    // ∫_a^b x^{−s} dx = a^{1−s}·(1 − (b/a)^{1−s})/(s−1)
    let integral = af.powf(1.0 - s) * -((1.0 - s) * (bf / af).ln()).exp_m1() / (s - 1.0);
    let f = |x: f64| x.powf(-s);
    let d1 = |x: f64| -s * x.powf(-s - 1.0);
    let d3 = |x: f64| -s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0);
    integral + 0.5 * (f(af) + f(bf)) + (d1(bf) - d1(af)) / 12.0 - (d3(bf) - d3(af)) / 720.0
}
