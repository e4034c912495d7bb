use serde::{Deserialize, Serialize};

use super::ZetaError;
use crate::dixmier::{EstimateMethod, ResidueEstimate, TableRow};
use crate::numeric::fit_line;
use crate::seqkernel::{CharacteristicSequence, SeqError};

/// Largest index probed when counting on closed-form rules.
const SEARCH_LIMIT: u64 = 1 << 62;

/// α(t) = #{n : μ_n ≥ 1/t}.
pub fn counting(seq: &CharacteristicSequence, t: f64) -> Result<u64, ZetaError> {
    if !(t >= 0.0) {
        return Err(ZetaError::Parameter(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0);
    }
    if let Some((x, y)) = seq.merge_parts() {
        // α is additive over sorted merges; the merge itself carries scale 1
        let t = t * seq.scale();
        return Ok(counting(x, t)? + counting(y, t)?);
    }
    let threshold = 1.0 / t;
    if let Some(blocks) = seq.blocks() {
        if seq.scale() == 0.0 {
            return Ok(0);
        }
        return Ok(blocks.count_at_least(threshold / seq.scale())?);
    }
    if let Some(values) = seq.explicit_values() {
        let scale = seq.scale();
        return Ok(values.partition_point(|&v| v * scale >= threshold) as u64);
    }
    // closed form: bracket by doubling, then bisect
    let at_least = |k: u64| -> Result<bool, SeqError> { Ok(seq.mu(k)? >= threshold) };
    if !at_least(1)? {
        return Ok(0);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while at_least(hi)? {
        lo = hi;
        if hi >= SEARCH_LIMIT {
            return Err(SeqError::IndexOverflow { index: hi }.into());
        }
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at_least(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Geometric t-grid with `per_octave` points per doubling from 2 up to
/// min(2^40, 1/μ_N) for truncated models.
pub fn default_t_schedule(seq: &CharacteristicSequence, per_octave: u32) -> Vec<f64> {
    let mut t_max = 2f64.powi(40);
    if let Some(n) = seq.coverage() {
        if let Ok(mu) = seq.mu(n) {
            if mu > 0.0 {
                t_max = t_max.min(1.0 / mu);
            }
        }
    }
    (0u32..)
        .map(|i| 2f64.powf(1.0 + i as f64 / per_octave as f64))
        .take_while(|&t| t <= t_max)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSlope {
    pub estimate: ResidueEstimate,
    /// α(t)/t keeps growing across the schedule: not of class ∼L/n
    pub diverges: bool,
    /// max of α(t)/t over each quarter of the schedule
    pub quarter_maxima: Vec<f64>,
}

/// Fits α(t)/t = L + b/t over the second half of the t-schedule. The
/// schedule is also cut into quarters; if the per-quarter maxima of α(t)/t
/// increase strictly and by more than 5% of the fitted value overall, the
/// ratio is flagged as diverging.
pub fn weyl_slope(seq: &CharacteristicSequence, ts: &[f64]) -> Result<WeylSlope, ZetaError> {
    if ts.len() < 8 {
        return Err(ZetaError::Parameter(format!(
            "t-schedule needs at least 8 points, got {}",
            ts.len()
        )));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) || !(ts[0] > 0.0) {
        return Err(ZetaError::Parameter(
            "t-schedule must be positive and increasing".into(),
        ));
    }
    let ratios: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(counting(seq, t)? as f64 / t))
        .collect::<Result<_, ZetaError>>()?;
    let half = ts.len() / 2;
    let xs: Vec<f64> = ts[half..].iter().map(|t| 1.0 / t).collect();
    let fit = fit_line(&xs, &ratios[half..])
        .ok_or_else(|| ZetaError::Parameter("degenerate t-schedule".into()))?;
    let q = ts.len() / 4;
    let quarter_maxima: Vec<f64> = (0..4)
        .map(|i| {
            let end = if i == 3 { ts.len() } else { (i + 1) * q };
            ratios[i * q..end].iter().copied().fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let rising = quarter_maxima.windows(2).all(|w| w[1] > w[0]);
    let drift = quarter_maxima[3] - quarter_maxima[0];
    let diverges = rising && drift > 0.05 * fit.intercept.abs().max(1e-300);
    let table = ts
        .iter()
        .zip(&ratios)
        .enumerate()
        .map(|(i, (&t, &r))| TableRow {
            parameter: t,
            raw: r,
            extrapolated: (i >= half).then(|| fit.intercept + fit.slope / t),
        })
        .collect();
    Ok(WeylSlope {
        estimate: ResidueEstimate {
            value: fit.intercept,
            error_estimate: fit.max_abs_residual,
            method: EstimateMethod::WeylFit,
            table,
        },
        diverges,
        quarter_maxima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomspec::{synthetic_model, torus_model, varilly_model, SyntheticKind};

    fn harmonic() -> CharacteristicSequence {
        synthetic_model(&SyntheticKind::Harmonic { l: 1.0 })
            .unwrap()
            .into_sequence()
    }

    #[test]
    fn harmonic_counts() {
        let h = harmonic();
        assert_eq!(counting(&h, 2.5).unwrap(), 2);
        assert_eq!(counting(&h, 0.5).unwrap(), 0);
        assert_eq!(counting(&h, 1000.0).unwrap(), 1000);
    }

    #[test]
    fn varilly_block_is_counted_whole() {
        let v = varilly_model().unwrap().into_sequence();
        for m in 3u32..=12 {
            let fact: u64 = (1..=m as u64).product();
            let t = fact as f64 / (m as f64).ln();
            assert_eq!(counting(&v, t * (1.0 + 1e-12)).unwrap(), fact, "m={m}");
        }
    }

    #[test]
    fn counting_agrees_with_sigma_by_layer_cake() {
        let s = CharacteristicSequence::explicit(vec![3.0, 2.0, 2.0, 0.5, 0.1]).unwrap();
        // σ_N = Σ_n μ_n = Σ over distinct values v of v·(α at v − α at next)
        let distinct = [3.0, 2.0, 0.5, 0.1, 0.0];
        let mut total = 0.0;
        for w in distinct.windows(2) {
            total += (w[0] - w[1]) * counting(&s, 1.0 / w[0]).unwrap() as f64;
        }
        assert!((total - 7.6).abs() < 1e-12);
    }

    #[test]
    fn merged_counts_add() {
        let h = harmonic();
        let z = CharacteristicSequence::merge(&h, &h);
        assert_eq!(counting(&z, 10.0).unwrap(), 20);
    }

    #[test]
    fn weyl_slopes() {
        let h = harmonic();
        let w = weyl_slope(&h, &default_t_schedule(&h, 8)).unwrap();
        assert!((w.estimate.value - 1.0).abs() < 1e-3);
        assert!(!w.diverges);

        let t = torus_model(2, 400.0).unwrap();
        let s = t.sequence();
        let w = weyl_slope(s, &default_t_schedule(s, 8)).unwrap();
        assert!((w.estimate.value - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI);
        assert!(!w.diverges);

        let v = varilly_model().unwrap().into_sequence();
        let w = weyl_slope(&v, &default_t_schedule(&v, 8)).unwrap();
        assert!(w.diverges, "{:?}", w.quarter_maxima);
    }
}
