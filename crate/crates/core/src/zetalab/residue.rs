use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{zeta, ZetaError, ZetaEval};
use crate::dixmier::{EstimateMethod, ResidueEstimate, TableRow};
use crate::numeric::format_f64;
use crate::seqkernel::{CharacteristicSequence, TailDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueConfig {
    /// s_j = 1 + 2^{−j} for j = 2..=levels
    pub levels: u32,
    /// partial-sum cutoff; defaults to the model's coverage or 2^20
    pub n_cut: Option<u64>,
    /// largest admissible (s−1)·(tail_high − tail_low) relative to (s−1)ζ
    pub max_relative_width: f64,
}

impl Default for ResidueConfig {
    fn default() -> Self {
        Self {
            levels: 12,
            n_cut: None,
            max_relative_width: 0.05,
        }
    }
}

fn default_cut(seq: &CharacteristicSequence, config: &ResidueConfig) -> u64 {
    config.n_cut.or(seq.coverage()).unwrap_or_else(|| match *seq.tail() {
        TailDescriptor::Finite { support } => support,
        _ => 1 << 20,
    })
}

/// ζ evaluated at s_j = 1 + 2^{−j}, j = 2..=levels, in that order.
pub fn residue_curve(
    seq: &CharacteristicSequence,
    config: &ResidueConfig,
) -> Result<Vec<ZetaEval>, ZetaError> {
    if config.levels < 3 {
        return Err(ZetaError::Parameter(format!(
            "need at least 3 levels, got {}",
            config.levels
        )));
    }
    let n_cut = default_cut(seq, config);
    (2..=config.levels)
        .into_par_iter()
        .map(|j| zeta(seq, 1.0 + 2f64.powi(-(j as i32)), n_cut))
        .collect()
}

/// lim_{s→1+} (s−1)ζ(s) by first-order Richardson extrapolation of
/// f(s) = (s−1)·ζ_mid(s) on s_j = 1 + 2^{−j}: with h halved at each level,
/// R_j = 2f_{j+1} − f_j removes the linear term. The value is the last
/// extrapolant; the error is the difference of the last two extrapolants
/// plus the propagated half-width of the tail brackets.
pub fn residue_at_one(
    seq: &CharacteristicSequence,
    config: &ResidueConfig,
) -> Result<ResidueEstimate, ZetaError> {
    let curve = residue_curve(seq, config)?;
    let f: Vec<f64> = curve.iter().map(|e| (e.s - 1.0) * e.mid()).collect();
    let w: Vec<f64> = curve.iter().map(|e| (e.s - 1.0) * e.width()).collect();
    for (e, (&fv, &wv)) in curve.iter().zip(f.iter().zip(&w)) {
        if wv > config.max_relative_width * fv.abs() + 1e-12 {
            return Err(ZetaError::BracketTooWide {
                s: e.s,
                width: wv,
                value: fv,
            });
        }
    }
    let r: Vec<f64> = f.windows(2).map(|p| 2.0 * p[1] - p[0]).collect();
    let k = r.len();
    let value = r[k - 1];
    let bracket_error = w[k] + 0.5 * w[k - 1];
    let table = curve
        .iter()
        .zip(&f)
        .enumerate()
        .map(|(i, (e, &fv))| TableRow {
            parameter: e.s,
            raw: fv,
            extrapolated: i.checked_sub(1).map(|p| r[p]),
        })
        .collect();
    Ok(ResidueEstimate {
        value,
        error_estimate: (r[k - 1] - r[k - 2]).abs() + bracket_error,
        method: EstimateMethod::ZetaExtrapolation,
        table,
    })
}

/// CSV with columns s, partial_sum, tail_low, tail_high, (s−1)·ζ_mid.
pub fn zeta_csv(curve: &[ZetaEval]) -> String {
    let mut out = String::from("s,partial_sum,tail_low,tail_high,s_minus_1_zeta_mid\n");
    for e in curve {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_f64(e.s),
            format_f64(e.partial_sum),
            format_f64(e.tail_low),
            format_f64(e.tail_high),
            format_f64((e.s - 1.0) * e.mid())
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomspec::{synthetic_model, SyntheticKind};

    fn seq(kind: SyntheticKind) -> CharacteristicSequence {
        synthetic_model(&kind).unwrap().into_sequence()
    }

    #[test]
    fn harmonic_residue_is_one() {
        let e = residue_at_one(&seq(SyntheticKind::Harmonic { l: 1.0 }), &Default::default())
            .unwrap();
        assert!((e.value - 1.0).abs() < 1e-3, "{}", e.value);
        assert!((e.value - 1.0).abs() <= e.error_estimate + 1e-6);
        assert_eq!(e.table.len(), 11);
    }

    #[test]
    fn geometric_residue_vanishes_within_its_error() {
        let e = residue_at_one(
            &seq(SyntheticKind::Geometric { ratio: 0.5, c: 1.0 }),
            &Default::default(),
        )
        .unwrap();
        // order-1 extrapolation leaves ζ'(1)·h²/2 with h = 2^-11
        assert!(e.value.abs() < 1e-6, "{}", e.value);
        assert!(e.value.abs() <= e.error_estimate);
    }

    #[test]
    fn scaled_harmonic() {
        let e = residue_at_one(&seq(SyntheticKind::Harmonic { l: 3.0 }), &Default::default())
            .unwrap();
        assert!((e.value - 3.0).abs() < 3e-3);
    }

    #[test]
    fn csv_has_a_row_per_level() {
        let curve = residue_curve(&seq(SyntheticKind::Harmonic { l: 1.0 }), &Default::default())
            .unwrap();
        let csv = zeta_csv(&curve);
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.starts_with("s,partial_sum"));
    }
}
