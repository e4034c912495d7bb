use serde::{Deserialize, Serialize};

use super::DixmierError;
use crate::geomspec::SpectralModel;
use crate::seqkernel::{CharacteristicSequence, IndexSchedule, PrefixSumTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurable {
    Yes,
    No,
    Inconclusive,
}

/// (k, σ_k, γ_k) at one schedule node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub k: u64,
    pub sigma: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketDiagnostics {
    /// γ at every node actually used
    pub points: Vec<GammaPoint>,
    /// anchor index a of the tail means
    pub anchor: u64,
    /// (k, (σ_k − σ_a)/ln(k/a)) over the tail of the nodes
    pub tail_means: Vec<(u64, f64)>,
    /// limsup − liminf estimate
    pub tail_oscillation: f64,
    /// largest m_{k+1}/Σ_{j≤k} m_j over the tail, for multiplicity models
    pub idcrit_ratio_max: Option<f64>,
    /// largest correction factor c_{k+1} over the tail
    pub correction_factor: Option<f64>,
    /// limit implied by the sequence's claimed class
    pub claimed_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitBracket {
    pub liminf_estimate: f64,
    pub limsup_estimate: f64,
    pub measurable: Measurable,
    pub value: Option<f64>,
    pub schedule: Vec<u64>,
    pub cauchy_tol: f64,
    pub diagnostics: BracketDiagnostics,
}

impl LimitBracket {
    pub fn width(&self) -> f64 {
        self.limsup_estimate - self.liminf_estimate
    }
}

/// Brackets lim γ_n along a schedule.
///
/// γ_n itself approaches its limit only like 1/ln n, so the bracket is
/// built from anchored means (σ_k − σ_a)/ln(k/a), with the anchor a at the
/// middle node and k over the last quarter of the nodes. If γ_n → L these
/// means tend to L as well (Stolz–Cesàro), and conversely a limit of the
/// means forces γ_n to the same limit. The bracket is [min, max] of those
/// means; its value is the mean at the last node.
///
/// The verdict is `yes` when the bracket is narrower than `cauchy_tol`
/// and the value agrees within `cauchy_tol` with the limit implied by the
/// sequence's claimed class (∼L/n, or 0 for summable tails); `no` when the
/// tail descriptor certifies σ_n/ln n → ∞; `inconclusive` otherwise.
pub fn measurability_bracket(
    seq: &CharacteristicSequence,
    schedule: &IndexSchedule,
    cauchy_tol: f64,
) -> Result<LimitBracket, DixmierError> {
    let nodes = match seq.coverage() {
        Some(cap) => schedule.capped(cap)?.indices().to_vec(),
        None => schedule.indices().to_vec(),
    };
    bracket_on_nodes(seq, nodes, cauchy_tol, None)
}

/// As [`measurability_bracket`], restricted to cumulative-multiplicity
/// indices N_k = Σ_{j≤k} m_j when the model exposes its shells. Each
/// schedule index is moved down to the nearest N_k, and the bracket is
/// widened by the largest c_{k+1} = 1 + ln(1 + m_{k+1}/N_k)/ln N_k met in
/// the tail, which bounds γ between consecutive shell ends.
pub fn model_bracket(
    model: &SpectralModel,
    schedule: &IndexSchedule,
    cauchy_tol: f64,
) -> Result<LimitBracket, DixmierError> {
    let seq = model.sequence();
    let Some(cumulative) = model.cumulative_multiplicities() else {
        return measurability_bracket(seq, schedule, cauchy_tol);
    };
    let mut nodes: Vec<u64> = schedule
        .indices()
        .iter()
        .filter_map(|&k| {
            let i = cumulative.partition_point(|&c| c <= k);
            (i > 0).then(|| cumulative[i - 1])
        })
        .filter(|&k| k >= 2)
        .collect();
    nodes.dedup();
    if nodes.is_empty() {
        return Err(DixmierError::Parameter(
            "schedule ends before the second shell".into(),
        ));
    }
    let shells = Shells {
        cumulative: &cumulative,
    };
    bracket_on_nodes(seq, nodes, cauchy_tol, Some(shells))
}

struct Shells<'a> {
    cumulative: &'a [u64],
}

impl Shells<'_> {
    /// max over shell ends from ≤ N_k < until of (m_{k+1}/N_k, c_{k+1}).
    fn tail_factors(&self, from: u64, until: u64) -> (f64, f64) {
        let start = self.cumulative.partition_point(|&c| c < from);
        let stop = self.cumulative.partition_point(|&c| c <= until).max(start);
        let mut ratio = 0.0f64;
        let mut factor = 1.0f64;
        for w in self.cumulative[start..stop].windows(2) {
            let (total, next) = (w[0] as f64, (w[1] - w[0]) as f64);
            let r = next / total;
            ratio = ratio.max(r);
            if total > 1.0 {
                factor = factor.max(1.0 + r.ln_1p() / total.ln());
            }
        }
        (ratio, factor)
    }
}

fn bracket_on_nodes(
    seq: &CharacteristicSequence,
    nodes: Vec<u64>,
    cauchy_tol: f64,
    shells: Option<Shells<'_>>,
) -> Result<LimitBracket, DixmierError> {
    if !(cauchy_tol > 0.0) {
        return Err(DixmierError::Parameter(format!(
            "cauchy_tol must be positive, got {cauchy_tol}"
        )));
    }
    let table = PrefixSumTable::new(seq.clone());
    let points: Vec<GammaPoint> = nodes
        .iter()
        .map(|&k| {
            let sigma = table.sigma(k)?;
            Ok(GammaPoint {
                k,
                sigma,
                gamma: sigma / (k as f64).ln(),
            })
        })
        .collect::<Result<_, DixmierError>>()?;
    let claimed_limit = seq.limit_claim();

    let j = points.len();
    let anchor_i = j / 2;
    let tail_start = (anchor_i + (j - anchor_i) / 2).max(anchor_i + 1);
    let anchor = points[anchor_i.min(j - 1)];
    let tail_means: Vec<(u64, f64)> = points
        .get(tail_start..)
        .unwrap_or(&[])
        .iter()
        .map(|p| {
            (
                p.k,
                (p.sigma - anchor.sigma) / (p.k as f64 / anchor.k as f64).ln(),
            )
        })
        .collect();

    let (mut lo, mut hi) = if tail_means.is_empty() {
        // too few nodes: fall back to the raw γ values
        points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.gamma), b.max(p.gamma))
            })
    } else {
        tail_means
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, m)| {
                (a.min(m), b.max(m))
            })
    };
    let (idcrit_ratio_max, correction_factor) = match &shells {
        Some(s) => {
            let (r, c) = s.tail_factors(anchor.k, points[j - 1].k);
            lo = if lo >= 0.0 { lo / c } else { lo * c };
            hi = if hi >= 0.0 { hi * c } else { hi / c };
            (Some(r), Some(c))
        }
        None => (None, None),
    };
    let last = tail_means.last().map(|&(_, m)| m);
    let width = hi - lo;
    let confirmed = match (last, claimed_limit) {
        (Some(v), Some(l)) => (v - l).abs() <= cauchy_tol,
        _ => false,
    };
    let measurable = if seq.tail().certifies_divergence() {
        Measurable::No
    } else if last.is_some() && width < cauchy_tol && confirmed {
        Measurable::Yes
    } else {
        Measurable::Inconclusive
    };
    Ok(LimitBracket {
        liminf_estimate: lo,
        limsup_estimate: hi,
        measurable,
        value: (measurable == Measurable::Yes).then(|| last.expect("checked")),
        schedule: nodes,
        cauchy_tol,
        diagnostics: BracketDiagnostics {
            points,
            anchor: anchor.k,
            tail_means,
            tail_oscillation: width,
            idcrit_ratio_max,
            correction_factor,
            claimed_limit,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomspec::{synthetic_model, torus_model, SyntheticKind};

    fn seq(kind: SyntheticKind) -> CharacteristicSequence {
        synthetic_model(&kind).unwrap().into_sequence()
    }

    #[test]
    fn harmonic_collapses_to_one() {
        let b = measurability_bracket(
            &seq(SyntheticKind::Harmonic { l: 1.0 }),
            &IndexSchedule::dyadic(20),
            5e-3,
        )
        .unwrap();
        assert_eq!(b.measurable, Measurable::Yes);
        assert!((b.value.unwrap() - 1.0).abs() < 1e-3);
        assert!(b.liminf_estimate <= b.value.unwrap() && b.value.unwrap() <= b.limsup_estimate);
    }

    #[test]
    fn finite_sequences_have_value_zero() {
        let s = CharacteristicSequence::explicit(vec![5.0, 3.0, 1.0]).unwrap();
        let b = measurability_bracket(&s, &IndexSchedule::dyadic(12), 5e-3).unwrap();
        assert_eq!(b.measurable, Measurable::Yes);
        assert_eq!(b.value, Some(0.0));
    }

    #[test]
    fn oscillating_blocks_do_not_collapse() {
        let b = measurability_bracket(
            &seq(SyntheticKind::Oscillating {
                high: 2.0,
                low: 0.5,
                growth: 1.5,
            }),
            &IndexSchedule::dyadic(24),
            5e-3,
        )
        .unwrap();
        assert_eq!(b.measurable, Measurable::Inconclusive);
        assert!(b.width() > 0.1, "{:?}", (b.liminf_estimate, b.limsup_estimate));
        assert!(b.value.is_none());
    }

    #[test]
    fn divergent_sequences_are_not_measurable() {
        let b = measurability_bracket(
            &seq(SyntheticKind::InverseLog { c: 1.0 }),
            &IndexSchedule::dyadic(12),
            5e-3,
        )
        .unwrap();
        assert_eq!(b.measurable, Measurable::No);
    }

    #[test]
    fn tail_means_lie_inside_the_bracket() {
        for kind in [
            SyntheticKind::Perturbed { l: 3.0, delta: 0.2 },
            SyntheticKind::AlternatingDyadic,
            SyntheticKind::Geometric { ratio: 0.5, c: 1.0 },
        ] {
            let b = measurability_bracket(&seq(kind), &IndexSchedule::dyadic(20), 5e-3).unwrap();
            for &(_, m) in &b.diagnostics.tail_means {
                assert!(b.liminf_estimate - 1e-12 <= m && m <= b.limsup_estimate + 1e-12);
            }
        }
    }

    #[test]
    fn torus_shell_path_uses_shell_ends() {
        let m = torus_model(2, 300.0).unwrap();
        let b = model_bracket(&m, &IndexSchedule::dyadic(18), 5e-3).unwrap();
        let ends = m.cumulative_multiplicities().unwrap();
        assert!(b.schedule.iter().all(|k| ends.binary_search(k).is_ok()));
        let c = b.diagnostics.correction_factor.unwrap();
        assert!(c > 1.0 && c < 1.01);
        assert!(
            (b.diagnostics.tail_means.last().unwrap().1 - std::f64::consts::PI).abs() < 0.02
        );
    }
}
