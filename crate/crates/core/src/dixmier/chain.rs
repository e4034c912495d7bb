use serde::{Deserialize, Serialize};

use super::DixmierError;
use crate::seqkernel::{sigma_witness, CharacteristicSequence, IndexSchedule, PrefixSumTable};

/// Largest violations of the additivity inequalities on a schedule, for
/// x, y and their sorted merge z:
///
/// * γ_k(x) + γ_k(y) ≤ σ_{2k}(z)/ln k
/// * γ_k(z) − γ_{k+1}(z) ≤ (ln 2/ln k)·sup γ(z)
/// * γ_k(z) − γ_{k+1}(z) ≥ −μ_1(z)/ln(k+1)
///
/// sup γ(z) is taken over every index 2 ≤ j ≤ 2·max(schedule), which can
/// only make the second inequality harder to satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub checked: usize,
    pub max_violation_sum: f64,
    pub max_violation_shift_upper: f64,
    pub max_violation_shift_lower: f64,
    pub sup_gamma_merged: f64,
    /// index of the largest violation of any kind
    pub worst_index: Option<u64>,
}

impl ChainReport {
    pub fn max_violation(&self) -> f64 {
        self.max_violation_sum
            .max(self.max_violation_shift_upper)
            .max(self.max_violation_shift_lower)
    }
}

const SCAN_CHUNK: u64 = 1 << 15;

pub fn additivity_chain_check(
    x: &CharacteristicSequence,
    y: &CharacteristicSequence,
    schedule: &IndexSchedule,
) -> Result<ChainReport, DixmierError> {
    for (label, s) in [("x", x), ("y", y)] {
        if sigma_witness(s)?.is_none() {
            return Err(DixmierError::NotMember(format!(
                "{label} = {} has no L^(1,inf) witness",
                s.name()
            )));
        }
    }
    let z = CharacteristicSequence::merge(x, y);
    let mut schedule = schedule.clone();
    if let Some(cap) = z.coverage() {
        // σ_{2k}(z) and γ_{k+1}(z) are needed
        schedule = schedule.capped((cap - 1) / 2)?;
    }
    let tx = PrefixSumTable::new(x.clone());
    let ty = PrefixSumTable::new(y.clone());
    let tz = PrefixSumTable::new(z.clone());
    let sup = sup_gamma(&z, 2 * schedule.max() + 1)?;
    let mu1 = z.head();

    let mut report = ChainReport {
        checked: 0,
        max_violation_sum: 0.0,
        max_violation_shift_upper: 0.0,
        max_violation_shift_lower: 0.0,
        sup_gamma_merged: sup,
        worst_index: None,
    };
    let mut worst = 0.0;
    for &k in schedule.indices() {
        let ln_k = (k as f64).ln();
        let sum = tx.gamma(k)? + ty.gamma(k)? - tz.sigma(2 * k)? / ln_k;
        let shift = tz.gamma(k)? - tz.gamma(k + 1)?;
        let upper = shift - std::f64::consts::LN_2 / ln_k * sup;
        let lower = -mu1 / ((k + 1) as f64).ln() - shift;
        report.max_violation_sum = report.max_violation_sum.max(sum);
        report.max_violation_shift_upper = report.max_violation_shift_upper.max(upper);
        report.max_violation_shift_lower = report.max_violation_shift_lower.max(lower);
        let here = sum.max(upper).max(lower);
        if here > worst {
            worst = here;
            report.worst_index = Some(k);
        }
        report.checked += 1;
    }
    Ok(report)
}

/// max_{2≤j≤n} σ_j/ln j by a single forward scan.
fn sup_gamma(seq: &CharacteristicSequence, n: u64) -> Result<f64, DixmierError> {
    let mut acc = crate::numeric::Neumaier::new();
    let mut buf = Vec::new();
    let mut sup = 0.0f64;
    let mut start = 1u64;
    while start <= n {
        let len = SCAN_CHUNK.min(n - start + 1);
        buf.resize(len as usize, 0.0);
        seq.fill(start, &mut buf)?;
        for (i, &v) in buf.iter().enumerate() {
            acc.add(v);
            let j = start + i as u64;
            if j >= 2 {
                sup = sup.max(acc.value() / (j as f64).ln());
            }
        }
        start += len;
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomspec::{synthetic_model, varilly_model, SyntheticKind};

    fn harmonic() -> CharacteristicSequence {
        synthetic_model(&SyntheticKind::Harmonic { l: 1.0 })
            .unwrap()
            .into_sequence()
    }

    #[test]
    fn harmonic_pair_has_no_violations() {
        let h = harmonic();
        let r = additivity_chain_check(&h, &h, &IndexSchedule::dyadic(16)).unwrap();
        assert_eq!(r.checked, 16);
        assert!(r.max_violation() <= 1e-12, "{r:?}");
    }

    #[test]
    fn zero_partner_reduces_to_monotonicity() {
        let r = additivity_chain_check(
            &harmonic(),
            &CharacteristicSequence::zero(),
            &IndexSchedule::dyadic(12),
        )
        .unwrap();
        assert!(r.max_violation() <= 1e-12);
    }

    #[test]
    fn harmonic_with_varilly() {
        let v = varilly_model().unwrap().into_sequence();
        let r = additivity_chain_check(&harmonic(), &v, &IndexSchedule::dyadic(14)).unwrap();
        assert!(r.max_violation() <= 1e-12, "{r:?}");
    }

    #[test]
    fn non_members_are_rejected() {
        let d = synthetic_model(&SyntheticKind::InverseLog { c: 1.0 })
            .unwrap()
            .into_sequence();
        assert!(matches!(
            additivity_chain_check(&harmonic(), &d, &IndexSchedule::dyadic(4)),
            Err(DixmierError::NotMember(_))
        ));
    }
}
