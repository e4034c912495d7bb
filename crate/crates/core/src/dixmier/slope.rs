use super::{DixmierError, EstimateMethod, ResidueEstimate, TableRow};
use crate::numeric::fit_line;
use crate::seqkernel::{CharacteristicSequence, PrefixSumTable};

/// Nodes N_max·2^{−i/4} down to window_ratio·N_max, ascending.
pub fn slope_nodes(n_max: u64, window_ratio: f64) -> Vec<u64> {
    let floor = window_ratio * n_max as f64 * (1.0 - 1e-12);
    let mut nodes: Vec<u64> = (0u32..)
        .map(|i| (n_max as f64 * 2f64.powf(-(i as f64) / 4.0)).round())
        .take_while(|&n| n >= floor && n >= 2.0)
        .map(|n| n as u64)
        .collect();
    nodes.reverse();
    nodes.dedup();
    nodes
}

/// Least-squares slope of σ_N against ln N over [window_ratio·N_max, N_max].
/// For μ_n ∼ L/n, σ_N = L·ln N + C + o(1), so the slope estimates L.
/// The error estimate is the largest fit residual divided by the ln-span.
pub fn slope_estimator(
    seq: &CharacteristicSequence,
    n_max: u64,
    window_ratio: f64,
) -> Result<ResidueEstimate, DixmierError> {
    if n_max < 64 {
        return Err(DixmierError::Parameter(format!("N_max must be >= 64, got {n_max}")));
    }
    if !(window_ratio > 0.0 && window_ratio < 1.0) {
        return Err(DixmierError::Parameter(format!(
            "window_ratio must lie in (0, 1), got {window_ratio}"
        )));
    }
    let nodes = slope_nodes(n_max, window_ratio);
    if nodes.len() < 4 {
        return Err(DixmierError::DegenerateWindow { nodes: nodes.len() });
    }
    let table = PrefixSumTable::new(seq.clone());
    let xs: Vec<f64> = nodes.iter().map(|&n| (n as f64).ln()).collect();
    let ys = table.sigmas(&nodes)?;
    let fit = fit_line(&xs, &ys).ok_or(DixmierError::DegenerateWindow { nodes: nodes.len() })?;
    let span = xs[xs.len() - 1] - xs[0];
    let rows = nodes
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(&n, (&x, &y))| TableRow {
            parameter: n as f64,
            raw: y,
            extrapolated: Some(fit.intercept + fit.slope * x),
        })
        .collect();
    Ok(ResidueEstimate {
        value: fit.slope,
        error_estimate: fit.max_abs_residual / span,
        method: EstimateMethod::SlopeFit,
        table: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomspec::{synthetic_model, torus_model, SyntheticKind};

    #[test]
    fn default_window_has_thirteen_nodes() {
        let nodes = slope_nodes(1 << 20, 0.125);
        assert_eq!(nodes.len(), 13);
        assert_eq!(nodes[0], 1 << 17);
        assert_eq!(*nodes.last().unwrap(), 1 << 20);
    }

    #[test]
    fn harmonic_slope_is_one() {
        let s = synthetic_model(&SyntheticKind::Harmonic { l: 1.0 })
            .unwrap()
            .into_sequence();
        let e = slope_estimator(&s, 1 << 20, 0.125).unwrap();
        assert!((e.value - 1.0).abs() < 1e-4, "{}", e.value);
        assert!(e.error_estimate < 0.01);
    }

    #[test]
    fn geometric_slope_is_zero() {
        let s = synthetic_model(&SyntheticKind::Geometric { ratio: 0.5, c: 1.0 })
            .unwrap()
            .into_sequence();
        let e = slope_estimator(&s, 1 << 20, 0.125).unwrap();
        assert!(e.value.abs() < 1e-6);
    }

    #[test]
    fn circle_slope_is_two() {
        let m = torus_model(1, 1e5).unwrap();
        let n = m.total_terms().unwrap();
        let e = slope_estimator(m.sequence(), n, 0.125).unwrap();
        assert!((e.value - 2.0).abs() < 0.02);
    }

    #[test]
    fn narrow_windows_are_rejected() {
        let s = CharacteristicSequence::explicit(vec![1.0]).unwrap();
        assert!(matches!(
            slope_estimator(&s, 1000, 0.9),
            Err(DixmierError::DegenerateWindow { .. })
        ));
        assert!(slope_estimator(&s, 10, 0.5).is_err());
    }
}
