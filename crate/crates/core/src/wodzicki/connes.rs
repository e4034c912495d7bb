use serde::{Deserialize, Serialize};

use super::{c_constant, res_w, FourierSeries, PrincipalSymbol, QuadratureGrid, WodzickiError};
use crate::dixmier::{dixmier_value_model, DixmierConfig, DixmierValue};
use crate::geomspec::SpectralModel;
use crate::zetalab::{residue_at_one, ResidueConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnesConfig {
    pub dixmier: DixmierConfig,
    pub residue: ResidueConfig,
    pub grid_size: usize,
    pub sphere_order: usize,
}

impl Default for ConnesConfig {
    fn default() -> Self {
        Self {
            dixmier: DixmierConfig::default(),
            residue: ResidueConfig::default(),
            grid_size: 8,
            sphere_order: super::DEFAULT_SPHERE_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnesReport {
    pub dixmier: f64,
    pub residue_zeta: f64,
    pub res_w: f64,
    /// max over pairs of |a − b| / max(|a|, |b|)
    pub max_pairwise_gap: f64,
    pub dixmier_detail: DixmierValue,
    pub residue_error: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Dixmier value, zeta residue and Wodzicki residue of one operator, given
/// by its spectral model and its principal symbol. That the two describe
/// the same operator is the caller's claim.
pub fn connes_check(
    model: &SpectralModel,
    symbol: &PrincipalSymbol,
    config: &ConnesConfig,
) -> Result<ConnesReport, WodzickiError> {
    let est = |e: &dyn std::fmt::Display| WodzickiError::Estimator(e.to_string());
    let grid = QuadratureGrid::new(symbol.dimension(), config.grid_size, config.sphere_order)?;
    let dix = dixmier_value_model(model, &config.dixmier).map_err(|e| est(&e))?;
    let zeta = residue_at_one(model.sequence(), &config.residue).map_err(|e| est(&e))?;
    let w = res_w(symbol, &grid)?;
    let d = dix.value();
    let max_pairwise_gap = relative_gap(d, zeta.value)
        .max(relative_gap(d, w))
        .max(relative_gap(zeta.value, w));
    Ok(ConnesReport {
        dixmier: d,
        residue_zeta: zeta.value,
        res_w: w,
        max_pairwise_gap,
        dixmier_detail: dix,
        residue_error: zeta.error_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiintReport {
    /// Res_W(f·‖ξ‖^{−n}·1_{2^{⌊n/2⌋}})
    pub wodzicki_side: f64,
    /// (1/c(n))·∫_{T^n} f
    pub integral_side: f64,
}

impl DiintReport {
    pub fn gap(&self) -> f64 {
        (self.wodzicki_side - self.integral_side).abs()
    }
}

/// Both sides of Res_W(f·‖ξ‖^{−n}·1) = (1/c(n))·∫ f, with the fiber of
/// dimension 2^{⌊n/2⌋}.
pub fn diint_check(f: &FourierSeries, grid: &QuadratureGrid) -> Result<DiintReport, WodzickiError> {
    let n = f.dimension();
    let fiber = 1usize << (n / 2);
    let symbol = PrincipalSymbol::f_times_norm_power(f.clone(), fiber);
    Ok(DiintReport {
        wodzicki_side: res_w(&symbol, grid)?,
        integral_side: f.integral() / c_constant(n),
    })
}
