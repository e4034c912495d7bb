//! Dixmier-trace machinery: sequence transforms on ℓ^∞, the inequality
//! chain behind additivity, measurability brackets for lim γ_n and a slope
//! estimator for the Dixmier value.

mod bounded;
mod bracket;
mod chain;
mod slope;

pub use bounded::{doubling_map, m_map, scaling_map, BoundedSequence};
pub use bracket::{
    measurability_bracket, model_bracket, BracketDiagnostics, GammaPoint, LimitBracket, Measurable,
};
pub use chain::{additivity_chain_check, ChainReport};
pub use slope::{slope_estimator, slope_nodes};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geomspec::SpectralModel;
use crate::seqkernel::{CharacteristicSequence, IndexSchedule, SeqError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DixmierError {
    #[error(transparent)]
    Sequence(#[from] SeqError),
    #[error("not in L^(1,inf): {0}")]
    NotMember(String),
    #[error("slope window has {nodes} nodes, need at least 4")]
    DegenerateWindow { nodes: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("|beta_{index}| = {value} exceeds the declared bound {bound}")]
    Unbounded { index: u64, value: f64, bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    SlopeFit,
    ZetaExtrapolation,
    WeylFit,
}

/// One row of an estimator table: the parameter (N or s), the raw value at
/// it and the extrapolated or fitted value, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub parameter: f64,
    pub raw: f64,
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub method: EstimateMethod,
    pub table: Vec<TableRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DixmierConfig {
    /// schedule 2, 4, …, 2^h
    pub h: u32,
    pub cauchy_tol: f64,
    pub window_ratio: f64,
    /// slope window end; defaults to the model's coverage or 2^h
    pub n_max: Option<u64>,
}

impl Default for DixmierConfig {
    fn default() -> Self {
        Self {
            h: 20,
            cauchy_tol: 5e-3,
            window_ratio: 0.125,
            n_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DixmierValue {
    pub bracket: LimitBracket,
    pub slope: ResidueEstimate,
    pub consistent: bool,
}

impl DixmierValue {
    /// The bracket value when measurable, else the slope.
    pub fn value(&self) -> f64 {
        self.bracket.value.unwrap_or(self.slope.value)
    }

    /// Slope error plus the bracket width (at least the Cauchy tolerance).
    pub fn combined_error(&self) -> f64 {
        self.slope.error_estimate + self.bracket.width().max(self.bracket.cauchy_tol)
    }

    pub fn records(&self, name: &str) -> Vec<EstimatorRecord> {
        let schedule_max = self.bracket.schedule.last().copied().unwrap_or(0);
        vec![
            EstimatorRecord {
                name: name.to_string(),
                method: "measurability_bracket".into(),
                value: self.bracket.value,
                error: Some(self.bracket.width()),
                measurable: Some(self.bracket.measurable),
                schedule_max,
            },
            EstimatorRecord {
                name: name.to_string(),
                method: "slope_fit".into(),
                value: Some(self.slope.value),
                error: Some(self.slope.error_estimate),
                measurable: None,
                schedule_max: self.slope.table.last().map_or(0, |r| r.parameter as u64),
            },
        ]
    }
}

/// Result record of one estimator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRecord {
    pub name: String,
    pub method: String,
    pub value: Option<f64>,
    pub error: Option<f64>,
    pub measurable: Option<Measurable>,
    pub schedule_max: u64,
}

fn slope_window_end(seq: &CharacteristicSequence, config: &DixmierConfig) -> u64 {
    config
        .n_max
        .or(seq.coverage())
        .unwrap_or(1u64 << config.h)
}

fn combine(bracket: LimitBracket, slope: ResidueEstimate) -> DixmierValue {
    let mut out = DixmierValue {
        bracket,
        slope,
        consistent: false,
    };
    if let Some(v) = out.bracket.value {
        out.consistent = (v - out.slope.value).abs() <= out.combined_error();
    }
    out
}

/// Runs the measurability bracket and the slope estimator on a sequence.
pub fn dixmier_value(
    seq: &CharacteristicSequence,
    config: &DixmierConfig,
) -> Result<DixmierValue, DixmierError> {
    let bracket = measurability_bracket(seq, &IndexSchedule::dyadic(config.h), config.cauchy_tol)?;
    let slope = slope_estimator(seq, slope_window_end(seq, config), config.window_ratio)?;
    Ok(combine(bracket, slope))
}

/// As [`dixmier_value`], bracketing on shell ends when the model has them.
pub fn dixmier_value_model(
    model: &SpectralModel,
    config: &DixmierConfig,
) -> Result<DixmierValue, DixmierError> {
    let seq = model.sequence();
    let bracket = model_bracket(model, &IndexSchedule::dyadic(config.h), config.cauchy_tol)?;
    let slope = slope_estimator(seq, slope_window_end(seq, config), config.window_ratio)?;
    Ok(combine(bracket, slope))
}
