//! Spectral models: characteristic sequences of concrete geometric operators
//! and of named test sequences.

mod sphere;
mod synthetic;
mod torus;
mod varilly;

pub use sphere::{sphere_model, sphere_multiplicity, sphere_weyl_constant};
pub use synthetic::{synthetic_model, SyntheticKind};
pub use torus::{
    isqrt, lattice_count, shell_multiplicities, torus_model, torus_model_with_budget,
    LatticeCount, DEFAULT_MEMORY_BUDGET,
};
pub use varilly::{varilly_block_end, varilly_model, VarillyBlockEnd, VARILLY_LAST_BLOCK};

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::seqkernel::{CharacteristicSequence, Epsilon, SeqError, TailDescriptor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension {0} is not supported")]
    Dimension(u32),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("shell table needs {needed} bytes, budget is {budget}")]
    MemoryBudget { needed: u64, budget: u64 },
    #[error("lattice count exceeds 2^62")]
    Overflow,
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

/// Which model to build: `{"model": "torus", "n": 2, "r_max": 2000}`,
/// `{"model": "sphere", "n": 2, "l_max": 500}`, `{"model": "varilly"}`, or
/// any synthetic kind with its parameters, e.g. `{"model": "harmonic", "l": 3}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Torus { n: u32, r_max: f64 },
    Sphere { n: u32, l_max: u64 },
    Varilly,
    Synthetic(SyntheticKind),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
enum GeometricSpec {
    Torus { n: u32, r_max: f64 },
    Sphere { n: u32, l_max: u64 },
    Varilly,
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        let v = match self {
            ModelSpec::Torus { n, r_max } => serde_json::to_value(GeometricSpec::Torus {
                n: *n,
                r_max: *r_max,
            }),
            ModelSpec::Sphere { n, l_max } => serde_json::to_value(GeometricSpec::Sphere {
                n: *n,
                l_max: *l_max,
            }),
            ModelSpec::Varilly => serde_json::to_value(GeometricSpec::Varilly),
            ModelSpec::Synthetic(kind) => serde_json::to_value(kind).map(|mut v| {
                if let Some(obj) = v.as_object_mut() {
                    if let Some(k) = obj.remove("kind") {
                        obj.insert("model".into(), k);
                    }
                }
                v
            }),
        }
        .map_err(S::Error::custom)?;
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut v = Value::deserialize(d)?;
        let model = v
            .get("model")
            .and_then(Value::as_str)
            .ok_or_else(|| D::Error::missing_field("model"))?
            .to_string();
        match model.as_str() {
            "torus" | "sphere" | "varilly" => {
                Ok(match GeometricSpec::deserialize(v).map_err(D::Error::custom)? {
                    GeometricSpec::Torus { n, r_max } => ModelSpec::Torus { n, r_max },
                    GeometricSpec::Sphere { n, l_max } => ModelSpec::Sphere { n, l_max },
                    GeometricSpec::Varilly => ModelSpec::Varilly,
                })
            }
            _ => {
                let obj = v.as_object_mut().expect("has a model key");
                obj.remove("model");
                obj.insert("kind".into(), Value::String(model));
                SyntheticKind::deserialize(v)
                    .map(ModelSpec::Synthetic)
                    .map_err(D::Error::custom)
            }
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<SpectralModel, ModelError> {
        match self {
            ModelSpec::Torus { n, r_max } => torus_model(*n, *r_max),
            ModelSpec::Sphere { n, l_max } => sphere_model(*n, *l_max),
            ModelSpec::Varilly => varilly_model(),
            ModelSpec::Synthetic(kind) => synthetic_model(kind),
        }
    }
}

/// One eigenvalue shell: Laplace eigenvalue, the operator's singular value
/// there and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub eigenvalue: f64,
    pub mu: f64,
    pub multiplicity: u64,
}

/// Characteristic sequence of a geometric operator together with its
/// (eigenvalue, multiplicity) stream when one exists.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    name: String,
    dimension: u32,
    sequence: CharacteristicSequence,
    shells: Option<Vec<Shell>>,
}

impl SpectralModel {
    pub fn new(
        name: impl Into<String>,
        dimension: u32,
        sequence: CharacteristicSequence,
        shells: Option<Vec<Shell>>,
    ) -> Self {
        Self {
            name: name.into(),
            dimension,
            sequence,
            shells,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn sequence(&self) -> &CharacteristicSequence {
        &self.sequence
    }

    pub fn into_sequence(self) -> CharacteristicSequence {
        self.sequence
    }

    /// Shells in strictly decreasing μ order.
    pub fn shells(&self) -> Option<&[Shell]> {
        self.shells.as_deref()
    }

    /// (μ, multiplicity) pairs in decreasing μ order.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.shells
            .iter()
            .flatten()
            .map(|s| (s.mu * self.sequence.scale(), s.multiplicity))
    }

    /// Cumulative multiplicities Σ_{j≤k} m_j.
    pub fn cumulative_multiplicities(&self) -> Option<Vec<u64>> {
        let shells = self.shells.as_ref()?;
        let mut total = 0u64;
        Some(
            shells
                .iter()
                .map(|s| {
                    total += s.multiplicity;
                    total
                })
                .collect(),
        )
    }

    /// Ratios m_{k+1} / Σ_{j≤k} m_j along the shell stream.
    pub fn idcrit_ratios(&self) -> Option<Vec<f64>> {
        let shells = self.shells.as_ref()?;
        let mut total = 0u64;
        let mut out = Vec::with_capacity(shells.len().saturating_sub(1));
        for s in shells {
            if total > 0 {
                out.push(s.multiplicity as f64 / total as f64);
            }
            total += s.multiplicity;
        }
        Some(out)
    }

    /// Same model with every singular value multiplied by λ.
    pub fn scaled(&self, lambda: f64) -> Result<Self, ModelError> {
        Ok(Self {
            name: format!("{}*{}", lambda, self.name),
            dimension: self.dimension,
            sequence: self.sequence.scaled(lambda)?,
            shells: self.shells.clone(),
        })
    }

    /// Total number of enumerated terms, if finite.
    pub fn total_terms(&self) -> Option<u64> {
        self.sequence.coverage()
    }
}

/// Tail descriptor for a truncated shell stream, read off the last half of
/// the enumerated range: l is the mean of n·μ_n there and ε the largest
/// deviation from it. This extrapolates the enumerated data; it is not a
/// proof about the unenumerated shells.
pub(crate) fn empirical_tail(shells: &[Shell]) -> TailDescriptor {
    let total: u64 = shells.iter().map(|s| s.multiplicity).sum();
    let mut end = 0u64;
    let mut prefix_bound = 0.0f64;
    let mut weighted = 0.0;
    let mut weight = 0.0;
    let mut range = Vec::new();
    for s in shells {
        let first = end + 1;
        end += s.multiplicity;
        prefix_bound = prefix_bound.max(end as f64 * s.mu);
        if 2 * end >= total {
            let lo = first as f64 * s.mu;
            let hi = end as f64 * s.mu;
            weighted += 0.5 * (lo + hi) * s.multiplicity as f64;
            weight += s.multiplicity as f64;
            range.push((lo, hi));
        }
    }
    let l = if weight > 0.0 { weighted / weight } else { 0.0 };
    let eps = range
        .iter()
        .map(|&(lo, hi)| (lo - l).abs().max((hi - l).abs()))
        .fold(0.0, f64::max);
    TailDescriptor::Asymptotic {
        l,
        eps: Epsilon::Constant { eps },
        from: total + 1,
        prefix_bound: prefix_bound.max(l + eps),
    }
}
