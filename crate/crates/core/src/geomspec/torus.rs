//! Flat torus T^n = R^n / 2πZ^n: lattice shells of the Laplacian and the
//! operator (1+Δ)^{-n/2}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{empirical_tail, ModelError, Shell, SpectralModel};
use crate::seqkernel::{AsymptoticClass, Block, BlockBound, BlockValue, CharacteristicSequence};
use crate::wodzicki::omega;

/// Default ceiling for the shell table, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

const MAX_DIMENSION: u32 = 4;

/// ⌊√x⌋ exactly.
pub fn isqrt(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= x) {
        r += 1;
    }
    r
}

/// Largest integer λ with λ ≤ x, for nonnegative finite x.
fn floor_u64(x: f64) -> u64 {
    x.floor() as u64
}

/// Multiplicities m(λ) = #{k ∈ Z^n : |k|² = λ} for 0 ≤ λ ≤ max_lambda.
///
/// Each worker owns a contiguous λ range and counts lattice points with
/// nonnegative coordinates, weighting by 2^(number of nonzero coordinates);
/// no cross-worker merge is needed, so the table is identical for any
/// thread count.
pub fn shell_multiplicities(
    n: u32,
    max_lambda: u64,
    memory_budget: u64,
) -> Result<Vec<u64>, ModelError> {
    if !(1..=MAX_DIMENSION).contains(&n) {
        return Err(ModelError::Dimension(n));
    }
    let entries = max_lambda
        .checked_add(1)
        .ok_or(ModelError::MemoryBudget { needed: u64::MAX, budget: memory_budget })?;
    let needed = entries.saturating_mul(8);
    if needed > memory_budget {
        return Err(ModelError::MemoryBudget {
            needed,
            budget: memory_budget,
        });
    }
    let mut table = vec![0u64; entries as usize];
    let chunk = (entries as usize).div_ceil(256).max(1024);
    table
        .par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(ci, slice)| {
            let lo = (ci * chunk) as u64;
            let hi = lo + slice.len() as u64;
            count_range(n, lo, hi, slice);
        });
    Ok(table)
}

/// Adds to `out[λ − lo]` the number of k ∈ Z^n with |k|² = λ, lo ≤ λ < hi.
fn count_range(n: u32, lo: u64, hi: u64, out: &mut [u64]) {
    fn recurse(dims_left: u32, partial: u64, weight: u64, lo: u64, hi: u64, out: &mut [u64]) {
        if dims_left == 1 {
            let kmin = if lo > partial {
                let need = lo - partial;
                let r = isqrt(need);
                if r * r == need {
                    r
                } else {
                    r + 1
                }
            } else {
                0
            };
            let kmax = isqrt(hi - 1 - partial);
            for k in kmin..=kmax {
                let w = if k == 0 { weight } else { 2 * weight };
                out[(partial + k * k - lo) as usize] += w;
            }
            return;
        }
        let mut c = 0u64;
        while partial + c * c < hi {
            let w = if c == 0 { weight } else { 2 * weight };
            recurse(dims_left - 1, partial + c * c, w, lo, hi, out);
            c += 1;
        }
    }
    if hi > lo {
        recurse(n, 0, 1, lo, hi, out);
    }
}

/// Exact lattice count N_R = #{k ∈ Z^n : |k| ≤ R} with the diagnostic ratio
/// N_R / V_R, V_R = Ω_n R^n / n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeCount {
    pub n: u32,
    pub radius: f64,
    pub count: u64,
    pub volume: f64,
    pub ratio: f64,
}

pub fn lattice_count(n: u32, radius: f64) -> Result<LatticeCount, ModelError> {
    if !(1..=MAX_DIMENSION).contains(&n) {
        return Err(ModelError::Dimension(n));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(ModelError::Parameter(format!("radius must be >= 0, got {radius}")));
    }
    let r2 = floor_u64(radius * radius);
    fn recurse(dims_left: u32, budget: u64) -> u128 {
        if dims_left == 1 {
            return 2 * isqrt(budget) as u128 + 1;
        }
        let mut total = 0u128;
        let mut c = 0u64;
        while c * c <= budget {
            let inner = recurse(dims_left - 1, budget - c * c);
            total += if c == 0 { inner } else { 2 * inner };
            c += 1;
        }
        total
    }
    let count = recurse(n, r2);
    if count > (1u128 << 62) {
        return Err(ModelError::Overflow);
    }
    let volume = omega(n) * radius.powi(n as i32) / n as f64;
    Ok(LatticeCount {
        n,
        radius,
        count: count as u64,
        volume,
        ratio: count as f64 / volume,
    })
}

/// (1+Δ)^{-n/2} on T^n, truncated to the shells with 1 + |k|² ≤ R_max².
pub fn torus_model(n: u32, r_max: f64) -> Result<SpectralModel, ModelError> {
    torus_model_with_budget(n, r_max, DEFAULT_MEMORY_BUDGET)
}

pub fn torus_model_with_budget(
    n: u32,
    r_max: f64,
    memory_budget: u64,
) -> Result<SpectralModel, ModelError> {
    if !(1..=MAX_DIMENSION).contains(&n) {
        return Err(ModelError::Dimension(n));
    }
    if !(r_max >= 2.0) || !r_max.is_finite() {
        return Err(ModelError::Parameter(format!("R_max must be >= 2, got {r_max}")));
    }
    let max_lambda = floor_u64(r_max * r_max - 1.0);
    let half_n = n as f64 / 2.0;
    let shells: Vec<Shell> = if n == 1 {
        // λ = k², m = 2 except at the origin
        (0..=isqrt(max_lambda))
            .map(|k| Shell {
                eigenvalue: (k * k) as f64,
                mu: (1.0 + (k * k) as f64).powf(-half_n),
                multiplicity: if k == 0 { 1 } else { 2 },
            })
            .collect()
    } else {
        let table = shell_multiplicities(n, max_lambda, memory_budget)?;
        table
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(lambda, &m)| Shell {
                eigenvalue: lambda as f64,
                mu: (1.0 + lambda as f64).powf(-half_n),
                multiplicity: m,
            })
            .collect()
    };
    let weyl = omega(n) / n as f64;
    build_shell_model(
        format!("torus{n}"),
        n,
        shells,
        AsymptoticClass::Harmonic { l: weyl },
    )
}

/// Flattens decreasing shells into a piecewise-constant sequence.
pub(super) fn build_shell_model(
    name: String,
    n: u32,
    shells: Vec<Shell>,
    claim: AsymptoticClass,
) -> Result<SpectralModel, ModelError> {
    let mut blocks = Vec::with_capacity(shells.len());
    let mut last = 0u64;
    for s in &shells {
        last = last
            .checked_add(s.multiplicity)
            .filter(|&l| l < (1 << 62))
            .ok_or(ModelError::Overflow)?;
        blocks.push(Block {
            last: BlockBound::Exact(last),
            value: BlockValue::constant(s.mu),
        });
    }
    let tail = empirical_tail(&shells);
    let sequence = CharacteristicSequence::piecewise(name.clone(), blocks, tail)?
        .with_claim(claim);
    Ok(SpectralModel::new(name, n, sequence, Some(shells)))
}
