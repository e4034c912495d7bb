//! Wodzicki residue of order −n principal symbols over flat tori, computed by
//! quadrature on T^n × S^{n−1}, and the normalization constants that relate
//! it to the Dixmier trace.

mod connes;
mod quadrature;
mod symbol;

pub use connes::{connes_check, diint_check, ConnesConfig, ConnesReport, DiintReport};
pub use quadrature::{gauss_legendre, QuadratureGrid, DEFAULT_SPHERE_ORDER};
pub use symbol::{FourierSeries, FourierTerm, Mode, PrincipalSymbol, SymbolFn, Trig};

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::numeric::{gamma_half_integer, pairwise_sum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WodzickiError {
    #[error("symbol lives on T^{symbol}, grid on T^{grid}")]
    DimensionMismatch { symbol: u32, grid: u32 },
    #[error("dimension {0} is not supported")]
    Dimension(u32),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("symbol is not finite at grid point {x_index}, node {xi_index}")]
    NonFinite { x_index: usize, xi_index: usize },
    #[error("sampled symbol: {0}")]
    Sampled(String),
    #[error("{0}")]
    Estimator(String),
}

/// Ω_n = 2π^{n/2}/Γ(n/2), the area of the unit sphere S^{n−1}.
pub fn omega(n: u32) -> f64 {
    assert!(n >= 1, "omega needs n >= 1");
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// c(n) = 2^{n−⌊n/2⌋−1}·π^{n/2}·n·Γ(n/2).
pub fn c_constant(n: u32) -> f64 {
    assert!(n >= 1, "c(n) needs n >= 1");
    let e = n as i32 - (n / 2) as i32 - 1;
    2f64.powi(e) * PI.powf(n as f64 / 2.0) * n as f64 * gamma_half_integer(n)
}

/// λ(n) = 2^{⌊n/2⌋+1−n}·π^{−n/2} / (n·Γ(n/2)).
pub fn lambda_constant(n: u32) -> f64 {
    assert!(n >= 1, "lambda(n) needs n >= 1");
    let e = (n / 2) as i32 + 1 - n as i32;
    2f64.powi(e) * PI.powf(-(n as f64) / 2.0) / (n as f64 * gamma_half_integer(n))
}

/// g₀ = (2π)^{−n}.
pub fn g0_constant(n: u32) -> f64 {
    assert!(n >= 1, "g0 needs n >= 1");
    (2.0 * PI).powi(-(n as i32))
}

/// Res_W = 1/(n(2π)^n)·Σ_x Σ_ξ w_x w_ξ tr σ(x, ξ).
///
/// Grid points are evaluated in parallel; per-point sums are collected in
/// grid order and reduced pairwise, so the result does not depend on the
/// thread count.
pub fn res_w(symbol: &PrincipalSymbol, grid: &QuadratureGrid) -> Result<f64, WodzickiError> {
    let n = grid.dimension();
    if symbol.dimension() != n {
        return Err(WodzickiError::DimensionMismatch {
            symbol: symbol.dimension(),
            grid: n,
        });
    }
    symbol.check_grid(grid)?;
    let weights = grid.sphere_weights();
    let per_point: Vec<f64> = (0..grid.torus_points())
        .into_par_iter()
        .map_init(
            || (vec![0.0; n as usize], symbol.scratch()),
            |(x, buf), xp| -> Result<f64, WodzickiError> {
                grid.torus_point(xp, x);
                let mut terms = Vec::with_capacity(weights.len());
                for (k, w) in weights.iter().enumerate() {
                    let xi = grid.sphere_node(k);
                    let tr = symbol.trace_at(xp, x, k, xi, buf);
                    if !tr.is_finite() {
                        return Err(WodzickiError::NonFinite {
                            x_index: xp,
                            xi_index: k,
                        });
                    }
                    terms.push(w * tr);
                }
                Ok(pairwise_sum(&terms))
            },
        )
        .collect::<Result<_, _>>()?;
    let total = pairwise_sum(&per_point) * grid.torus_weight();
    Ok(total / (n as f64 * (2.0 * PI).powi(n as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_small_dimensions() {
        assert!((omega(1) - 2.0).abs() < 1e-15);
        assert!((omega(2) - 2.0 * PI).abs() < 1e-15);
        assert!((omega(3) - 4.0 * PI).abs() < 1e-14);
        assert!((omega(4) - 2.0 * PI * PI).abs() < 1e-14);
    }

    #[test]
    fn constants() {
        assert!((c_constant(1) - PI).abs() < 1e-15);
        assert!((c_constant(2) - 2.0 * PI).abs() < 1e-15);
        assert!((c_constant(4) - 8.0 * PI * PI).abs() < 1e-13);
        assert!((lambda_constant(2) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((lambda_constant(1) - 1.0 / PI).abs() < 1e-16);
        for n in 1..=8 {
            assert!((lambda_constant(n) * c_constant(n) - 1.0).abs() < 1e-14, "n={n}");
            assert!((g0_constant(n) * (2.0 * PI).powi(n as i32) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn norm_power_residue_is_omega_over_n() {
        for n in 1..=3 {
            let grid = QuadratureGrid::new(n, 4, DEFAULT_SPHERE_ORDER).unwrap();
            let r = res_w(&PrincipalSymbol::norm_power(n, 1, 1.0), &grid).unwrap();
            assert!((r - omega(n) / n as f64).abs() < 1e-12 * omega(n), "n={n}: {r}");
        }
    }

    #[test]
    fn x_independent_symbols_ignore_grid_size() {
        let s = PrincipalSymbol::norm_power(2, 2, 1.5);
        let a = res_w(&s, &QuadratureGrid::new(2, 1, 16).unwrap()).unwrap();
        let b = res_w(&s, &QuadratureGrid::new(2, 13, 16).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-13 * a.abs());
    }

    #[test]
    fn cosine_profile_integrates_out() {
        let f = FourierSeries::new(
            2,
            vec![
                FourierTerm::constant(1.0),
                FourierTerm::new(1.0, vec![Mode::new(0, 1, Trig::Cos)]),
            ],
        )
        .unwrap();
        let grid = QuadratureGrid::new(2, 16, 32).unwrap();
        let r = res_w(&PrincipalSymbol::f_times_norm_power(f, 1), &grid).unwrap();
        assert!((r - PI).abs() < 1e-12);
    }

    #[test]
    fn linearity() {
        let grid = QuadratureGrid::new(2, 8, 16).unwrap();
        let f = FourierSeries::new(
            2,
            vec![
                FourierTerm::constant(2.0),
                FourierTerm::new(0.5, vec![Mode::new(1, 2, Trig::Sin)]),
            ],
        )
        .unwrap();
        let s1 = PrincipalSymbol::f_times_norm_power(f, 1);
        let s2 = PrincipalSymbol::norm_power(2, 1, 1.0);
        let combo = s1.scaled(3.0).sum(&s2.scaled(-0.5)).unwrap();
        let lhs = res_w(&combo, &grid).unwrap();
        let rhs = 3.0 * res_w(&s1, &grid).unwrap() - 0.5 * res_w(&s2, &grid).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
    }

    #[test]
    fn mismatched_dimension_is_an_error() {
        let grid = QuadratureGrid::new(2, 4, 8).unwrap();
        assert!(matches!(
            res_w(&PrincipalSymbol::norm_power(3, 1, 1.0), &grid),
            Err(WodzickiError::DimensionMismatch { .. })
        ));
    }
}
