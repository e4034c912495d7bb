//! Round sphere S^n: Laplace eigenvalues l(l+n−1) with the dimensions of
//! the spaces of degree-l spherical harmonics, operator (1+Δ)^{-n/2}.
//! A consistency probe only; the torus is the reference manifold.

use super::torus::build_shell_model;
use super::{ModelError, Shell, SpectralModel};
use crate::seqkernel::AsymptoticClass;
use crate::wodzicki::omega;

fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// dim of degree-l spherical harmonics on S^n: C(l+n, n) − C(l+n−2, n).
pub fn sphere_multiplicity(n: u32, l: u64) -> u64 {
    let n = n as u64;
    let lower = if l >= 2 { binomial(l + n - 2, n) } else { 0 };
    binomial(l + n, n) - lower
}

/// Weyl constant vol(S^n)·Ω_n / (n (2π)^n) of (1+Δ)^{-n/2} on S^n.
pub fn sphere_weyl_constant(n: u32) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    omega(n + 1) * omega(n) / (n as f64 * two_pi.powi(n as i32))
}

pub fn sphere_model(n: u32, l_max: u64) -> Result<SpectralModel, ModelError> {
    if !(1..=3).contains(&n) {
        return Err(ModelError::Dimension(n));
    }
    if l_max < 1 {
        return Err(ModelError::Parameter("L_max must be >= 1".into()));
    }
    let half_n = n as f64 / 2.0;
    let shells = (0..=l_max)
        .map(|l| {
            let eigenvalue = (l * (l + n as u64 - 1)) as f64;
            Shell {
                eigenvalue,
                mu: (1.0 + eigenvalue).powf(-half_n),
                multiplicity: sphere_multiplicity(n, l),
            }
        })
        .collect();
    build_shell_model(
        format!("sphere{n}"),
        n,
        shells,
        AsymptoticClass::Harmonic {
            l: sphere_weyl_constant(n),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Homogeneous polynomials of degree d in v variables, counted by
    /// enumerating exponent vectors.
    fn monomials(v: u32, d: u64) -> u64 {
        if v == 1 {
            return 1;
        }
        (0..=d).map(|e| monomials(v - 1, d - e)).sum()
    }

    #[test]
    fn multiplicities_match_harmonic_polynomial_count() {
        for n in 1..=3u32 {
            for l in 0..12u64 {
                let harmonic = monomials(n + 1, l) - if l >= 2 { monomials(n + 1, l - 2) } else { 0 };
                assert_eq!(sphere_multiplicity(n, l), harmonic, "n={n} l={l}");
            }
        }
        assert_eq!(
            (0..3).map(|l| sphere_multiplicity(2, l)).collect::<Vec<_>>(),
            vec![1, 3, 5]
        );
        assert_eq!(
            (0..4).map(|l| sphere_multiplicity(1, l)).collect::<Vec<_>>(),
            vec![1, 2, 2, 2]
        );
    }

    #[test]
    fn weyl_constants() {
        assert!((sphere_weyl_constant(1) - 2.0).abs() < 1e-14);
        assert!((sphere_weyl_constant(2) - 1.0).abs() < 1e-14);
        assert!((sphere_weyl_constant(3) - 1.0 / 3.0).abs() < 1e-14);
    }
}
