use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::random::{random_unitary, trial_rng};
use super::svd::{singular_values, svd};
use super::{DenseMatrix, MatrixError};

/// Tolerance used for the PSD preconditions, relative to the Frobenius norm.
const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KyFanReport {
    pub max_violation_subadd: f64,
    pub max_violation_doubling: Option<f64>,
    pub scale: f64,
}

/// Violations of σ_k(A+B) ≤ σ_k(A)+σ_k(B) and, for PSD inputs,
/// σ_k(A)+σ_k(B) ≤ σ_{2k}(A+B).
pub fn ky_fan_report(a: &DenseMatrix, b: &DenseMatrix) -> Result<KyFanReport, MatrixError> {
    let sum = a.add(b)?;
    let (sa, sb, ss) = (singular_values(a)?, singular_values(b)?, singular_values(&sum)?);
    let p = sa.len();
    let mut subadd = 0.0f64;
    for k in 1..=p {
        subadd = subadd.max(ss.sigma(k) - sa.sigma(k) - sb.sigma(k));
    }
    let psd = |m: &DenseMatrix| m.is_psd(PSD_TOL * m.frobenius_norm().max(1.0));
    let doubling = (a.is_square() && psd(a) && psd(b)).then(|| {
        (1..=p)
            .map(|k| sa.sigma(k) + sb.sigma(k) - ss.sigma(2 * k))
            .fold(0.0f64, f64::max)
    });
    Ok(KyFanReport {
        max_violation_subadd: subadd,
        max_violation_doubling: doubling,
        scale: sa.norm().max(sb.norm()).max(ss.norm()).max(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub value: f64,
    pub scale: f64,
}

impl Discrepancy {
    pub fn relative(&self) -> f64 {
        self.value / self.scale
    }
}

/// max_k |σ_k(λA) − |λ|σ_k(A)|.
pub fn homogeneity_check(a: &DenseMatrix, lambda: Complex64) -> Result<Discrepancy, MatrixError> {
    let s = singular_values(a)?;
    let t = singular_values(&a.scale(lambda))?;
    let l = lambda.norm();
    let value = (1..=s.len())
        .map(|k| (t.sigma(k) - l * s.sigma(k)).abs())
        .fold(0.0, f64::max);
    Ok(Discrepancy {
        value,
        scale: (l * s.sigma(s.len())).max(1.0),
    })
}

/// max_k |σ_k(A*A) − σ_k(AA*)|.
pub fn invariance_check(a: &DenseMatrix) -> Result<Discrepancy, MatrixError> {
    let s = singular_values(&a.adjoint().matmul(a)?)?;
    let t = singular_values(&a.matmul(&a.adjoint())?)?;
    let p = s.len().max(t.len());
    let value = (1..=p).map(|k| (s.sigma(k) - t.sigma(k)).abs()).fold(0.0, f64::max);
    Ok(Discrepancy {
        value,
        scale: s.norm().max(1.0),
    })
}

/// max_k max(0, μ_k(ayb) − ‖a‖‖b‖μ_k(y)).
pub fn ideal_bound_check(a: &DenseMatrix, y: &DenseMatrix, b: &DenseMatrix) -> Result<Discrepancy, MatrixError> {
    let ayb = a.matmul(y)?.matmul(b)?;
    let s = singular_values(&ayb)?;
    let sy = singular_values(y)?;
    let factor = singular_values(a)?.norm() * singular_values(b)?.norm();
    let value = (1..=s.len())
        .map(|k| s.mu(k) - factor * sy.mu(k))
        .fold(0.0, f64::max);
    Ok(Discrepancy {
        value,
        scale: (factor * sy.norm()).max(s.norm()).max(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EckartYoung {
    pub distance: f64,
    pub expected: f64,
    pub scale: f64,
}

/// ‖A − A_r‖ for the rank-r truncation, against μ_{r+1}(A).
pub fn eckart_young_check(a: &DenseMatrix, r: usize) -> Result<EckartYoung, MatrixError> {
    let p = a.rows().min(a.cols());
    if r >= p {
        return Err(MatrixError::RankOutOfRange { r, max: p - 1 });
    }
    let f = svd(a)?;
    let distance = singular_values(&a.sub(&f.truncated(r))?)?.norm();
    Ok(EckartYoung {
        distance,
        expected: f.values[r],
        scale: f.values[0].max(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopKReport {
    pub sigma_k: f64,
    /// tr(A·P) for P onto the top k eigenvectors
    pub eigen_projection_trace: f64,
    pub best_random_frame: f64,
    pub scale: f64,
}

/// σ_k of a PSD matrix against tr(A·P) for rank-k projections P: the top
/// eigenvector projection and `frames` random ones.
pub fn top_k_trace_check(a: &DenseMatrix, k: usize, frames: usize, seed: u64) -> Result<TopKReport, MatrixError> {
    if !a.is_psd(PSD_TOL * a.frobenius_norm().max(1.0)) {
        return Err(MatrixError::NotPsd);
    }
    let n = a.rows();
    if k == 0 || k > n {
        return Err(MatrixError::RankOutOfRange { r: k, max: n });
    }
    let f = svd(a)?;
    let sigma_k: f64 = f.values[..k].iter().sum();
    let eigen_projection_trace = frame_trace(a, &f.v, k);
    let mut best = f64::NEG_INFINITY;
    for t in 0..frames {
        let mut rng = trial_rng(seed, t as u64);
        let u = random_unitary(&mut rng, n, a.data().iter().any(|z| z.im != 0.0));
        best = best.max(frame_trace(a, &u, k));
    }
    Ok(TopKReport {
        sigma_k,
        eigen_projection_trace,
        best_random_frame: best,
        scale: f.values[0].max(1.0),
    })
}

/// Σ_{j<k} ⟨A φ_j, φ_j⟩ over the first k columns of `frame`.
fn frame_trace(a: &DenseMatrix, frame: &DenseMatrix, k: usize) -> f64 {
    let n = a.rows();
    let mut total = 0.0;
    for j in 0..k {
        let phi = frame.column(j);
        for i in 0..n {
            let api: Complex64 = (0..n).map(|l| a[(i, l)] * phi[l]).sum();
            total += (phi[i].conj() * api).re;
        }
    }
    total
}

/// |Σ_n ⟨Aψ_n, ψ_n⟩ − Σ μ_n| for a seeded random orthonormal basis.
pub fn diagonal_trace_check(a: &DenseMatrix, basis_seed: u64) -> Result<Discrepancy, MatrixError> {
    if !a.is_psd(PSD_TOL * a.frobenius_norm().max(1.0)) {
        return Err(MatrixError::NotPsd);
    }
    let n = a.rows();
    let s = singular_values(a)?;
    let total = s.sigma(n);
    let complex = a.data().iter().any(|z| z.im != 0.0);
    let u = random_unitary(&mut trial_rng(basis_seed, 0), n, complex);
    Ok(Discrepancy {
        value: (frame_trace(a, &u, n) - total).abs(),
        scale: total.max(1.0),
    })
}

/// max_k |μ_k(UAV) − μ_k(A)| for random unitaries U, V.
pub fn unitary_invariance_check(a: &DenseMatrix, seed: u64) -> Result<Discrepancy, MatrixError> {
    let mut rng = trial_rng(seed, 0);
    let u = random_unitary(&mut rng, a.rows(), true);
    let v = random_unitary(&mut rng, a.cols(), true);
    let s = singular_values(a)?;
    let t = singular_values(&u.matmul(a)?.matmul(&v)?)?;
    let value = s.values.iter().zip(&t.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(Discrepancy {
        value,
        scale: s.norm().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ky_fan_diagonal_example() {
        let a = DenseMatrix::diag(&[3.0, 1.0]);
        let b = DenseMatrix::diag(&[2.0, 2.0]);
        let r = ky_fan_report(&a, &b).unwrap();
        assert_eq!(r.max_violation_subadd, 0.0);
        assert_eq!(r.max_violation_doubling, Some(0.0));
        let z = DenseMatrix::zeros(2, 2);
        let r = ky_fan_report(&a, &z).unwrap();
        assert_eq!(r.max_violation_subadd, 0.0);
        assert_eq!(r.max_violation_doubling, Some(0.0));
        let r = ky_fan_report(&DenseMatrix::diag(&[1.0, -1.0]), &b).unwrap();
        assert_eq!(r.max_violation_doubling, None);
        assert!(ky_fan_report(&a, &DenseMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn invariance_examples() {
        let nil = DenseMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(invariance_check(&nil).unwrap().value, 0.0);
        let h = DenseMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, -3.0]).unwrap();
        assert!(invariance_check(&h).unwrap().value < 1e-14);
        let wide = DenseMatrix::from_real(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 5.0]).unwrap();
        assert!(invariance_check(&wide).unwrap().relative() < 1e-12);
    }

    #[test]
    fn ideal_bound_examples() {
        let y = DenseMatrix::from_real(2, 2, &[1.0, 2.0, -1.0, 0.5]).unwrap();
        let i = DenseMatrix::identity(2);
        assert!(ideal_bound_check(&i, &y, &i).unwrap().value < 1e-15);
        let two = i.scale(Complex64::new(2.0, 0.0));
        let s = singular_values(&y).unwrap();
        let t = singular_values(&two.matmul(&y).unwrap()).unwrap();
        for k in 1..=2 {
            assert_eq!(t.mu(k), 2.0 * s.mu(k));
        }
    }

    #[test]
    fn eckart_young_examples() {
        let a = DenseMatrix::diag(&[3.0, 2.0, 1.0]);
        let e = eckart_young_check(&a, 1).unwrap();
        assert!((e.distance - 2.0).abs() < 1e-14 && e.expected == 2.0);
        let e = eckart_young_check(&a, 0).unwrap();
        assert!((e.distance - 3.0).abs() < 1e-14);
        let rank1 = DenseMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(eckart_young_check(&rank1, 1).unwrap().distance < 1e-14);
        assert!(eckart_young_check(&a, 3).is_err());
    }

    #[test]
    fn top_k_examples() {
        let a = DenseMatrix::diag(&[5.0, 3.0, 1.0]);
        let r = top_k_trace_check(&a, 2, 50, 1).unwrap();
        assert_eq!(r.sigma_k, 8.0);
        assert!((r.eigen_projection_trace - 8.0).abs() < 1e-14);
        assert!(r.best_random_frame <= 8.0 + 1e-12);
        let r = top_k_trace_check(&a, 3, 5, 1).unwrap();
        assert!((r.best_random_frame - 9.0).abs() < 1e-13);
        assert!(matches!(
            top_k_trace_check(&DenseMatrix::diag(&[1.0, -1.0]), 1, 1, 0),
            Err(MatrixError::NotPsd)
        ));
    }

    #[test]
    fn diagonal_trace_examples() {
        let d = diagonal_trace_check(&DenseMatrix::identity(4), 9).unwrap();
        assert!(d.value < 1e-14);
        let a = DenseMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(diagonal_trace_check(&a, 3).unwrap().value < 1e-14);
    }

    #[test]
    fn homogeneity_and_unitary_invariance() {
        let a = DenseMatrix::from_real(3, 2, &[1.0, 2.0, 3.0, -1.0, 0.0, 4.0]).unwrap();
        assert!(homogeneity_check(&a, Complex64::new(0.0, -2.5)).unwrap().relative() < 1e-14);
        assert!(unitary_invariance_check(&a, 4).unwrap().relative() < 1e-13);
    }
}
