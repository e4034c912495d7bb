use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DenseMatrix, MatrixError};

pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_SWEEPS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub sweeps: usize,
    /// max |⟨w_p, w_q⟩| / (‖w_p‖‖w_q‖) over the final sweep
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub report: ConvergenceReport,
}

impl SingularSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// μ_k with 1-based k, zero past the end.
    pub fn mu(&self, k: usize) -> f64 {
        assert!(k >= 1);
        self.values.get(k - 1).copied().unwrap_or(0.0)
    }

    /// σ_k, the sum of the k largest values.
    pub fn sigma(&self, k: usize) -> f64 {
        self.values.iter().take(k).sum()
    }

    pub fn norm(&self) -> f64 {
        self.mu(1)
    }
}

/// A = U·diag(values)·V*, U of size rows × p and V of size cols × p with
/// p = min(rows, cols).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub values: Vec<f64>,
    pub v: DenseMatrix,
    pub report: ConvergenceReport,
}

impl Svd {
    /// Σ_{i<r} σ_i u_i v_i*.
    pub fn truncated(&self, r: usize) -> DenseMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = DenseMatrix::zeros(m, n);
        for (t, &s) in self.values.iter().enumerate().take(r) {
            for i in 0..m {
                let ui = self.u[(i, t)] * s;
                for j in 0..n {
                    out[(i, j)] += ui * self.v[(j, t)].conj();
                }
            }
        }
        out
    }
}

pub fn singular_values(a: &DenseMatrix) -> Result<SingularSpectrum, MatrixError> {
    let svd = svd(a)?;
    Ok(SingularSpectrum {
        values: svd.values,
        report: svd.report,
    })
}

pub fn svd(a: &DenseMatrix) -> Result<Svd, MatrixError> {
    if a.rows() < a.cols() {
        let t = jacobi(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            values: t.values,
            v: t.u,
            report: t.report,
        });
    }
    jacobi(a)
}

/// Cyclic one-sided Jacobi on the columns of a tall matrix.
fn jacobi(a: &DenseMatrix) -> Result<Svd, MatrixError> {
    let (m, n) = (a.rows(), a.cols());
    // column-major working copies
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let mut sweeps = 0;
    let mut residual = 0.0f64;
    let mut converged = n == 1;
    while !converged && sweeps < JACOBI_SWEEPS {
        sweeps += 1;
        residual = 0.0;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if alpha == 0.0 || beta == 0.0 || g == 0.0 {
                    continue;
                }
                let rel = g / (alpha * beta).sqrt();
                residual = residual.max(rel);
                if rel <= JACOBI_TOL {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(MatrixError::NoConvergence { sweeps, residual });
    }

    let norms: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let mut u_mat = DenseMatrix::zeros(m, n);
    let mut v_mat = DenseMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (t, &j) in order.iter().enumerate() {
        let s = norms[j];
        values.push(s);
        for i in 0..m {
            if s > 0.0 {
                u_mat[(i, t)] = w[j][i] / s;
            }
        }
        for i in 0..n {
            v_mat[(i, t)] = v[j][i];
        }
    }
    Ok(Svd {
        u: u_mat,
        values,
        v: v_mat,
        report: ConvergenceReport { sweeps, residual },
    })
}

/// Columns p, q ← (c·x_p − s·y, s·x_p + c·y) with y = phase·x_q.
fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, phase: Complex64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (xp, xq) = (&mut left[p], &mut right[0]);
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let y = *b * phase;
        let x = *a;
        *a = x * c - y * s;
        *b = x * s + y * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixlab::random::{random_matrix, trial_rng};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn trivial_cases() {
        let s = singular_values(&DenseMatrix::identity(3)).unwrap();
        assert!(close(&s.values, &[1.0, 1.0, 1.0], 1e-15));
        let s = singular_values(&DenseMatrix::diag(&[3.0, -4.0])).unwrap();
        assert!(close(&s.values, &[4.0, 3.0], 1e-15));
        let s = singular_values(&DenseMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!(close(&s.values, &[1.0, 0.0], 1e-15));
    }

    #[test]
    fn two_by_two_against_characteristic_polynomial() {
        let mut rng = trial_rng(7, 0);
        for _ in 0..200 {
            let a = random_matrix(&mut rng, 2, 2, true);
            let g = a.adjoint().matmul(&a).unwrap();
            let tr = g.trace().re;
            let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            let l1 = (tr + disc) / 2.0;
            let l2 = det / l1;
            let s = singular_values(&a).unwrap();
            assert!(close(&s.values, &[l1.sqrt(), l2.max(0.0).sqrt()], 1e-10), "{:?}", s.values);
        }
    }

    #[test]
    fn reconstruction_and_shapes() {
        let mut rng = trial_rng(11, 3);
        for (m, n) in [(5, 3), (3, 5), (8, 8), (1, 4)] {
            let a = random_matrix(&mut rng, m, n, true);
            let f = svd(&a).unwrap();
            assert_eq!(f.values.len(), m.min(n));
            assert!(f.values.windows(2).all(|w| w[0] >= w[1]));
            let back = f.truncated(m.min(n));
            assert!(back.sub(&a).unwrap().frobenius_norm() < 1e-12 * a.frobenius_norm());
        }
    }

    #[test]
    fn rank_deficient() {
        let a = DenseMatrix::from_real(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 1.0, 1.0, 1.0]).unwrap();
        let s = singular_values(&a).unwrap();
        assert!(s.values[2] < 1e-14 * s.values[0]);
    }
}
