use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::DenseMatrix;

/// Generator for trial `trial` of a campaign seeded with `seed`; each trial
/// gets its own ChaCha stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn entry<R: Rng>(rng: &mut R, complex: bool) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
    Complex64::new(re, im)
}

/// I.i.d. standard normal entries.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, complex: bool) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| entry(rng, complex)).collect();
    DenseMatrix::new(rows, cols, data).expect("finite normal samples")
}

/// G*G for a square normal G.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, complex: bool) -> DenseMatrix {
    let g = random_matrix(rng, n, n, complex);
    g.adjoint().matmul(&g).expect("square")
}

/// Gram-Schmidt (applied twice) on the columns of a normal matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize, complex: bool) -> DenseMatrix {
    loop {
        let g = random_matrix(rng, n, n, complex);
        if let Some(q) = orthonormalize(&g) {
            return q;
        }
    }
}

fn orthonormalize(g: &DenseMatrix) -> Option<DenseMatrix> {
    let n = g.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, &e) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * e;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let mut q = DenseMatrix::zeros(g.rows(), n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            q[(i, j)] = z;
        }
    }
    Some(q)
}
