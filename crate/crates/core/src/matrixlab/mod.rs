//! Dense finite-dimensional laboratory: singular values by one-sided Jacobi
//! and seeded property campaigns for the singular value inequalities.

mod campaign;
mod checks;
mod dense;
pub mod random;
mod svd;

pub use campaign::{run_campaigns, run_family, CampaignConfig, CampaignReport, Family, FamilyReport};
pub use checks::{
    diagonal_trace_check, eckart_young_check, homogeneity_check, ideal_bound_check, invariance_check,
    ky_fan_report, top_k_trace_check, unitary_invariance_check, Discrepancy, EckartYoung, KyFanReport,
    TopKReport,
};
pub use dense::DenseMatrix;
pub use svd::{singular_values, svd, ConvergenceReport, SingularSpectrum, Svd, JACOBI_SWEEPS, JACOBI_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("empty matrix or dimension range")]
    Empty,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("Jacobi did not converge in {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("rank {r} out of range (max {max})")]
    RankOutOfRange { r: usize, max: usize },
}
