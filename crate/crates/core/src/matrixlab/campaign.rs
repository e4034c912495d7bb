use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{
    diagonal_trace_check, eckart_young_check, homogeneity_check, ideal_bound_check, invariance_check,
    ky_fan_report, top_k_trace_check, unitary_invariance_check,
};
use super::random::{random_matrix, random_psd, trial_rng};
use super::MatrixError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Homogeneity,
    KyFanSubadditive,
    KyFanDoubling,
    IdealBound,
    AdjointInvariance,
    EckartYoung,
    TopKTrace,
    DiagonalTrace,
    UnitaryInvariance,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Homogeneity,
        Family::KyFanSubadditive,
        Family::KyFanDoubling,
        Family::IdealBound,
        Family::AdjointInvariance,
        Family::EckartYoung,
        Family::TopKTrace,
        Family::DiagonalTrace,
        Family::UnitaryInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Homogeneity => "homogeneity",
            Family::KyFanSubadditive => "ky_fan_subadditive",
            Family::KyFanDoubling => "ky_fan_doubling",
            Family::IdealBound => "ideal_bound",
            Family::AdjointInvariance => "adjoint_invariance",
            Family::EckartYoung => "eckart_young",
            Family::TopKTrace => "top_k_trace",
            Family::DiagonalTrace => "diagonal_trace",
            Family::UnitaryInvariance => "unitary_invariance",
        }
    }

    fn stream_base(self, seed: u64) -> u64 {
        let idx = Family::ALL.iter().position(|&f| f == self).unwrap() as u64;
        seed.wrapping_add((idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub trials: usize,
    pub seed: u64,
    pub min_dim: usize,
    pub max_dim: usize,
    /// violations are reported relative to max(1, largest singular value involved)
    pub tolerance: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            min_dim: 2,
            max_dim: 16,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub trials: usize,
    pub max_violation: f64,
    /// trial index of the worst case; rerun with `trial_rng(family seed, worst_seed)`
    pub worst_seed: u64,
    pub violations_above_tol: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub families: Vec<FamilyReport>,
}

impl CampaignReport {
    pub fn total_violations(&self) -> usize {
        self.families.iter().map(|f| f.violations_above_tol).sum()
    }

    pub fn family(&self, family: Family) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.family == family)
    }
}

pub fn run_campaigns(config: &CampaignConfig) -> Result<CampaignReport, MatrixError> {
    let families = Family::ALL
        .iter()
        .map(|&f| run_family(f, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CampaignReport {
        config: *config,
        families,
    })
}

pub fn run_family(family: Family, config: &CampaignConfig) -> Result<FamilyReport, MatrixError> {
    if config.min_dim < 2 || config.max_dim < config.min_dim {
        return Err(MatrixError::Empty);
    }
    let base = family.stream_base(config.seed);
    let results = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base, t);
            trial(family, &mut rng, config, t).map(|v| (v, t))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (max_violation, worst_seed) = results
        .iter()
        .copied()
        .fold((0.0f64, 0u64), |acc, (v, t)| if v > acc.0 { (v, t) } else { acc });
    Ok(FamilyReport {
        family,
        trials: config.trials,
        max_violation,
        worst_seed,
        violations_above_tol: results.iter().filter(|(v, _)| *v > config.tolerance).count(),
    })
}

/// Relative violation for one random instance.
fn trial(family: Family, rng: &mut ChaCha8Rng, config: &CampaignConfig, t: u64) -> Result<f64, MatrixError> {
    let n = rng.random_range(config.min_dim..=config.max_dim);
    let complex = t % 2 == 1;
    Ok(match family {
        Family::Homogeneity => {
            let a = random_matrix(rng, n, n, complex);
            let lambda = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            homogeneity_check(&a, lambda)?.relative()
        }
        Family::KyFanSubadditive => {
            let a = random_matrix(rng, n, n, complex);
            let b = random_matrix(rng, n, n, complex);
            let r = ky_fan_report(&a, &b)?;
            r.max_violation_subadd / r.scale
        }
        Family::KyFanDoubling => {
            let a = random_psd(rng, n, complex);
            let b = random_psd(rng, n, complex);
            let r = ky_fan_report(&a, &b)?;
            r.max_violation_subadd.max(r.max_violation_doubling.unwrap_or(f64::INFINITY)) / r.scale
        }
        Family::IdealBound => {
            let a = random_matrix(rng, n, n, complex);
            let y = random_matrix(rng, n, n, complex);
            let b = random_matrix(rng, n, n, complex);
            ideal_bound_check(&a, &y, &b)?.relative()
        }
        Family::AdjointInvariance => {
            let m = rng.random_range(config.min_dim..=config.max_dim);
            let a = random_matrix(rng, m, n, complex);
            invariance_check(&a)?.relative()
        }
        Family::EckartYoung => {
            let m = rng.random_range(config.min_dim..=config.max_dim);
            let a = random_matrix(rng, m, n, complex);
            let mut worst = 0.0f64;
            for r in 0..m.min(n) {
                let e = eckart_young_check(&a, r)?;
                worst = worst.max((e.distance - e.expected).abs() / e.scale);
            }
            worst
        }
        Family::TopKTrace => {
            let a = random_psd(rng, n, complex);
            let k = rng.random_range(1..=n);
            let r = top_k_trace_check(&a, k, 8, rng.random())?;
            ((r.best_random_frame - r.sigma_k).max(0.0) + (r.eigen_projection_trace - r.sigma_k).abs()) / r.scale
        }
        Family::DiagonalTrace => {
            let a = random_psd(rng, n, complex);
            diagonal_trace_check(&a, rng.random())?.relative()
        }
        Family::UnitaryInvariance => {
            let m = rng.random_range(config.min_dim..=config.max_dim);
            let a = random_matrix(rng, m, n, complex);
            unitary_invariance_check(&a, rng.random())?.relative()
        }
    })
}
