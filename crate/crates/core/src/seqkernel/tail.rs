use serde::{Deserialize, Serialize};

/// Claimed asymptotic behaviour of a sequence. Metadata only; certificates
/// come from [`TailDescriptor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum AsymptoticClass {
    #[default]
    Unspecified,
    /// μ_n = O(1/n)
    BigOInverse,
    /// μ_n ∼ l/n
    Harmonic { l: f64 },
}

impl AsymptoticClass {
    pub fn scaled(self, lambda: f64) -> Self {
        match self {
            AsymptoticClass::Harmonic { l } => AsymptoticClass::Harmonic { l: l * lambda },
            other => other,
        }
    }

    pub fn harmonic_constant(&self) -> Option<f64> {
        match self {
            AsymptoticClass::Harmonic { l } => Some(*l),
            _ => None,
        }
    }
}

/// Bound ε(N) on |n·μ_n − l| valid for all n ≥ N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Epsilon {
    Constant { eps: f64 },
    /// ε(N) = c / ln N
    InverseLog { c: f64 },
}

impl Epsilon {
    pub fn at(&self, n: u64) -> f64 {
        match *self {
            Epsilon::Constant { eps } => eps,
            Epsilon::InverseLog { c } => {
                if n < 2 {
                    f64::INFINITY
                } else {
                    c / (n as f64).ln()
                }
            }
        }
    }

    fn scaled(self, lambda: f64) -> Self {
        match self {
            Epsilon::Constant { eps } => Epsilon::Constant { eps: eps * lambda },
            Epsilon::InverseLog { c } => Epsilon::InverseLog { c: c * lambda },
        }
    }
}

/// Closed set of tail certificates. Anything that does not fit one of these
/// is `Decaying`, which witnesses μ_n → 0 and nothing more.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tail", rename_all = "snake_case")]
pub enum TailDescriptor {
    /// μ_n = 0 for n > support.
    Finite { support: u64 },
    /// μ_n ≤ c·ratio^n, 0 < ratio < 1.
    Geometric { c: f64, ratio: f64 },
    /// μ_n ≤ c/n for every n.
    InverseBound { c: f64 },
    /// |n·μ_n − l| ≤ ε(N) for n ≥ N ≥ from, and n·μ_n ≤ prefix_bound for n < from.
    Asymptotic {
        l: f64,
        eps: Epsilon,
        from: u64,
        prefix_bound: f64,
    },
    /// σ_k ≤ c·(1 + ln k) for every k ≥ 1.
    LogAverage { c: f64 },
    /// lower/ln(n+1) ≤ μ_n, with μ_n → 0. Certifies σ_n/ln n → ∞.
    InverseLog { lower: f64 },
    /// μ_n → 0 with no rate.
    Decaying,
}

impl TailDescriptor {
    pub fn scaled(self, lambda: f64) -> Self {
        use TailDescriptor::*;
        match self {
            Finite { support } => {
                if lambda == 0.0 {
                    Finite { support: 0 }
                } else {
                    Finite { support }
                }
            }
            Geometric { c, ratio } => Geometric { c: c * lambda, ratio },
            InverseBound { c } => InverseBound { c: c * lambda },
            Asymptotic {
                l,
                eps,
                from,
                prefix_bound,
            } => Asymptotic {
                l: l * lambda,
                eps: eps.scaled(lambda),
                from,
                prefix_bound: prefix_bound * lambda,
            },
            LogAverage { c } => LogAverage { c: c * lambda },
            InverseLog { lower } => {
                if lambda == 0.0 {
                    Finite { support: 0 }
                } else {
                    InverseLog {
                        lower: lower * lambda,
                    }
                }
            }
            Decaying => Decaying,
        }
    }

    /// A constant c with n·μ_n ≤ c for every n, when the descriptor certifies one.
    /// `mu_1` is needed for finitely supported sequences.
    pub fn inverse_bound(&self, mu_1: f64) -> Option<f64> {
        use TailDescriptor::*;
        match *self {
            Finite { support } => Some(support as f64 * mu_1),
            Geometric { c, ratio } => {
                // max_n n·ratio^n is attained next to 1/ln(1/ratio)
                let peak = 1.0 / (1.0 / ratio).ln();
                let lo = peak.floor().max(1.0);
                let best = [lo, lo + 1.0]
                    .iter()
                    .map(|n| n * ratio.powf(*n))
                    .fold(0.0, f64::max);
                Some(c * best)
            }
            InverseBound { c } => Some(c),
            Asymptotic {
                l,
                eps,
                from,
                prefix_bound,
            } => Some(prefix_bound.max(l + eps.at(from.max(2)))),
            LogAverage { .. } | InverseLog { .. } | Decaying => None,
        }
    }

    /// Constant C with σ_k ≤ C·(1 + ln k) for every k, if certified.
    pub fn log_average_bound(&self, mu_1: f64) -> Option<f64> {
        match *self {
            TailDescriptor::LogAverage { c } => Some(c),
            TailDescriptor::Geometric { c, ratio } => Some(c * ratio / (1.0 - ratio)),
            _ => self.inverse_bound(mu_1),
        }
    }

    /// True when the descriptor proves Σ μ_n < ∞.
    pub fn summable(&self) -> bool {
        matches!(
            self,
            TailDescriptor::Finite { .. } | TailDescriptor::Geometric { .. }
        )
    }

    pub fn certifies_divergence(&self) -> bool {
        matches!(self, TailDescriptor::InverseLog { .. })
    }

    /// Descriptor for the sorted merge of two sequences (the diagonal sum).
    pub fn merged(a: &TailDescriptor, mu_a: f64, b: &TailDescriptor, mu_b: f64) -> Self {
        use TailDescriptor::*;
        match (*a, *b) {
            (Finite { support: s1 }, Finite { support: s2 }) => Finite {
                support: s1 + s2,
            },
            (Geometric { c: c1, ratio: r1 }, Geometric { c: c2, ratio: r2 }) => {
                // α_z(t) ≤ α_a(t) + α_b(t) ≤ 2·log_{1/r}(c·t)
                Geometric {
                    c: c1.max(c2),
                    ratio: r1.max(r2).sqrt(),
                }
            }
            (InverseLog { lower: l1 }, InverseLog { lower: l2 }) => InverseLog {
                lower: l1.max(l2),
            },
            (InverseLog { lower }, _) | (_, InverseLog { lower }) => InverseLog { lower },
            _ => {
                // counting functions add, so both inverse bounds and
                // logarithmic-average bounds add as well
                if let (Some(c1), Some(c2)) = (a.inverse_bound(mu_a), b.inverse_bound(mu_b)) {
                    InverseBound { c: c1 + c2 }
                } else if let (Some(c1), Some(c2)) =
                    (a.log_average_bound(mu_a), b.log_average_bound(mu_b))
                {
                    LogAverage { c: c1 + c2 }
                } else {
                    Decaying
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_inverse_bound_dominates_n_r_pow_n() {
        let t = TailDescriptor::Geometric { c: 1.0, ratio: 0.5 };
        let c = t.inverse_bound(0.5).unwrap();
        for n in 1..200 {
            assert!(n as f64 * 0.5f64.powi(n) <= c + 1e-15);
        }
    }

    #[test]
    fn inverse_log_epsilon() {
        let e = Epsilon::InverseLog { c: 0.2 };
        assert!((e.at(100) - 0.2 / 100f64.ln()).abs() < 1e-16);
        assert!(e.at(1).is_infinite());
    }
}
