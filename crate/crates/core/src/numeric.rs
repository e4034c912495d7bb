//! Small numerical helpers shared across modules: compensated summation,
//! harmonic-number ranges and an ordinary least-squares line fit.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from a known value with zero compensation.
    pub fn starting_at(value: f64) -> Self {
        Self {
            sum: value,
            comp: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Raw `(sum, compensation)` pair, so a running sum can be resumed exactly.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }

    pub fn from_parts(sum: f64, comp: f64) -> Self {
        Self { sum, comp }
    }
}

impl Extend<f64> for Neumaier {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = Neumaier::new();
    acc.extend(iter);
    acc.value()
}

/// Pairwise reduction of a slice; the result depends only on the slice,
/// never on how work was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return compensated_sum(values.iter().copied());
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Σ_{k=a}^{b} 1/k for 1 ≤ a ≤ b.
pub fn harmonic_range(a: u64, b: u64) -> f64 {
    assert!(a >= 1, "harmonic range starts at 1");
    if b < a {
        return 0.0;
    }
    if b - a < 4096 {
        // descending order adds the small terms first
        return compensated_sum((a..=b).rev().map(|k| 1.0 / k as f64));
    }
    if a < 64 {
        return harmonic_range(a, 63) + harmonic_range(64, b);
    }
    // H(b) - H(a-1) through the asymptotic expansion; the logarithmic part
    // is formed as ln(1 + (b-a+1)/(a-1)) to avoid cancellation.
    let lo = (a - 1) as f64;
    let hi = b as f64;
    let log_part = ((b - a + 1) as f64 / lo).ln_1p();
    log_part + harmonic_correction(hi) - harmonic_correction(lo)
}

fn harmonic_correction(n: f64) -> f64 {
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    inv * 0.5 - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// H(n) = Σ_{k≤n} 1/k.
pub fn harmonic_number(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n < 64 {
        return harmonic_range(1, n);
    }
    let x = n as f64;
    x.ln() + EULER_GAMMA + harmonic_correction(x)
}

/// Result of an ordinary least-squares fit `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    if sxx <= 0.0 {
        return None;
    }
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Some(LineFit {
        slope,
        intercept,
        max_abs_residual,
    })
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Γ(n/2) for a positive integer n, by the recurrence from Γ(1/2) = √π and
/// Γ(1) = 1. Exact up to one rounding per step.
pub fn gamma_half_integer(n: u32) -> f64 {
    assert!(n >= 1);
    let (mut x, mut g) = if n % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    let target = n as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// 17 significant digits in scientific notation, enough to round-trip any f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}
