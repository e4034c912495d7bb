use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{QuadratureGrid, WodzickiError};

/// Evaluator (x, ξ, out): writes the d×d matrix σ(x, ξ) into `out`, row-major.
pub type SymbolFn = Arc<dyn Fn(&[f64], &[f64], &mut [Complex64]) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    Cos,
    Sin,
}

/// trig(freq·x_axis)
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub axis: usize,
    pub freq: u32,
    pub trig: Trig,
}

impl Mode {
    pub fn new(axis: usize, freq: u32, trig: Trig) -> Self {
        Self { axis, freq, trig }
    }
}

/// coef·Π modes
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub coef: f64,
    #[serde(default)]
    pub modes: Vec<Mode>,
}

impl FourierTerm {
    pub fn new(coef: f64, modes: Vec<Mode>) -> Self {
        Self { coef, modes }
    }

    pub fn constant(coef: f64) -> Self {
        Self::new(coef, Vec::new())
    }
}

/// Real trigonometric polynomial on T^n, a sum of products of cos/sin factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    n: u32,
    terms: Vec<FourierTerm>,
}

impl FourierSeries {
    pub fn new(n: u32, terms: Vec<FourierTerm>) -> Result<Self, WodzickiError> {
        for t in &terms {
            if !t.coef.is_finite() {
                return Err(WodzickiError::Grid("non-finite Fourier coefficient".into()));
            }
            if let Some(m) = t.modes.iter().find(|m| m.axis >= n as usize) {
                return Err(WodzickiError::Grid(format!(
                    "mode on axis {} of a {n}-torus",
                    m.axis
                )));
            }
        }
        Ok(Self { n, terms })
    }

    pub fn constant(n: u32, c: f64) -> Self {
        Self {
            n,
            terms: vec![FourierTerm::constant(c)],
        }
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.modes.iter().fold(t.coef, |acc, m| {
                    let a = m.freq as f64 * x[m.axis];
                    acc * match m.trig {
                        Trig::Cos => a.cos(),
                        Trig::Sin => a.sin(),
                    }
                })
            })
            .sum()
    }

    /// ∫_{[0,2π]^n} f, exactly: each axis factor is expanded into
    /// exponentials and only the zero frequency survives.
    pub fn integral(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut value = Complex64::new(t.coef, 0.0);
                for axis in 0..self.n as usize {
                    let mut spectrum: BTreeMap<i64, Complex64> = BTreeMap::new();
                    spectrum.insert(0, Complex64::new(1.0, 0.0));
                    for m in t.modes.iter().filter(|m| m.axis == axis) {
                        let f = m.freq as i64;
                        let (plus, minus) = match m.trig {
                            Trig::Cos => (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
                            Trig::Sin => (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5)),
                        };
                        let mut next = BTreeMap::new();
                        for (&k, &c) in &spectrum {
                            *next.entry(k + f).or_insert(Complex64::new(0.0, 0.0)) += c * plus;
                            *next.entry(k - f).or_insert(Complex64::new(0.0, 0.0)) += c * minus;
                        }
                        spectrum = next;
                    }
                    value *= spectrum.get(&0).copied().unwrap_or_default() * (2.0 * PI);
                }
                value.re
            })
            .sum()
    }
}

#[derive(Clone)]
enum Repr {
    Function(SymbolFn),
    Sampled {
        g: usize,
        order: usize,
        points: usize,
        values: Arc<[Complex64]>,
    },
    Combination(Vec<(f64, PrincipalSymbol)>),
}

/// Order −n principal symbol on T^n with values in d×d matrices.
#[derive(Clone)]
pub struct PrincipalSymbol {
    n: u32,
    fiber_dim: usize,
    name: String,
    repr: Repr,
}

impl fmt::Debug for PrincipalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrincipalSymbol")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("fiber_dim", &self.fiber_dim)
            .finish()
    }
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl PrincipalSymbol {
    /// Arbitrary evaluator; it is called with unit covectors only.
    pub fn custom(name: impl Into<String>, n: u32, fiber_dim: usize, eval: SymbolFn) -> Self {
        Self {
            n,
            fiber_dim,
            name: name.into(),
            repr: Repr::Function(eval),
        }
    }

    /// coef·‖ξ‖^{−n}·1_d
    pub fn norm_power(n: u32, fiber_dim: usize, coef: f64) -> Self {
        let eval: SymbolFn = Arc::new(move |_x, xi, out| {
            let v = coef * norm(xi).powi(-(n as i32));
            fill_scalar(out, fiber_dim, Complex64::new(v, 0.0));
        });
        Self::custom("norm_power", n, fiber_dim, eval)
    }

    /// f(x)·‖ξ‖^{−n}·1_d
    pub fn f_times_norm_power(f: FourierSeries, fiber_dim: usize) -> Self {
        let n = f.dimension();
        let eval: SymbolFn = Arc::new(move |x, xi, out| {
            let v = f.eval(x) * norm(xi).powi(-(n as i32));
            fill_scalar(out, fiber_dim, Complex64::new(v, 0.0));
        });
        Self::custom("f_times_norm_power", n, fiber_dim, eval)
    }

    /// Values sampled on a specific grid, from CSV rows
    /// `x_index,xi_index,re_00,im_00,re_01,im_01,…`. Lines starting with `#`
    /// and a header line are skipped; every (x, ξ) pair must appear once.
    pub fn sampled_from_csv(
        text: &str,
        grid: &QuadratureGrid,
        fiber_dim: usize,
    ) -> Result<Self, WodzickiError> {
        let points = grid.torus_points();
        let nodes = grid.sphere_len();
        let d2 = fiber_dim * fiber_dim;
        let mut values = vec![Complex64::new(f64::NAN, 0.0); points * nodes * d2];
        let mut seen = vec![false; points * nodes];
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if line_no == 0 && fields[0].parse::<usize>().is_err() {
                continue;
            }
            let bad = |what: &str| WodzickiError::Sampled(format!("line {}: {what}", line_no + 1));
            if fields.len() != 2 + 2 * d2 {
                return Err(bad(&format!("expected {} fields", 2 + 2 * d2)));
            }
            let xi: usize = fields[0].parse().map_err(|_| bad("x index"))?;
            let ki: usize = fields[1].parse().map_err(|_| bad("xi index"))?;
            if xi >= points || ki >= nodes {
                return Err(bad("index outside the grid"));
            }
            let slot = xi * nodes + ki;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(bad("duplicate grid point"));
            }
            for e in 0..d2 {
                let re: f64 = fields[2 + 2 * e].parse().map_err(|_| bad("entry"))?;
                let im: f64 = fields[3 + 2 * e].parse().map_err(|_| bad("entry"))?;
                values[slot * d2 + e] = Complex64::new(re, im);
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(WodzickiError::Sampled(format!(
                "no value for x index {}, xi index {}",
                missing / nodes,
                missing % nodes
            )));
        }
        Ok(Self {
            n: grid.dimension(),
            fiber_dim,
            name: "sampled".into(),
            repr: Repr::Sampled {
                g: grid.grid_size(),
                order: grid.sphere_order(),
                points: nodes,
                values: values.into(),
            },
        })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// a·σ
    pub fn scaled(&self, a: f64) -> Self {
        Self {
            n: self.n,
            fiber_dim: self.fiber_dim,
            name: format!("{a}*{}", self.name),
            repr: Repr::Combination(vec![(a, self.clone())]),
        }
    }

    /// σ + τ
    pub fn sum(&self, other: &PrincipalSymbol) -> Result<Self, WodzickiError> {
        if other.n != self.n {
            return Err(WodzickiError::DimensionMismatch {
                symbol: other.n,
                grid: self.n,
            });
        }
        if other.fiber_dim != self.fiber_dim {
            return Err(WodzickiError::Grid("fiber dimensions differ".into()));
        }
        Ok(Self {
            n: self.n,
            fiber_dim: self.fiber_dim,
            name: format!("{}+{}", self.name, other.name),
            repr: Repr::Combination(vec![(1.0, self.clone()), (1.0, other.clone())]),
        })
    }

    pub(super) fn check_grid(&self, grid: &QuadratureGrid) -> Result<(), WodzickiError> {
        match &self.repr {
            Repr::Function(_) => Ok(()),
            Repr::Sampled { g, order, .. } => {
                if *g == grid.grid_size() && *order == grid.sphere_order() {
                    Ok(())
                } else {
                    Err(WodzickiError::Sampled(format!(
                        "sampled on G={g}, order {order}; grid has G={}, order {}",
                        grid.grid_size(),
                        grid.sphere_order()
                    )))
                }
            }
            Repr::Combination(parts) => parts.iter().try_for_each(|(_, s)| s.check_grid(grid)),
        }
    }

    pub(super) fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.fiber_dim * self.fiber_dim]
    }

    /// Re tr σ(x, ξ) at torus point `x_index` and sphere node `xi_index`.
    pub(super) fn trace_at(
        &self,
        x_index: usize,
        x: &[f64],
        xi_index: usize,
        xi: &[f64],
        buf: &mut [Complex64],
    ) -> f64 {
        let d = self.fiber_dim;
        match &self.repr {
            Repr::Function(f) => {
                f(x, xi, buf);
                (0..d).map(|i| buf[i * d + i].re).sum()
            }
            Repr::Sampled { points, values, .. } => {
                let base = (x_index * points + xi_index) * d * d;
                (0..d).map(|i| values[base + i * d + i].re).sum()
            }
            Repr::Combination(parts) => parts
                .iter()
                .map(|(a, s)| a * s.trace_at(x_index, x, xi_index, xi, buf))
                .sum(),
        }
    }
}

fn fill_scalar(out: &mut [Complex64], d: usize, v: Complex64) {
    out.fill(Complex64::new(0.0, 0.0));
    for i in 0..d {
        out[i * d + i] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wodzicki::res_w;

    #[test]
    fn fourier_integrals() {
        let f = FourierSeries::new(
            2,
            vec![
                FourierTerm::constant(1.0),
                FourierTerm::new(
                    1.0,
                    vec![Mode::new(0, 1, Trig::Cos), Mode::new(1, 1, Trig::Cos)],
                ),
                // sin² x integrates to π·2π
                FourierTerm::new(
                    1.0,
                    vec![Mode::new(0, 1, Trig::Sin), Mode::new(0, 1, Trig::Sin)],
                ),
            ],
        )
        .unwrap();
        let four_pi2 = 4.0 * PI * PI;
        assert!((f.integral() - (four_pi2 + 2.0 * PI * PI)).abs() < 1e-12);
        assert!((f.eval(&[0.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_symbol_matches_its_source() {
        let grid = QuadratureGrid::new(2, 3, 4).unwrap();
        let mut csv = String::from("x_index,xi_index,re,im\n");
        for xp in 0..grid.torus_points() {
            for k in 0..grid.sphere_len() {
                csv.push_str(&format!("{xp},{k},1,0\n"));
            }
        }
        let s = PrincipalSymbol::sampled_from_csv(&csv, &grid, 1).unwrap();
        let a = res_w(&s, &grid).unwrap();
        let b = res_w(&PrincipalSymbol::norm_power(2, 1, 1.0), &grid).unwrap();
        assert!((a - b).abs() < 1e-14);

        let other = QuadratureGrid::new(2, 4, 4).unwrap();
        assert!(res_w(&s, &other).is_err());
        let truncated: String = csv.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(PrincipalSymbol::sampled_from_csv(&truncated, &grid, 1).is_err());
    }
}
