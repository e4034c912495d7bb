use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::WodzickiError;

pub const DEFAULT_SPHERE_ORDER: usize = 32;

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on P_m.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and P_{m−1}
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule on T^n × S^{n−1}: a uniform G^n grid on [0, 2π)^n times a
/// sphere rule. S⁰ is {±1} with unit weights; S¹ is `order` equispaced
/// angles; S² is Gauss–Legendre of `order` points in cos θ times 2·`order`
/// equispaced azimuths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    n: u32,
    g: usize,
    order: usize,
    /// unit covectors, n entries each
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(n: u32, g: usize, order: usize) -> Result<Self, WodzickiError> {
        if !(1..=3).contains(&n) {
            return Err(WodzickiError::Dimension(n));
        }
        if g == 0 {
            return Err(WodzickiError::Grid("torus grid size must be >= 1".into()));
        }
        if n > 1 && order == 0 {
            return Err(WodzickiError::Grid("sphere order must be >= 1".into()));
        }
        if (g as u64).checked_pow(n).map_or(true, |p| p > 1 << 26) {
            return Err(WodzickiError::Grid(format!("{g}^{n} torus points is too many")));
        }
        let (nodes, weights) = match n {
            1 => (vec![1.0, -1.0], vec![1.0, 1.0]),
            2 => {
                let h = 2.0 * PI / order as f64;
                let nodes = (0..order)
                    .flat_map(|k| {
                        let t = k as f64 * h;
                        [t.cos(), t.sin()]
                    })
                    .collect();
                (nodes, vec![h; order])
            }
            _ => {
                let (z, wz) = gauss_legendre(order);
                let naz = 2 * order;
                let h = 2.0 * PI / naz as f64;
                let mut nodes = Vec::with_capacity(3 * order * naz);
                let mut weights = Vec::with_capacity(order * naz);
                for (zi, wi) in z.iter().zip(&wz) {
                    let r = (1.0 - zi * zi).sqrt();
                    for k in 0..naz {
                        let phi = k as f64 * h;
                        nodes.extend_from_slice(&[r * phi.cos(), r * phi.sin(), *zi]);
                        weights.push(wi * h);
                    }
                }
                (nodes, weights)
            }
        };
        Ok(Self {
            n,
            g,
            order,
            nodes,
            weights,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn grid_size(&self) -> usize {
        self.g
    }

    pub fn sphere_order(&self) -> usize {
        self.order
    }

    pub fn torus_points(&self) -> usize {
        self.g.pow(self.n)
    }

    /// Weight of every torus grid point, (2π/G)^n.
    pub fn torus_weight(&self) -> f64 {
        (2.0 * PI / self.g as f64).powi(self.n as i32)
    }

    /// Coordinates of torus point `index` (axis 0 varies fastest).
    pub fn torus_point(&self, index: usize, out: &mut [f64]) {
        let mut rest = index;
        for x in out.iter_mut() {
            *x = 2.0 * PI * (rest % self.g) as f64 / self.g as f64;
            rest /= self.g;
        }
    }

    pub fn sphere_len(&self) -> usize {
        self.weights.len()
    }

    pub fn sphere_node(&self, k: usize) -> &[f64] {
        let n = self.n as usize;
        &self.nodes[k * n..(k + 1) * n]
    }

    pub fn sphere_weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::compensated_sum;
    use crate::wodzicki::omega;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((compensated_sum(w.iter().copied()) - 2.0).abs() < 1e-14);
        // ∫ x^14 = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let (x, _) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-16);
    }

    #[test]
    fn sphere_weights_sum_to_omega() {
        for n in 1..=3 {
            let g = QuadratureGrid::new(n, 3, DEFAULT_SPHERE_ORDER).unwrap();
            let s = compensated_sum(g.sphere_weights().iter().copied());
            assert!((s - omega(n)).abs() < 1e-12 * omega(n), "n={n}");
            for k in 0..g.sphere_len() {
                let r: f64 = g.sphere_node(k).iter().map(|c| c * c).sum();
                assert!((r - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn torus_weights_sum_to_volume() {
        let g = QuadratureGrid::new(3, 5, 4).unwrap();
        let total = g.torus_weight() * g.torus_points() as f64;
        assert!((total - (2.0 * PI).powi(3)).abs() < 1e-12);
        let mut x = [0.0; 3];
        g.torus_point(5 + 2 * 25, &mut x);
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 2.0 * PI / 5.0).abs() < 1e-15);
        assert!((x[2] - 4.0 * PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn s2_rule_integrates_low_degree_harmonics() {
        let g = QuadratureGrid::new(3, 1, 6).unwrap();
        // ∫_{S²} z² = 4π/3, ∫ x y = 0
        let mut zz = 0.0;
        let mut xy = 0.0;
        for (k, w) in g.sphere_weights().iter().enumerate() {
            let p = g.sphere_node(k);
            zz += w * p[2] * p[2];
            xy += w * p[0] * p[1];
        }
        assert!((zz - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(xy.abs() < 1e-14);
    }
}
