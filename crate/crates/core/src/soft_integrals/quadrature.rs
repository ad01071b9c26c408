use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Vec3;

/// Product rule on the unit sphere: Gauss–Legendre in cos θ, uniform in φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_polar: usize,
    pub n_azimuthal: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_polar: 64,
            n_azimuthal: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn new(n_polar: usize, n_azimuthal: usize) -> Result<Self> {
        let spec = Self { n_polar, n_azimuthal };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_polar < 4 {
            return Err(Error::invalid("n_polar", "must be >= 4"));
        }
        if self.n_azimuthal < 4 {
            return Err(Error::invalid("n_azimuthal", "must be >= 4"));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_polar: 2 * self.n_polar,
            n_azimuthal: 2 * self.n_azimuthal,
        }
    }

    pub fn build(&self) -> Result<SphereRule> {
        self.validate()?;
        let (xs, ws) = gauss_legendre(self.n_polar);
        let dphi = 2.0 * PI / self.n_azimuthal as f64;
        let mut nodes = Vec::with_capacity(self.n_polar * self.n_azimuthal);
        for (&c, &w) in xs.iter().zip(&ws) {
            let s = (1.0 - c * c).sqrt();
            for j in 0..self.n_azimuthal {
                // half-step offset keeps nodes off the coordinate planes
                let phi = (j as f64 + 0.5) * dphi;
                nodes.push(SphereNode {
                    direction: Vec3::new(s * phi.cos(), s * phi.sin(), c),
                    weight: w * dphi,
                });
            }
        }
        Ok(SphereRule { nodes })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereNode {
    pub direction: Vec3,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<SphereNode>,
}

impl SphereRule {
    /// ∮ f dΩ, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(&Vec3) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(&n.direction)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_four_pi() {
        for (a, b) in [(4, 4), (7, 5), (64, 64), (128, 33)] {
            let rule = QuadratureSpec::new(a, b).unwrap().build().unwrap();
            let w = rule.total_weight();
            assert!((w / (4.0 * PI) - 1.0).abs() < 1e-12, "{a}x{b}: {w}");
        }
    }

    #[test]
    fn legendre_exactness() {
        let (xs, ws) = gauss_legendre(5);
        // exact through degree 9
        let m8: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-14);
        let m9: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(9)).sum();
        assert!(m9.abs() < 1e-14);
    }

    #[test]
    fn sphere_moments() {
        let rule = QuadratureSpec::default().build().unwrap();
        let z2 = rule.integrate(|n| n.z * n.z);
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
        let x2y2 = rule.integrate(|n| n.x * n.x * n.y * n.y);
        assert!((x2y2 - 4.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_orders() {
        assert!(QuadratureSpec::new(3, 8).is_err());
        assert!(QuadratureSpec::new(8, 2).is_err());
    }
}
