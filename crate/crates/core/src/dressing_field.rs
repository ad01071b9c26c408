//! Spatial structure of the phase dressing.
//!
//! `green_g` is the boosted Coulomb kernel
//! `G(x⃗) = −(1/4π)·γ/√(x⃗² + γ²(v⃗·x⃗)²)`, whose action on a scalar sample is
//! the convolution `∫d³z G(x⃗ − z⃗) f(z⃗)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{gamma, FourVector, Vec3};
use crate::soft_integrals::quadrature::gauss_legendre;

/// Nodes per axis of the face rule used for the singular-cell average.
const FACE_NODES: usize = 24;

pub fn green_g(x: &Vec3, v: &Vec3) -> Result<f64> {
    let g = gamma(v)?;
    let r2 = x.norm_squared();
    if r2 == 0.0 {
        return Err(Error::invalid("x", "Green function is singular at the origin"));
    }
    Ok(green_unchecked(x, v, g))
}

#[inline]
fn green_unchecked(x: &Vec3, v: &Vec3, g: f64) -> f64 {
    let vx = v.dot(x);
    -g / (4.0 * PI * (x.norm_squared() + g * g * vx * vx).sqrt())
}

/// Regular 3-D lattice of real samples, x-fastest ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarFieldSample {
    pub origin: [f64; 3],
    pub spacing: f64,
    pub dims: [usize; 3],
    pub values: Vec<f64>,
}

impl ScalarFieldSample {
    pub fn new(origin: [f64; 3], spacing: f64, dims: [usize; 3], values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        if dims.iter().product::<usize>() != values.len() {
            return Err(Error::invalid("values", "length does not match grid dimensions"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "non-finite sample"));
        }
        Ok(Self {
            origin,
            spacing,
            dims,
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(origin: [f64; 3], spacing: f64, dims: [usize; 3], f: impl Fn(&Vec3) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(dims.iter().product());
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    values.push(f(&Self::node_at(&origin, spacing, [i, j, k])));
                }
            }
        }
        Self::new(origin, spacing, dims, values)
    }

    fn node_at(origin: &[f64; 3], h: f64, idx: [usize; 3]) -> Vec3 {
        Vec3::new(
            origin[0] + idx[0] as f64 * h,
            origin[1] + idx[1] as f64 * h,
            origin[2] + idx[2] as f64 * h,
        )
    }

    pub fn node(&self, idx: [usize; 3]) -> Vec3 {
        Self::node_at(&self.origin, self.spacing, idx)
    }

    pub fn index(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.dims[0] * (idx[1] + self.dims[1] * idx[2])
    }

    pub fn value(&self, idx: [usize; 3]) -> f64 {
        self.values[self.index(idx)]
    }

    /// Whether `x` lies inside the union of the node cells.
    pub fn contains(&self, x: &Vec3) -> bool {
        (0..3).all(|a| {
            let lo = self.origin[a] - 0.5 * self.spacing;
            let hi = self.origin[a] + (self.dims[a] as f64 - 0.5) * self.spacing;
            x[a] >= lo && x[a] <= hi
        })
    }

    fn nearest_node(&self, x: &Vec3) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in 0..3 {
            let f = ((x[a] - self.origin[a]) / self.spacing).round();
            idx[a] = f.clamp(0.0, (self.dims[a] - 1) as f64) as usize;
        }
        idx
    }
}

/// `∫_cell G(y − x) d³y` over the cube of side `h` centred at `center`, with
/// `x` inside the cube.
///
/// G is homogeneous of degree −1 about `x`, so the divergence theorem turns
/// the singular volume integral into `(1/2) ∮ G(y − x) (y − x)·n̂ dS`, a
/// smooth integral over the six faces.
pub fn singular_cell_integral(center: &Vec3, h: f64, x: &Vec3, v: &Vec3) -> Result<f64> {
    let g = gamma(v)?;
    let (ts, ws) = gauss_legendre(FACE_NODES);
    let half = 0.5 * h;
    let mut total = 0.0;
    for axis in 0..3 {
        let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [-1.0, 1.0] {
            let mut face = 0.0;
            for (s, ws_) in ts.iter().zip(&ws) {
                for (t, wt) in ts.iter().zip(&ws) {
                    let mut y = *center;
                    y[axis] += side * half;
                    y[a1] += s * half;
                    y[a2] += t * half;
                    let r = y - x;
                    let normal_dist = side * r[axis];
                    face += ws_ * wt * green_unchecked(&r, v, g) * normal_dist;
                }
            }
            total += face * half * half;
        }
    }
    Ok(0.5 * total)
}

/// Convolution `∫d³z G(x⃗ − z⃗) f(z⃗)` as a node sum; the cell containing `x`
/// uses the exact cell integral of G instead of a node evaluation.
pub fn inverse_gdot_apply(f: &ScalarFieldSample, v: &Vec3, x: &Vec3) -> Result<f64> {
    let g = gamma(v)?;
    if !f.contains(x) {
        return Err(Error::invalid("x", "point lies outside the sample grid"));
    }
    let h = f.spacing;
    let h3 = h * h * h;
    let near = f.nearest_node(x);
    let mut sum = 0.0;
    for k in 0..f.dims[2] {
        for j in 0..f.dims[1] {
            for i in 0..f.dims[0] {
                let idx = [i, j, k];
                let val = f.value(idx);
                if val == 0.0 || idx == near {
                    continue;
                }
                sum += h3 * val * green_unchecked(&(*x - f.node(idx)), v, g);
            }
        }
    }
    let val = f.value(near);
    if val != 0.0 {
        sum += val * singular_cell_integral(&f.node(near), h, x, v)?;
    }
    Ok(sum)
}

/// Straight worldline x^μ(s) = x^μ + (s − x⁰)(1, v⃗) for s ∈ [t_start, t_end].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Worldline {
    pub base: FourVector,
    pub velocity: Vec3,
    pub t_start: f64,
    pub t_end: f64,
}

impl Worldline {
    pub fn new(base: FourVector, velocity: Vec3, t_start: f64, t_end: f64) -> Result<Self> {
        gamma(&velocity)?;
        Ok(Self {
            base,
            velocity,
            t_start,
            t_end,
        })
    }

    pub fn point(&self, s: f64) -> FourVector {
        self.base + FourVector::from_parts(1.0, &self.velocity) * (s - self.base.t)
    }
}

/// Composite Simpson rule for `∫ field(x(s)) ds` over the worldline range.
/// An odd `n_steps` is rounded up to the next even count.
pub fn worldline_integral(field: impl Fn(f64, &Vec3) -> f64, w: &Worldline, n_steps: usize) -> Result<f64> {
    if n_steps < 2 {
        return Err(Error::invalid("n_steps", "must be >= 2"));
    }
    let n = n_steps + n_steps % 2;
    let ds = (w.t_end - w.t_start) / n as f64;
    let eval = |i: usize| {
        let s = w.t_start + i as f64 * ds;
        let p = w.point(s);
        field(p.t, &p.space())
    };
    let mut sum = eval(0) + eval(n);
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * eval(i);
    }
    Ok(sum * ds / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const COULOMB: f64 = 1.0 / (4.0 * PI);

    #[test]
    fn green_closed_forms() {
        assert!((green_g(&Vec3::x(), &Vec3::zeros()).unwrap() + COULOMB).abs() < 1e-15);
        assert!((COULOMB - 0.0795775).abs() < 1e-7);
        let v = Vec3::new(0.0, 0.0, 0.8);
        assert!((green_g(&Vec3::z(), &v).unwrap() + COULOMB).abs() < 1e-15);
        let g = 1.0 / (1.0f64 - 0.64).sqrt();
        assert!((green_g(&Vec3::x(), &v).unwrap() + g * COULOMB).abs() < 1e-15);
        let x0 = Vec3::new(0.3, -0.2, 0.7);
        assert!((green_g(&(2.0 * x0), &v).unwrap() - green_g(&x0, &v).unwrap() / 2.0).abs() < 1e-15);
        assert!(green_g(&Vec3::zeros(), &v).is_err());
        assert!(green_g(&Vec3::x(), &Vec3::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn green_bounds_and_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let v = Vec3::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            );
            let val = green_g(&x, &v).unwrap();
            let g = gamma(&v).unwrap();
            assert!(val < 0.0);
            assert!(val <= -COULOMB / (g * x.norm()) * (1.0 - 1e-12));
            assert!(val >= -g * COULOMB / x.norm() * (1.0 + 1e-12));
            let axis = nalgebra::Unit::new_normalize(Vec3::new(0.3, 1.0, -0.5));
            let rot = nalgebra::Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..6.0));
            let rotated = green_g(&(rot * x), &(rot * v)).unwrap();
            assert!((rotated - val).abs() < 1e-12);
        }
    }

    #[test]
    fn coulomb_cell_average_matches_closed_form() {
        // ∫_{unit cube} 1/r = 3 ln(2 + √3) − π/2
        let exact = -(3.0 * (2.0 + 3f64.sqrt()).ln() - PI / 2.0) / (4.0 * PI);
        let got = singular_cell_integral(&Vec3::zeros(), 1.0, &Vec3::zeros(), &Vec3::zeros()).unwrap();
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
        // scales as h²
        let got2 = singular_cell_integral(&Vec3::zeros(), 0.5, &Vec3::zeros(), &Vec3::zeros()).unwrap();
        assert!((got2 - exact * 0.25).abs() < 1e-10);
    }

    #[test]
    fn convolution_trivial_cases() {
        let zero = ScalarFieldSample::new([0.0; 3], 0.5, [4, 4, 4], vec![0.0; 64]).unwrap();
        assert_eq!(
            inverse_gdot_apply(&zero, &Vec3::zeros(), &Vec3::new(0.5, 0.5, 0.5)).unwrap(),
            0.0
        );
        assert!(inverse_gdot_apply(&zero, &Vec3::zeros(), &Vec3::new(5.0, 0.5, 0.5)).is_err());
        assert!(ScalarFieldSample::new([0.0; 3], 0.0, [1, 1, 1], vec![0.0]).is_err());
        assert!(ScalarFieldSample::new([0.0; 3], 1.0, [2, 1, 1], vec![0.0]).is_err());
    }

    #[test]
    fn convolution_point_source() {
        let h = 0.25;
        let mut vals = vec![0.0; 9 * 9 * 9];
        let s = ScalarFieldSample::new([0.0; 3], h, [9, 9, 9], vals.clone()).unwrap();
        let src = [1usize, 1, 1];
        vals[s.index(src)] = 1.0;
        let f = ScalarFieldSample::new([0.0; 3], h, [9, 9, 9], vals).unwrap();
        let x = f.node([8, 7, 6]);
        let d = (x - f.node(src)).norm();
        let got = inverse_gdot_apply(&f, &Vec3::zeros(), &x).unwrap();
        let expect = -h * h * h / (4.0 * PI * d);
        assert!(((got - expect) / expect).abs() < h * h / (d * d));
    }

    #[test]
    fn convolution_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dims = [6, 5, 4];
        let n: usize = dims.iter().product();
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (alpha, beta) = (0.7, -1.3);
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let mk = |v: Vec<f64>| ScalarFieldSample::new([0.0; 3], 0.3, dims, v).unwrap();
        let (fa, fb, fc) = (mk(a), mk(b), mk(c));
        let v = Vec3::new(0.2, -0.4, 0.1);
        let x = Vec3::new(0.55, 0.61, 0.4);
        let lhs = inverse_gdot_apply(&fc, &v, &x).unwrap();
        let rhs = alpha * inverse_gdot_apply(&fa, &v, &x).unwrap() + beta * inverse_gdot_apply(&fb, &v, &x).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn worldline_parameterization_and_integrals() {
        let base = FourVector::new(0.5, 1.0, 2.0, 3.0);
        let w = Worldline::new(base, Vec3::new(0.1, 0.0, -0.2), 0.0, 2.0).unwrap();
        assert_eq!(w.point(0.5), base);
        assert!((worldline_integral(|_, _| 1.0, &w, 2).unwrap() - 2.0).abs() < 1e-15);
        // linear in s: exact midpoint value × length
        let lin = worldline_integral(|t, x| 3.0 * t + x.z, &w, 7).unwrap();
        let mid = w.point(1.0);
        assert!((lin - 2.0 * (3.0 * mid.t + mid.z)).abs() < 1e-13);
        let w = Worldline::new(
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            Vec3::zeros(),
            1.0,
            std::f64::consts::E,
        )
        .unwrap();
        let log = worldline_integral(|t, _| 1.0 / t, &w, 10_000).unwrap();
        assert!((log - 1.0).abs() < 1e-8);
        assert!(worldline_integral(|_, _| 1.0, &w, 1).is_err());
    }
}
