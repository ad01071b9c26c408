//! Soft-photon virtual correction factors of dressed two-charge amplitudes.
//!
//! Every soft loop is evaluated with sharp momentum cutoffs `λ ≤ |k⃗| ≤ Δ`
//! and massless photons. In the eikonal region each vertex factor is
//! homogeneous of degree −1 in the photon energy, so a loop factorizes into
//! an angular coefficient times `ln(Δ/λ)`. Angular coefficients use the
//! Feynman-gauge contraction
//!
//! ```text
//! c_AB = (1/4π) ∮ dΩ (−g_{μν}) A^μ(n̂) B^ν(n̂)
//! ```
//!
//! with the degree-0 vertex vectors written in terms of `w = (1, v⃗)`,
//! `w̄ = (1, −v⃗)` and the null direction `κ̂ = (1, n̂)`:
//!
//! * eikonal: `E = w / (w·κ̂)`
//! * dressing: `Ṽ = V / (V·κ̂)` with `V = w (w̄·κ̂) − κ̂`, `V·κ̂ = (w·κ̂)(w̄·κ̂)`
//!
//! When the dressing velocity equals the particle velocity, `E − Ṽ` is
//! proportional to `κ̂` itself, so the combined current is null at every
//! direction and the assembled exponent `F` carries no `ln λ` dependence.

pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{check_velocity, FourVector, Particle, Vec3};
pub use quadrature::{QuadratureSpec, SphereRule};

/// Convention constant: exponent = e²·κ₀·coefficient·ln(Δ/λ).
pub const KAPPA0: f64 = -1.0 / (16.0 * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    Eikonal,
    Dressing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    pub velocity: Vec3,
}

impl Vertex {
    pub fn eikonal(velocity: Vec3) -> Result<Self> {
        check_velocity(&velocity)?;
        Ok(Self {
            kind: VertexKind::Eikonal,
            velocity,
        })
    }

    pub fn dressing(velocity: Vec3) -> Result<Self> {
        check_velocity(&velocity)?;
        Ok(Self {
            kind: VertexKind::Dressing,
            velocity,
        })
    }

    pub fn factor(&self, n: &Vec3) -> FourVector {
        match self.kind {
            VertexKind::Eikonal => eikonal_factor(&self.velocity, n),
            VertexKind::Dressing => dressing_vertex_factor(&self.velocity, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regulators {
    pub lambda: f64,
    pub delta: f64,
}

impl Regulators {
    /// `λ = Δ` is accepted as the empty momentum shell (all exponents zero).
    pub fn new(lambda: f64, delta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", "must be positive"));
        }
        if !delta.is_finite() || lambda > delta {
            return Err(Error::invalid(
                "lambda",
                format!("lambda {lambda} exceeds delta {delta}"),
            ));
        }
        Ok(Self { lambda, delta })
    }

    /// ln(Δ/λ)
    pub fn log_ratio(&self) -> f64 {
        (self.delta / self.lambda).ln()
    }
}

/// Angular (log-cutoff) coefficients of every soft exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftFactorBreakdown {
    pub c_d: f64,
    pub c_c_cross: f64,
    pub c_c_self_1: f64,
    pub c_c_self_2: f64,
    pub c_g_1: f64,
    pub c_g_2: f64,
    pub c_f: f64,
}

impl SoftFactorBreakdown {
    fn assemble(c_d: f64, c_c_cross: f64, c_c_self_1: f64, c_c_self_2: f64, c_g_1: f64, c_g_2: f64) -> Self {
        let c_f = Self::assembled_f(c_d, c_c_cross, c_c_self_1, c_c_self_2, c_g_1, c_g_2);
        Self {
            c_d,
            c_c_cross,
            c_c_self_1,
            c_c_self_2,
            c_g_1,
            c_g_2,
            c_f,
        }
    }

    fn assembled_f(d: f64, cross: f64, s1: f64, s2: f64, g1: f64, g2: f64) -> f64 {
        d + cross + (s1 + s2) / 2.0 + g1 + g2
    }

    /// C = C_{v1v2} + (C_{v1v1} + C_{v2v2})/2
    pub fn c_c(&self) -> f64 {
        self.c_c_cross + (self.c_c_self_1 + self.c_c_self_2) / 2.0
    }

    /// Exact re-check of the assembly identity.
    pub fn assembly_holds(&self) -> bool {
        self.c_f
            == Self::assembled_f(
                self.c_d,
                self.c_c_cross,
                self.c_c_self_1,
                self.c_c_self_2,
                self.c_g_1,
                self.c_g_2,
            )
    }
}

/// Exponents at given regulators and coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub d: f64,
    pub c: f64,
    pub g1: f64,
    pub g2: f64,
    pub f: f64,
}

/// `(1, v⃗)/(1 − v⃗·n̂)`
pub fn eikonal_factor(v: &Vec3, n: &Vec3) -> FourVector {
    FourVector::from_parts(1.0, v) * (1.0 / (1.0 - v.dot(n)))
}

/// `V/(V·κ̂)` with `V = w(w̄·κ̂) − κ̂`.
pub fn dressing_vertex_factor(v: &Vec3, n: &Vec3) -> FourVector {
    let vn = v.dot(n);
    let w_k = 1.0 - vn;
    let wbar_k = 1.0 + vn;
    let big_v = FourVector::from_parts(1.0, v) * wbar_k - FourVector::null(n);
    big_v * (1.0 / (w_k * wbar_k))
}

/// Angular pair coefficient c_AB.
pub fn pair_coefficient(a: &Vertex, b: &Vertex, quad: &QuadratureSpec) -> Result<f64> {
    let rule = quad.build()?;
    Ok(pair_coefficient_with(a, b, &rule))
}

pub fn pair_coefficient_with(a: &Vertex, b: &Vertex, rule: &SphereRule) -> f64 {
    rule.integrate(|n| -a.factor(n).dot(&b.factor(n))) / (4.0 * PI)
}

/// Per-node (−g) contractions: ee11, ee22, ee12, dd11, dd22, dd12, ed11, ed12, ed21, ed22
/// where ed_ij = (−g)E_i·Ṽ_j.
fn node_contractions(v1: &Vec3, v2: &Vec3, dv1: &Vec3, dv2: &Vec3, n: &Vec3) -> [f64; 10] {
    let e1 = eikonal_factor(v1, n);
    let e2 = eikonal_factor(v2, n);
    let d1 = dressing_vertex_factor(dv1, n);
    let d2 = dressing_vertex_factor(dv2, n);
    [
        -e1.dot(&e1),
        -e2.dot(&e2),
        -e1.dot(&e2),
        -d1.dot(&d1),
        -d2.dot(&d2),
        -d1.dot(&d2),
        -e1.dot(&d1),
        -e1.dot(&d2),
        -e2.dot(&d1),
        -e2.dot(&d2),
    ]
}

/// Angular coefficients for two charges with (possibly off-shell) dressing
/// velocities. Node contributions may be computed on any number of threads;
/// the reduction runs sequentially in node order so results are
/// bit-identical for any worker count.
pub fn soft_breakdown(
    p1: &Particle,
    p2: &Particle,
    dressing_v1: &Vec3,
    dressing_v2: &Vec3,
    quad: &QuadratureSpec,
) -> Result<SoftFactorBreakdown> {
    let rule = quad.build()?;
    soft_breakdown_with(p1, p2, dressing_v1, dressing_v2, &rule)
}

pub fn soft_breakdown_with(
    p1: &Particle,
    p2: &Particle,
    dressing_v1: &Vec3,
    dressing_v2: &Vec3,
    rule: &SphereRule,
) -> Result<SoftFactorBreakdown> {
    check_velocity(dressing_v1)?;
    check_velocity(dressing_v2)?;
    let (v1, v2) = (p1.velocity, p2.velocity);
    let per_node: Vec<[f64; 10]> = rule
        .nodes
        .par_iter()
        .map(|node| {
            let mut c = node_contractions(&v1, &v2, dressing_v1, dressing_v2, &node.direction);
            for x in &mut c {
                *x *= node.weight;
            }
            c
        })
        .collect();
    let mut acc = [0.0; 10];
    for c in &per_node {
        for (a, x) in acc.iter_mut().zip(c) {
            *a += x;
        }
    }
    let [ee11, ee22, ee12, dd11, dd22, dd12, ed11, ed12, ed21, ed22] = acc.map(|x| x / (4.0 * PI));
    let s12 = p1.charge() * p2.charge();
    let c_d = 0.5 * (ee11 + ee22) + s12 * ee12;
    let c_c_cross = s12 * dd12;
    let c_g_1 = -(ed11 + s12 * ed21);
    let c_g_2 = -(ed22 + s12 * ed12);
    Ok(SoftFactorBreakdown::assemble(c_d, c_c_cross, dd11, dd22, c_g_1, c_g_2))
}

/// Combined current Σᵢ ηᵢ (Eᵢ − Ṽᵢ) at direction `n`.
pub fn combined_current(p1: &Particle, p2: &Particle, dressing_v1: &Vec3, dressing_v2: &Vec3, n: &Vec3) -> FourVector {
    let j1 = eikonal_factor(&p1.velocity, n) - dressing_vertex_factor(dressing_v1, n);
    let j2 = eikonal_factor(&p2.velocity, n) - dressing_vertex_factor(dressing_v2, n);
    j1 * p1.charge() + j2 * p2.charge()
}

/// max over nodes of |(−g) J·J| for the combined current.
pub fn null_projection_max(
    p1: &Particle,
    p2: &Particle,
    dressing_v1: &Vec3,
    dressing_v2: &Vec3,
    rule: &SphereRule,
) -> f64 {
    rule.nodes
        .iter()
        .map(|node| {
            let j = combined_current(p1, p2, dressing_v1, dressing_v2, &node.direction);
            j.dot(&j).abs()
        })
        .fold(0.0, f64::max)
}

/// c_F integrated directly from the combined current:
/// (1/2)(1/4π)∮(−g)J·J.
pub fn combined_coefficient(
    p1: &Particle,
    p2: &Particle,
    dressing_v1: &Vec3,
    dressing_v2: &Vec3,
    rule: &SphereRule,
) -> f64 {
    0.5 * rule.integrate(|n| {
        let j = combined_current(p1, p2, dressing_v1, dressing_v2, n);
        -j.dot(&j)
    }) / (4.0 * PI)
}

pub fn exponent_at(b: &SoftFactorBreakdown, reg: &Regulators, e2: f64) -> Result<Exponents> {
    let reg = Regulators::new(reg.lambda, reg.delta)?;
    let scale = e2 * KAPPA0 * reg.log_ratio();
    Ok(Exponents {
        d: scale * b.c_d,
        c: scale * b.c_c(),
        g1: scale * b.c_g_1,
        g2: scale * b.c_g_2,
        f: scale * b.c_f,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub exp_d: f64,
    pub exp_c: f64,
    pub exp_f: f64,
    pub exponents: Exponents,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSetup<'a> {
    pub p1: &'a Particle,
    pub p2: &'a Particle,
    pub dressing_v1: &'a Vec3,
    pub dressing_v2: &'a Vec3,
    pub quad: &'a QuadratureSpec,
    pub delta: f64,
    pub e2: f64,
}

/// One row per λ (in grid order) of e^D, e^C and e^F.
///
/// `workers` sizes a dedicated thread pool; output is identical for any
/// value.
pub fn regulator_scan(setup: &ScanSetup<'_>, lambdas: &[f64], workers: usize) -> Result<Vec<ScanRow>> {
    for &l in lambdas {
        if !(l > 0.0 && l < setup.delta) {
            return Err(Error::invalid(
                "lambda",
                format!("{l} not strictly inside (0, {})", setup.delta),
            ));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| {
        let b = soft_breakdown(setup.p1, setup.p2, setup.dressing_v1, setup.dressing_v2, setup.quad)?;
        lambdas
            .par_iter()
            .map(|&lambda| {
                let x = exponent_at(&b, &Regulators::new(lambda, setup.delta)?, setup.e2)?;
                Ok(ScanRow {
                    lambda,
                    exp_d: x.d.exp(),
                    exp_c: x.c.exp(),
                    exp_f: x.f.exp(),
                    exponents: x,
                })
            })
            .collect()
    })
}

/// e^{ie²ζ}·e^F
pub fn dressed_amplitude_factor(f_exponent: f64, zeta: f64, e2: f64) -> Complex64 {
    Complex64::from_polar(f_exponent.exp(), e2 * zeta)
}

/// Shrinks the speed of `v` by `delta`; a zero velocity is pushed to δ·ẑ.
pub fn perturb_speed(v: &Vec3, delta: f64) -> Vec3 {
    let s = v.norm();
    if s == 0.0 {
        Vec3::new(0.0, 0.0, delta)
    } else {
        v * ((s - delta) / s)
    }
}
