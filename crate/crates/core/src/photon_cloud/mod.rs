//! Coherent soft-photon cloud of the asymptotic two-charge state.
//!
//! Each photon mode `k` carries the classical amplitude
//!
//! ```text
//! f^μ(k) = e/((2π)^{3/2} √(2k⁰)) Σ_j η_j p_j^μ/(p_j·k) · e^{i (k·p_j) t / p_j⁰}
//! ```
//!
//! The photon-number observable uses the two transverse polarizations of the
//! frame where η = (1, 0⃗), so `Σ_pol |ε·f|² = |f⃗|² − |n̂·f⃗|²`.

pub mod fock;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{FourVector, Particle, Vec3};
use crate::soft_integrals::{QuadratureSpec, Regulators, SphereRule};

pub use fock::{fock_displacement_sim, hadamard_phase_sim, FockMode, FockState};

/// Tolerance on |k·k|/(k⁰)² for accepting a photon momentum as null.
const NULL_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudSpec {
    pub particles: Vec<Particle>,
    pub t: f64,
    pub e2: f64,
}

impl CloudSpec {
    pub fn new(particles: Vec<Particle>, t: f64, e2: f64) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::invalid("particles", "cloud needs at least one charge"));
        }
        if !(e2 > 0.0) || !e2.is_finite() {
            return Err(Error::invalid("e2", "coupling must be positive"));
        }
        if !t.is_finite() {
            return Err(Error::invalid("t", "must be finite"));
        }
        Ok(Self { particles, t, e2 })
    }
}

/// Complex four-vector amplitude of one photon mode.
pub type ComplexFourVector = [Complex64; 4];

pub fn cloud_amplitude(spec: &CloudSpec, k: &FourVector) -> Result<ComplexFourVector> {
    if !(k.t > 0.0) {
        return Err(Error::invalid("k", "photon energy must be positive"));
    }
    if k.norm_sq().abs() > NULL_RTOL * k.t * k.t {
        return Err(Error::invalid("k", "photon momentum is not null"));
    }
    let norm = spec.e2.sqrt() / ((2.0 * PI).powf(1.5) * (2.0 * k.t).sqrt());
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for p in &spec.particles {
        let mom = p.momentum();
        let pk = mom.dot(k);
        let phase = Complex64::from_polar(1.0, pk * spec.t / mom.t);
        let weight = phase * (p.charge() * norm / pk);
        for (o, c) in out.iter_mut().zip(mom.to_array()) {
            *o += weight * c;
        }
    }
    Ok(out)
}

/// Σ_pol |ε·J|² for the degree-0 current J⃗ = Σ_j η_j v⃗_j/(1 − v⃗_j·n̂).
pub fn transverse_density(particles: &[Particle], n: &Vec3) -> f64 {
    let j: Vec3 = particles
        .iter()
        .map(|p| p.velocity * (p.charge() / (1.0 - p.velocity.dot(n))))
        .sum();
    j.norm_squared() - j.dot(n).powi(2)
}

/// d⟨N⟩/d ln(Δ/λ) = e²/(2(2π)³) ∮ Σ_pol|ε·J|² dΩ.
pub fn cloud_log_coefficient_with(spec: &CloudSpec, rule: &SphereRule) -> f64 {
    let angular = rule.integrate(|n| transverse_density(&spec.particles, n));
    spec.e2 * angular / (2.0 * (2.0 * PI).powi(3))
}

pub fn cloud_log_coefficient(spec: &CloudSpec, quad: &QuadratureSpec) -> Result<f64> {
    Ok(cloud_log_coefficient_with(spec, &quad.build()?))
}

/// Expected soft-photon number in λ ≤ |k⃗| ≤ Δ.
///
/// The time-dependent mode phases are dropped (t = 0); a single charge's
/// number is t-independent regardless.
pub fn expected_photon_number(spec: &CloudSpec, reg: &Regulators, quad: &QuadratureSpec) -> Result<f64> {
    let reg = Regulators::new(reg.lambda, reg.delta)?;
    Ok(cloud_log_coefficient(spec, quad)? * reg.log_ratio())
}

/// |⟨0|cloud⟩| = e^{−⟨N⟩/2}
pub fn vacuum_overlap(n_expected: f64) -> Result<f64> {
    if !(n_expected >= 0.0) {
        return Err(Error::invalid("n_expected", "must be non-negative"));
    }
    Ok((-n_expected / 2.0).exp())
}
