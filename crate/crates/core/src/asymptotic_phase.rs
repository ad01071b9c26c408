//! C-number kernels of the asymptotic (Coulomb) phase.
//!
//! The phase operator of the asymptotic picture contributes, per pair of
//! charges and per unit e², a kernel `p·q / (8π √((p·q)² − m⁴))` times the
//! regulator factor `sign(t)·ln(|t|/t′)`. For a two-charge state only the
//! cross terms of the normal-ordered double sum survive, and they collapse to
//! `(1/4π)·u_r⁻¹` with `u_r` the relative speed. All divergence as `t → ∞`
//! lives in the explicit log factor, never inside a kernel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{common_mass_sq, relative_speed, FourVector, Particle};

pub const DEFAULT_SPEED_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    /// Relative speeds below this are rejected (comoving charges).
    pub speed_floor: f64,
    /// Multiply the two-particle coefficient by η₁η₂. Off by default, which
    /// is the two-particle (b†b†) state.
    pub include_charge_signs: bool,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            speed_floor: DEFAULT_SPEED_FLOOR,
            include_charge_signs: false,
        }
    }
}

/// Kernel of the phase operator for one ordered momentum pair, per unit e²
/// and per unit log factor.
pub fn phase_kernel(p: &FourVector, q: &FourVector) -> Result<f64> {
    let m2 = common_mass_sq(p, q)?;
    let pq = p.dot(q);
    let disc = pq * pq - m2 * m2;
    if !(pq > m2) || !(disc > 0.0) {
        return Err(Error::DegeneratePair { dot: pq, m2 });
    }
    Ok(pq / (8.0 * PI * disc.sqrt()))
}

/// `(1/4π)·u_r⁻¹`, rejecting relative speeds below `floor`.
pub fn two_particle_phase_coefficient(p1: &FourVector, p2: &FourVector, floor: f64) -> Result<f64> {
    let u = relative_speed(p1, p2)?;
    if !(u >= floor) || u == 0.0 {
        return Err(Error::BelowFloor { speed: u, floor });
    }
    Ok(1.0 / (4.0 * PI * u))
}

/// `sign(t)·ln(|t|/t_ref)`.
pub fn phase_log(t: f64, t_ref: f64) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::invalid("t", "must be finite and non-zero"));
    }
    if !(t_ref > 0.0) || !t_ref.is_finite() {
        return Err(Error::invalid("t_ref", "must be positive"));
    }
    Ok(t.signum() * (t.abs() / t_ref).ln())
}

/// `|2·kernel − (1/4π)u_r⁻¹|`; the two must agree since the normal-ordered
/// sum over a two-charge state counts the cross term twice.
pub fn kernel_consistency_residual(p1: &FourVector, p2: &FourVector) -> Result<f64> {
    let k = phase_kernel(p1, p2)?;
    let c = two_particle_phase_coefficient(p1, p2, 0.0)?;
    Ok((2.0 * k - c).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub kernel: f64,
    pub two_particle_coefficient: f64,
    pub log_factor: f64,
    /// Finite residual phase ζ(u_r), supplied by configuration.
    pub zeta: f64,
    /// Continuum κ slot, supplied by configuration.
    pub kappa: f64,
    pub relative_speed: f64,
}

impl PhaseRecord {
    /// Divergent asymptotic phase e²·φ = e²·coefficient·log_factor.
    pub fn asymptotic_phase(&self, e2: f64) -> f64 {
        e2 * self.two_particle_coefficient * self.log_factor
    }
}

/// Full phase bookkeeping for a particle pair at time `t`.
pub fn phase_record(
    a: &Particle,
    b: &Particle,
    t: f64,
    t_ref: f64,
    zeta: f64,
    kappa: f64,
    opts: &PhaseOptions,
) -> Result<PhaseRecord> {
    let (p, q) = (a.momentum(), b.momentum());
    let u = relative_speed(&p, &q)?;
    let mut coefficient = two_particle_phase_coefficient(&p, &q, opts.speed_floor)?;
    let mut kernel = phase_kernel(&p, &q)?;
    if opts.include_charge_signs {
        let s = a.charge() * b.charge();
        coefficient *= s;
        kernel *= s;
    }
    Ok(PhaseRecord {
        kernel,
        two_particle_coefficient: coefficient,
        log_factor: phase_log(t, t_ref)?,
        zeta,
        kappa,
        relative_speed: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{make_on_shell, Vec3};
    use std::f64::consts::E;

    fn pair(v: f64, m: f64) -> (FourVector, FourVector) {
        (
            make_on_shell(m, &Vec3::new(0.0, 0.0, v)).unwrap(),
            make_on_shell(m, &Vec3::new(0.0, 0.0, -v)).unwrap(),
        )
    }

    #[test]
    fn kernel_closed_form() {
        let (p, q) = pair(0.5, 1.0);
        let k = phase_kernel(&p, &q).unwrap();
        assert!((k - 5.0 / (32.0 * PI)).abs() < 1e-15);
        assert!((k - 0.049736).abs() < 1e-6);
        assert_eq!(k, phase_kernel(&q, &p).unwrap());
        let (p2, q2) = pair(0.5, 2.0);
        assert!((phase_kernel(&p2, &q2).unwrap() - k).abs() < 1e-15);
    }

    #[test]
    fn coefficient_values() {
        let (p, q) = pair(0.5, 1.0);
        let c = two_particle_phase_coefficient(&p, &q, DEFAULT_SPEED_FLOOR).unwrap();
        assert!((c - 1.0 / (3.2 * PI)).abs() < 1e-15);
        let (p, q) = pair(0.999999, 1.0);
        let c = two_particle_phase_coefficient(&p, &q, DEFAULT_SPEED_FLOOR).unwrap();
        assert!((c - 1.0 / (4.0 * PI)).abs() < 1e-9);
        assert!(kernel_consistency_residual(&pair(0.5, 1.0).0, &pair(0.5, 1.0).1).unwrap() < 1e-14);
    }

    #[test]
    fn floor_and_degenerate_rejections() {
        let p = make_on_shell(1.0, &Vec3::new(0.0, 0.0, 0.3)).unwrap();
        assert!(matches!(
            two_particle_phase_coefficient(&p, &p, DEFAULT_SPEED_FLOOR),
            Err(Error::BelowFloor { .. })
        ));
        assert!(matches!(phase_kernel(&p, &p), Err(Error::DegeneratePair { .. })));
        let q = make_on_shell(1.0, &Vec3::new(0.0, 0.0, 0.3 + 1e-8)).unwrap();
        assert!(two_particle_phase_coefficient(&p, &q, 1e-6).is_err());
    }

    #[test]
    fn near_comoving_limit_both_sides_diverge_together() {
        let mut last = 0.0;
        for d in [1e-1, 1e-2, 1e-3, 1e-4] {
            let p = make_on_shell(1.0, &Vec3::new(0.0, 0.0, 0.2)).unwrap();
            let q = make_on_shell(1.0, &Vec3::new(0.0, d, 0.2)).unwrap();
            let k = phase_kernel(&p, &q).unwrap();
            let c = two_particle_phase_coefficient(&p, &q, 0.0).unwrap();
            assert!(c > last);
            last = c;
            assert!((2.0 * k / c - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn log_factor() {
        assert_eq!(phase_log(2.0, 2.0).unwrap(), 0.0);
        assert!((phase_log(E * 3.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((phase_log(-E * 3.0, 3.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(phase_log(0.0, 1.0).is_err());
        assert!(phase_log(1.0, 0.0).is_err());
        assert!(phase_log(1.0, -1.0).is_err());
    }

    #[test]
    fn record_with_charge_signs() {
        let a = Particle::new(1.0, 1, Vec3::new(0.0, 0.0, 0.5)).unwrap();
        let b = Particle::new(1.0, -1, Vec3::new(0.0, 0.0, -0.5)).unwrap();
        let plain = phase_record(&a, &b, E, 1.0, 0.1, 0.0, &PhaseOptions::default()).unwrap();
        assert!(plain.two_particle_coefficient > 0.0);
        let signed = phase_record(
            &a,
            &b,
            E,
            1.0,
            0.1,
            0.0,
            &PhaseOptions {
                include_charge_signs: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(signed.two_particle_coefficient, -plain.two_particle_coefficient);
        assert!((plain.asymptotic_phase(2.0) - 2.0 / (3.2 * PI)).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn log_antisymmetric_and_additive(t in 1e-3f64..1e3, tr in 1e-2f64..1e2, c in 1e-2f64..1e2) {
            let a = phase_log(t, tr).unwrap();
            proptest::prop_assert!((phase_log(-t, tr).unwrap() + a).abs() < 1e-12);
            proptest::prop_assert!((phase_log(c * t, tr).unwrap() - a - c.ln()).abs() < 1e-12);
        }
    }
}
