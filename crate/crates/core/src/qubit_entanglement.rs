//! Spin density matrices of two dressed charged qubits.
//!
//! The finite soft factor enters the two-particle density matrix as a global
//! `e^{2F}`. Entropies are computed from Hermitian eigenvalues with
//! `0·ln 0 := 0`, natural log. The signed-trace convention is `Tr(ρ ln ρ)`
//! (no minus sign); "standard" is the von Neumann `−Tr(ρ ln ρ)`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
/// Allowed mismatch between a supplied trace and the normalization mode.
pub const MODE_TRACE_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes φ_{σ₁σ₂}, index 0 = ↑, 1 = ↓.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinAmplitude {
    pub phi: [[Complex64; 2]; 2],
    /// CoM relative velocity and angle (v, θ) labelling the configuration.
    pub tag: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatePreset {
    Singlet,
    Triplet,
    Product,
}

impl SpinAmplitude {
    pub fn new(phi: [[Complex64; 2]; 2]) -> Result<Self> {
        if phi.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("phi", "non-finite amplitude"));
        }
        Ok(Self { phi, tag: None })
    }

    /// Amplitudes in the order (↑↑, ↑↓, ↓↑, ↓↓).
    pub fn from_flat(a: [Complex64; 4]) -> Result<Self> {
        Self::new([[a[0], a[1]], [a[2], a[3]]])
    }

    pub fn preset(p: StatePreset) -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let phi = match p {
            StatePreset::Singlet => [[ZERO, h], [-h, ZERO]],
            StatePreset::Triplet => [[ZERO, h], [h, ZERO]],
            StatePreset::Product => [[one, ZERO], [ZERO, ZERO]],
        };
        Self { phi, tag: None }
    }

    pub fn with_tag(mut self, v: f64, theta: f64) -> Self {
        self.tag = Some((v, theta));
        self
    }

    pub fn flat(&self) -> [Complex64; 4] {
        [self.phi[0][0], self.phi[0][1], self.phi[1][0], self.phi[1][1]]
    }

    /// Σ|φ|²
    pub fn weight(&self) -> f64 {
        self.flat().iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Hermitian positive-semidefinite matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    trace: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity and positivity and records the trace.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim || (dim != 2 && dim != 4) {
            return Err(Error::invalid(
                "rho",
                format!("expected 2x2 or 4x4, got {}x{}", dim, entries.ncols()),
            ));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("rho", "non-finite entry"));
        }
        let herm = (&entries - entries.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let scale = entries.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if herm > HERMITIAN_TOL * scale {
            return Err(Error::Contract(format!(
                "matrix is not Hermitian (deviation {herm:.3e})"
            )));
        }
        let m = Self {
            trace: entries.trace().re,
            entries,
        };
        let min = m.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL * scale {
            return Err(Error::Contract(format!(
                "matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        // symmetrize so round-off asymmetry cannot leak into the solver
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.entries * Complex64::new(c, 0.0))
    }

    /// ρ / Tr ρ
    pub fn normalized(&self) -> Result<Self> {
        if !(self.trace > 0.0) {
            return Err(Error::invalid("rho", "cannot normalize a zero-trace matrix"));
        }
        self.scaled(1.0 / self.trace)
    }

    /// Purity Tr ρ² of the normalized state.
    pub fn purity(&self) -> Result<f64> {
        let n = self.normalized()?;
        Ok((n.entries() * n.entries()).trace().re)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// ρ^d = e^{2F} φ·φ† on the 4-dimensional two-spin space.
pub fn density_from_amplitude(a: &SpinAmplitude, f: f64) -> Result<DensityMatrix> {
    let v = nalgebra::DVector::from_row_slice(&a.flat());
    let rho = &v * v.adjoint() * Complex64::new((2.0 * f).exp(), 0.0);
    DensityMatrix::new(rho)
}

/// Partial trace over particle 2.
pub fn reduce_particle1(rho4: &DensityMatrix) -> Result<DensityMatrix> {
    if rho4.dim() != 4 {
        return Err(Error::invalid(
            "rho4",
            format!("expected a 4x4 matrix, got {}x{0}", rho4.dim()),
        ));
    }
    let r = rho4.entries();
    let out = DMatrix::from_fn(2, 2, |s1, s1p| (0..2).map(|s| r[(2 * s1 + s, 2 * s1p + s)]).sum());
    DensityMatrix::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyConvention {
    /// Tr(ρ ln ρ)
    SignedTrace,
    /// −Tr(ρ ln ρ)
    Standard,
}

pub fn entropy_trace(rho: &DensityMatrix, convention: EntropyConvention) -> f64 {
    let t: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| l * l.ln())
        .sum();
    match convention {
        EntropyConvention::SignedTrace => t,
        EntropyConvention::Standard => -t,
    }
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}

/// |Tr(e^{2F}ρ ln e^{2F}ρ) − e^{2F}(Tr(ρ ln ρ) + 2F·Tr ρ)|
pub fn dressed_entropy_identity_check(rho: &DensityMatrix, f: f64) -> Result<f64> {
    let c = (2.0 * f).exp();
    let lhs = entropy_trace(&rho.scaled(c)?, EntropyConvention::SignedTrace);
    let rhs = c * (entropy_trace(rho, EntropyConvention::SignedTrace) + 2.0 * f * rho.trace());
    Ok((lhs - rhs).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Tr ρ = 1
    BareNormalized,
    /// Tr ρ^d = e^{2F} Tr ρ = 1
    DressedNormalized,
}

/// Dressed entropy under one of the two normalization readings.
pub fn dressed_entropy(s: f64, f: f64, trace_rho: f64, mode: NormalizationMode) -> Result<f64> {
    let c = (2.0 * f).exp();
    match mode {
        NormalizationMode::BareNormalized => {
            if (trace_rho - 1.0).abs() > MODE_TRACE_TOL {
                return Err(Error::invalid(
                    "trace_rho",
                    format!("bare-normalized mode needs Tr rho = 1, got {trace_rho}"),
                ));
            }
            Ok(c * (s + 2.0 * f))
        }
        NormalizationMode::DressedNormalized => {
            if (c * trace_rho - 1.0).abs() > MODE_TRACE_TOL {
                return Err(Error::invalid(
                    "trace_rho",
                    format!("dressed-normalized mode needs e^(2F) Tr rho = 1, got {}", c * trace_rho),
                ));
            }
            Ok(c * s + 2.0 * f)
        }
    }
}

/// Normalized reduced state of particle 1 from the dressed two-particle matrix.
pub fn normalized_reduced(rho4: &DensityMatrix, f: f64) -> Result<DensityMatrix> {
    if !(rho4.trace() > 0.0) {
        return Err(Error::invalid("rho4", "zero trace"));
    }
    reduce_particle1(&rho4.scaled((2.0 * f).exp())?)?.normalized()
}

/// Standard von Neumann entropy of the normalized dressed reduced state.
pub fn normalized_entanglement(rho4: &DensityMatrix, f: f64) -> Result<f64> {
    Ok(entropy_trace(
        &normalized_reduced(rho4, f)?,
        EntropyConvention::Standard,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn singlet_density() {
        let a = SpinAmplitude::preset(StatePreset::Singlet);
        let rho = density_from_amplitude(&a, 0.0).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        let nonzero = rho.eigenvalues().iter().filter(|l| l.abs() > 1e-12).count();
        assert_eq!(nonzero, 1);
        let dressed = density_from_amplitude(&a, 0.01).unwrap();
        assert!((dressed.trace() - 1.020201).abs() < 1e-6);
        let zero = SpinAmplitude::new([[ZERO; 2]; 2]).unwrap();
        let z = density_from_amplitude(&zero, 0.3).unwrap();
        assert!(z.entries().iter().all(|c| *c == ZERO));
    }

    #[test]
    fn partial_traces() {
        let bell = density_from_amplitude(&SpinAmplitude::preset(StatePreset::Singlet), 0.0).unwrap();
        let r = reduce_particle1(&bell).unwrap();
        let half = DensityMatrix::new(DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).unwrap();
        assert!(r.max_abs_diff(&half) < 1e-15);
        let prod = density_from_amplitude(&SpinAmplitude::preset(StatePreset::Product), 0.0).unwrap();
        let r = reduce_particle1(&prod).unwrap();
        assert_eq!(r.entries()[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(r.trace(), 1.0);
        assert!(reduce_particle1(&r).is_err());
    }

    #[test]
    fn reduced_matches_amplitude_sum() {
        let a = SpinAmplitude::from_flat([
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.4, 0.0),
            Complex64::new(0.3, -0.5),
            Complex64::new(0.0, 0.6),
        ])
        .unwrap();
        let r = reduce_particle1(&density_from_amplitude(&a, 0.0).unwrap()).unwrap();
        for s1 in 0..2 {
            for s1p in 0..2 {
                let expect: Complex64 = (0..2).map(|s| a.phi[s1][s] * a.phi[s1p][s].conj()).sum();
                assert!((r.entries()[(s1, s1p)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn entropy_examples() {
        let proj = density_from_amplitude(&SpinAmplitude::preset(StatePreset::Product), 0.0).unwrap();
        assert!(entropy_trace(&proj, EntropyConvention::SignedTrace).abs() < 1e-15);
        let half = DensityMatrix::new(DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).unwrap();
        assert!((entropy_trace(&half, EntropyConvention::SignedTrace) + LN_2).abs() < 1e-15);
        assert!((entropy_trace(&half, EntropyConvention::Standard) - LN_2).abs() < 1e-15);
        assert!((nats_to_bits(LN_2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(DensityMatrix::new(m).unwrap_err().is_contract());
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.1, 0.0),
        ]));
        assert!(DensityMatrix::new(neg).unwrap_err().is_contract());
        assert!(DensityMatrix::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn identity_closed_form() {
        let half = DensityMatrix::new(DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(dressed_entropy_identity_check(&half, 0.0).unwrap(), 0.0);
        assert!(dressed_entropy_identity_check(&half, 0.3).unwrap() < 1e-12);
    }

    #[test]
    fn dressed_entropy_modes() {
        for mode in [NormalizationMode::BareNormalized, NormalizationMode::DressedNormalized] {
            assert_eq!(dressed_entropy(-0.4, 0.0, 1.0, mode).unwrap(), -0.4);
        }
        let v = dressed_entropy(0.0, 0.01, 1.0, NormalizationMode::BareNormalized).unwrap();
        assert!((v - 0.0204040).abs() < 1e-7);
        let f: f64 = 0.2;
        let tr = (-2.0 * f).exp();
        assert!(dressed_entropy(0.1, f, tr, NormalizationMode::DressedNormalized).is_ok());
        assert!(dressed_entropy(0.1, f, 1.0, NormalizationMode::DressedNormalized).is_err());
        assert!(dressed_entropy(0.1, f, tr, NormalizationMode::BareNormalized).is_err());
    }

    #[test]
    fn normalized_entanglement_values() {
        let bell = density_from_amplitude(&SpinAmplitude::preset(StatePreset::Singlet), 0.0).unwrap();
        let prod = density_from_amplitude(&SpinAmplitude::preset(StatePreset::Product), 0.0).unwrap();
        for f in [-0.3, 0.0, 0.7] {
            assert!((normalized_entanglement(&bell, f).unwrap() - LN_2).abs() < 1e-12);
            assert!(normalized_entanglement(&prod, f).unwrap().abs() < 1e-12);
        }
        let zero = density_from_amplitude(&SpinAmplitude::new([[ZERO; 2]; 2]).unwrap(), 0.0).unwrap();
        assert!(normalized_entanglement(&zero, 0.0).is_err());
        assert!((bell.purity().unwrap() - 1.0).abs() < 1e-12);
    }
}
