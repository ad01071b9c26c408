//! Truncated multi-mode Fock space at toy scale.
//!
//! Displacement exponents `G = Σ_m (α_m a†_m − α*_m a_m)` are applied to
//! state vectors directly (scaled Taylor series on the sparse generator),
//! so the product basis never has to be materialized as a dense matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_MODES: usize = 4;
pub const MAX_NMAX: usize = 64;
/// Largest product-basis dimension the simulator will allocate.
pub const MAX_DIM: usize = 1 << 22;
pub const DEFAULT_LEAKAGE_BOUND: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockMode {
    pub label: String,
    pub n_max: usize,
}

/// Product-basis layout: mode 0 varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Layout {
    levels: usize,
    n_modes: usize,
    strides: Vec<usize>,
    dim: usize,
}

impl Layout {
    fn new(n_modes: usize, n_max: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::invalid(
                "modes",
                format!("need 1..={MAX_MODES} modes, got {n_modes}"),
            ));
        }
        if n_max == 0 || n_max > MAX_NMAX {
            return Err(Error::invalid("n_max", format!("need 1..={MAX_NMAX}, got {n_max}")));
        }
        let levels = n_max + 1;
        let mut strides = Vec::with_capacity(n_modes);
        let mut dim: usize = 1;
        for _ in 0..n_modes {
            strides.push(dim);
            dim = dim
                .checked_mul(levels)
                .filter(|d| *d <= MAX_DIM)
                .ok_or_else(|| Error::invalid("n_max", format!("product basis exceeds {MAX_DIM} states")))?;
        }
        Ok(Self {
            levels,
            n_modes,
            strides,
            dim,
        })
    }

    #[inline]
    fn occupation(&self, idx: usize, mode: usize) -> usize {
        (idx / self.strides[mode]) % self.levels
    }
}

/// Normalized state over a truncated product basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockState {
    pub modes: Vec<FockMode>,
    pub amplitudes: Vec<Complex64>,
    /// Norm before the final normalization.
    pub norm: f64,
}

impl FockState {
    fn layout(&self) -> Layout {
        Layout::new(self.modes.len(), self.modes[0].n_max).expect("validated at construction")
    }

    /// |⟨0|ψ⟩|
    pub fn vacuum_overlap(&self) -> f64 {
        self.amplitudes[0].norm()
    }

    pub fn mean_occupation(&self, mode: usize) -> f64 {
        let l = self.layout();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| l.occupation(i, mode) as f64 * a.norm_sqr())
            .sum()
    }

    pub fn total_occupation(&self) -> f64 {
        (0..self.modes.len()).map(|m| self.mean_occupation(m)).sum()
    }

    /// Probability carried by basis states with any mode at its top level.
    pub fn leakage(&self) -> f64 {
        leakage_of(&self.layout(), &self.amplitudes)
    }

    /// Reduced single-mode occupation distribution.
    pub fn marginal(&self, mode: usize) -> Vec<f64> {
        let l = self.layout();
        let mut p = vec![0.0; l.levels];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[l.occupation(i, mode)] += a.norm_sqr();
        }
        p
    }
}

fn leakage_of(l: &Layout, amps: &[Complex64]) -> f64 {
    amps.iter()
        .enumerate()
        .filter(|(i, _)| (0..l.n_modes).any(|m| l.occupation(*i, m) == l.levels - 1))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// out = G·v for the displacement generator with amplitudes `alphas`.
fn apply_generator(l: &Layout, alphas: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|x| *x = ZERO);
    for (m, &alpha) in alphas.iter().enumerate() {
        if alpha == ZERO {
            continue;
        }
        let stride = l.strides[m];
        for (i, &a) in v.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let n = l.occupation(i, m);
            if n + 1 < l.levels {
                out[i + stride] += alpha * a * ((n + 1) as f64).sqrt();
            }
            if n > 0 {
                out[i - stride] -= alpha.conj() * a * (n as f64).sqrt();
            }
        }
    }
}

/// exp(G)·v by s steps of a Taylor series in G/s, with s ≥ ‖G‖.
fn expm_action(l: &Layout, alphas: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let bound: f64 = alphas
        .iter()
        .map(|a| 2.0 * a.norm() * ((l.levels - 1) as f64).sqrt())
        .sum();
    let steps = bound.ceil().max(1.0) as usize;
    let scaled: Vec<Complex64> = alphas.iter().map(|a| a / steps as f64).collect();
    let mut state = v.to_vec();
    let mut term = vec![ZERO; l.dim];
    let mut next = vec![ZERO; l.dim];
    for _ in 0..steps {
        let mut acc = state.clone();
        term.copy_from_slice(&state);
        let scale = norm(&state).max(f64::MIN_POSITIVE);
        for k in 1..=80 {
            apply_generator(l, &scaled, &term, &mut next);
            let inv_k = 1.0 / k as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * inv_k;
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if norm(&term) < 1e-18 * scale {
                break;
            }
        }
        state = acc;
    }
    state
}

fn vacuum(l: &Layout) -> Vec<Complex64> {
    let mut v = vec![ZERO; l.dim];
    v[0] = ONE;
    v
}

fn check_leakage(l: &Layout, v: &[Complex64], bound: f64, what: &str) -> Result<()> {
    let leak = leakage_of(l, v) / norm(v).powi(2);
    if leak > bound {
        return Err(Error::Contract(format!(
            "{what}: truncation leakage {leak:.3e} exceeds bound {bound:.1e}"
        )));
    }
    Ok(())
}

/// exp[Σ(α a† − α* a)]|0⟩ on the truncated product basis.
pub fn fock_displacement_sim(alphas: &[Complex64], n_max: usize, leakage_bound: f64) -> Result<FockState> {
    let l = Layout::new(alphas.len(), n_max)?;
    let raw = expm_action(&l, alphas, &vacuum(&l));
    check_leakage(&l, &raw, leakage_bound, "displacement")?;
    let nrm = norm(&raw);
    Ok(FockState {
        modes: (0..alphas.len())
            .map(|m| FockMode {
                label: format!("k{m}"),
                n_max,
            })
            .collect(),
        amplitudes: raw.iter().map(|a| a / nrm).collect(),
        norm: nrm,
    })
}

/// Scalar c with e^A e^B = e^{A+B} e^{c/2}, read off as
/// c = 2 ln⟨0|e^{−(A+B)} e^A e^B|0⟩ on the truncated space.
///
/// `a` and `b` hold per-mode displacement amplitudes over a shared mode set.
pub fn hadamard_phase_sim(a: &[Complex64], b: &[Complex64], n_max: usize, leakage_bound: f64) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::invalid("b", "exponents must act on the same modes"));
    }
    let l = Layout::new(a.len(), n_max)?;
    let sum: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let neg_sum: Vec<Complex64> = sum.iter().map(|x| -x).collect();
    let psi_b = expm_action(&l, b, &vacuum(&l));
    check_leakage(&l, &psi_b, leakage_bound, "e^B|0>")?;
    let psi_ab = expm_action(&l, a, &psi_b);
    check_leakage(&l, &psi_ab, leakage_bound, "e^A e^B|0>")?;
    let back = expm_action(&l, &neg_sum, &psi_ab);
    check_leakage(&l, &back, leakage_bound, "e^-(A+B) e^A e^B|0>")?;
    Ok(2.0 * back[0].ln())
}

/// Dense single-mode generator α a† − α* a on levels 0..=n_max.
pub fn displacement_generator(alpha: Complex64, n_max: usize) -> DMatrix<Complex64> {
    let d = n_max + 1;
    let mut g = DMatrix::from_element(d, d, ZERO);
    for n in 0..n_max {
        let s = ((n + 1) as f64).sqrt();
        g[(n + 1, n)] = alpha * s;
        g[(n, n + 1)] = -alpha.conj() * s;
    }
    g
}

/// Dense truncated displacement operator (Padé matrix exponential).
pub fn displacement_dense(alpha: Complex64, n_max: usize) -> DMatrix<Complex64> {
    displacement_generator(alpha, n_max).exp()
}

/// Σ_{k ≤ order} G^k|0⟩/k!, the order-by-order expansion of the
/// single-mode displaced vacuum.
pub fn displacement_taylor(alpha: Complex64, n_max: usize, order: usize) -> Vec<Complex64> {
    let g = displacement_generator(alpha, n_max);
    let mut term = nalgebra::DVector::from_element(n_max + 1, ZERO);
    term[0] = ONE;
    let mut acc = term.clone();
    for k in 1..=order {
        term = &g * term / Complex64::from(k as f64);
        acc += &term;
    }
    acc.iter().copied().collect()
}
