//! Soft-photon (infrared) correction factors for dressed charged qubits.
//!
//! The crate evaluates the log-cutoff coefficients of the virtual soft
//! exponents of a two-charge amplitude (standard eikonal part, dressing
//! parts and their finite sum), checks that the sum is cutoff-independent
//! when the dressing matches the particles' mass shell, models the coherent
//! photon cloud of the asymptotic state, and carries the finite factor
//! `e^F` into two-qubit spin density matrices and entropies.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic_phase;
pub mod cli_io;
pub mod dressing_field;
pub mod error;
pub mod kinematics;
pub mod photon_cloud;
pub mod qubit_entanglement;
pub mod soft_integrals;

pub use error::{Error, Result};
pub use kinematics::{FourVector, Particle, Vec3};
