//! Python bindings. Vectors cross the boundary as 3- or 4-element lists,
//! complex numbers as Python `complex`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use softdress::cli_io::{parse_config, run, OutputFormat, RunError, Subcommand};
use softdress::kinematics::{self, Vec3};
use softdress::photon_cloud::{self, fock, CloudSpec};
use softdress::qubit_entanglement::{self as qe, DensityMatrix, EntropyConvention, SpinAmplitude};
use softdress::soft_integrals::{self as si, QuadratureSpec, Regulators, ScanSetup};
use softdress::{asymptotic_phase as ap, dressing_field, Error, FourVector};

fn py_err(e: Error) -> PyErr {
    if e.is_contract() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn vec3(v: [f64; 3]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn four(p: [f64; 4]) -> FourVector {
    FourVector::new(p[0], p[1], p[2], p[3])
}

fn quad(n_polar: usize, n_azimuthal: usize) -> PyResult<QuadratureSpec> {
    QuadratureSpec::new(n_polar, n_azimuthal).map_err(py_err)
}

/// A charged particle with mass, charge sign (+1 or -1) and 3-velocity.
#[pyclass(name = "Particle", frozen, from_py_object)]
#[derive(Clone)]
struct PyParticle(kinematics::Particle);

#[pymethods]
impl PyParticle {
    #[new]
    #[pyo3(signature = (velocity, mass = 1.0, charge_sign = 1))]
    fn new(velocity: [f64; 3], mass: f64, charge_sign: i8) -> PyResult<Self> {
        kinematics::Particle::new(mass, charge_sign, vec3(velocity))
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn charge_sign(&self) -> i8 {
        self.0.charge_sign
    }

    #[getter]
    fn velocity(&self) -> [f64; 3] {
        self.0.velocity.into()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    /// On-shell four-momentum [E, px, py, pz].
    fn momentum(&self) -> [f64; 4] {
        self.0.momentum().to_array()
    }

    fn __repr__(&self) -> String {
        let v = self.0.velocity;
        format!(
            "Particle(velocity=[{}, {}, {}], mass={}, charge_sign={})",
            v.x, v.y, v.z, self.0.mass, self.0.charge_sign
        )
    }
}

#[pyfunction]
fn gamma(v: [f64; 3]) -> PyResult<f64> {
    kinematics::gamma(&vec3(v)).map_err(py_err)
}

#[pyfunction]
fn make_on_shell(m: f64, v: [f64; 3]) -> PyResult<[f64; 4]> {
    kinematics::make_on_shell(m, &vec3(v))
        .map(|p| p.to_array())
        .map_err(py_err)
}

#[pyfunction]
fn relative_speed(p: [f64; 4], q: [f64; 4]) -> PyResult<f64> {
    kinematics::relative_speed(&four(p), &four(q)).map_err(py_err)
}

#[pyfunction]
fn phase_kernel(p: [f64; 4], q: [f64; 4]) -> PyResult<f64> {
    ap::phase_kernel(&four(p), &four(q)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (p, q, speed_floor = ap::DEFAULT_SPEED_FLOOR))]
fn two_particle_phase_coefficient(p: [f64; 4], q: [f64; 4], speed_floor: f64) -> PyResult<f64> {
    ap::two_particle_phase_coefficient(&four(p), &four(q), speed_floor).map_err(py_err)
}

#[pyfunction]
fn phase_log(t: f64, t_ref: f64) -> PyResult<f64> {
    ap::phase_log(t, t_ref).map_err(py_err)
}

/// Log-cutoff coefficients of the soft exponents as a dict. Dressing
/// velocities default to the particles' own.
#[pyfunction]
#[pyo3(signature = (p1, p2, dressing_v1 = None, dressing_v2 = None, n_polar = 64, n_azimuthal = 64))]
fn soft_breakdown<'py>(
    py: Python<'py>,
    p1: PyParticle,
    p2: PyParticle,
    dressing_v1: Option<[f64; 3]>,
    dressing_v2: Option<[f64; 3]>,
    n_polar: usize,
    n_azimuthal: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let dv1 = dressing_v1.map(vec3).unwrap_or(p1.0.velocity);
    let dv2 = dressing_v2.map(vec3).unwrap_or(p2.0.velocity);
    let b = si::soft_breakdown(&p1.0, &p2.0, &dv1, &dv2, &quad(n_polar, n_azimuthal)?).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("c_D", b.c_d)?;
    d.set_item("c_C_cross", b.c_c_cross)?;
    d.set_item("c_C_self_1", b.c_c_self_1)?;
    d.set_item("c_C_self_2", b.c_c_self_2)?;
    d.set_item("c_C", b.c_c())?;
    d.set_item("c_G_1", b.c_g_1)?;
    d.set_item("c_G_2", b.c_g_2)?;
    d.set_item("c_F", b.c_f)?;
    Ok(d)
}

/// Rows (lambda, e^D, e^C, e^F) for each cutoff, in input order.
#[pyfunction]
#[pyo3(signature = (p1, p2, lambdas, delta = 1.0, e2 = softdress::cli_io::config::DEFAULT_E2, workers = 1))]
fn regulator_scan(
    p1: PyParticle,
    p2: PyParticle,
    lambdas: Vec<f64>,
    delta: f64,
    e2: f64,
    workers: usize,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let q = QuadratureSpec::default();
    let setup = ScanSetup {
        p1: &p1.0,
        p2: &p2.0,
        dressing_v1: &p1.0.velocity,
        dressing_v2: &p2.0.velocity,
        quad: &q,
        delta,
        e2,
    };
    let rows = si::regulator_scan(&setup, &lambdas, workers).map_err(py_err)?;
    Ok(rows.iter().map(|r| (r.lambda, r.exp_d, r.exp_c, r.exp_f)).collect())
}

#[pyfunction]
fn green_g(x: [f64; 3], v: [f64; 3]) -> PyResult<f64> {
    dressing_field::green_g(&vec3(x), &vec3(v)).map_err(py_err)
}

/// Mean photon number of the asymptotic cloud between cutoffs lambda and delta.
#[pyfunction]
#[pyo3(signature = (particles, lam, delta, e2 = softdress::cli_io::config::DEFAULT_E2))]
fn expected_photon_number(particles: Vec<PyParticle>, lam: f64, delta: f64, e2: f64) -> PyResult<f64> {
    let spec = CloudSpec::new(particles.into_iter().map(|p| p.0).collect(), 0.0, e2).map_err(py_err)?;
    let reg = Regulators::new(lam, delta).map_err(py_err)?;
    photon_cloud::expected_photon_number(&spec, &reg, &QuadratureSpec::default()).map_err(py_err)
}

#[pyfunction]
fn vacuum_overlap(n_expected: f64) -> PyResult<f64> {
    photon_cloud::vacuum_overlap(n_expected).map_err(py_err)
}

/// Displaced vacuum in a truncated Fock space: (vacuum overlap, mean occupation per mode).
#[pyfunction]
#[pyo3(signature = (alphas, n_max = 20, leakage_bound = fock::DEFAULT_LEAKAGE_BOUND))]
fn fock_displacement(alphas: Vec<Complex64>, n_max: usize, leakage_bound: f64) -> PyResult<(f64, Vec<f64>)> {
    let s = fock::fock_displacement_sim(&alphas, n_max, leakage_bound).map_err(py_err)?;
    let occ = (0..alphas.len()).map(|m| s.mean_occupation(m)).collect();
    Ok((s.vacuum_overlap(), occ))
}

#[pyfunction]
#[pyo3(signature = (a, b, n_max = 32, leakage_bound = fock::DEFAULT_LEAKAGE_BOUND))]
fn hadamard_phase(a: Vec<Complex64>, b: Vec<Complex64>, n_max: usize, leakage_bound: f64) -> PyResult<Complex64> {
    fock::hadamard_phase_sim(&a, &b, n_max, leakage_bound).map_err(py_err)
}

fn density(rows: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    DensityMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j])).map_err(py_err)
}

/// Tr(rho ln rho) for convention "trace", -Tr(rho ln rho) for "standard".
#[pyfunction]
#[pyo3(signature = (rho, convention = "standard"))]
fn entropy(rho: Vec<Vec<Complex64>>, convention: &str) -> PyResult<f64> {
    let conv = match convention {
        "trace" => EntropyConvention::SignedTrace,
        "standard" => EntropyConvention::Standard,
        other => return Err(PyValueError::new_err(format!("unknown convention `{other}`"))),
    };
    Ok(qe::entropy_trace(&density(rho)?, conv))
}

#[pyfunction]
fn dressed_entropy_identity_residual(rho: Vec<Vec<Complex64>>, f: f64) -> PyResult<f64> {
    qe::dressed_entropy_identity_check(&density(rho)?, f).map_err(py_err)
}

/// Entanglement entropy (nats) of particle 1 after dressing by e^F and renormalizing.
/// Amplitudes are ordered (uu, ud, du, dd).
#[pyfunction]
#[pyo3(signature = (amplitudes, f = 0.0))]
fn entanglement_entropy(amplitudes: [Complex64; 4], f: f64) -> PyResult<f64> {
    let a = SpinAmplitude::from_flat(amplitudes).map_err(py_err)?;
    let rho = qe::density_from_amplitude(&a, 0.0).map_err(py_err)?;
    qe::normalized_entanglement(&rho, f).map_err(py_err)
}

/// Runs a CLI subcommand on TOML configuration text and returns the rendered table.
#[pyfunction]
#[pyo3(signature = (subcommand, config, format = "csv"))]
fn run_config(subcommand: &str, config: &str, format: &str) -> PyResult<String> {
    let sub = match subcommand {
        "kin" => Subcommand::Kin,
        "phase" => Subcommand::Phase,
        "soft" => Subcommand::Soft,
        "scan" => Subcommand::Scan,
        "cancel" => Subcommand::Cancel,
        "cloud" => Subcommand::Cloud,
        "fock" => Subcommand::Fock,
        "entangle" => Subcommand::Entangle,
        other => return Err(PyValueError::new_err(format!("unknown subcommand `{other}`"))),
    };
    let fmt = match format {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(PyValueError::new_err(format!("unknown format `{other}`"))),
    };
    let cfg = parse_config(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    match run(sub, &cfg) {
        Ok(t) => Ok(t.render(fmt)),
        Err(RunError::Module { source, .. }) => Err(py_err(source)),
        Err(e) => Err(PyValueError::new_err(e.to_string())),
    }
}

#[pymodule]
#[pyo3(name = "softdress")]
fn softdress_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyParticle>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(make_on_shell, m)?)?;
    m.add_function(wrap_pyfunction!(relative_speed, m)?)?;
    m.add_function(wrap_pyfunction!(phase_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(two_particle_phase_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(phase_log, m)?)?;
    m.add_function(wrap_pyfunction!(soft_breakdown, m)?)?;
    m.add_function(wrap_pyfunction!(regulator_scan, m)?)?;
    m.add_function(wrap_pyfunction!(green_g, m)?)?;
    m.add_function(wrap_pyfunction!(expected_photon_number, m)?)?;
    m.add_function(wrap_pyfunction!(vacuum_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(fock_displacement, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_phase, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(dressed_entropy_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
