//! Sectioned key–value run configuration (TOML syntax).
//!
//! ```toml
//! [particles]
//! m = 1.0
//! v1 = [0.0, 0.0, 0.6]
//! v2 = [0.0, 0.0, -0.6]
//! charges = [1, 1]
//!
//! [regulators]
//! lambda_list = [0.1, 0.01, 0.001]
//! delta = 1.0
//! ```
//!
//! Every other section is optional. Unknown sections and keys are rejected.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::kinematics::{gamma, Vec3};
use crate::photon_cloud::fock::{DEFAULT_LEAKAGE_BOUND, MAX_MODES, MAX_NMAX};
use crate::qubit_entanglement::StatePreset;
use crate::soft_integrals::{perturb_speed, QuadratureSpec};

/// Fine-structure coupling e² = 4πα.
pub const DEFAULT_E2: f64 = 4.0 * std::f64::consts::PI / 137.035_999_084;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("bad value for `{key}`: {message}")]
    Type { key: String, message: String },
    #[error("bound violation for `{key}`: {message}")]
    Bound { key: String, message: String },
}

impl ConfigError {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Syntax { .. } => "syntax",
            ConfigError::UnknownKey { .. } => "unknown_key",
            ConfigError::Type { .. } => "type",
            ConfigError::Bound { .. } => "bound",
        }
    }

    fn bound(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Bound {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Particles {
    #[serde(default = "one")]
    pub m: f64,
    pub v1: [f64; 3],
    pub v2: [f64; 3],
    #[serde(default = "default_charges")]
    pub charges: [i8; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dressing {
    pub dv1: Option<[f64; 3]>,
    pub dv2: Option<[f64; 3]>,
    /// Speed reduction applied to the first dressing velocity.
    #[serde(default)]
    pub offshell: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorSection {
    #[serde(default = "default_lambdas")]
    pub lambda_list: Vec<f64>,
    #[serde(default = "one")]
    pub delta: f64,
}

impl Default for RegulatorSection {
    fn default() -> Self {
        Self {
            lambda_list: default_lambdas(),
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    #[serde(default = "default_e2")]
    pub e2: f64,
}

impl Default for Coupling {
    fn default() -> Self {
        Self { e2: DEFAULT_E2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "one")]
    pub t_ref: f64,
    #[serde(default = "default_floor")]
    pub speed_floor: f64,
    #[serde(default)]
    pub charge_signs: bool,
}

impl Default for PhaseSection {
    fn default() -> Self {
        Self {
            zeta: 0.0,
            kappa: 0.0,
            t: default_t(),
            t_ref: 1.0,
            speed_floor: default_floor(),
            charge_signs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    #[serde(default = "default_preset")]
    pub preset: String,
    /// (re, im) pairs in the order ↑↑, ↑↓, ↓↑, ↓↓; used by `custom`.
    pub amplitudes: Option<Vec<[f64; 2]>>,
    pub v: Option<f64>,
    pub theta: Option<f64>,
}

impl Default for StateSection {
    fn default() -> Self {
        Self {
            preset: default_preset(),
            amplitudes: None,
            v: None,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSection {
    #[serde(default = "default_alphas")]
    pub alphas: Vec<[f64; 2]>,
    #[serde(default = "default_nmax")]
    pub n_max: usize,
    #[serde(default = "default_leakage")]
    pub leakage_bound: f64,
}

impl Default for FockSection {
    fn default() -> Self {
        Self {
            alphas: default_alphas(),
            n_max: default_nmax(),
            leakage_bound: default_leakage(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { workers: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub particles: Particles,
    pub dressing: Dressing,
    pub regulators: RegulatorSection,
    pub quadrature: QuadratureSpec,
    pub coupling: Coupling,
    pub phase: PhaseSection,
    pub state: StateSection,
    pub fock: FockSection,
    pub run: RunSection,
    pub output: OutputSection,
}

fn one() -> f64 {
    1.0
}
fn default_charges() -> [i8; 2] {
    [1, 1]
}
fn default_lambdas() -> Vec<f64> {
    vec![0.1, 0.01, 0.001]
}
fn default_e2() -> f64 {
    DEFAULT_E2
}
fn default_t() -> f64 {
    1.0e3
}
fn default_floor() -> f64 {
    crate::asymptotic_phase::DEFAULT_SPEED_FLOOR
}
fn default_preset() -> String {
    "singlet".into()
}
fn default_alphas() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}
fn default_nmax() -> usize {
    20
}
fn default_leakage() -> f64 {
    DEFAULT_LEAKAGE_BOUND
}
fn default_workers() -> usize {
    1
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("particles", &["m", "v1", "v2", "charges"]),
    ("dressing", &["dv1", "dv2", "offshell"]),
    ("regulators", &["lambda_list", "delta"]),
    ("quadrature", &["n_polar", "n_azimuthal"]),
    ("coupling", &["e2"]),
    ("phase", &["zeta", "kappa", "t", "t_ref", "speed_floor", "charge_signs"]),
    ("state", &["preset", "amplitudes", "v", "theta"]),
    ("fock", &["alphas", "n_max", "leakage_bound"]),
    ("run", &["workers"]),
    ("output", &["path", "format"]),
];

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn section<T: DeserializeOwned + Default>(table: &toml::Table, name: &str) -> Result<T, ConfigError> {
    match table.get(name) {
        None => Ok(T::default()),
        Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| ConfigError::Type {
            key: name.to_string(),
            message: e.message().to_string(),
        }),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    for (name, value) in &table {
        let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| s == name) else {
            return Err(ConfigError::UnknownKey { key: name.clone() });
        };
        let Some(inner) = value.as_table() else {
            return Err(ConfigError::Type {
                key: name.clone(),
                message: "expected a [section]".into(),
            });
        };
        if let Some(k) = inner.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey {
                key: format!("{name}.{k}"),
            });
        }
    }
    let particles: Particles = match table.get("particles") {
        Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| ConfigError::Type {
            key: "particles".into(),
            message: e.message().to_string(),
        })?,
        None => {
            return Err(ConfigError::Type {
                key: "particles".into(),
                message: "missing required section".into(),
            })
        }
    };
    let cfg = RunConfig {
        particles,
        dressing: section(&table, "dressing")?,
        regulators: section(&table, "regulators")?,
        quadrature: section::<QuadratureOpt>(&table, "quadrature")?.into(),
        coupling: section(&table, "coupling")?,
        phase: section(&table, "phase")?,
        state: section(&table, "state")?,
        fock: section(&table, "fock")?,
        run: section(&table, "run")?,
        output: section(&table, "output")?,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureOpt {
    n_polar: Option<usize>,
    n_azimuthal: Option<usize>,
}

impl From<QuadratureOpt> for QuadratureSpec {
    fn from(q: QuadratureOpt) -> Self {
        let d = QuadratureSpec::default();
        QuadratureSpec {
            n_polar: q.n_polar.unwrap_or(d.n_polar),
            n_azimuthal: q.n_azimuthal.unwrap_or(d.n_azimuthal),
        }
    }
}

fn check_velocity(key: &str, v: &[f64; 3]) -> Result<(), ConfigError> {
    gamma(&Vec3::from(*v)).map(|_| ()).map_err(|_| {
        ConfigError::bound(
            key,
            format!("|v| = {} must be < 1 (superluminal)", Vec3::from(*v).norm()),
        )
    })
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.particles;
        if !(p.m > 0.0) || !p.m.is_finite() {
            return Err(ConfigError::bound("particles.m", "mass must be positive"));
        }
        check_velocity("particles.v1", &p.v1)?;
        check_velocity("particles.v2", &p.v2)?;
        if p.charges.iter().any(|c| *c != 1 && *c != -1) {
            return Err(ConfigError::bound("particles.charges", "charges must be +1 or -1"));
        }
        if let Some(v) = &self.dressing.dv1 {
            check_velocity("dressing.dv1", v)?;
        }
        if let Some(v) = &self.dressing.dv2 {
            check_velocity("dressing.dv2", v)?;
        }
        let off = self.dressing.offshell;
        if !off.is_finite() || off < 0.0 {
            return Err(ConfigError::bound("dressing.offshell", "must be >= 0"));
        }
        check_velocity("dressing.offshell", &self.dressing_velocities().0.into())?;
        let r = &self.regulators;
        if !(r.delta > 0.0) || !r.delta.is_finite() {
            return Err(ConfigError::bound("regulators.delta", "must be positive"));
        }
        if r.lambda_list.is_empty() {
            return Err(ConfigError::bound("regulators.lambda_list", "must not be empty"));
        }
        for &l in &r.lambda_list {
            if !(l > 0.0) {
                return Err(ConfigError::bound(
                    "regulators.lambda_list",
                    format!("lambda {l} must be positive"),
                ));
            }
            if l >= r.delta {
                return Err(ConfigError::bound(
                    "regulators.lambda_list",
                    format!("lambda {l} must be below delta {}", r.delta),
                ));
            }
        }
        if self.quadrature.n_polar < 4 {
            return Err(ConfigError::bound("quadrature.n_polar", "must be >= 4"));
        }
        if self.quadrature.n_azimuthal < 4 {
            return Err(ConfigError::bound("quadrature.n_azimuthal", "must be >= 4"));
        }
        if !(self.coupling.e2 > 0.0) || !self.coupling.e2.is_finite() {
            return Err(ConfigError::bound("coupling.e2", "must be positive"));
        }
        let ph = &self.phase;
        if ph.t == 0.0 || !ph.t.is_finite() {
            return Err(ConfigError::bound("phase.t", "must be finite and non-zero"));
        }
        if !(ph.t_ref > 0.0) || !ph.t_ref.is_finite() {
            return Err(ConfigError::bound("phase.t_ref", "must be positive"));
        }
        if !(ph.speed_floor >= 0.0) || ph.speed_floor >= 1.0 {
            return Err(ConfigError::bound("phase.speed_floor", "must lie in [0, 1)"));
        }
        for (k, v) in [("phase.zeta", ph.zeta), ("phase.kappa", ph.kappa)] {
            if !v.is_finite() {
                return Err(ConfigError::bound(k, "must be finite"));
            }
        }
        self.state_amplitude()?;
        let f = &self.fock;
        if f.alphas.is_empty() || f.alphas.len() > MAX_MODES {
            return Err(ConfigError::bound("fock.alphas", format!("need 1..={MAX_MODES} modes")));
        }
        if f.n_max == 0 || f.n_max > MAX_NMAX {
            return Err(ConfigError::bound("fock.n_max", format!("must lie in 1..={MAX_NMAX}")));
        }
        if !(f.leakage_bound > 0.0) {
            return Err(ConfigError::bound("fock.leakage_bound", "must be positive"));
        }
        if self.run.workers == 0 {
            return Err(ConfigError::bound("run.workers", "must be >= 1"));
        }
        Ok(())
    }

    /// Dressing velocities with defaults and the off-shell shift applied.
    pub fn dressing_velocities(&self) -> (Vec3, Vec3) {
        let dv1 = Vec3::from(self.dressing.dv1.unwrap_or(self.particles.v1));
        let dv2 = Vec3::from(self.dressing.dv2.unwrap_or(self.particles.v2));
        let dv1 = if self.dressing.offshell > 0.0 {
            perturb_speed(&dv1, self.dressing.offshell)
        } else {
            dv1
        };
        (dv1, dv2)
    }

    pub fn state_amplitude(&self) -> Result<crate::qubit_entanglement::SpinAmplitude, ConfigError> {
        use crate::qubit_entanglement::SpinAmplitude;
        use num_complex::Complex64;
        let s = &self.state;
        let amp = match s.preset.as_str() {
            "singlet" => SpinAmplitude::preset(StatePreset::Singlet),
            "triplet" => SpinAmplitude::preset(StatePreset::Triplet),
            "product" => SpinAmplitude::preset(StatePreset::Product),
            "custom" => {
                let a =
                    s.amplitudes.as_ref().filter(|a| a.len() == 4).ok_or_else(|| {
                        ConfigError::bound("state.amplitudes", "custom preset needs 4 [re, im] pairs")
                    })?;
                let flat = [0, 1, 2, 3].map(|i| Complex64::new(a[i][0], a[i][1]));
                SpinAmplitude::from_flat(flat).map_err(|e| ConfigError::bound("state.amplitudes", e.to_string()))?
            }
            other => {
                return Err(ConfigError::bound(
                    "state.preset",
                    format!("`{other}` is not one of singlet, triplet, product, custom"),
                ))
            }
        };
        Ok(match (s.v, s.theta) {
            (Some(v), Some(t)) => amp.with_tag(v, t),
            _ => amp,
        })
    }

    /// Short SHA-256 digest of the resolved configuration. The worker count
    /// does not change results and is left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.workers = 1;
        let canonical = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }
}
