//! Minkowski four-vectors and on-shell charged particles.
//!
//! Natural units (ħ = c = 1) and metric signature (+,−,−,−) throughout.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Relative tolerance used when two momenta must share one mass.
pub const EQUAL_MASS_RTOL: f64 = 1e-9;

/// Radicands of `1 - m^4/(p.q)^2` above this negative value are clamped to 0.
const RADICAND_CLAMP: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_parts(t: f64, space: &Vec3) -> Self {
        Self::new(t, space.x, space.y, space.z)
    }

    /// The unit temporal vector (1, 0, 0, 0).
    pub const fn eta() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    /// The null direction (1, n̂) for a unit 3-vector `n`.
    pub fn null(n: &Vec3) -> Self {
        Self::from_parts(1.0, n)
    }

    pub fn space(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Three-velocity p⃗/p⁰.
    pub fn velocity(&self) -> Vec3 {
        self.space() / self.t
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

/// a·b = a⁰b⁰ − a⃗·b⃗
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z
}

/// Lorentz factor, rejecting |v| ≥ 1.
pub fn gamma(v: &Vec3) -> Result<f64> {
    let v2 = v.norm_squared();
    if !v2.is_finite() || v2 >= 1.0 {
        return Err(Error::Superluminal { speed: v2.sqrt() });
    }
    Ok(1.0 / (1.0 - v2).sqrt())
}

pub fn check_velocity(v: &Vec3) -> Result<()> {
    gamma(v).map(|_| ())
}

/// On-shell momentum p = mγ(1, v⃗).
pub fn make_on_shell(m: f64, v: &Vec3) -> Result<FourVector> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::NonPositiveMass(m));
    }
    let g = gamma(v)?;
    Ok(FourVector::from_parts(1.0, v) * (m * g))
}

/// Invariant mass squared of a forward timelike momentum.
fn shell_mass_sq(p: &FourVector) -> Result<f64> {
    let m2 = p.norm_sq();
    if !(m2 > 0.0) || !(p.t > 0.0) {
        return Err(Error::OffShell {
            norm: m2,
            expected: f64::NAN,
        });
    }
    Ok(m2)
}

/// Common mass squared of two momenta, or an error if they differ.
pub fn common_mass_sq(p: &FourVector, q: &FourVector) -> Result<f64> {
    let mp = shell_mass_sq(p)?;
    let mq = shell_mass_sq(q)?;
    if (mp - mq).abs() > EQUAL_MASS_RTOL * mp.max(mq) {
        return Err(Error::UnequalMass(mp.sqrt(), mq.sqrt()));
    }
    Ok(0.5 * (mp + mq))
}

/// Relative speed u(p,q) = √(1 − m⁴/(p·q)²) of two equal-mass momenta.
pub fn relative_speed(p: &FourVector, q: &FourVector) -> Result<f64> {
    let m2 = common_mass_sq(p, q)?;
    let pq = p.dot(q);
    let mut radicand = 1.0 - (m2 * m2) / (pq * pq);
    if radicand < 0.0 {
        if radicand > RADICAND_CLAMP {
            radicand = 0.0;
        } else {
            return Err(Error::Contract(format!("negative relative-speed radicand {radicand}")));
        }
    }
    Ok(radicand.sqrt())
}

/// A charged particle on its mass shell.
///
/// `charge_sign` is the eigenvalue of the charge-density operator on this
/// leg: +1 for a particle (b†), −1 for an antiparticle (d†).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub mass: f64,
    pub charge_sign: i8,
    pub velocity: Vec3,
}

impl Particle {
    pub fn new(mass: f64, charge_sign: i8, velocity: Vec3) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonPositiveMass(mass));
        }
        if charge_sign != 1 && charge_sign != -1 {
            return Err(Error::invalid("charge_sign", format!("{charge_sign} not in {{+1,-1}}")));
        }
        check_velocity(&velocity)?;
        Ok(Self {
            mass,
            charge_sign,
            velocity,
        })
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.velocity.norm_squared()).sqrt()
    }

    pub fn momentum(&self) -> FourVector {
        FourVector::from_parts(1.0, &self.velocity) * (self.mass * self.gamma())
    }

    /// The degree-0 four-velocity direction w = (1, v⃗).
    pub fn worldline_direction(&self) -> FourVector {
        FourVector::from_parts(1.0, &self.velocity)
    }

    pub fn charge(&self) -> f64 {
        f64::from(self.charge_sign)
    }
}
