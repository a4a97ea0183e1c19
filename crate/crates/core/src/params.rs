use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on η² − τ² − 4 for a pair to count as critical.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Electrostatic (η) and Lorentz-scalar (τ) interaction strengths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingPair {
    pub eta: f64,
    pub tau: f64,
    pub critical: bool,
}

impl CouplingPair {
    /// A critical pair; rejects anything with |η² − τ² − 4| > 1e-12.
    pub fn new(eta: f64, tau: f64) -> Result<Self> {
        let pair = Self::noncritical(eta, tau)?;
        if !pair.critical {
            return Err(Error::NotCritical {
                eta,
                tau,
                defect: pair.defect(),
            });
        }
        Ok(pair)
    }

    /// The critical pair with η = sign·√(4 + τ²).
    pub fn from_tau(tau: f64, sign: f64) -> Result<Self> {
        if !tau.is_finite() || sign == 0.0 || !sign.is_finite() {
            return Err(Error::Domain(format!("invalid tau={tau} or sign={sign}")));
        }
        Self::new(sign.signum() * (4.0 + tau * tau).sqrt(), tau)
    }

    /// Any pair with η ± τ ≠ 0, flagged critical or not. Results for
    /// non-critical pairs are diagnostic only.
    pub fn noncritical(eta: f64, tau: f64) -> Result<Self> {
        if !(eta.is_finite() && tau.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite coupling eta={eta}, tau={tau}"
            )));
        }
        if eta + tau == 0.0 || eta - tau == 0.0 {
            return Err(Error::Domain(format!(
                "eta ± tau vanishes for eta={eta}, tau={tau}"
            )));
        }
        let defect = eta * eta - tau * tau - 4.0;
        Ok(CouplingPair {
            eta,
            tau,
            critical: defect.abs() <= CRITICAL_TOL,
        })
    }

    /// η² − τ² − 4.
    pub fn defect(&self) -> f64 {
        self.eta * self.eta - self.tau * self.tau - 4.0
    }
}

/// Mass, circle radius and coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleConfig {
    pub mass: f64,
    pub radius: f64,
    pub coupling: CouplingPair,
}

impl CircleConfig {
    pub fn new(mass: f64, radius: f64, coupling: CouplingPair) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(CircleConfig {
            mass,
            radius,
            coupling,
        })
    }

    /// The accumulation point z* = −(τ/η) m.
    pub fn z_star(&self) -> f64 {
        -self.coupling.tau / self.coupling.eta * self.mass
    }

    /// √((m − z)/(m + z)).
    pub fn spinor_ratio(&self, z: f64) -> f64 {
        ((self.mass - z) / (self.mass + z)).sqrt()
    }

    /// √(m² − z²).
    pub fn decay_rate(&self, z: f64) -> f64 {
        ((self.mass - z) * (self.mass + z)).sqrt()
    }

    pub(crate) fn check_in_gap(&self, z: f64) -> Result<()> {
        if !(z.is_finite() && z.abs() < self.mass) {
            return Err(Error::Domain(format!(
                "z={z} outside the gap (-{m}, {m})",
                m = self.mass
            )));
        }
        Ok(())
    }
}

/// The accumulation point of the circle spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapPoint {
    pub z_star: f64,
    /// z*/m = −τ/η.
    pub p: f64,
}

pub fn accumulation_point(config: &CircleConfig) -> GapPoint {
    GapPoint {
        z_star: config.z_star(),
        p: -config.coupling.tau / config.coupling.eta,
    }
}
