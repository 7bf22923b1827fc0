//! Physical constants carried through every computation.
//!
//! Natural units with hbar = 1 are the default, but hbar stays a runtime
//! parameter so classical-limit sequences can shrink it.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Particle mass.
    pub mass: f64,
    /// Particle charge.
    pub charge: f64,
    /// Angular frequency for oscillator checks.
    pub omega: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, charge: 1.0, omega: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("omega", self.omega)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(crate::Error::ValidationError {
                    field: name.into(),
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        if !self.charge.is_finite() {
            return Err(crate::Error::ValidationError {
                field: "charge".into(),
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}
