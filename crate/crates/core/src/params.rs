//! Scaled model parameters.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of the scaled road-field system.
///
/// The field diffusivity and growth rate are normalized to 1, so the model is
/// described by the road diffusivity `d` (written D elsewhere; D > 1 is a
/// standing assumption), the road decay rate `mu`, the field-to-road exchange
/// rate `nu`, and the boundary exchange coefficient `kappa`.  On conical
/// domains the second road may carry its own diffusivity `d_tilde ≥ d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Road diffusivity D.
    pub d: f64,
    /// Road decay rate μ.
    pub mu: f64,
    /// Field-to-road exchange rate ν.
    pub nu: f64,
    /// Boundary exchange coefficient κ.
    pub kappa: f64,
    /// Diffusivity D̃ of the second road (cone case), when it differs from D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_tilde: Option<f64>,
}

impl ModelParams {
    /// Validated constructor for the single-road parameter set.
    pub fn new(d: f64, mu: f64, nu: f64, kappa: f64) -> Result<Self> {
        let p = ModelParams { d, mu, nu, kappa, d_tilde: None };
        p.validate()?;
        Ok(p)
    }

    /// Adds a second road diffusivity D̃ ≥ D.
    pub fn with_second_road(mut self, d_tilde: f64) -> Result<Self> {
        self.d_tilde = Some(d_tilde);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.d.is_finite()
            && self.mu.is_finite()
            && self.nu.is_finite()
            && self.kappa.is_finite();
        if !finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.d <= 1.0 {
            return Err(Error::InvalidParams(format!("D must exceed 1 (got {})", self.d)));
        }
        if self.mu <= 0.0 || self.nu <= 0.0 || self.kappa <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "mu, nu, kappa must be strictly positive (got {}, {}, {})",
                self.mu, self.nu, self.kappa
            )));
        }
        if let Some(dt) = self.d_tilde {
            if !dt.is_finite() || dt < self.d {
                return Err(Error::InvalidParams(format!(
                    "D_tilde must satisfy D_tilde >= D (got {} < {})",
                    dt, self.d
                )));
            }
        }
        Ok(())
    }

    /// The product κν appearing in the exchange term.
    #[inline]
    pub fn kn(&self) -> f64 {
        self.kappa * self.nu
    }

    /// Same parameters with the road diffusivity replaced and no second road.
    pub fn with_diffusivity(&self, d: f64) -> Result<Self> {
        ModelParams::new(d, self.mu, self.nu, self.kappa)
    }

    /// Drops the second-road diffusivity, keeping everything else.
    pub fn single_road(&self) -> Self {
        ModelParams { d_tilde: None, ..*self }
    }
}

impl Default for ModelParams {
    /// The reference configuration: D = 9, μ = ν = κ = 1.
    fn default() -> Self {
        ModelParams { d: 9.0, mu: 1.0, nu: 1.0, kappa: 1.0, d_tilde: None }
    }
}
