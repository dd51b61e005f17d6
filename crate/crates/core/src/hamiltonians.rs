//! The Hamiltonians of the model.
//!
//! In the thin-front limit the field obeys the Hamiltonian
//! H_f(q,p) = q² + p² + 1, while the road carries the boundary Hamiltonian
//! F₀(q,p) = Dq² + B₀(p) with an exchange term B₀ that blows up at p = −κν.
//! The flux limiter of the junction problem is the effective road Hamiltonian
//!
//!   H_r(q) = q² + p_q² + 1,
//!
//! where p_q > 0 is the unique crossing H_f(q, p_q) = F₀(q, p_q) when
//! q² > 1/(D−1) and p_q = 0 otherwise.  The strong boundary condition uses
//! F(q,p) = max{H_f⁻(q,p), H_r(q)} with H_f⁻ the nonincreasing-in-p part of
//! H_f.

use crate::error::{Error, Result};
use crate::numerics::{bisect_root, grow_until};
use crate::params::ModelParams;

/// Default absolute tolerance for the crossing-momentum root find; all
/// downstream tolerances derive from it.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// A real value extended with +∞, used by the boundary Hamiltonian whose
/// exchange term genuinely takes the value +∞ for p ≤ −κν.  Carrying the
/// sentinel in the type keeps it distinct from an overflow artifact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }
}

/// Field Hamiltonian H_f(q, p) = q² + p² + 1.
#[inline]
pub fn field_hamiltonian(q: f64, p: f64) -> f64 {
    q * q + p * p + 1.0
}

/// Nonincreasing-in-p part of the field Hamiltonian:
/// H_f⁻(q, p) = q² + (p₊)² + 1 with p₊ = max{p, 0}.
#[inline]
pub fn field_hamiltonian_minus(q: f64, p: f64) -> f64 {
    let pp = p.max(0.0);
    q * q + pp * pp + 1.0
}

/// Boundary Hamiltonian F₀(q, p) = Dq² − μp/(κν + p), equal to +∞ for
/// p ≤ −κν.
pub fn boundary_hamiltonian(q: f64, p: f64, params: &ModelParams) -> ExtReal {
    let kn = params.kn();
    if p <= -kn {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(params.d * q * q - params.mu * p / (kn + p))
    }
}

/// Flux-limited boundary Hamiltonian F(q, p) = max{H_f⁻(q, p), H_r(q)}.
pub fn flux_limited_hamiltonian(q: f64, p: f64, ham: &EffectiveRoadHamiltonian) -> f64 {
    field_hamiltonian_minus(q, p).max(ham.value(q))
}

/// Evaluator for the effective road Hamiltonian H_r and its crossing
/// momentum p_q.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct EffectiveRoadHamiltonian {
    params: ModelParams,
    q_crit: f64,
    tol: f64,
}

impl EffectiveRoadHamiltonian {
    pub fn new(params: &ModelParams) -> Self {
        Self::with_tolerance(params, DEFAULT_ROOT_TOL)
    }

    pub fn with_tolerance(params: &ModelParams, tol: f64) -> Self {
        EffectiveRoadHamiltonian {
            params: *params,
            q_crit: 1.0 / (params.d - 1.0).sqrt(),
            tol,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// The momentum threshold 1/√(D−1) below which the road is inactive
    /// (p_q = 0 and H_r coincides with H_f(·, 0)).
    pub fn q_crit(&self) -> f64 {
        self.q_crit
    }

    pub fn root_tolerance(&self) -> f64 {
        self.tol
    }

    /// The increasing function g with g(p_q) = |q|:
    /// g(p) = √( [p² + 1 + μp/(κν + p)] / (D−1) ), defined for p ≥ 0.
    pub fn crossing_fn(&self, p: f64) -> Result<f64> {
        if p < 0.0 {
            return Err(Error::InvalidInput(format!(
                "crossing function is defined for p >= 0 (got {p})"
            )));
        }
        Ok(self.g(p))
    }

    #[inline]
    pub(crate) fn g(&self, p: f64) -> f64 {
        let kn = self.params.kn();
        ((p * p + 1.0 + self.params.mu * p / (kn + p)) / (self.params.d - 1.0)).sqrt()
    }

    /// g′(p) for p ≥ 0; strictly positive.
    #[inline]
    pub(crate) fn g_prime(&self, p: f64) -> f64 {
        let kn = self.params.kn();
        let s = kn + p;
        (2.0 * p + self.params.mu * kn / (s * s)) / (2.0 * (self.params.d - 1.0) * self.g(p))
    }

    /// Crossing momentum p_q: zero for q² ≤ 1/(D−1), otherwise the unique
    /// positive root of g(p) = |q|.  Even in q and continuous across the
    /// threshold.
    pub fn critical_momentum(&self, q: f64) -> f64 {
        let qa = q.abs();
        if qa <= self.q_crit {
            return 0.0;
        }
        // g is strictly increasing, so a geometrically grown bracket plus
        // bisection is unconditionally safe.
        let hi = grow_until(|p| self.g(p) > qa, 1.0);
        bisect_root(|p| self.g(p) - qa, 0.0, hi, self.tol)
    }

    /// H_r(q) = q² + p_q² + 1.
    pub fn value(&self, q: f64) -> f64 {
        let p = self.critical_momentum(q);
        q * q + p * p + 1.0
    }

    /// Analytic derivative H_r′(q).
    ///
    /// 2q on the inactive branch; 2q + 2·p_q/g′(p_q)·sign(q) on the active
    /// branch by implicit differentiation of g(p_q) = |q|.  At exactly
    /// q = ±q_crit the two one-sided values coincide at ±2·q_crit.
    pub fn deriv(&self, q: f64) -> f64 {
        let qa = q.abs();
        if qa <= self.q_crit {
            return 2.0 * q;
        }
        let p = self.critical_momentum(qa);
        let d = 2.0 * qa + 2.0 * p / self.g_prime(p);
        if q >= 0.0 {
            d
        } else {
            -d
        }
    }

    /// H_r′ parametrized by the crossing momentum: returns H_r′(g(p)) for
    /// p ≥ 0.  Strictly increasing in p; the Legendre module solves the
    /// first-order condition in this variable to avoid nesting root finds.
    #[inline]
    pub(crate) fn deriv_by_momentum(&self, p: f64) -> f64 {
        2.0 * self.g(p) + 2.0 * p / self.g_prime(p)
    }
}
