//! The control value function J via its Lax-Oleinik-type reduction.
//!
//! The unique minimizing path from the origin to (x, y) with y ≥ 0 stays on
//! the road until a departure time τ₀, then crosses the field along a
//! straight segment.  After rescaling to t = 1 by J(t,x,y) = t·J(1, x/t, y/t)
//! this leaves a two-parameter problem over the departure time τ̂ ∈ [0,1] and
//! abscissa z ∈ [0, x̂]:
//!
//!   J(1, x̂, ŷ) = min  (1−τ̂)·L_f((x̂−z)/(1−τ̂), ŷ/(1−τ̂)) + τ̂·L_r(z/τ̂),
//!
//! which is jointly convex in (τ̂, z).  The boundary conventions are the
//! lower-semicontinuous limits: at τ̂ = 0 the road term vanishes only with
//! z = 0 (a positive z would be a cost-free jump, which no path realizes),
//! and at τ̂ = 1 the field term vanishes only with z = x̂ and ŷ = 0.

use crate::error::{Error, Result};
use crate::legendre::{field_lagrangian, RoadLagrangian};
use crate::numerics::golden_min;
use crate::params::ModelParams;
use serde::Serialize;

/// Absolute tolerance on the (τ, z) arguments of the minimization.
pub const ARG_TOL: f64 = 1e-10;

/// Value of J at one point together with the minimizing-path data.
///
/// `tau0` is the road-departure time in [0, t] and `z0` the departure
/// abscissa in [0, |x|]; the stored momenta `q0 ≥ 0`, `p0 ≥ 0` describe the
/// field segment of the path for the reflected point (|x|, y), so the
/// endpoint identities read z0 + 2·q0·(t − tau0) = |x| and
/// 2·p0·(t − tau0) = y.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LaxOleinikSolution {
    pub value: f64,
    pub tau0: f64,
    pub z0: f64,
    pub q0: f64,
    pub p0: f64,
}

impl LaxOleinikSolution {
    /// Speed along the road segment; 0 when the path never uses the road.
    pub fn on_road_speed(&self) -> f64 {
        if self.tau0 > 0.0 {
            self.z0 / self.tau0
        } else {
            0.0
        }
    }

    /// Velocity (2q₀, 2p₀) of the straight field segment.
    pub fn field_velocity(&self) -> (f64, f64) {
        (2.0 * self.q0, 2.0 * self.p0)
    }
}

fn check_point(t: f64, x: f64, y: f64) -> Result<()> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be positive and finite (got {t})")));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidInput("position must be finite".into()));
    }
    if y < 0.0 {
        return Err(Error::InvalidInput(format!("y must be nonnegative (got {y})")));
    }
    Ok(())
}

/// Solves the Lax-Oleinik minimization at (t, x, y).
pub fn solve(t: f64, x: f64, y: f64, params: &ModelParams) -> Result<LaxOleinikSolution> {
    check_point(t, x, y)?;
    params.validate()?;
    let lagr = RoadLagrangian::new(params);
    Ok(solve_scaled(t, x, y, &lagr))
}

pub(crate) fn solve_scaled(t: f64, x: f64, y: f64, lagr: &RoadLagrangian) -> LaxOleinikSolution {
    let xs = x.abs() / t;
    let ys = y / t;

    if ys == 0.0 {
        // On the road the minimum is the pure road path (z0, tau0) = (|x|, t).
        let (val, q0) = lagr.value_and_momentum(xs);
        return LaxOleinikSolution { value: t * val, tau0: t, z0: x.abs(), q0, p0: 0.0 };
    }

    // Inner problem: for fixed tau the objective is convex in z.
    let objective = |tau: f64, z: f64| {
        let dx = xs - z;
        (dx * dx + ys * ys) / (4.0 * (1.0 - tau)) - (1.0 - tau) + tau * lagr.value(z / tau)
    };
    let inner = |tau: f64| -> (f64, f64) {
        if tau == 0.0 {
            return (field_lagrangian(xs, ys), 0.0);
        }
        if xs == 0.0 {
            return (objective(tau, 0.0), 0.0);
        }
        let (z, f) = golden_min(|z| objective(tau, z), 0.0, xs, ARG_TOL);
        (f, z)
    };

    // Outer problem: convex in tau, +inf as tau -> 1.  Golden section, then a
    // local refinement pass around the first bracket.
    let (tau_a, _) = golden_min(|tau| inner(tau).0, 0.0, 1.0, 1e-7);
    let lo = (tau_a - 1e-5).max(0.0);
    let hi = (tau_a + 1e-5).min(1.0);
    let (mut tau, _) = golden_min(|tau| inner(tau).0, lo, hi, ARG_TOL);
    let (mut best, mut z) = inner(tau);

    // Ties at the tau0 = 0 transition break toward the straight field path.
    let straight = field_lagrangian(xs, ys);
    if straight <= best + 1e-12 * best.abs().max(1.0) {
        tau = 0.0;
        z = 0.0;
        best = straight;
    }

    let q0 = (xs - z) / (2.0 * (1.0 - tau));
    let p0 = ys / (2.0 * (1.0 - tau));
    LaxOleinikSolution { value: t * best, tau0: t * tau, z0: t * z, q0, p0 }
}

/// Exhaustive minimization of the same objective over a uniform
/// `n_tau × n_z` grid, boundary conventions included.  Upper-bounds the true
/// J and converges to it as the grids refine; kept deliberately free of the
/// golden-section path so it can serve as an independent cross-check.
pub fn brute_force_value(
    t: f64,
    x: f64,
    y: f64,
    params: &ModelParams,
    n_tau: usize,
    n_z: usize,
) -> Result<f64> {
    check_point(t, x, y)?;
    params.validate()?;
    if n_tau < 2 || n_z < 2 {
        return Err(Error::InvalidInput(format!(
            "grid counts must be at least 2 (got {n_tau} x {n_z})"
        )));
    }
    let lagr = RoadLagrangian::new(params);
    let xs = x.abs() / t;
    let ys = y / t;
    let mut best = f64::INFINITY;
    for i in 0..n_tau {
        let tau = i as f64 / (n_tau - 1) as f64;
        for j in 0..n_z {
            let z = xs * j as f64 / (n_z - 1) as f64;
            let val = if tau == 0.0 {
                if z == 0.0 {
                    field_lagrangian(xs, ys)
                } else {
                    continue;
                }
            } else if tau == 1.0 {
                if z == xs && ys == 0.0 {
                    lagr.value(xs)
                } else {
                    continue;
                }
            } else {
                let dx = xs - z;
                (dx * dx + ys * ys) / (4.0 * (1.0 - tau)) - (1.0 - tau) + tau * lagr.value(z / tau)
            };
            if val < best {
                best = val;
            }
        }
    }
    Ok(t * best)
}

/// Samples the two-segment minimizing path at `n_samples` times in [0, t].
pub fn optimal_path(
    t: f64,
    x: f64,
    y: f64,
    params: &ModelParams,
    n_samples: usize,
) -> Result<Vec<(f64, [f64; 2])>> {
    if n_samples < 2 {
        return Err(Error::InvalidInput("need at least 2 path samples".into()));
    }
    let sol = solve(t, x, y, params)?;
    let sgn = if x < 0.0 { -1.0 } else { 1.0 };
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let s = t * k as f64 / (n_samples - 1) as f64;
        let pos = if sol.tau0 > 0.0 && s <= sol.tau0 {
            [sgn * sol.z0 * s / sol.tau0, 0.0]
        } else {
            let ds = s - sol.tau0;
            [sgn * (sol.z0 + 2.0 * sol.q0 * ds), 2.0 * sol.p0 * ds]
        };
        out.push((s, pos));
    }
    Ok(out)
}

/// ∇J(t, x, y) = (q₀·sign(x), p₀); defined off the road only.
pub fn gradient(t: f64, x: f64, y: f64, params: &ModelParams) -> Result<(f64, f64)> {
    if y <= 0.0 {
        return Err(Error::InvalidInput(
            "gradient is defined for y > 0; use the road formula J(t,x,0) = t L_r(x/t) on the road"
                .into(),
        ));
    }
    let sol = solve(t, x, y, params)?;
    let sgn = if x < 0.0 { -1.0 } else { 1.0 };
    Ok((sgn * sol.q0, sol.p0))
}

/// w(t, x, y) = max{0, J(t, x, y)}: the rate function whose zero set is the
/// invaded region.
pub fn front_value(t: f64, x: f64, y: f64, params: &ModelParams) -> Result<f64> {
    Ok(solve(t, x, y, params)?.value.max(0.0))
}
