//! Front geometry: road speed, directional speeds, critical angle, Wulff
//! shape, and large-D asymptotics.
//!
//! The invaded region at time t is t·W where W = {J(1,·) ≤ 0}.  Angles are
//! measured from the positive y-axis, so θ = ±π/2 points along the road.  The
//! directional speed c_*(θ) is the unique radius where J(1, ·) vanishes along
//! the ray; below the critical angle θ_* the road plays no role and
//! c_*(θ) = 2.

use crate::error::{Error, Result};
use crate::hamiltonians::EffectiveRoadHamiltonian;
use crate::legendre::RoadLagrangian;
use crate::numerics::{bisect_root, golden_min, grow_until};
use crate::params::ModelParams;
use crate::value;
use rayon::prelude::*;
use serde::Serialize;

/// Agreement required between the two road-speed characterizations.
pub const ROAD_SPEED_CONSISTENCY_TOL: f64 = 1e-7;
/// Absolute tolerance for angle comparisons and the θ_* bisection.
pub const ANGLE_TOL: f64 = 1e-6;
/// c_*(θ) must exceed 2 by this much to count as road-enhanced.
const LIFTOFF_EPS: f64 = 1e-6;
/// A midpoint is inside the Wulff region when J(1, ·) does not exceed this.
const INSIDE_TOL: f64 = 1e-6;

/// Sampled Wulff shape boundary.
///
/// `samples` holds (θ, c_*(θ)) ordered by θ over [−π/2, π/2]; the negative
/// half is the mirror image of the computed nonnegative half.
#[derive(Debug, Clone, Serialize)]
pub struct WulffShape {
    pub params: ModelParams,
    pub samples: Vec<(f64, f64)>,
    pub theta_star: f64,
    pub road_speed: f64,
    pub convex: bool,
}

impl WulffShape {
    /// Boundary point c_*(θ)·(sin θ, cos θ) for sample `i`.
    pub fn point(&self, i: usize) -> [f64; 2] {
        let (theta, c) = self.samples[i];
        [c * theta.sin(), c * theta.cos()]
    }
}

/// Spreading speed along the road, c_*(π/2).
///
/// Computed as min_{q>0} H_r(q)/q and cross-checked against the unique
/// positive root of L_r(c) = 0; the two must agree to 1e-7.
pub fn road_speed(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let ham = EffectiveRoadHamiltonian::new(params);
    let ratio = |q: f64| ham.value(q) / q;
    let hi = grow_until(|q| ratio(2.0 * q) >= ratio(q), 1.0);
    let (_, by_min) = golden_min(ratio, 1e-9, 2.0 * hi, 1e-12);

    let lagr = RoadLagrangian::from_hamiltonian(ham);
    let chi = grow_until(|c| lagr.value(c) > 0.0, 4.0);
    let by_root = bisect_root(|c| lagr.value(c), 0.0, chi, 1e-12);

    if (by_min - by_root).abs() > ROAD_SPEED_CONSISTENCY_TOL {
        return Err(Error::Inconsistency(format!(
            "road speed characterizations disagree: min H_r(q)/q = {by_min} vs root of L_r = {by_root}"
        )));
    }
    Ok(by_min)
}

fn check_angle(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() > std::f64::consts::FRAC_PI_2 + ANGLE_TOL {
        return Err(Error::InvalidInput(format!(
            "angle must lie in [-pi/2, pi/2] (got {theta})"
        )));
    }
    Ok(())
}

/// Directional spreading speed c_*(θ): the unique c > 0 with
/// J(1, c sin θ, c cos θ) = 0.
pub fn directional_speed(theta: f64, params: &ModelParams) -> Result<f64> {
    check_angle(theta)?;
    let cs = road_speed(params)?;
    directional_speed_with(theta, params, cs)
}

/// Same as [`directional_speed`] with the road speed already known.
fn directional_speed_with(theta: f64, params: &ModelParams, road: f64) -> Result<f64> {
    check_angle(theta)?;
    let lagr = RoadLagrangian::new(params);
    let (s, c) = (theta.sin(), theta.cos().max(0.0));
    let f = |r: f64| value::solve_scaled(1.0, r * s, r * c, &lagr).value;
    // J(1,0,0) = -1 and J is strictly radially increasing; c_* is at most the
    // road speed, so [1, max(4, 2 road)] brackets the root.
    let hi = 4f64.max(2.0 * road);
    Ok(bisect_root(f, 1.0, hi, 1e-10))
}

/// Critical angle θ_*: c_*(θ) = 2 for |θ| ≤ θ_* and c_*(θ) > 2 beyond it.
/// Equals π/2 whenever D ≤ 2.
pub fn critical_angle(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if params.d <= 2.0 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let road = road_speed(params)?;
    if road <= 2.0 + LIFTOFF_EPS {
        // no detectable liftoff anywhere, including along the road
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    // c_* is flat at 2 below theta_* and strictly increasing above, so a
    // bisection on the liftoff indicator is well posed where a derivative
    // condition would not be.
    let enhanced = |theta: f64| -> Result<bool> {
        Ok(directional_speed_with(theta, params, road)? > 2.0 + LIFTOFF_EPS)
    };
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    while hi - lo > ANGLE_TOL {
        let mid = 0.5 * (lo + hi);
        if enhanced(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples the Wulff boundary at `n` uniformly spaced angles in [0, π/2],
/// mirrors them to negative angles, and classifies the shape.
pub fn sample_wulff(params: &ModelParams, n: usize) -> Result<WulffShape> {
    params.validate()?;
    if n < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 samples (got {n})")));
    }
    let road = road_speed(params)?;
    let half = std::f64::consts::FRAC_PI_2;
    let speeds: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| directional_speed_with(half * i as f64 / (n - 1) as f64, params, road))
        .collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(2 * n - 1);
    for i in (1..n).rev() {
        samples.push((-half * i as f64 / (n - 1) as f64, speeds[i]));
    }
    for (i, &c) in speeds.iter().enumerate() {
        samples.push((half * i as f64 / (n - 1) as f64, c));
    }
    let theta_star = critical_angle(params)?;
    let mut shape = WulffShape { params: *params, samples, theta_star, road_speed: road, convex: false };
    shape.convex = midpoint_test(&shape)?;
    Ok(shape)
}

/// Speed of the lower shape 𝐖̲ (road at c_*(π/2), field at 2, straight
/// segments): 2 up to 𝜗̲ = arcsin(2/c_*(π/2)), then 2/cos(|θ| − 𝜗̲).
pub fn lower_shape_speed(theta: f64, params: &ModelParams) -> Result<f64> {
    check_angle(theta)?;
    let road = road_speed(params)?;
    let vt = (2.0 / road).asin();
    let at = theta.abs();
    if at <= vt {
        Ok(2.0)
    } else {
        Ok(2.0 / (at - vt).cos())
    }
}

/// The limit of c_*(π/2)/√D as D → ∞ for fixed (μ, ν, κ):
/// min_{θ>0} (1 + ζ_θ²)/θ with ζ_θ the exchange-balanced momentum solving
/// θ² = ζ² + 1 + μζ/(κν + ζ) (zero for θ ≤ 1).
pub fn large_d_asymptote(params: &ModelParams) -> f64 {
    let (mu, kn) = (params.mu, params.kn());
    let zeta = |theta: f64| -> f64 {
        if theta <= 1.0 {
            return 0.0;
        }
        let target = theta * theta;
        let f = |z: f64| z * z + 1.0 + mu * z / (kn + z) - target;
        let hi = grow_until(|z| f(z) > 0.0, 1.0);
        bisect_root(f, 0.0, hi, 1e-12)
    };
    let obj = |theta: f64| {
        let z = zeta(theta);
        (1.0 + z * z) / theta
    };
    // The objective is 1/theta below 1 and unimodal beyond; grow the bracket
    // until it has started increasing.
    let hi = grow_until(|t| obj(t) > obj(0.5 * t), 4.0);
    let (_, val) = golden_min(obj, 1.0, hi, 1e-11);
    val.min(obj(1.0))
}

/// True when every midpoint of adjacent boundary samples lies inside the
/// region {J(1, ·) ≤ 0} (up to tolerance).
pub fn convexity_check(shape: &WulffShape) -> Result<bool> {
    if shape.samples.len() < 16 {
        return Err(Error::InvalidInput(format!(
            "convexity check needs at least 16 samples (got {})",
            shape.samples.len()
        )));
    }
    midpoint_test(shape)
}

fn midpoint_test(shape: &WulffShape) -> Result<bool> {
    let lagr = RoadLagrangian::new(&shape.params);
    for i in 0..shape.samples.len() - 1 {
        let a = shape.point(i);
        let b = shape.point(i + 1);
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let j = value::solve_scaled(1.0, mid[0], mid[1].max(0.0), &lagr).value;
        if j > INSIDE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
