//! Fronts on conical domains bounded by two roads.
//!
//! The cone of half-angle a opens from the positive x-axis road Γ₀ to the ray
//! Γ_a at polar angle 2a; Ψ_a is the orthogonal reflection across the
//! bisector, which swaps the two roads.  When both roads share the same
//! diffusivity the cone value function reduces to the half-plane one:
//!
//!   J_a(t, x, y) = min{ J(t, x, y), J(t, Ψ_a(x, y)) },
//!
//! so the cone Wulff shape is (W ∪ Ψ_a W) ∩ closure(Ω_a).  With unequal road
//! diffusivities that reduction can fail and only speed bounds are reported.

use crate::error::{Error, Result};
use crate::geometry;
use crate::params::ModelParams;
use crate::value;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

const ANGLE_TOL: f64 = 1e-6;
const INSIDE_TOL: f64 = 1e-6;

/// A cone of opening 2a, bounded by the road Γ₀ (positive x-axis) and the
/// road Γ_a (polar angle 2a), with the reflection that exchanges them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConeGeometry {
    a: f64,
    cos2a: f64,
    sin2a: f64,
}

impl ConeGeometry {
    /// Half-angle a ∈ (0, π/2]; a = π/2 recovers the half-plane.
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 || a > FRAC_PI_2 + 1e-15 {
            return Err(Error::InvalidInput(format!(
                "cone half-angle must lie in (0, pi/2] (got {a})"
            )));
        }
        Ok(ConeGeometry { a, cos2a: (2.0 * a).cos(), sin2a: (2.0 * a).sin() })
    }

    pub fn half_angle(&self) -> f64 {
        self.a
    }

    pub fn is_half_plane(&self) -> bool {
        (self.a - FRAC_PI_2).abs() <= ANGLE_TOL
    }

    /// Reflection across the bisector: maps Γ₀ onto Γ_a and fixes the
    /// bisector pointwise.
    pub fn reflect(&self, x: f64, y: f64) -> (f64, f64) {
        (self.cos2a * x + self.sin2a * y, self.sin2a * x - self.cos2a * y)
    }

    /// Whether (x, y) lies in the closed sector, up to an angular tolerance.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x == 0.0 && y == 0.0 {
            return true;
        }
        let ang = y.atan2(x);
        ang >= -ANGLE_TOL && ang <= 2.0 * self.a + ANGLE_TOL
    }

    /// Sector bounds in the angle-from-the-y-axis convention:
    /// θ ∈ [π/2 − 2a, π/2].
    pub fn theta_range(&self) -> (f64, f64) {
        (FRAC_PI_2 - 2.0 * self.a, FRAC_PI_2)
    }
}

/// One boundary sample of the sector-restricted Wulff shape.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConeSample {
    /// Angle from the y-axis.
    pub theta: f64,
    pub speed: f64,
    pub x: f64,
    pub y: f64,
    /// 0 when governed by the Γ₀ branch, 1 by the reflected Γ_a branch.
    pub branch: u8,
}

/// Sector-restricted Wulff shape with its convexity classification.
#[derive(Debug, Clone, Serialize)]
pub struct ConeWulff {
    pub half_angle: f64,
    pub params: ModelParams,
    pub samples: Vec<ConeSample>,
    pub theta_star: f64,
    pub road_speed: f64,
    /// Angle criterion a ≥ π/2 − θ_*.
    pub convex: bool,
    /// Geometric cross-check: supporting-chord test at the bisector.
    pub convex_by_supporting_line: bool,
}

fn require_equal_diffusivities(params: &ModelParams) -> Result<()> {
    if params.d_tilde.is_some() && params.d_tilde != Some(params.d) {
        return Err(Error::InvalidInput(
            "the min-reduction holds for equal road diffusivities only; use \
             unequal_diffusion_speed_bounds for D_tilde > D"
                .into(),
        ));
    }
    Ok(())
}

/// Cone value function J_a(t, x, y) = min{J(t,x,y), J(t, Ψ_a(x,y))}.
///
/// Valid for equal road diffusivities and points in the closed sector.
pub fn cone_value(t: f64, x: f64, y: f64, cone: &ConeGeometry, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    require_equal_diffusivities(params)?;
    if !cone.contains(x, y) {
        return Err(Error::InvalidInput(format!(
            "point ({x}, {y}) lies outside the closed cone of opening {}",
            2.0 * cone.half_angle()
        )));
    }
    let (rx, ry) = cone.reflect(x, y);
    let j0 = value::solve(t, x, y.max(0.0), params)?.value;
    let j1 = value::solve(t, rx, ry.max(0.0), params)?.value;
    Ok(j0.min(j1))
}

/// w_a = max{0, J_a}.
pub fn cone_front_value(
    t: f64,
    x: f64,
    y: f64,
    cone: &ConeGeometry,
    params: &ModelParams,
) -> Result<f64> {
    Ok(cone_value(t, x, y, cone, params)?.max(0.0))
}

fn check_sector_angle(theta: f64, cone: &ConeGeometry) -> Result<()> {
    let (lo, hi) = cone.theta_range();
    if !theta.is_finite() || theta < lo - ANGLE_TOL || theta > hi + ANGLE_TOL {
        return Err(Error::InvalidInput(format!(
            "angle {theta} outside the cone sector [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Directional speed on the cone: c_{*a}(θ) = c_*(θ) on the Γ₀ side
/// (θ ≥ π/2 − a) and c_*(π − 2a − θ) on the Γ_a side.
pub fn cone_speed(theta: f64, cone: &ConeGeometry, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    require_equal_diffusivities(params)?;
    check_sector_angle(theta, cone)?;
    let mirror = FRAC_PI_2 - cone.half_angle();
    if theta >= mirror {
        geometry::directional_speed(theta, params)
    } else {
        geometry::directional_speed(std::f64::consts::PI - 2.0 * cone.half_angle() - theta, params)
    }
}

/// Samples the sector-restricted Wulff boundary and classifies convexity.
pub fn cone_wulff(cone: &ConeGeometry, params: &ModelParams, n: usize) -> Result<ConeWulff> {
    params.validate()?;
    require_equal_diffusivities(params)?;
    if n < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 samples (got {n})")));
    }
    let (lo, hi) = cone.theta_range();
    let road = geometry::road_speed(params)?;
    let mirror = FRAC_PI_2 - cone.half_angle();
    let thetas: Vec<f64> =
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let samples: Vec<ConeSample> = thetas
        .par_iter()
        .map(|&theta| {
            let speed = cone_speed(theta, cone, params)?;
            Ok(ConeSample {
                theta,
                speed,
                x: speed * theta.sin(),
                y: speed * theta.cos(),
                branch: u8::from(theta < mirror),
            })
        })
        .collect::<Result<_>>()?;
    let theta_star = geometry::critical_angle(params)?;
    // The shape has a supporting line at the bisector point exactly when
    // c_* is nonincreasing there, i.e. a >= pi/2 - theta_*.
    let convex = cone.half_angle() >= FRAC_PI_2 - theta_star - ANGLE_TOL;
    // Cross-check: the chord across the bisector stays inside a convex
    // region; at a notch its midpoint falls outside.
    let k = ((mirror - lo) / (hi - lo) * (n - 1) as f64).round() as usize;
    let k = k.clamp(1, n - 2);
    let (a, b) = (&samples[k - 1], &samples[k + 1]);
    let mid = [0.5 * (a.x + b.x), 0.5 * (a.y + b.y)];
    let convex_by_supporting_line =
        cone_value(1.0, mid[0], mid[1], cone, params)? <= INSIDE_TOL;
    Ok(ConeWulff {
        half_angle: cone.half_angle(),
        params: *params,
        samples,
        theta_star,
        road_speed: road,
        convex,
        convex_by_supporting_line,
    })
}

/// Bisection estimate of the diffusivity threshold D_a: the cone shape is
/// convex for D ≤ D_a and nonconvex beyond.  The bracket [2, 4(2+μ)²csc²(2a)]
/// is guaranteed to contain it.
pub fn convexity_threshold_diffusivity(cone: &ConeGeometry, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if cone.is_half_plane() {
        return Err(Error::InvalidInput(
            "the half-plane shape is convex for every D; no threshold exists".into(),
        ));
    }
    let csc = 1.0 / (2.0 * cone.half_angle()).sin();
    let mut hi = 4.0 * (2.0 + params.mu).powi(2) * csc * csc;
    let mut lo = 2.0;
    let nonconvex = |d: f64| -> Result<bool> {
        let p = params.with_diffusivity(d)?;
        Ok(cone.half_angle() < FRAC_PI_2 - geometry::critical_angle(&p)? - ANGLE_TOL)
    };
    if nonconvex(lo)? {
        return Ok(lo);
    }
    while hi - lo > 1e-2 * lo {
        let mid = 0.5 * (lo + hi);
        if nonconvex(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Options for the unequal-diffusivity speed bounds.
#[derive(Debug, Clone, Copy)]
pub struct DiffusionContrastOptions {
    /// Accept a ≥ π/4, outside the proved regime; bounds are then heuristic.
    pub force_wide_angle: bool,
    /// Augment the lower bound with the equal-diffusivity cone speed (a
    /// comparison-principle consequence beyond the reflected-road bound).
    pub augment_lower: bool,
}

impl Default for DiffusionContrastOptions {
    fn default() -> Self {
        DiffusionContrastOptions { force_wide_angle: false, augment_lower: true }
    }
}

/// Speed bounds c_{*a}(θ; D, D̃) ∈ [lower, upper] when the road Γ_a is faster
/// (D̃ ≥ D).  No point value is claimed: the min-reduction may fail here.
///
/// lower = max{ c_*(π − 2a − θ; D̃), c_{*a}(θ; D, D) }  (second term optional)
/// upper = max{ c_*(θ; D̃), c_*(π − 2a − θ; D̃) }
pub fn unequal_diffusion_speed_bounds(
    theta: f64,
    cone: &ConeGeometry,
    params: &ModelParams,
    opts: DiffusionContrastOptions,
) -> Result<(f64, f64)> {
    params.validate()?;
    let d_tilde = params.d_tilde.ok_or_else(|| {
        Error::InvalidInput("unequal-diffusion bounds need params.d_tilde".into())
    })?;
    if cone.half_angle() >= FRAC_PI_4 - 1e-12 && !opts.force_wide_angle {
        return Err(Error::InvalidInput(
            "bounds are established for a < pi/4; pass force_wide_angle to evaluate anyway \
             (results are then unverified)"
                .into(),
        ));
    }
    check_sector_angle(theta, cone)?;
    let fast = params.with_diffusivity(d_tilde)?;
    let slow = params.single_road();
    let mirror_theta = std::f64::consts::PI - 2.0 * cone.half_angle() - theta;

    let mirror_fast = geometry::directional_speed(mirror_theta, &fast)?;
    let mut lower = mirror_fast;
    if opts.augment_lower {
        lower = lower.max(cone_speed(theta, cone, &slow)?);
    }
    let upper = geometry::directional_speed(theta, &fast)?.max(mirror_fast);

    // On the fast road itself both bounds collapse onto its half-plane speed.
    let on_fast_road = (theta - (FRAC_PI_2 - 2.0 * cone.half_angle())).abs() <= ANGLE_TOL;
    if on_fast_road && (upper - lower).abs() > 1e-6 {
        return Err(Error::Inconsistency(format!(
            "fast-road bounds failed to pinch: [{lower}, {upper}]"
        )));
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(d: f64) -> ModelParams {
        ModelParams::new(d, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn reflection_examples() {
        let c = ConeGeometry::new(FRAC_PI_4).unwrap();
        let (x, y) = c.reflect(1.0, 0.0);
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 1.0, epsilon = 1e-15);

        let h = ConeGeometry::new(FRAC_PI_2).unwrap();
        let (x, y) = h.reflect(0.3, 0.7);
        assert_abs_diff_eq!(x, -0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 0.7, epsilon = 1e-15);

        // bisector points are fixed
        let c = ConeGeometry::new(0.7).unwrap();
        let (bx, by) = (2.0 * 0.7f64.cos(), 2.0 * 0.7f64.sin());
        let (x, y) = c.reflect(bx, by);
        assert_abs_diff_eq!(x, bx, epsilon = 1e-14);
        assert_abs_diff_eq!(y, by, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn reflection_is_an_involution(
            a in 1e-3..FRAC_PI_2,
            x in -10.0..10.0f64,
            y in -10.0..10.0f64,
        ) {
            let c = ConeGeometry::new(a).unwrap();
            let (rx, ry) = c.reflect(x, y);
            let (bx, by) = c.reflect(rx, ry);
            prop_assert!((bx - x).abs() < 1e-14 * (1.0 + x.abs()));
            prop_assert!((by - y).abs() < 1e-14 * (1.0 + y.abs()));
            // norm is preserved
            prop_assert!((x.hypot(y) - rx.hypot(ry)).abs() < 1e-12 * (1.0 + x.hypot(y)));
        }
    }

    #[test]
    fn reflection_swaps_roads() {
        for a in [0.3, FRAC_PI_4, 1.2] {
            let c = ConeGeometry::new(a).unwrap();
            let (x, y) = c.reflect(1.0, 0.0);
            assert_abs_diff_eq!(y.atan2(x), 2.0 * a, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_cones_and_points() {
        assert!(ConeGeometry::new(0.0).is_err());
        assert!(ConeGeometry::new(2.0).is_err());
        let c = ConeGeometry::new(FRAC_PI_8).unwrap();
        let p = params(9.0);
        assert!(cone_value(1.0, -1.0, 0.5, &c, &p).is_err());
        let with_tilde = p.with_second_road(16.0).unwrap();
        assert!(cone_value(1.0, 1.0, 0.1, &c, &with_tilde).is_err());
    }

    const FRAC_PI_8: f64 = PI / 8.0;

    #[test]
    fn half_plane_cone_reduces_to_half_plane() {
        let c = ConeGeometry::new(FRAC_PI_2).unwrap();
        let p = params(9.0);
        for &(x, y) in &[(1.0, 0.5), (-2.0, 1.0), (0.0, 2.0)] {
            let ja = cone_value(1.0, x, y, &c, &p).unwrap();
            let j = value::solve(1.0, x, y, &p).unwrap().value;
            assert_abs_diff_eq!(ja, j, epsilon = 1e-12);
        }
    }

    #[test]
    fn bisector_points_see_equal_branches() {
        let a = FRAC_PI_4;
        let c = ConeGeometry::new(a).unwrap();
        let p = params(9.0);
        let (bx, by) = (1.5 * a.cos(), 1.5 * a.sin());
        let j0 = value::solve(1.0, bx, by, &p).unwrap().value;
        let (rx, ry) = c.reflect(bx, by);
        let j1 = value::solve(1.0, rx, ry, &p).unwrap().value;
        assert_abs_diff_eq!(j0, j1, epsilon = 1e-9);
        assert_abs_diff_eq!(cone_value(1.0, bx, by, &c, &p).unwrap(), j0, epsilon = 1e-9);
    }

    // Frozen from the componentwise half-plane values at (2.5, 0.1):
    // J = -0.199898514435 on the direct branch, 0.415885573213 reflected.
    const JA_25_01_PI8_D9: f64 = -0.199_898_514_435;

    #[test]
    fn frozen_cone_value() {
        let c = ConeGeometry::new(FRAC_PI_8).unwrap();
        let p = params(9.0);
        assert_abs_diff_eq!(
            cone_value(1.0, 2.5, 0.1, &c, &p).unwrap(),
            JA_25_01_PI8_D9,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            cone_front_value(1.0, 2.5, 0.1, &c, &p).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cone_speed_examples() {
        let p = params(9.0);
        let road = geometry::road_speed(&p).unwrap();
        for a in [FRAC_PI_8, FRAC_PI_4, 5.0 * PI / 12.0] {
            let c = ConeGeometry::new(a).unwrap();
            // both roads spread at the half-plane road speed
            assert_abs_diff_eq!(
                cone_speed(FRAC_PI_2, &c, &p).unwrap(),
                road,
                epsilon = 1e-6
            );
            assert_abs_diff_eq!(
                cone_speed(FRAC_PI_2 - 2.0 * a, &c, &p).unwrap(),
                road,
                epsilon = 1e-6
            );
        }
        // symmetry about the bisector and the uniform bound 2 csc a
        let a = PI / 6.0;
        let c = ConeGeometry::new(a).unwrap();
        let v = cone_speed(FRAC_PI_2 - a, &c, &p).unwrap();
        assert_abs_diff_eq!(
            v,
            geometry::directional_speed(FRAC_PI_2 - a, &p).unwrap(),
            epsilon = 1e-9
        );
        assert!(v <= 2.0 / a.sin() + 1e-9);
        assert!(cone_speed(FRAC_PI_2 - 2.5 * a, &c, &p).is_err());
    }

    #[test]
    fn cone_wulff_matches_reflection_formula() {
        let p = params(9.0);
        let c = ConeGeometry::new(FRAC_PI_4).unwrap();
        let w = cone_wulff(&c, &p, 33).unwrap();
        for s in &w.samples {
            let direct = if s.theta >= FRAC_PI_2 - c.half_angle() {
                geometry::directional_speed(s.theta, &p).unwrap()
            } else {
                geometry::directional_speed(PI - 2.0 * c.half_angle() - s.theta, &p).unwrap()
            };
            assert_abs_diff_eq!(s.speed, direct, epsilon = 1e-6);
            // every boundary point is within distance 2 of one of the roads
            let ray_dist = |x: f64, y: f64| if x >= 0.0 { y.abs() } else { x.hypot(y) };
            let d0 = ray_dist(s.x, s.y);
            let (rx, ry) = c.reflect(s.x, s.y);
            let da = ray_dist(rx, ry);
            assert!(d0.min(da) <= 2.0 + 1e-6, "sample at theta={}", s.theta);
        }
        let road = w.road_speed;
        assert_abs_diff_eq!(w.samples.first().unwrap().speed, road, epsilon = 1e-6);
        assert_abs_diff_eq!(w.samples.last().unwrap().speed, road, epsilon = 1e-6);
        assert_eq!(w.samples.first().unwrap().branch, 1);
        assert_eq!(w.samples.last().unwrap().branch, 0);
    }

    #[test]
    fn convexity_regimes() {
        let p = params(9.0);
        let ts = geometry::critical_angle(&p).unwrap();
        // just above the threshold angle: convex
        let c = ConeGeometry::new((FRAC_PI_2 - ts + 0.05).min(FRAC_PI_2)).unwrap();
        let w = cone_wulff(&c, &p, 33).unwrap();
        assert!(w.convex);
        assert!(w.convex_by_supporting_line);
        // a = pi/8 at D = 9: the visible notch
        let c = ConeGeometry::new(FRAC_PI_8).unwrap();
        let w = cone_wulff(&c, &p, 33).unwrap();
        assert!(!w.convex);
        assert!(!w.convex_by_supporting_line);
        // nonconvex whenever D reaches 4(2+mu)^2 csc^2(2a)
        let d_big = 4.0 * 9.0 * (1.0 / (2.0 * FRAC_PI_8).sin()).powi(2);
        assert_abs_diff_eq!(d_big, 72.0, epsilon = 1e-12);
        let w = cone_wulff(&c, &params(d_big), 33).unwrap();
        assert!(!w.convex);
        assert!(!w.convex_by_supporting_line);
    }

    #[test]
    fn nonconvexity_is_monotone_in_diffusivity() {
        for a in [FRAC_PI_8, PI / 6.0] {
            let at = |d: f64| {
                let ts = geometry::critical_angle(&params(d)).unwrap();
                a < FRAC_PI_2 - ts - ANGLE_TOL
            };
            assert!(at(9.0), "nonconvex at D = 9");
            assert!(at(18.0), "still nonconvex at D = 18");
        }
    }

    #[test]
    fn speed_trichotomy() {
        // small diffusivity: every direction spreads at 2
        let p = params(1.8);
        let c = ConeGeometry::new(FRAC_PI_4).unwrap();
        let (lo, hi) = c.theta_range();
        for i in 0..5 {
            let theta = lo + (hi - lo) * i as f64 / 4.0;
            assert_abs_diff_eq!(cone_speed(theta, &c, &p).unwrap(), 2.0, epsilon = 1e-4);
        }
        // D > 2 with a narrow cone: every direction enhanced
        let p = params(9.0);
        let ts = geometry::critical_angle(&p).unwrap();
        let a = 0.9f64.min(FRAC_PI_2 - ts);
        let c = ConeGeometry::new(a).unwrap();
        let (lo, hi) = c.theta_range();
        for i in 0..5 {
            let theta = lo + (hi - lo) * i as f64 / 4.0;
            assert!(cone_speed(theta, &c, &p).unwrap() > 2.0 + 1e-4);
        }
        // Wide cone: flat at exactly 2 on the middle band, enhanced outside.
        // Both branches are unenhanced exactly when theta <= theta_* and
        // pi - 2a - theta <= theta_*, i.e. on [pi - 2a - theta_*, theta_*];
        // the stated flat band elsewhere conflicts with the reflection
        // formula and was verified against the raw min of the two values.
        let a = 1.2f64;
        assert!(a > FRAC_PI_2 - ts);
        let c = ConeGeometry::new(a).unwrap();
        let (flat_lo, flat_hi) = (PI - 2.0 * a - ts, ts);
        assert!(flat_lo < flat_hi);
        for i in 0..5 {
            let theta = flat_lo + 0.02 + (flat_hi - flat_lo - 0.04) * i as f64 / 4.0;
            assert_abs_diff_eq!(cone_speed(theta, &c, &p).unwrap(), 2.0, epsilon = 1e-4);
        }
        for theta in [flat_hi + 0.05, FRAC_PI_2, flat_lo - 0.05, FRAC_PI_2 - 2.0 * a] {
            assert!(cone_speed(theta, &c, &p).unwrap() > 2.0 + 1e-4, "theta={theta}");
        }
    }

    #[test]
    fn unequal_diffusion_bounds() {
        let a = PI / 6.0;
        let cone = ConeGeometry::new(a).unwrap();
        let p = params(4.0).with_second_road(16.0).unwrap();
        // on the fast road both bounds pinch to its half-plane speed
        let theta = FRAC_PI_2 - 2.0 * a;
        let (lo, hi) =
            unequal_diffusion_speed_bounds(theta, &cone, &p, Default::default()).unwrap();
        let fast_speed = geometry::road_speed(&p.with_diffusivity(16.0).unwrap()).unwrap();
        assert_abs_diff_eq!(lo, fast_speed, epsilon = 1e-6);
        assert_abs_diff_eq!(hi, fast_speed, epsilon = 1e-6);

        // slow-road enhancement: 2 csc(2a) > c_*(pi/2; D) and a huge contrast
        let a = FRAC_PI_8;
        let cone = ConeGeometry::new(a).unwrap();
        let p = params(4.0).with_second_road(400.0).unwrap();
        let slow_speed = geometry::road_speed(&params(4.0)).unwrap();
        assert!(2.0 / (2.0 * a).sin() > slow_speed);
        let (lo, hi) =
            unequal_diffusion_speed_bounds(FRAC_PI_2, &cone, &p, Default::default()).unwrap();
        assert!(lo > slow_speed + 1e-3, "enhanced: {lo} > {slow_speed}");
        assert!(hi >= lo - 1e-9);

        // degenerate contrast: bounds collapse onto the cone speed
        let p = params(9.0).with_second_road(9.0).unwrap();
        let theta = FRAC_PI_2 - 1.5 * a;
        let (lo, hi) =
            unequal_diffusion_speed_bounds(theta, &cone, &p, Default::default()).unwrap();
        let exact = cone_speed(theta, &cone, &params(9.0)).unwrap();
        assert_abs_diff_eq!(lo, exact, epsilon = 1e-6);
        assert_abs_diff_eq!(hi, exact, epsilon = 1e-6);

        // wide angles are gated behind the force flag
        let wide = ConeGeometry::new(FRAC_PI_4 + 0.1).unwrap();
        let p = params(4.0).with_second_road(16.0).unwrap();
        assert!(unequal_diffusion_speed_bounds(FRAC_PI_2, &wide, &p, Default::default()).is_err());
        let forced = DiffusionContrastOptions { force_wide_angle: true, augment_lower: true };
        assert!(unequal_diffusion_speed_bounds(FRAC_PI_2, &wide, &p, forced).is_ok());
    }

    #[test]
    fn threshold_diffusivity_bisection() {
        let cone = ConeGeometry::new(FRAC_PI_8).unwrap();
        let p = params(9.0);
        let da = convexity_threshold_diffusivity(&cone, &p).unwrap();
        assert!((2.0..=72.0).contains(&da));
        // the indicator flips within 2% of the estimate (bisection converged
        // to 1% relative)
        let ts_lo = geometry::critical_angle(&p.with_diffusivity(da * 0.98).unwrap()).unwrap();
        let ts_hi = geometry::critical_angle(&p.with_diffusivity(da * 1.02).unwrap()).unwrap();
        assert!(FRAC_PI_8 >= FRAC_PI_2 - ts_lo - 1e-3);
        assert!(FRAC_PI_8 < FRAC_PI_2 - ts_hi);
    }
}
