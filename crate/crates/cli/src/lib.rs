//! Command dispatch for the `roadfield` binary.
//!
//! Parameters default to the reference configuration D = 9, μ = ν = κ = 1.
//! Every command emits either JSON (a top-level object with `command`,
//! `params`, `config`, `results`, and `tolerances`) or CSV where a tabular
//! schema exists.  The emitted `config` object can be fed back through
//! `--config` to reproduce the run.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid configuration,
//! 3 internal consistency failure or runtime guard.

pub mod verify;

use roadfield::error::Error as CoreError;
use roadfield::{conical, geometry, simulate, value};
use roadfield::{ConeGeometry, DiffusionContrastOptions, ModelParams};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

/// Machine-parseable failure, printed to stderr as `error[CODE]: message`.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub exit: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: "E_CONFIG", exit: 2, message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParams(_) | CoreError::InvalidInput(_) | CoreError::Unsupported(_) => {
                CliError { code: "E_CONFIG", exit: 2, message: e.to_string() }
            }
            CoreError::Inconsistency(_) => {
                CliError { code: "E_CONSISTENCY", exit: 3, message: e.to_string() }
            }
            CoreError::BoundaryGuard { .. } => {
                CliError { code: "E_GUARD", exit: 3, message: e.to_string() }
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: "E_IO", exit: 3, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// One fully resolved run; serializable so emitted JSON reproduces the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub params: ModelParams,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    Hamiltonian {
        q: f64,
        p: f64,
    },
    Legendre {
        v: f64,
    },
    Value {
        t: f64,
        x: f64,
        y: f64,
    },
    Path {
        t: f64,
        x: f64,
        y: f64,
        n: usize,
    },
    Speed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
    Wulff {
        n: usize,
    },
    Cone {
        angle: f64,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
        #[serde(default)]
        estimate_threshold: bool,
        #[serde(default)]
        force: bool,
    },
    Simulate {
        h: f64,
        lx: f64,
        ly: f64,
        tmax: f64,
        level: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angle: Option<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        thetas: Vec<f64>,
        sample_dt: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        snapshot: Option<PathBuf>,
    },
    Verify {
        #[serde(default)]
        quick: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Hamiltonian { .. } => "hamiltonian",
            Command::Legendre { .. } => "legendre",
            Command::Value { .. } => "value",
            Command::Path { .. } => "path",
            Command::Speed { .. } => "speed",
            Command::Wulff { .. } => "wulff",
            Command::Cone { .. } => "cone",
            Command::Simulate { .. } => "simulate",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Runs a resolved config, writing the artifact to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    config.params.validate().map_err(CliError::from)?;
    let params = config.params;
    let csv = config.format == Format::Csv;

    let emit_json = |out: &mut dyn Write,
                     config: &RunConfig,
                     results: serde_json::Value,
                     tolerances: serde_json::Value|
     -> Result<(), CliError> {
        let doc = json!({
            "command": config.command.name(),
            "params": params,
            "config": config,
            "results": results,
            "tolerances": tolerances,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    };

    match &config.command {
        Command::Hamiltonian { q, p } => {
            let ham = roadfield::EffectiveRoadHamiltonian::new(&params);
            let f0 = roadfield::hamiltonians::boundary_hamiltonian(*q, *p, &params);
            let results = json!({
                "field": roadfield::hamiltonians::field_hamiltonian(*q, *p),
                "field_minus": roadfield::hamiltonians::field_hamiltonian_minus(*q, *p),
                "boundary": f0.finite(),
                "boundary_infinite": f0.is_infinite(),
                "effective_road": ham.value(*q),
                "effective_road_deriv": ham.deriv(*q),
                "critical_momentum": ham.critical_momentum(*q),
                "q_crit": ham.q_crit(),
                "flux_limited": roadfield::hamiltonians::flux_limited_hamiltonian(*q, *p, &ham),
            });
            emit_json(out, config, results, json!({"root_tol": ham.root_tolerance()}))
        }
        Command::Legendre { v } => {
            let lagr = roadfield::RoadLagrangian::new(&params);
            let results = json!({
                "road_lagrangian": lagr.value(*v),
                "conjugate_momentum": lagr.conjugate_momentum(*v),
                "field_lagrangian": roadfield::legendre::field_lagrangian(*v, 0.0),
                "quadratic_window": lagr.quadratic_window(),
            });
            emit_json(out, config, results, json!({"conjugate_tol": 1e-12}))
        }
        Command::Value { t, x, y } => {
            let sol = value::solve(*t, *x, *y, &params)?;
            let grad = if *y > 0.0 {
                let (gx, gy) = value::gradient(*t, *x, *y, &params)?;
                json!([gx, gy])
            } else {
                serde_json::Value::Null
            };
            let results = json!({
                "value": sol.value,
                "w": sol.value.max(0.0),
                "tau0": sol.tau0,
                "z0": sol.z0,
                "q0": sol.q0,
                "p0": sol.p0,
                "on_road_speed": sol.on_road_speed(),
                "field_velocity": sol.field_velocity(),
                "gradient": grad,
            });
            emit_json(out, config, results, json!({"argument_tol": value::ARG_TOL}))
        }
        Command::Path { t, x, y, n } => {
            let path = value::optimal_path(*t, *x, *y, &params, *n)?;
            if csv {
                writeln!(out, "s,x,y")?;
                for (s, pos) in &path {
                    writeln!(out, "{s},{},{}", pos[0], pos[1])?;
                }
                Ok(())
            } else {
                let rows: Vec<_> =
                    path.iter().map(|(s, p)| json!({"s": s, "x": p[0], "y": p[1]})).collect();
                emit_json(out, config, json!({"path": rows}), json!({"argument_tol": value::ARG_TOL}))
            }
        }
        Command::Speed { theta } => {
            let road = geometry::road_speed(&params)?;
            let mut results = json!({
                "road_speed": road,
                "critical_angle": geometry::critical_angle(&params)?,
                "large_d_asymptote": geometry::large_d_asymptote(&params),
            });
            if let Some(theta) = theta {
                results["theta"] = json!(theta);
                results["directional_speed"] = json!(geometry::directional_speed(*theta, &params)?);
                results["lower_shape_speed"] = json!(geometry::lower_shape_speed(*theta, &params)?);
            }
            emit_json(
                out,
                config,
                results,
                json!({
                    "road_speed_consistency": geometry::ROAD_SPEED_CONSISTENCY_TOL,
                    "angle_tol": geometry::ANGLE_TOL,
                }),
            )
        }
        Command::Wulff { n } => {
            let shape = geometry::sample_wulff(&params, *n)?;
            if csv {
                writeln!(out, "theta_rad,speed,x,y")?;
                for &(theta, c) in shape.samples.iter().filter(|(t, _)| *t >= 0.0) {
                    writeln!(out, "{theta},{c},{},{}", c * theta.sin(), c * theta.cos())?;
                }
                Ok(())
            } else {
                emit_json(
                    out,
                    config,
                    serde_json::to_value(&shape)?,
                    json!({"angle_tol": geometry::ANGLE_TOL, "inside_tol": 1e-6}),
                )
            }
        }
        Command::Cone { angle, n, theta, estimate_threshold, force } => {
            let cone = ConeGeometry::new(*angle)?;
            if params.d_tilde.is_some() && params.d_tilde != Some(params.d) {
                // Unequal road diffusivities: only bounds are available.
                let theta = theta.ok_or_else(|| {
                    CliError::config("cone with --Dtilde needs --theta (bounds are per-direction)")
                })?;
                let opts =
                    DiffusionContrastOptions { force_wide_angle: *force, augment_lower: true };
                let (lo, hi) =
                    conical::unequal_diffusion_speed_bounds(theta, &cone, &params, opts)?;
                return emit_json(
                    out,
                    config,
                    json!({"theta": theta, "lower": lo, "upper": hi, "point_value": null}),
                    json!({"angle_tol": geometry::ANGLE_TOL}),
                );
            }
            let wulff = conical::cone_wulff(&cone, &params, *n)?;
            let threshold = if *estimate_threshold && !cone.is_half_plane() {
                Some(conical::convexity_threshold_diffusivity(&cone, &params)?)
            } else {
                None
            };
            if csv {
                writeln!(out, "theta_rad,speed,x,y,branch")?;
                for s in &wulff.samples {
                    writeln!(out, "{},{},{},{},{}", s.theta, s.speed, s.x, s.y, s.branch)?;
                }
                Ok(())
            } else {
                let mut results = serde_json::to_value(&wulff)?;
                if let Some(d) = theta {
                    results["directional_speed"] = json!(conical::cone_speed(*d, &cone, &params)?);
                }
                results["convexity_threshold_diffusivity"] = json!(threshold);
                emit_json(out, config, results, json!({"angle_tol": geometry::ANGLE_TOL}))
            }
        }
        Command::Simulate { h, lx, ly, tmax, level, angle, thetas, sample_dt, snapshot } => {
            let mut state = match angle {
                Some(a) => simulate::init_cone_state(&params, &ConeGeometry::new(*a)?, *lx, *ly, *h, 1.0)?,
                None => simulate::init_state(&params, *lx, *ly, *h, 1.0)?,
            };
            let thetas = if thetas.is_empty() {
                match angle {
                    None => vec![0.0, std::f64::consts::FRAC_PI_4, FRAC_PI_2],
                    Some(a) => vec![FRAC_PI_2, FRAC_PI_2 - *a, FRAC_PI_2 - 2.0 * a],
                }
            } else {
                thetas.clone()
            };
            let mut history: Vec<(f64, f64, f64)> = Vec::new();
            let mut guard: Option<CoreError> = None;
            let mut t_next = 0.0;
            while t_next <= *tmax + 1e-9 {
                if let Err(e) = state.advance_to(t_next) {
                    guard = Some(e);
                    break;
                }
                for &theta in &thetas {
                    if let Some(r) = state.extract_front(*level, theta) {
                        history.push((state.time(), theta, r));
                    }
                }
                t_next += *sample_dt;
            }
            if let Some(path) = snapshot {
                let mut f = std::fs::File::create(path)?;
                state.write_snapshot(&mut f)?;
            }
            if csv {
                writeln!(out, "t,theta,radius")?;
                for (t, theta, r) in &history {
                    writeln!(out, "{t},{theta},{r}")?;
                }
            } else {
                let mut speeds = serde_json::Map::new();
                for &theta in &thetas {
                    let pts: Vec<(f64, f64)> = history
                        .iter()
                        .filter(|(t, th, _)| *th == theta && *t >= 0.5 * state.time())
                        .map(|(t, _, r)| (*t, *r))
                        .collect();
                    if let Ok(est) = simulate::estimate_speed(&pts) {
                        speeds.insert(format!("{theta:.6}"), serde_json::to_value(est)?);
                    }
                }
                let (vlo, vhi) = state.field_bounds();
                let (ulo, uhi) = state.road_bounds();
                let results = json!({
                    "t_end": state.time(),
                    "speeds": speeds,
                    "field_bounds": [vlo, vhi],
                    "road_bounds": [ulo, uhi],
                    "guard_tripped": guard.is_some(),
                    "history_points": history.len(),
                });
                emit_json(out, config, results, json!({"level": level, "guard_cells": 5}))?;
            }
            match guard {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
        Command::Verify { quick } => {
            let report = verify::run_battery(&params, *quick);
            if csv {
                writeln!(out, "name,passed,measured,tolerance,detail")?;
                for c in &report.checks {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        c.name,
                        c.passed,
                        c.measured,
                        c.tolerance,
                        c.detail.replace(',', ";")
                    )?;
                }
            } else {
                emit_json(
                    out,
                    config,
                    serde_json::to_value(&report)?,
                    json!({"per_check": "see results"}),
                )?;
            }
            if report.checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(CliError {
                    code: "E_VERIFY",
                    exit: 1,
                    message: format!(
                        "{} of {} checks failed",
                        report.checks.iter().filter(|c| !c.passed).count(),
                        report.checks.len()
                    ),
                })
            }
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { code: "E_IO", exit: 3, message: e.to_string() }
    }
}
