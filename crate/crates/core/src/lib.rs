//! Front-propagation predictions for the road-field reaction-diffusion model.
//!
//! A species diffuses fast along a 1-D road (density U, no reproduction) and
//! diffuses/reproduces in the 2-D field above it (density V), exchanging mass
//! at the road.  In the thin-front limit the invasion is governed by a
//! Hamilton-Jacobi problem with a flux-limited junction condition on the road,
//! and the invaded region at time t is t·W for a fixed Wulff shape W.
//!
//! The crate computes both sides of that picture:
//!
//! * [`hamiltonians`] - the field Hamiltonian q² + p² + 1, the boundary
//!   Hamiltonian Dq² + B₀(p), and the effective road Hamiltonian H_r obtained
//!   from the flux limiter.
//! * [`legendre`] - the field and road Lagrangians as convex conjugates.
//! * [`value`] - the value function J via a Lax-Oleinik-type reduction to a
//!   two-parameter minimization (road-departure time and abscissa), its
//!   minimizing path, gradient, and w = max{0, J}.
//! * [`geometry`] - road speed, directional speeds c_*(θ), the critical angle
//!   θ_*, Wulff shape sampling, convexity checks, and large-D asymptotics.
//! * [`conical`] - the same objects on a conical domain bounded by two roads,
//!   via the reflection that swaps the roads.
//! * [`simulate`] - an explicit finite-difference simulation of the original
//!   PDE system used to cross-validate the Hamilton-Jacobi predictions.

pub mod conical;
pub mod error;
pub mod geometry;
pub mod hamiltonians;
pub mod legendre;
mod numerics;
pub mod params;
pub mod simulate;
pub mod value;

pub use conical::{ConeGeometry, ConeSample, ConeWulff, DiffusionContrastOptions};
pub use error::{Error, Result};
pub use geometry::WulffShape;
pub use hamiltonians::{EffectiveRoadHamiltonian, ExtReal};
pub use legendre::RoadLagrangian;
pub use params::ModelParams;
pub use simulate::{RdState, SpeedEstimate};
pub use value::LaxOleinikSolution;
