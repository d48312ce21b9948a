//! Curvature flow of smooth, strictly convex closed curves in a Minkowski
//! plane.
//!
//! The plane is normed by a smooth origin-symmetric unit ball `P`
//! ([`UnitBall`]). Curves ([`ConvexCurve`]) are stored by their Minkowski
//! curvature `k(θ)` on a uniform grid in the θ-gauge, where the tangent at
//! parameter `θ` is parallel to the dual boundary point `q(θ)`. Vertices,
//! lengths, areas and support functions are derived from `k`.
//!
//! - [`ball`]: support function, unit ball, dual ball, Minkowski norm.
//! - [`curve`]: curves from curvature, metrics, identities, median curvature,
//!   in/circumradius.
//! - [`offset`]: inner parallel curves and bodies.
//! - [`isoperimetry`]: Bonnesen, the symmetric functional `E`, the chord
//!   functional `F` and the Gage inequality.
//! - [`flow`]: the curvature PDE, RK4 time stepping, lab-frame
//!   reconstruction and evolution diagnostics.
//! - [`acceptance`]: the end-to-end verification suite.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod ball;
pub mod curve;
pub mod error;
pub mod flow;
pub mod isoperimetry;
pub mod offset;
pub mod optimize;
pub mod spectral;

pub use ball::{AngleGrid, SupportFunction, TangentChord, UnitBall};
pub use curve::{ConvexCurve, CurveMetrics};
pub use error::{Error, Result};
pub use flow::{FlowOutcome, FlowRun, FlowState, SolverConfig};
pub use isoperimetry::IsoReport;

pub type Vec2 = nalgebra::Vector2<f64>;

/// Bracket `[u, v]`: determinant of the matrix with columns `u`, `v`.
#[inline]
pub fn bracket(u: Vec2, v: Vec2) -> f64 {
    u.x * v.y - u.y * v.x
}
