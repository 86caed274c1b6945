//! Constrained theta-graphs over planar point sets, plus the machinery to
//! check their spanning guarantees empirically.
//!
//! A theta-graph partitions the plane around every vertex `u` into `m` equal
//! cones and connects `u` to the "closest" vertex per cone, where closeness is
//! measured by projection onto the cone's bisector. The constrained variant
//! takes a set of non-crossing line segments as obstacles-with-benefits: edges
//! of the graph may not cross them, constraints themselves are always edges,
//! and every cone is split into subcones by the constraints incident to its
//! apex, with one edge chosen per subcone.
//!
//! The crate is organized bottom-up:
//!
//! * [`geom`] — points, cones, canonical triangles, general-position checks.
//! * [`visibility`] — visibility among vertices with respect to constraints,
//!   and convex chains inside empty triangles.
//! * [`theta`] — subcone decomposition and graph construction.
//! * [`bounds`] — closed-form stretch bounds per cone-count family and the
//!   inductive inequalities they rest on.
//! * [`verify`] — shortest paths, per-pair ratio reports, adversarial search.
//! * [`io`] — instance/report (de)serialization and SVG rendering.

pub mod bounds;
pub mod geom;
pub mod io;
pub mod theta;
pub mod verify;
pub mod visibility;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A queried direction lies within angular tolerance of a cone boundary,
    /// so the cone index is not well defined.
    #[error("direction from ({x0}, {y0}) to ({x1}, {y1}) lies on a cone boundary")]
    BoundaryDegeneracy { x0: f64, y0: f64, x1: f64, y1: f64 },

    /// A point was expected inside a specific cone of another point.
    #[error("point ({x}, {y}) is not in cone {cone} of ({ax}, {ay})")]
    NotInCone {
        ax: f64,
        ay: f64,
        x: f64,
        y: f64,
        cone: usize,
    },

    /// An angular argument fell outside the half-cone range `[0, theta/2]`.
    #[error("alpha = {alpha} out of range [0, {max}]")]
    AlphaOutOfRange { alpha: f64, max: f64 },

    /// Cone counts below six are not supported by any of the bounds.
    #[error("unsupported cone count m = {m} (need m >= 6)")]
    UnsupportedConeCount { m: usize },

    /// A closed-form expression's denominator vanished.
    #[error("degenerate denominator in {context}: {value}")]
    DegenerateDenominator { context: &'static str, value: f64 },

    /// Input did not satisfy the geometric preconditions of an operation.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// The point set violates the general-position assumptions.
    #[error("general position violated: {0}")]
    GeneralPosition(String),

    /// An instance is structurally invalid (duplicates, crossings, ...).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// An id referred outside the instance's point set.
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
