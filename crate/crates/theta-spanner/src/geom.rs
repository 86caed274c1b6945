//! Planar primitives: points, clockwise angles, cones, canonical triangles,
//! segment intersection, and general-position validation.
//!
//! Angle convention used throughout the crate: directions are measured
//! *clockwise* from the positive y-axis, i.e. `cw_angle((0,1)) = 0` and
//! `cw_angle((1,0)) = pi/2`. Cone 0 is bisected by the upward vertical and
//! cones are numbered clockwise, so cone `i` is bisected by direction
//! `i * theta`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// Angular tolerance (radians) below which a direction counts as lying on a
/// cone boundary, and the sine-of-angle tolerance for orientation tests.
pub const EPS_ANGLE: f64 = 1e-9;

/// Default tolerance for general-position validation.
pub const EPS_GP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// A constraint segment, stored as a pair of point ids into an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub a: usize,
    pub b: usize,
}

impl Segment {
    pub fn new(a: usize, b: usize) -> Self {
        Segment { a, b }
    }

    /// The endpoint that is not `v`, if `v` is one of the two.
    pub fn other(self, v: usize) -> Option<usize> {
        if self.a == v {
            Some(self.b)
        } else if self.b == v {
            Some(self.a)
        } else {
            None
        }
    }
}

/// Clockwise angle of a direction vector, in `[0, tau)`, measured from the
/// positive y-axis.
pub fn cw_angle(d: Point) -> f64 {
    f64::atan2(d.x, d.y).rem_euclid(TAU)
}

/// Unit vector at clockwise angle `phi`.
pub fn unit(phi: f64) -> Point {
    Point::new(phi.sin(), phi.cos())
}

/// Wrap an angle difference into `(-pi, pi]`.
pub fn wrap_signed(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// The cone partition around every vertex: `m = 4k + x` cones of angle
/// `theta = tau / m`, with `k >= 1` and `x` in `2..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSystem {
    pub m: usize,
    pub k: usize,
    pub x: usize,
    pub theta: f64,
}

impl ConeSystem {
    pub fn new(m: usize) -> Result<Self> {
        if m < 6 {
            return Err(Error::UnsupportedConeCount { m });
        }
        let x = (m - 2) % 4 + 2;
        let k = (m - x) / 4;
        Ok(ConeSystem {
            m,
            k,
            x,
            theta: TAU / m as f64,
        })
    }

    pub fn half(self) -> f64 {
        self.theta / 2.0
    }

    /// Clockwise angle of cone `i`'s bisector.
    pub fn bisector(self, i: usize) -> f64 {
        (i as f64 * self.theta).rem_euclid(TAU)
    }
}

/// Cone index of `v` as seen from `u`, together with the signed clockwise
/// offset of the direction from that cone's bisector (in `(-theta/2, theta/2)`).
///
/// Errors with [`Error::BoundaryDegeneracy`] when the direction falls within
/// [`EPS_ANGLE`] of a cone boundary (or when the points coincide).
pub fn cone_offset(u: Point, v: Point, cones: ConeSystem) -> Result<(usize, f64)> {
    let d = v - u;
    if d.x == 0.0 && d.y == 0.0 {
        return Err(Error::BoundaryDegeneracy {
            x0: u.x,
            y0: u.y,
            x1: v.x,
            y1: v.y,
        });
    }
    let phi = cw_angle(d);
    let t = phi / cones.theta + 0.5;
    let f = t.floor();
    let frac = t - f;
    if frac.min(1.0 - frac) * cones.theta < EPS_ANGLE {
        return Err(Error::BoundaryDegeneracy {
            x0: u.x,
            y0: u.y,
            x1: v.x,
            y1: v.y,
        });
    }
    let i = (f as i64).rem_euclid(cones.m as i64) as usize;
    let off = wrap_signed(phi - i as f64 * cones.theta);
    Ok((i, off))
}

/// Cone index of `v` as seen from `u`.
pub fn cone_of(u: Point, v: Point, cones: ConeSystem) -> Result<usize> {
    cone_offset(u, v, cones).map(|(i, _)| i)
}

/// Length of the projection of `v` onto the bisector of cone `cone` of `u`.
/// `v` must lie in that cone.
pub fn projection_length(u: Point, v: Point, cone: usize, cones: ConeSystem) -> Result<f64> {
    let (i, off) = cone_offset(u, v, cones)?;
    if i != cone {
        return Err(Error::NotInCone {
            ax: u.x,
            ay: u.y,
            x: v.x,
            y: v.y,
            cone,
        });
    }
    Ok(u.dist(v) * off.cos())
}

/// The canonical triangle of a directed pair `(u, w)`: the triangle with apex
/// `u`, bounded by the two rays of `u`'s cone containing `w`, and closed by
/// the line through `w` perpendicular to the cone's bisector.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalTriangle {
    pub apex: Point,
    pub target: Point,
    /// Cone of `apex` that contains `target`.
    pub cone: usize,
    /// Unsigned angle between `apex -> target` and the bisector.
    pub alpha: f64,
    /// Signed clockwise offset of `apex -> target` from the bisector.
    pub offset: f64,
    /// Projection of `target` onto the bisector (distance from apex).
    pub proj: f64,
    /// Far corner on the counterclockwise side of the bisector.
    pub corner_ccw: Point,
    /// Far corner on the clockwise side of the bisector.
    pub corner_cw: Point,
    /// Intersection of the bisector with the far side.
    pub far_mid: Point,
}

pub fn canonical_triangle(u: Point, w: Point, cones: ConeSystem) -> Result<CanonicalTriangle> {
    let (cone, offset) = cone_offset(u, w, cones)?;
    let alpha = offset.abs();
    let proj = u.dist(w) * offset.cos();
    let bis = cones.bisector(cone);
    let half = cones.half();
    let len = proj / half.cos();
    let scale = |phi: f64, r: f64| {
        let d = unit(phi);
        Point::new(u.x + r * d.x, u.y + r * d.y)
    };
    Ok(CanonicalTriangle {
        apex: u,
        target: w,
        cone,
        alpha,
        offset,
        proj,
        corner_ccw: scale(bis - half, len),
        corner_cw: scale(bis + half, len),
        far_mid: scale(bis, proj),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Twice the signed area of triangle `(a, b, c)`; positive for
/// counterclockwise order in standard (y-up) coordinates.
pub fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Orientation of the triple with a relative tolerance: the triple counts as
/// collinear when the sine of the angle at `a` is below [`EPS_ANGLE`].
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let area = cross(a, b, c);
    let scale = a.dist(b) * a.dist(c);
    if area.abs() <= EPS_ANGLE * scale {
        Orientation::Collinear
    } else if area > 0.0 {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

/// Whether the open interiors of segments `p1p2` and `q1q2` intersect.
///
/// Segments that merely share an endpoint, or touch a vertex of the other
/// segment, do not properly intersect. Collinear segments properly intersect
/// exactly when they overlap in more than a point.
pub fn proper_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    if o1 == Orientation::Collinear && o2 == Orientation::Collinear {
        // All four points are on one line; check open 1D overlap along the
        // dominant axis of p1p2 (or q1q2 if p1p2 is degenerate).
        let d = if p1.dist(p2) > 0.0 { p2 - p1 } else { q2 - q1 };
        let key = |p: Point| {
            if d.x.abs() >= d.y.abs() {
                p.x * d.x.signum()
            } else {
                p.y * d.y.signum()
            }
        };
        let (lo_p, hi_p) = minmax(key(p1), key(p2));
        let (lo_q, hi_q) = minmax(key(q1), key(q2));
        let span = (hi_p - lo_p).max(hi_q - lo_q);
        return lo_p.max(lo_q) < hi_p.min(hi_q) - EPS_ANGLE * span;
    }
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
        && o1 != o2
        && o3 != o4
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A failed general-position predicate, identifying the offending points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GpViolation {
    /// Points `p` and `q` coincide.
    DuplicatePoint { p: usize, q: usize },
    /// Direction `p -> q` is parallel (mod pi) to cone-boundary ray `ray`.
    RayParallel { p: usize, q: usize, ray: usize },
    /// Direction `p -> q` is perpendicular to the bisector of cone `cone`.
    BisectorPerpendicular { p: usize, q: usize, cone: usize },
    /// Points `p`, `q`, `r` are collinear.
    CollinearTriple { p: usize, q: usize, r: usize },
}

/// Check the general-position assumptions the construction relies on: no two
/// points coincide, no pair defines a direction parallel to a cone boundary
/// or perpendicular to a cone bisector, and no three points are collinear.
///
/// `eps` is a sine-of-angle tolerance; use [`EPS_GP`] unless there is a
/// reason not to.
pub fn validate_general_position(
    points: &[Point],
    cones: ConeSystem,
    eps: f64,
) -> Vec<GpViolation> {
    let mut out = Vec::new();
    // Directions are compared mod pi, so for even m antipodal rays/bisectors
    // would report every violation twice; restrict to one representative.
    let reps = if cones.m.is_multiple_of(2) {
        cones.m / 2
    } else {
        cones.m
    };
    let rays: Vec<Point> = (0..reps)
        .map(|j| unit((j as f64 + 0.5) * cones.theta))
        .collect();
    let bisectors: Vec<Point> = (0..reps).map(|j| unit(cones.bisector(j))).collect();

    for p in 0..points.len() {
        for q in (p + 1)..points.len() {
            let d = points[q] - points[p];
            let len = d.x.hypot(d.y);
            if len < eps {
                out.push(GpViolation::DuplicatePoint { p, q });
                continue;
            }
            let u = Point::new(d.x / len, d.y / len);
            for (j, r) in rays.iter().enumerate() {
                if (u.x * r.y - u.y * r.x).abs() < eps {
                    out.push(GpViolation::RayParallel { p, q, ray: j });
                }
            }
            for (j, b) in bisectors.iter().enumerate() {
                if (u.x * b.x + u.y * b.y).abs() < eps {
                    out.push(GpViolation::BisectorPerpendicular { p, q, cone: j });
                }
            }
        }
    }
    for p in 0..points.len() {
        for q in (p + 1)..points.len() {
            for r in (q + 1)..points.len() {
                if orientation_with_eps(points[p], points[q], points[r], eps)
                    == Orientation::Collinear
                {
                    out.push(GpViolation::CollinearTriple { p, q, r });
                }
            }
        }
    }
    out
}

fn orientation_with_eps(a: Point, b: Point, c: Point, eps: f64) -> Orientation {
    let area = cross(a, b, c);
    let scale = a.dist(b) * a.dist(c);
    if area.abs() <= eps * scale {
        Orientation::Collinear
    } else if area > 0.0 {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}
