//! Instances (points plus non-crossing constraint segments), visibility
//! between vertices, and convex chains inside constraint-free triangles.

use crate::geom::{
    cross, orientation, proper_intersection, Orientation, Point, Segment, EPS_ANGLE,
};
use crate::{Error, Result};

/// A point set together with a plane (non-crossing) set of constraint
/// segments between points. Constructed via [`Instance::new`], which
/// normalizes constraints to `a < b` and validates the structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    points: Vec<Point>,
    constraints: Vec<Segment>,
}

impl Instance {
    pub fn new(points: Vec<Point>, constraints: Vec<Segment>) -> Result<Instance> {
        let n = points.len();
        let mut normalized: Vec<Segment> = Vec::with_capacity(constraints.len());
        for s in &constraints {
            for id in [s.a, s.b] {
                if id >= n {
                    return Err(Error::IndexOutOfRange { index: id, len: n });
                }
            }
            if s.a == s.b {
                return Err(Error::InvalidInstance(format!(
                    "constraint from point {} to itself",
                    s.a
                )));
            }
            normalized.push(Segment::new(s.a.min(s.b), s.a.max(s.b)));
        }
        normalized.sort();
        for w in normalized.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInstance(format!(
                    "duplicate constraint {}-{}",
                    w[0].a, w[0].b
                )));
            }
        }
        for (i, s) in normalized.iter().enumerate() {
            for t in &normalized[i + 1..] {
                if proper_intersection(points[s.a], points[s.b], points[t.a], points[t.b]) {
                    return Err(Error::InvalidInstance(format!(
                        "constraints {}-{} and {}-{} cross",
                        s.a, s.b, t.a, t.b
                    )));
                }
            }
        }
        Ok(Instance {
            points,
            constraints: normalized,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn constraints(&self) -> &[Segment] {
        &self.constraints
    }

    pub fn point(&self, id: usize) -> Point {
        self.points[id]
    }

    pub fn is_constraint(&self, u: usize, v: usize) -> bool {
        let s = Segment::new(u.min(v), u.max(v));
        self.constraints.binary_search(&s).is_ok()
    }

    /// Constraints incident to `v`, as (constraint index, other endpoint).
    pub fn incident_constraints(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(move |(i, s)| s.other(v).map(|q| (i, q)))
    }
}

/// Whether `u` and `v` see each other: either `uv` is itself a constraint, or
/// no constraint properly crosses the open segment between them. A vertex
/// trivially sees itself.
pub fn visible(inst: &Instance, u: usize, v: usize) -> bool {
    if u == v || inst.is_constraint(u, v) {
        return true;
    }
    let (pu, pv) = (inst.point(u), inst.point(v));
    !inst
        .constraints
        .iter()
        .any(|s| proper_intersection(pu, pv, inst.point(s.a), inst.point(s.b)))
}

/// Dense pairwise visibility, precomputed once per instance.
#[derive(Clone, Debug)]
pub struct VisibilityGraph {
    n: usize,
    bits: Vec<bool>,
}

impl VisibilityGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn visible(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v]
    }

    /// Visible pairs with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.visible(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

pub fn visibility_graph(inst: &Instance) -> VisibilityGraph {
    let n = inst.n();
    let mut bits = vec![false; n * n];
    for u in 0..n {
        bits[u * n + u] = true;
        for v in (u + 1)..n {
            if visible(inst, u, v) {
                bits[u * n + v] = true;
                bits[v * n + u] = true;
            }
        }
    }
    VisibilityGraph { n, bits }
}

/// A convex chain of vertices from `from` to `to` inside the triangle spanned
/// by the two endpoints and `apex`, bulging away from the apex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexChain {
    pub from: usize,
    pub to: usize,
    pub apex: usize,
    /// Vertex ids in order, starting with `from` and ending with `to`.
    pub vertices: Vec<usize>,
}

/// Build the convex chain from `u` to `v` with apex `w`: the arc of the
/// convex hull of `{u, v}` plus all instance points strictly inside triangle
/// `uvw` that faces the apex. With no interior points the chain is just
/// `[u, v]`.
pub fn convex_chain(inst: &Instance, u: usize, v: usize, w: usize) -> Result<ConvexChain> {
    let n = inst.n();
    for id in [u, v, w] {
        if id >= n {
            return Err(Error::IndexOutOfRange { index: id, len: n });
        }
    }
    if u == v || u == w || v == w {
        return Err(Error::PreconditionViolated(
            "chain endpoints and apex must be distinct".into(),
        ));
    }
    let (pu, pv, pw) = (inst.point(u), inst.point(v), inst.point(w));
    let tri_sign = match orientation(pu, pv, pw) {
        Orientation::Collinear => {
            return Err(Error::PreconditionViolated(
                "chain frame is collinear".into(),
            ))
        }
        o => o,
    };

    let strictly_inside = |p: Point| {
        for (a, b) in [(pu, pv), (pv, pw), (pw, pu)] {
            if orientation(a, b, p) != tri_sign {
                return false;
            }
        }
        true
    };
    let mut ids: Vec<usize> = vec![u, v];
    ids.extend((0..n).filter(|&i| i != u && i != v && i != w && strictly_inside(inst.point(i))));

    let hull = convex_hull_ccw(inst, &ids);
    let pos_u = hull.iter().position(|&i| i == u);
    let pos_u = match pos_u {
        Some(p) => p,
        None => {
            return Err(Error::PreconditionViolated(
                "chain endpoint fell inside the hull (degenerate input)".into(),
            ))
        }
    };
    if !hull.contains(&v) {
        return Err(Error::PreconditionViolated(
            "chain endpoint fell inside the hull (degenerate input)".into(),
        ));
    }
    let nh = hull.len();
    let walk = |step: isize| {
        let mut arc = Vec::new();
        let mut i = pos_u as isize;
        loop {
            arc.push(hull[i.rem_euclid(nh as isize) as usize]);
            if *arc.last().unwrap() == v {
                return arc;
            }
            i += step;
        }
    };
    let fwd = walk(1);
    let bwd = walk(-1);
    let vertices = if fwd.len() == 2 {
        bwd
    } else if bwd.len() == 2 {
        fwd
    } else {
        return Err(Error::PreconditionViolated(
            "endpoints are not hull-adjacent (degenerate input)".into(),
        ));
    };
    Ok(ConvexChain {
        from: u,
        to: v,
        apex: w,
        vertices,
    })
}

/// Counterclockwise convex hull (monotone chain) of the given point ids.
/// Collinear hull points are dropped.
fn convex_hull_ccw(inst: &Instance, ids: &[usize]) -> Vec<usize> {
    let mut sorted: Vec<usize> = ids.to_vec();
    sorted.sort_by(|&a, &b| {
        let (pa, pb) = (inst.point(a), inst.point(b));
        pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y))
    });
    if sorted.len() <= 2 {
        return sorted;
    }
    let half = |order: &[usize]| {
        let mut h: Vec<usize> = Vec::new();
        for &i in order {
            while h.len() >= 2
                && cross(
                    inst.point(h[h.len() - 2]),
                    inst.point(h[h.len() - 1]),
                    inst.point(i),
                ) <= 0.0
            {
                h.pop();
            }
            h.push(i);
        }
        h
    };
    let mut lower = half(&sorted);
    sorted.reverse();
    let mut upper = half(&sorted);
    lower.pop();
    upper.pop();
    lower.append(&mut upper);
    lower
}

/// Check every property a valid convex chain must have:
///
/// * starts at `from`, ends at `to`, vertices distinct and apex-free;
/// * every vertex lies in the closed triangle `(from, to, apex)`;
/// * consecutive vertices see each other;
/// * the apex lies strictly on the same side of every chain edge, and the
///   chain only ever turns away from the apex;
/// * the pocket between the chain and the apex is empty: it strictly contains
///   no instance point, and no constraint crosses into it.
pub fn verify_chain(inst: &Instance, chain: &ConvexChain) -> bool {
    let n = inst.n();
    let ids = &chain.vertices;
    if ids.len() < 2
        || ids[0] != chain.from
        || *ids.last().unwrap() != chain.to
        || chain.apex >= n
        || ids.iter().any(|&i| i >= n || i == chain.apex)
    {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in ids {
        if seen[i] {
            return false;
        }
        seen[i] = true;
    }
    let (pu, pv, pw) = (
        inst.point(chain.from),
        inst.point(chain.to),
        inst.point(chain.apex),
    );
    let sign = orientation(pu, pv, pw);
    if sign == Orientation::Collinear {
        return false;
    }

    // Closed-triangle membership.
    for &i in ids {
        let p = inst.point(i);
        for (a, b) in [(pu, pv), (pv, pw), (pw, pu)] {
            if orientation(a, b, p) == sign.reversed() {
                return false;
            }
        }
    }

    for e in ids.windows(2) {
        if !visible(inst, e[0], e[1]) {
            return false;
        }
        if orientation(inst.point(e[0]), inst.point(e[1]), pw) != sign {
            return false;
        }
    }
    for t in ids.windows(3) {
        let o = orientation(inst.point(t[0]), inst.point(t[1]), inst.point(t[2]));
        if o == sign {
            return false;
        }
    }

    // Pocket emptiness. The pocket is the polygon chain + apex.
    let pocket_ids: Vec<usize> = ids
        .iter()
        .copied()
        .chain(std::iter::once(chain.apex))
        .collect();
    let pocket: Vec<Point> = pocket_ids.iter().map(|&i| inst.point(i)).collect();
    for (i, &on_chain) in seen.iter().enumerate() {
        if i != chain.apex && !on_chain && strictly_inside_polygon(inst.point(i), &pocket) {
            return false;
        }
    }
    for s in inst.constraints() {
        let (pa, pb) = (inst.point(s.a), inst.point(s.b));
        for e in 0..pocket.len() {
            let (i1, i2) = (pocket_ids[e], pocket_ids[(e + 1) % pocket.len()]);
            // A constraint that is itself a boundary edge of the pocket lies
            // on the boundary, not across it.
            if (s.a, s.b) == (i1, i2) || (s.a, s.b) == (i2, i1) {
                continue;
            }
            if proper_intersection(pa, pb, pocket[e], pocket[(e + 1) % pocket.len()]) {
                return false;
            }
        }
        let mid = Point::new((pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0);
        for p in [pa, pb, mid] {
            if strictly_inside_polygon(p, &pocket) {
                return false;
            }
        }
    }
    true
}

fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * ab.x, a.y + t * ab.y))
}

/// Even-odd test, with points within tolerance of the boundary counted as
/// outside.
fn strictly_inside_polygon(p: Point, poly: &[Point]) -> bool {
    let mut diag: f64 = 0.0;
    for q in poly {
        diag = diag.max((q.x - p.x).abs()).max((q.y - p.y).abs());
    }
    let tol = EPS_ANGLE * (diag + 1.0);
    let m = poly.len();
    for e in 0..m {
        if point_segment_dist(p, poly[e], poly[(e + 1) % m]) < tol {
            return false;
        }
    }
    let mut inside = false;
    for e in 0..m {
        let a = poly[e];
        let b = poly[(e + 1) % m];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}
