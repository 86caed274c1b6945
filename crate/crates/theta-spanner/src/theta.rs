//! Constrained theta-graph construction: subcone decomposition around each
//! vertex and closest-by-projection edge selection per subcone.

use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::geom::{cone_offset, ConeSystem, Point, EPS_ANGLE};
use crate::visibility::{visibility_graph, Instance};
use crate::Result;

/// One piece of a cone after splitting by the constraints incident to its
/// apex vertex. Offsets are measured clockwise from the cone's bisector, so
/// a full cone spans `[-theta/2, theta/2)` and subcones of one cone are
/// ordered clockwise by `lo`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subcone {
    pub vertex: usize,
    pub cone: usize,
    /// Position of this subcone within its cone, counting clockwise from the
    /// counterclockwise boundary.
    pub index: usize,
    /// Clockwise offset of the counterclockwise boundary from the bisector.
    pub lo: f64,
    /// Clockwise offset of the clockwise boundary from the bisector.
    pub hi: f64,
    /// Indices of the constraints whose rays bound this subcone (at most one
    /// per side; cone boundaries are not generated by constraints).
    pub generators: Vec<usize>,
}

/// Split every cone of `u` by the constraints incident to `u`. Cones without
/// incident constraints yield a single subcone spanning the whole cone.
/// The result is ordered by cone, then clockwise within each cone.
pub fn subcones(inst: &Instance, u: usize, cones: ConeSystem) -> Result<Vec<Subcone>> {
    let pu = inst.point(u);
    let mut rays: Vec<Vec<(f64, usize)>> = vec![Vec::new(); cones.m];
    for (ci, q) in inst.incident_constraints(u) {
        let (i, off) = cone_offset(pu, inst.point(q), cones)?;
        rays[i].push((off, ci));
    }
    let half = cones.half();
    let mut out = Vec::with_capacity(cones.m);
    for (i, cone_rays) in rays.iter_mut().enumerate() {
        cone_rays.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut lo = -half;
        let mut lo_gen: Option<usize> = None;
        for (index, &(off, ci)) in cone_rays.iter().enumerate() {
            out.push(Subcone {
                vertex: u,
                cone: i,
                index,
                lo,
                hi: off,
                generators: lo_gen.into_iter().chain([ci]).collect(),
            });
            lo = off;
            lo_gen = Some(ci);
        }
        out.push(Subcone {
            vertex: u,
            cone: i,
            index: cone_rays.len(),
            lo,
            hi: half,
            generators: lo_gen.into_iter().collect(),
        });
    }
    Ok(out)
}

/// Points belonging to a subcone: those whose direction from the apex vertex
/// falls in `[lo, hi)` of the subcone's cone, plus the endpoints of its
/// generating constraints (which lie on the boundary rays and belong to the
/// subcones on both sides).
pub fn subcone_members(inst: &Instance, sub: &Subcone, cones: ConeSystem) -> Result<Vec<usize>> {
    subcone_members_flagged(inst, sub, cones).map(|(members, _)| members)
}

/// Like [`subcone_members`], but also reports members (other than generator
/// endpoints) whose direction lies within [`EPS_ANGLE`] of a splitting ray;
/// their assignment is numerically fragile.
pub fn subcone_members_flagged(
    inst: &Instance,
    sub: &Subcone,
    cones: ConeSystem,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let u = sub.vertex;
    let pu = inst.point(u);
    let half = cones.half();
    let gen_ends: Vec<usize> = sub
        .generators
        .iter()
        .map(|&ci| {
            inst.constraints()[ci]
                .other(u)
                .expect("generator at vertex")
        })
        .collect();
    let mut members = Vec::new();
    let mut flagged = Vec::new();
    for p in 0..inst.n() {
        if p == u {
            continue;
        }
        if gen_ends.contains(&p) {
            members.push(p);
            continue;
        }
        let (i, off) = cone_offset(pu, inst.point(p), cones)?;
        if i != sub.cone {
            continue;
        }
        if sub.lo <= off && off < sub.hi {
            members.push(p);
            let near_lo = sub.lo > -half && (off - sub.lo) < EPS_ANGLE;
            let near_hi = sub.hi < half && (sub.hi - off) < EPS_ANGLE;
            if near_lo || near_hi {
                flagged.push(p);
            }
        }
    }
    Ok((members, flagged))
}

/// Records which vertex, cone, and subcone selected an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct EdgeProvenance {
    pub source: usize,
    pub cone: usize,
    pub subcone: usize,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ThetaEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// Every (vertex, cone, subcone) that selected this edge, in vertex order.
    pub provenance: Vec<EdgeProvenance>,
}

#[derive(Clone, Debug)]
pub struct ThetaGraph {
    pub n: usize,
    pub cones: ConeSystem,
    /// Undirected edges with `u < v`, sorted by `(u, v)`.
    pub edges: Vec<ThetaEdge>,
    /// `(vertex, member)` pairs whose subcone assignment was within tolerance
    /// of a splitting ray.
    pub near_ray: Vec<(usize, usize)>,
}

impl ThetaGraph {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (u, v) = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(u, v)))
            .is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        adj
    }
}

/// Build the constrained theta-graph: for every vertex and every subcone,
/// add an edge to the member vertex that is visible from the apex and
/// minimizes the projection onto the *cone's* bisector. Exact projection ties
/// go to the smaller point id.
pub fn build_constrained_theta(inst: &Instance, cones: ConeSystem) -> Result<ThetaGraph> {
    let vis = visibility_graph(inst);
    let n = inst.n();
    let per_vertex: Vec<(Picks, Vec<(usize, usize)>)> = (0..n)
        .into_par_iter()
        .map(|u| select_edges_at(inst, u, cones, &vis))
        .collect::<Result<_>>()?;

    let mut merged: BTreeMap<(usize, usize), ThetaEdge> = BTreeMap::new();
    let mut near_ray = Vec::new();
    for (picks, flags) in per_vertex {
        for (u, p, cone, subcone) in picks {
            let key = (u.min(p), u.max(p));
            let entry = merged.entry(key).or_insert_with(|| ThetaEdge {
                u: key.0,
                v: key.1,
                weight: inst.point(key.0).dist(inst.point(key.1)),
                provenance: Vec::new(),
            });
            entry.provenance.push(EdgeProvenance {
                source: u,
                cone,
                subcone,
            });
        }
        near_ray.extend(flags);
    }
    near_ray.sort_unstable();
    near_ray.dedup();
    Ok(ThetaGraph {
        n,
        cones,
        edges: merged.into_values().collect(),
        near_ray,
    })
}

type Picks = Vec<(usize, usize, usize, usize)>;

fn select_edges_at(
    inst: &Instance,
    u: usize,
    cones: ConeSystem,
    vis: &crate::visibility::VisibilityGraph,
) -> Result<(Picks, Vec<(usize, usize)>)> {
    let pu = inst.point(u);
    let mut picks = Vec::new();
    let mut flags = Vec::new();
    for sub in subcones(inst, u, cones)? {
        let (members, flagged) = subcone_members_flagged(inst, &sub, cones)?;
        flags.extend(flagged.into_iter().map(|p| (u, p)));
        let mut best: Option<(f64, usize)> = None;
        for p in members {
            if !vis.visible(u, p) {
                continue;
            }
            let (_, off) = cone_offset(pu, inst.point(p), cones)?;
            let proj = pu.dist(inst.point(p)) * off.cos();
            let better = match best {
                None => true,
                Some((bp, bid)) => proj < bp || (proj == bp && p < bid),
            };
            if better {
                best = Some((proj, p));
            }
        }
        if let Some((_, p)) = best {
            picks.push((u, p, sub.cone, sub.index));
        }
    }
    Ok((picks, flags))
}

/// The unconstrained theta-graph over a bare point set: one edge per cone to
/// the member minimizing the bisector projection. Written independently of
/// the constrained builder; with no constraints the two must agree.
pub fn build_unconstrained_theta(points: &[Point], cones: ConeSystem) -> Result<ThetaGraph> {
    let n = points.len();
    let mut merged: BTreeMap<(usize, usize), ThetaEdge> = BTreeMap::new();
    for u in 0..n {
        let mut best: Vec<Option<(f64, usize)>> = vec![None; cones.m];
        for p in 0..n {
            if p == u {
                continue;
            }
            let (i, off) = cone_offset(points[u], points[p], cones)?;
            let proj = points[u].dist(points[p]) * off.cos();
            let better = match best[i] {
                None => true,
                Some((bp, bid)) => proj < bp || (proj == bp && p < bid),
            };
            if better {
                best[i] = Some((proj, p));
            }
        }
        for (i, pick) in best.iter().enumerate() {
            if let Some((_, p)) = pick {
                let key = (u.min(*p), u.max(*p));
                let entry = merged.entry(key).or_insert_with(|| ThetaEdge {
                    u: key.0,
                    v: key.1,
                    weight: points[key.0].dist(points[key.1]),
                    provenance: Vec::new(),
                });
                entry.provenance.push(EdgeProvenance {
                    source: u,
                    cone: i,
                    subcone: 0,
                });
            }
        }
    }
    Ok(ThetaGraph {
        n,
        cones,
        edges: merged.into_values().collect(),
        near_ray: Vec::new(),
    })
}
