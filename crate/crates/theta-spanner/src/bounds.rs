//! Closed-form stretch bounds per cone-count family, the two detour
//! inequalities the route-charging induction rests on, and the classification
//! of edge configurations along convex chains.
//!
//! Cone counts split into four families by `m mod 4` (written `m = 4k + x`,
//! `x` in `2..=5`). Each family carries a charge constant `c` used to weight
//! detours around canonical-triangle corners, and the achievable spanning
//! ratio is a closed form in `theta` per family.

use serde::Serialize;

use crate::geom::{
    canonical_triangle, cone_offset, cw_angle, orientation, wrap_signed, ConeSystem, Orientation,
    Point,
};
use crate::{Error, Result};

/// A cone system together with its family charge constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilySpec {
    pub cones: ConeSystem,
    /// Charge constant weighting corner detours in the induction; `1` for
    /// the `4k + 2` family.
    pub c: f64,
}

pub fn family_of(m: usize) -> Result<FamilySpec> {
    let cones = ConeSystem::new(m)?;
    let theta = cones.theta;
    let half = cones.half();
    let c = match cones.x {
        2 => 1.0,
        4 => 1.0 / (half.cos() - half.sin()),
        _ => (theta / 4.0).cos() / (half.cos() - (3.0 * theta / 4.0).sin()),
    };
    Ok(FamilySpec { cones, c })
}

const ALPHA_TOL: f64 = 1e-12;

/// Upper bound on the shortest-path length from `u` to `w`, normalized by
/// `|uw|`, as a function of the angle `alpha` between `uw` and the bisector
/// of `u`'s cone containing `w`. Monotonically increasing on `[0, theta/2]`.
pub fn path_bound(spec: &FamilySpec, alpha: f64) -> Result<f64> {
    let half = spec.cones.half();
    if !alpha.is_finite() || alpha < -ALPHA_TOL || alpha > half + ALPHA_TOL {
        return Err(Error::AlphaOutOfRange { alpha, max: half });
    }
    let a = alpha.clamp(0.0, half);
    Ok(a.cos() / half.cos() + (a.cos() * half.tan() + a.sin()) * spec.c)
}

/// The bound applied to a concrete pair: for even `m` the angle `alpha` is
/// the same seen from both endpoints, for odd `m` the reverse direction sees
/// `theta/2 - alpha`, and the path may be charged from either end.
pub fn pair_bound(spec: &FamilySpec, alpha: f64) -> Result<f64> {
    let forward = path_bound(spec, alpha)?;
    if spec.cones.m.is_multiple_of(2) {
        Ok(forward)
    } else {
        let reverse = path_bound(spec, spec.cones.half() - alpha)?;
        Ok(forward.min(reverse))
    }
}

/// The family's spanning ratio: the worst case of [`pair_bound`] over
/// `alpha`. For the even families that is the bound at `alpha = theta/2`;
/// for the odd families the two directions balance at `alpha = theta/4`,
/// where the bound collapses to the charge constant.
pub fn spanning_ratio_bound(spec: &FamilySpec) -> f64 {
    let half = spec.cones.half();
    match spec.cones.x {
        2 | 4 => 1.0 + 2.0 * half.sin() * spec.c,
        _ => spec.c,
    }
}

/// Intersection of the horizontal line through `w` with the ray from `v`
/// parallel to the counterclockwise boundary of an upward cone.
fn far_left_point(v: Point, w: Point, half: f64) -> Point {
    Point::new(v.x - (w.y - v.y) * half.tan(), w.y)
}

/// Shared frame of the two detour inequalities: `w` strictly inside cone 0
/// of `u`, and `v` inside the closed canonical triangle of `(u, w)`, strictly
/// left of the line from `u` to `w`. Mirrored configurations follow by
/// reflection.
fn detour_frame(u: Point, v: Point, w: Point, cones: ConeSystem) -> Result<()> {
    let (i, _) = cone_offset(u, w, cones).map_err(|e| {
        Error::PreconditionViolated(format!("w must lie strictly inside cone 0 of u: {e}"))
    })?;
    if i != 0 {
        return Err(Error::PreconditionViolated(format!(
            "w lies in cone {i} of u, not cone 0"
        )));
    }
    let dv = v - u;
    if dv.x == 0.0 && dv.y == 0.0 {
        return Err(Error::PreconditionViolated("v coincides with u".into()));
    }
    let off = wrap_signed(cw_angle(dv));
    let half = cones.half();
    if off.abs() > half + ALPHA_TOL {
        return Err(Error::PreconditionViolated(
            "v is outside the cone-0 wedge of u".into(),
        ));
    }
    let scale = u.dist(w);
    if dv.y > (w.y - u.y) + 1e-9 * scale {
        return Err(Error::PreconditionViolated(
            "v lies beyond the far side of the canonical triangle".into(),
        ));
    }
    if orientation(u, w, v) != Orientation::CounterClockwise {
        return Err(Error::PreconditionViolated(
            "v must lie strictly left of the line from u to w".into(),
        ));
    }
    Ok(())
}

/// First detour inequality: when `w` sits in a near-vertical cone of `v`
/// (cone `1..k`, or cone `k` with the counterclockwise corner of the
/// canonical triangle of `(v, w)` no farther from `w` than the clockwise
/// one), the detour over either corner is no longer than the path along
/// `v`'s cone-0 boundary to the far side and onward to `w`, and either
/// corner-to-`w` side is no longer than that boundary point's distance
/// to `w`.
pub fn lemma2_check(u: Point, v: Point, w: Point, spec: &FamilySpec) -> Result<bool> {
    let cones = spec.cones;
    detour_frame(u, v, w, cones)?;
    let (i, _) = cone_offset(v, w, cones).map_err(|e| {
        Error::PreconditionViolated(format!("w must lie strictly inside a cone of v: {e}"))
    })?;
    let tri = canonical_triangle(v, w, cones)?;
    let (cc, dd) = (tri.corner_ccw, tri.corner_cw);
    let k = cones.k;
    let cone_ok = (i >= 1 && i < k) || (i == k && cc.dist(w) <= dd.dist(w));
    if !cone_ok {
        return Err(Error::PreconditionViolated(format!(
            "pair direction lies in cone {i}, outside the near-vertical range"
        )));
    }
    let a = far_left_point(v, w, cones.half());
    let slack = 1e-9 * u.dist(w);
    let corner_detour = (v.dist(cc) + cc.dist(w)).max(v.dist(dd) + dd.dist(w));
    let boundary_detour = v.dist(a) + a.dist(w);
    let corner_leg = cc.dist(w).max(dd.dist(w));
    Ok(corner_detour <= boundary_detour + slack && corner_leg <= a.dist(w) + slack)
}

/// Angles determining the charge threshold of the second detour inequality:
/// `beta` is the angle at `w` between the boundary point `a` and `v`, and
/// `gamma` is the angle between `vw` and the bisector of the canonical
/// triangle of `(v, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma3Config {
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
}

impl Lemma3Config {
    pub fn new(beta: f64, gamma: f64, theta: f64) -> Result<Self> {
        if !(beta.is_finite() && gamma.is_finite() && theta.is_finite()) || theta <= 0.0 {
            return Err(Error::PreconditionViolated(
                "angles must be finite and theta positive".into(),
            ));
        }
        if gamma < -ALPHA_TOL || gamma > theta / 2.0 + ALPHA_TOL {
            return Err(Error::AlphaOutOfRange {
                alpha: gamma,
                max: theta / 2.0,
            });
        }
        if !(-ALPHA_TOL..=std::f64::consts::PI + ALPHA_TOL).contains(&beta) {
            return Err(Error::PreconditionViolated(format!(
                "beta = {beta} out of range [0, pi]"
            )));
        }
        Ok(Lemma3Config { beta, gamma, theta })
    }
}

/// The smallest charge constant for which the second detour inequality is
/// guaranteed, as a closed form in the configuration's angles.
pub fn lemma3_rhs(cfg: &Lemma3Config) -> Result<f64> {
    let half = cfg.theta / 2.0;
    let den = (half - cfg.beta).cos() - (half + cfg.gamma).sin();
    if den <= 1e-12 {
        return Err(Error::DegenerateDenominator {
            context: "charge threshold",
            value: den,
        });
    }
    Ok((cfg.gamma.cos() - cfg.beta.sin()) / den)
}

/// Geometry shared by the two forms of the second inequality: the measured
/// angles, and both sides of the charged comparison using constant `c`.
pub(crate) fn lemma3_sides(
    u: Point,
    v: Point,
    w: Point,
    cones: ConeSystem,
    c: f64,
) -> Result<(Lemma3Config, f64, f64)> {
    detour_frame(u, v, w, cones)?;
    let (i, _) = cone_offset(v, w, cones).map_err(|e| {
        Error::PreconditionViolated(format!("w must lie strictly inside a cone of v: {e}"))
    })?;
    if i == 0 {
        return Err(Error::PreconditionViolated(
            "w must not lie in cone 0 of v".into(),
        ));
    }
    let tri = canonical_triangle(v, w, cones)?;
    let a = far_left_point(v, w, cones.half());
    let wa = a - w;
    let wv = v - w;
    let (na, nv) = (wa.x.hypot(wa.y), wv.x.hypot(wv.y));
    let beta = if na < 1e-15 {
        0.0
    } else {
        ((wa.x * wv.x + wa.y * wv.y) / (na * nv))
            .clamp(-1.0, 1.0)
            .acos()
    };
    let cfg = Lemma3Config::new(beta, tri.alpha, cones.theta)?;
    let p = if tri.corner_ccw.dist(w) >= tri.corner_cw.dist(w) {
        tri.corner_ccw
    } else {
        tri.corner_cw
    };
    let lhs = v.dist(p) + c * p.dist(w);
    let rhs = v.dist(a) + c * a.dist(w);
    Ok((cfg, lhs, rhs))
}

/// Second detour inequality with an explicit charge constant: the charged
/// detour over the far corner of the canonical triangle of `(v, w)` (the
/// corner farther from `w`) compared against the charged path through the
/// boundary point `a`. No threshold gating: with a constant below the
/// configuration's threshold this may legitimately return `false`.
pub fn lemma3_check_with_constant(
    u: Point,
    v: Point,
    w: Point,
    cones: ConeSystem,
    c: f64,
) -> Result<bool> {
    let (_, lhs, rhs) = lemma3_sides(u, v, w, cones, c)?;
    Ok(lhs <= rhs + 1e-9 * u.dist(w))
}

/// Second detour inequality using the family's charge constant, requiring
/// the constant to clear the configuration's threshold first.
pub fn lemma3_check(u: Point, v: Point, w: Point, spec: &FamilySpec) -> Result<bool> {
    let (cfg, lhs, rhs) = lemma3_sides(u, v, w, spec.cones, spec.c)?;
    let threshold = lemma3_rhs(&cfg)?;
    if spec.c < threshold - 1e-12 {
        return Err(Error::PreconditionViolated(format!(
            "charge constant {} is below the required threshold {threshold}",
            spec.c
        )));
    }
    Ok(lhs <= rhs + 1e-9 * u.dist(w))
}

/// How one edge of a convex chain relates to the cones of its source vertex,
/// ordered by how late the configuration may appear along a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ConfigurationType {
    I,
    II,
    III,
    IV,
}

impl std::fmt::Display for ConfigurationType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConfigurationType::I => "I",
            ConfigurationType::II => "II",
            ConfigurationType::III => "III",
            ConfigurationType::IV => "IV",
        };
        f.write_str(s)
    }
}

/// Classify a chain edge `prev -> cur` on a chain aimed at `target`, in the
/// canonical (left-of-target) orientation: mirror the coordinates first when
/// working on the other side.
///
/// Edges in cone 0 are type III when they advance toward the target's side
/// and type IV otherwise. Edges in lower cones are type I; in between, the
/// near-vertical range gives type II, with ties in cone `k` broken by which
/// corner of the canonical triangle is closer to the target.
pub fn classify_configuration(
    prev: Point,
    cur: Point,
    target: Point,
    spec: &FamilySpec,
) -> Result<ConfigurationType> {
    let cones = spec.cones;
    let (i, _) = cone_offset(prev, cur, cones)?;
    if i == 0 {
        return Ok(if cur.x >= prev.x {
            ConfigurationType::III
        } else {
            ConfigurationType::IV
        });
    }
    let k = cones.k;
    if cones.x == 2 {
        return Ok(if i >= k {
            ConfigurationType::I
        } else {
            ConfigurationType::II
        });
    }
    if i > k {
        return Ok(ConfigurationType::I);
    }
    if i == k {
        let tri = canonical_triangle(prev, cur, cones)?;
        return Ok(
            if tri.corner_ccw.dist(target) > tri.corner_cw.dist(target) {
                ConfigurationType::I
            } else {
                ConfigurationType::II
            },
        );
    }
    Ok(ConfigurationType::II)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::unit;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    // Reference values below are frozen from an independent high-precision
    // computation and kept verbatim, digit noise and all.
    #[test]
    #[allow(clippy::approx_constant, clippy::excessive_precision)]
    fn charge_constants_and_spanning_bounds_match_closed_forms() {
        let expected = [
            (6, 1.0, 2.0),
            (7, 3.5135187892997068, 3.5135187892997068),
            (8, 1.8477590650225735, 2.414213562373095),
            (9, 2.2397641135117498, 2.2397641135117498),
            (10, 1.0, 1.6180339887498948),
            (11, 1.8192639907090367, 1.8192639907090367),
            (12, 1.414213562373095, 1.7320508075688773),
            (13, 1.610659405855073, 1.610659405855073),
        ];
        for (m, c, srb) in expected {
            let spec = family_of(m).unwrap();
            assert!(rel_close(spec.c, c, 1e-14), "c for m = {m}");
            assert!(
                rel_close(spanning_ratio_bound(&spec), srb, 1e-14),
                "bound for m = {m}"
            );
        }
        // Recognizable closed forms.
        assert!((spanning_ratio_bound(&family_of(8).unwrap()) - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(
            (spanning_ratio_bound(&family_of(10).unwrap()) - (1.0 + 5f64.sqrt()) / 2.0).abs()
                < 1e-12
        );
        assert!((spanning_ratio_bound(&family_of(12).unwrap()) - 3f64.sqrt()).abs() < 1e-12);
        assert!((family_of(12).unwrap().c - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            family_of(5),
            Err(Error::UnsupportedConeCount { m: 5 })
        ));
    }

    #[test]
    #[allow(clippy::approx_constant, clippy::excessive_precision)]
    fn path_bound_endpoints_match_frozen_values() {
        let at0 = [
            (6, 1.7320508075688772),
            (7, 2.8019377358048381),
            (8, 1.8477590650225735),
            (9, 1.8793852415718164),
            (10, 1.3763819204711736),
            (11, 1.5764012215473575),
            (12, 1.4142135623730949),
            (13, 1.4269197193772403),
        ];
        let at_half = [
            (6, 2.0),
            (7, 4.0489173395223048),
            (8, 2.4142135623730949),
            (9, 2.5320888862379554),
            (10, 1.6180339887498949),
            (11, 2.0250917913439999),
            (12, 1.7320508075688772),
            (13, 1.7709120513064196),
        ];
        for (m, v) in at0 {
            let spec = family_of(m).unwrap();
            assert!(
                rel_close(path_bound(&spec, 0.0).unwrap(), v, 1e-12),
                "m = {m} at 0"
            );
        }
        for (m, v) in at_half {
            let spec = family_of(m).unwrap();
            let half = spec.cones.half();
            assert!(
                rel_close(path_bound(&spec, half).unwrap(), v, 1e-12),
                "m = {m} at theta/2"
            );
        }
    }

    #[test]
    fn path_bound_rejects_out_of_range_angles() {
        let spec = family_of(8).unwrap();
        assert!(matches!(
            path_bound(&spec, -0.1),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            path_bound(&spec, spec.cones.half() + 0.1),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn spanning_bound_is_the_worst_pair_bound() {
        for m in 6..=13 {
            let spec = family_of(m).unwrap();
            let half = spec.cones.half();
            let srb = spanning_ratio_bound(&spec);
            let mut max = 0.0f64;
            for j in 0..=1000 {
                let alpha = half * j as f64 / 1000.0;
                let b = pair_bound(&spec, alpha).unwrap();
                assert!(b <= srb + 1e-12, "m = {m}, alpha = {alpha}");
                max = max.max(b);
            }
            assert!(rel_close(max, srb, 1e-12), "m = {m}: {max} vs {srb}");
        }
    }

    #[test]
    fn pair_bound_is_direction_symmetric_exactly_when_m_is_odd() {
        for m in 6..=13 {
            let spec = family_of(m).unwrap();
            let half = spec.cones.half();
            for j in 1..20 {
                let alpha = half * j as f64 / 20.0;
                let fwd = pair_bound(&spec, alpha).unwrap();
                let rev = pair_bound(&spec, half - alpha).unwrap();
                if m % 2 == 1 {
                    assert!((fwd - rev).abs() < 1e-12);
                } else {
                    assert!((fwd - path_bound(&spec, alpha).unwrap()).abs() < 1e-15);
                }
            }
        }
    }

    /// Sample a triple (u, v, w) satisfying the detour frame, by rejection.
    fn sample_frame(rng: &mut ChaCha8Rng, cones: ConeSystem) -> Option<(Point, Point, Point)> {
        let u = p(0.0, 0.0);
        let half = cones.half();
        let ang = rng.gen_range(-0.98 * half..0.98 * half);
        let r = rng.gen_range(0.2..1.0);
        let w = p(r * ang.sin(), r * ang.cos());
        let tri = canonical_triangle(u, w, cones).ok()?;
        let (mut r1, mut r2) = (rng.gen::<f64>(), rng.gen::<f64>());
        if r1 + r2 > 1.0 {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        let v = p(
            u.x + r1 * (tri.corner_ccw.x - u.x) + r2 * (tri.corner_cw.x - u.x),
            u.y + r1 * (tri.corner_ccw.y - u.y) + r2 * (tri.corner_cw.y - u.y),
        );
        if orientation(u, w, v) != Orientation::CounterClockwise || v.y >= w.y {
            return None;
        }
        Some((u, v, w))
    }

    #[test]
    fn first_detour_inequality_holds_on_sampled_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 6..=13 {
            let spec = family_of(m).unwrap();
            let mut checked = 0;
            let mut attempts = 0;
            while checked < 200 && attempts < 200_000 {
                attempts += 1;
                let Some((u, v, w)) = sample_frame(&mut rng, spec.cones) else {
                    continue;
                };
                match lemma2_check(u, v, w, &spec) {
                    Ok(ok) => {
                        assert!(ok, "violated at m = {m}: v = {v:?}, w = {w:?}");
                        checked += 1;
                    }
                    Err(_) => continue,
                }
            }
            assert_eq!(checked, 200, "not enough valid configurations for m = {m}");
        }
    }

    #[test]
    fn first_detour_inequality_rejects_out_of_range_cones() {
        let spec = family_of(8).unwrap();
        let u = p(0.0, 0.0);
        let w = unit(0.05);
        // v directly below w: w is in cone 0 of v, outside the allowed range.
        let v = p(w.x - 0.01, w.y - 0.3);
        assert!(matches!(
            lemma2_check(u, v, w, &spec),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn first_detour_inequality_rejects_the_boundary_corner_placement() {
        // Placing v at the far counterclockwise corner of the canonical
        // triangle never satisfies the cone condition: depending on the
        // family the direction to w lands on a boundary, in cone k with the
        // counterclockwise corner farther, or in cone k + 1.
        for m in 6..=13 {
            let spec = family_of(m).unwrap();
            let u = p(0.0, 0.0);
            let w = unit(0.1 * spec.cones.theta);
            let la = w.y / spec.cones.half().cos();
            let v = p(
                la * (-spec.cones.half()).sin(),
                la * (-spec.cones.half()).cos(),
            );
            assert!(
                matches!(
                    lemma2_check(u, v, w, &spec),
                    Err(Error::PreconditionViolated(_))
                ),
                "m = {m}"
            );
        }
    }

    #[test]
    fn second_detour_inequality_holds_on_sampled_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in 6..=13 {
            let spec = family_of(m).unwrap();
            let mut checked = 0;
            let mut attempts = 0;
            while checked < 200 && attempts < 200_000 {
                attempts += 1;
                let Some((u, v, w)) = sample_frame(&mut rng, spec.cones) else {
                    continue;
                };
                match lemma3_check(u, v, w, &spec) {
                    Ok(ok) => {
                        assert!(ok, "violated at m = {m}: v = {v:?}, w = {w:?}");
                        checked += 1;
                    }
                    Err(_) => continue,
                }
            }
            assert_eq!(checked, 200, "not enough valid configurations for m = {m}");
        }
    }

    #[test]
    fn boundary_corner_placement_achieves_exact_equality() {
        // v placed exactly at the counterclockwise far corner of the
        // canonical triangle of (u, w) makes both charged detours coincide.
        // The direction from that corner to w is horizontal, which for the
        // 4k + 2 families is a cone boundary; all other families admit it.
        for m in [7, 8, 9, 11, 12, 13] {
            let spec = family_of(m).unwrap();
            let half = spec.cones.half();
            let u = p(0.0, 0.0);
            let w = unit(0.1 * spec.cones.theta);
            let la = w.y / half.cos();
            let v = p(la * (-half).sin(), la * (-half).cos());
            let (cfg, lhs, rhs) = lemma3_sides(u, v, w, spec.cones, spec.c).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-9 * u.dist(w),
                "m = {m}: lhs = {lhs}, rhs = {rhs}"
            );
            assert!(cfg.beta.abs() < 1e-9, "m = {m}: beta = {}", cfg.beta);
            let expect_gamma = if spec.cones.x == 4 {
                0.0
            } else {
                spec.cones.theta / 4.0
            };
            assert!(
                (cfg.gamma - expect_gamma).abs() < 1e-9,
                "m = {m}: gamma = {}",
                cfg.gamma
            );
            assert!(lemma3_check(u, v, w, &spec).unwrap(), "m = {m}");
            // Halving the charge constant breaks the inequality: the
            // non-negative corner leg no longer pays for itself.
            assert!(
                !lemma3_check_with_constant(u, v, w, spec.cones, spec.c / 2.0).unwrap(),
                "m = {m}"
            );
        }
        for m in [6, 10] {
            let spec = family_of(m).unwrap();
            let half = spec.cones.half();
            let u = p(0.0, 0.0);
            let w = unit(0.1 * spec.cones.theta);
            let la = w.y / half.cos();
            let v = p(la * (-half).sin(), la * (-half).cos());
            assert!(matches!(
                lemma3_check(u, v, w, &spec),
                Err(Error::PreconditionViolated(_))
            ));
        }
    }

    #[test]
    fn charge_threshold_rejects_degenerate_denominators() {
        let theta = family_of(6).unwrap().cones.theta;
        let cfg = Lemma3Config::new(std::f64::consts::PI, theta / 2.0, theta).unwrap();
        assert!(matches!(
            lemma3_rhs(&cfg),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(matches!(
            Lemma3Config::new(0.1, theta, theta),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    /// Evaluate the threshold along `gamma = gamma_of(beta)` over a grid of
    /// the closed range, returning (max, is_nonincreasing, spread).
    fn threshold_curve(
        theta: f64,
        range: (f64, f64),
        gamma_of: impl Fn(f64) -> f64,
    ) -> (f64, bool, f64) {
        let steps = 200;
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        let mut prev = f64::INFINITY;
        let mut nonincreasing = true;
        for j in 0..=steps {
            let beta = range.0 + (range.1 - range.0) * j as f64 / steps as f64;
            let cfg = Lemma3Config::new(beta, gamma_of(beta), theta).unwrap();
            let r = lemma3_rhs(&cfg).unwrap();
            if r > prev + 1e-12 {
                nonincreasing = false;
            }
            prev = r;
            max = max.max(r);
            min = min.min(r);
        }
        (max, nonincreasing, max - min)
    }

    #[test]
    fn charge_thresholds_stay_below_the_family_constant() {
        // Each family's inductive cases tie gamma to beta along specific
        // curves; on all of them the required charge never exceeds the
        // family constant, which is attained where claimed.
        for m in [8, 12] {
            let spec = family_of(m).unwrap();
            let th = spec.cones.theta;
            // Lower-cone case: gamma = theta - beta, decreasing on
            // [theta/2, theta], peaking at theta/2 with value c.
            let (max, dec, _) = threshold_curve(th, (th / 2.0, th), |b| th - b);
            assert!(dec, "m = {m}");
            assert!((max - spec.c).abs() < 1e-12, "m = {m}: {max}");
            // Near-vertical case: gamma = beta is constant at c.
            let (max, _, spread) = threshold_curve(th, (0.0, th / 2.0), |b| b);
            assert!(spread < 1e-12, "m = {m}");
            assert!((max - spec.c).abs() < 1e-12, "m = {m}");
        }
        for m in [7, 11] {
            let spec = family_of(m).unwrap();
            let th = spec.cones.theta;
            let (max, dec, _) =
                threshold_curve(th, (th / 4.0, 3.0 * th / 4.0), |b| 3.0 * th / 4.0 - b);
            assert!(dec, "m = {m}");
            assert!((max - spec.c).abs() < 1e-12, "m = {m}: {max}");
            let (max, _, spread) = threshold_curve(th, (0.0, th / 4.0), |b| th / 4.0 + b);
            assert!(spread < 1e-12, "m = {m}");
            assert!((max - spec.c).abs() < 1e-12, "m = {m}");
        }
        for m in [9, 13] {
            let spec = family_of(m).unwrap();
            let th = spec.cones.theta;
            let (max, dec, _) =
                threshold_curve(th, (3.0 * th / 4.0, 5.0 * th / 4.0), |b| 5.0 * th / 4.0 - b);
            assert!(dec, "m = {m}");
            let closed =
                ((th / 2.0).cos() - (3.0 * th / 4.0).sin()) / ((th / 4.0).cos() - th.sin());
            assert!((max - closed).abs() < 1e-12, "m = {m}: {max}");
            assert!(max < spec.c, "m = {m}");
            let (max, dec, _) = threshold_curve(th, (0.0, th / 4.0), |b| th / 4.0 - b);
            assert!(dec, "m = {m}");
            assert!((max - spec.c).abs() < 1e-12, "m = {m}");
            // The remaining near-vertical branch is constant, and by a
            // factoring identity its value is exactly the lower-cone
            // maximum above -- still under the family constant.
            let (max, _, spread) =
                threshold_curve(th, (th / 4.0, 3.0 * th / 4.0), |b| b - th / 4.0);
            assert!(spread < 1e-12, "m = {m}");
            assert!((max - closed).abs() < 1e-12, "m = {m}: {max} vs {closed}");
        }
    }

    #[test]
    fn classification_distinguishes_all_four_types() {
        let spec = family_of(12).unwrap(); // k = 2, x = 4
        let th = spec.cones.theta;
        let prev = p(0.0, 0.0);
        let target = p(5.0, 5.0);
        // Cone 0, advancing toward the target's side vs away.
        let c0 = classify_configuration(prev, unit(0.1 * th), target, &spec).unwrap();
        assert_eq!(c0, ConfigurationType::III);
        let c0 = classify_configuration(prev, unit(-0.1 * th), target, &spec).unwrap();
        assert_eq!(c0, ConfigurationType::IV);
        // Cone 1 (inside 1..k): type II.
        let c1 = classify_configuration(prev, unit(1.0 * th), target, &spec).unwrap();
        assert_eq!(c1, ConfigurationType::II);
        // Cone k + 1 and beyond: type I.
        let c3 = classify_configuration(prev, unit(3.0 * th), target, &spec).unwrap();
        assert_eq!(c3, ConfigurationType::I);
        // Cone k: corner distances to the target break the tie.
        let cur = unit(2.0 * th);
        let tri = canonical_triangle(prev, cur, spec.cones).unwrap();
        let near_ccw = p(tri.corner_ccw.x + 0.01, tri.corner_ccw.y + 0.01);
        assert_eq!(
            classify_configuration(prev, cur, near_ccw, &spec).unwrap(),
            ConfigurationType::II
        );
        let near_cw = p(tri.corner_cw.x + 0.01, tri.corner_cw.y - 0.01);
        assert_eq!(
            classify_configuration(prev, cur, near_cw, &spec).unwrap(),
            ConfigurationType::I
        );
        // The 4k + 2 families skip the corner rule: cone k and beyond is
        // type I outright.
        let spec10 = family_of(10).unwrap(); // k = 2, x = 2
        let th10 = spec10.cones.theta;
        assert_eq!(
            classify_configuration(prev, unit(2.0 * th10), near_ccw, &spec10).unwrap(),
            ConfigurationType::I
        );
        assert_eq!(
            classify_configuration(prev, unit(1.0 * th10), target, &spec10).unwrap(),
            ConfigurationType::II
        );
        assert!(ConfigurationType::I < ConfigurationType::II);
        assert!(ConfigurationType::III < ConfigurationType::IV);
    }

    proptest! {
        /// Even cone counts see the same bisector angle from both endpoints;
        /// odd counts see complementary angles.
        #[test]
        fn direction_reversal_relates_alphas(
            m in 6usize..=13,
            phi in 0.0..std::f64::consts::TAU,
            r in 0.1f64..10.0,
        ) {
            let cones = ConeSystem::new(m).unwrap();
            let u = p(0.4, -0.2);
            let w = u + Point::new(r * phi.sin(), r * phi.cos());
            let (Ok(t1), Ok(t2)) = (
                canonical_triangle(u, w, cones),
                canonical_triangle(w, u, cones),
            ) else {
                return Ok(());
            };
            if m % 2 == 0 {
                prop_assert!((t1.alpha - t2.alpha).abs() < 1e-9);
            } else {
                prop_assert!((t1.alpha - (cones.half() - t2.alpha)).abs() < 1e-9);
            }
        }

        /// The path bound grows with the bisector angle.
        #[test]
        fn path_bound_monotone_in_alpha(m in 6usize..=13, j in 0usize..100) {
            let spec = family_of(m).unwrap();
            let half = spec.cones.half();
            let a1 = half * j as f64 / 101.0;
            let a2 = half * (j + 1) as f64 / 101.0;
            prop_assert!(
                path_bound(&spec, a1).unwrap() < path_bound(&spec, a2).unwrap()
            );
        }
    }
}
