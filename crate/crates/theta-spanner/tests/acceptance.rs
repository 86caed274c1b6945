//! End-to-end acceptance checks: bulk empirical verification that the built
//! graphs honor the closed-form bounds, that the inductive inequalities and
//! chain structure hold at scale, and that the construction degrades to the
//! unconstrained graph when there are no constraints. Each test prints one
//! `criterion N: PASS` line on success.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theta_spanner::bounds::{
    family_of, lemma2_check, lemma3_check, pair_bound, path_bound, spanning_ratio_bound,
};
use theta_spanner::geom::{
    canonical_triangle, orientation, ConeSystem, Orientation, Point, Segment,
};
use theta_spanner::theta::{build_constrained_theta, build_unconstrained_theta};
use theta_spanner::verify::{
    classify_chain, pair_ratio_report, random_instance, spanning_contexts, tightness_fixture,
    ViolationKind,
};
use theta_spanner::visibility::{verify_chain, visibility_graph, Instance};

const CORPUS_PER_M: u64 = 100;
const CORPUS_N: usize = 50;

struct CorpusStats {
    instances: usize,
    pair_violations: usize,
    vis_violations: usize,
    /// Worst max_ratio / spanning_bound seen, per cone count.
    worst_margin: Vec<(usize, f64)>,
}

/// The shared random corpus measured once: 100 instances per cone count,
/// 50 points each, 0..=20 constraints.
fn corpus() -> &'static CorpusStats {
    static CORPUS: OnceLock<CorpusStats> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut stats = CorpusStats {
            instances: 0,
            pair_violations: 0,
            vis_violations: 0,
            worst_margin: Vec::new(),
        };
        for m in 6..=13usize {
            let spec = family_of(m).unwrap();
            let mut margin = 0.0f64;
            for i in 0..CORPUS_PER_M {
                let n_constraints = (i % 21) as usize;
                let inst =
                    random_instance(CORPUS_N, n_constraints, 1000 * m as u64 + i, &[m]).unwrap();
                let report = pair_ratio_report(&inst, &spec).unwrap();
                for v in &report.violations {
                    match v.kind {
                        ViolationKind::PairBound => stats.pair_violations += 1,
                        ViolationKind::VisSpanner => stats.vis_violations += 1,
                    }
                }
                margin = margin.max(report.max_ratio / report.spanning_bound);
                stats.instances += 1;
            }
            stats.worst_margin.push((m, margin));
        }
        stats
    })
}

#[test]
fn criterion_1_pair_ratios_stay_within_the_angle_bounds() {
    let stats = corpus();
    assert_eq!(stats.instances, 800);
    assert_eq!(
        stats.pair_violations, 0,
        "visible pairs exceeded their angle-dependent bound"
    );
    for &(m, margin) in &stats.worst_margin {
        assert!(margin <= 1.0 + 1e-7, "m = {m}: margin {margin}");
    }
    println!("criterion 1: PASS");
}

#[test]
fn criterion_2_graph_distances_stay_within_the_spanning_bound_of_visibility() {
    let stats = corpus();
    assert_eq!(stats.instances, 800);
    assert_eq!(
        stats.vis_violations, 0,
        "pairs exceeded the spanning bound times their visibility distance"
    );
    println!("criterion 2: PASS");
}

#[test]
fn criterion_3_near_tight_layouts_approach_the_bound() {
    let eps = 1e-3;
    let spec6 = family_of(6).unwrap();
    let inst = tightness_fixture(&spec6, eps).unwrap();
    let graph = build_constrained_theta(&inst, spec6.cones).unwrap();
    assert!(
        !graph.has_edge(0, 3),
        "the extreme pair must be forced around a corner"
    );
    let report = pair_ratio_report(&inst, &spec6).unwrap();
    assert!(report.violations.is_empty());
    assert!(
        report.max_ratio >= 2.0 - 10.0 * eps,
        "m = 6 reached only {}",
        report.max_ratio
    );

    let spec10 = family_of(10).unwrap();
    let report = pair_ratio_report(&tightness_fixture(&spec10, eps).unwrap(), &spec10).unwrap();
    assert!(report.violations.is_empty());
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(
        report.max_ratio >= golden - 1e-2,
        "m = 10 reached only {}",
        report.max_ratio
    );
    println!("criterion 3: PASS");
}

#[test]
fn criterion_4_no_constraints_matches_the_unconstrained_builder() {
    for m in 6..=13usize {
        let cones = ConeSystem::new(m).unwrap();
        for i in 0..100u64 {
            let inst = random_instance(30, 0, 2000 * m as u64 + i, &[m]).unwrap();
            let constrained = build_constrained_theta(&inst, cones).unwrap();
            let unconstrained = build_unconstrained_theta(inst.points(), cones).unwrap();
            assert_eq!(
                constrained.edges,
                unconstrained.edges,
                "m = {m}, seed = {}",
                2000 * m as u64 + i
            );
        }
    }
    println!("criterion 4: PASS");
}

fn sample_frame(rng: &mut ChaCha8Rng, cones: ConeSystem) -> Option<(Point, Point, Point)> {
    let u = Point::new(0.0, 0.0);
    let half = cones.half();
    let ang = rng.gen_range(-0.98 * half..0.98 * half);
    let r = rng.gen_range(0.2..1.0);
    let w = Point::new(r * ang.sin(), r * ang.cos());
    let tri = canonical_triangle(u, w, cones).ok()?;
    let (mut r1, mut r2) = (rng.gen::<f64>(), rng.gen::<f64>());
    if r1 + r2 > 1.0 {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    let v = Point::new(
        u.x + r1 * (tri.corner_ccw.x - u.x) + r2 * (tri.corner_cw.x - u.x),
        u.y + r1 * (tri.corner_ccw.y - u.y) + r2 * (tri.corner_cw.y - u.y),
    );
    if orientation(u, w, v) != Orientation::CounterClockwise || v.y >= w.y {
        return None;
    }
    Some((u, v, w))
}

#[test]
fn criterion_5_detour_inequalities_hold_in_bulk() {
    let per_m = 12_500usize;
    for m in 6..=13usize {
        let spec = family_of(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(500 + m as u64);
        let (mut first, mut second) = (0usize, 0usize);
        let mut attempts = 0usize;
        while (first < per_m || second < per_m) && attempts < 5_000_000 {
            attempts += 1;
            let Some((u, v, w)) = sample_frame(&mut rng, spec.cones) else {
                continue;
            };
            if first < per_m {
                if let Ok(ok) = lemma2_check(u, v, w, &spec) {
                    assert!(ok, "m = {m}: first inequality failed at {v:?} -> {w:?}");
                    first += 1;
                }
            }
            if second < per_m {
                if let Ok(ok) = lemma3_check(u, v, w, &spec) {
                    assert!(ok, "m = {m}: second inequality failed at {v:?} -> {w:?}");
                    second += 1;
                }
            }
        }
        assert_eq!(first, per_m, "m = {m}: too few valid first-kind configs");
        assert_eq!(second, per_m, "m = {m}: too few valid second-kind configs");
    }
    println!("criterion 5: PASS");
}

#[test]
fn criterion_6_spanning_bound_is_the_alpha_maximum_and_bounds_increase() {
    for m in 6..=13usize {
        let spec = family_of(m).unwrap();
        let half = spec.cones.half();
        let srb = spanning_ratio_bound(&spec);
        let mut max = 0.0f64;
        let mut prev_path = f64::NEG_INFINITY;
        for j in 0..=1000 {
            let alpha = half * j as f64 / 1000.0;
            let pb = pair_bound(&spec, alpha).unwrap();
            assert!(pb <= srb + 1e-12, "m = {m}, alpha = {alpha}");
            max = max.max(pb);
            let path = path_bound(&spec, alpha).unwrap();
            assert!(
                path > prev_path,
                "m = {m}: not increasing at alpha = {alpha}"
            );
            prev_path = path;
        }
        assert!(
            (max - srb).abs() <= 1e-12 * srb,
            "m = {m}: grid max {max} vs bound {srb}"
        );
    }
    println!("criterion 6: PASS");
}

#[test]
fn criterion_7_routing_chains_verify_and_types_ascend() {
    let mut total = 0usize;
    let mut mirrored = 0usize;
    let mut classified = 0usize;
    for m in 6..=13usize {
        let spec = family_of(m).unwrap();
        let mut i = 0u64;
        let mut per_m = 0usize;
        while per_m < 125 {
            let inst = random_instance(20, (i % 6) as usize, 3000 * m as u64 + i, &[m]).unwrap();
            i += 1;
            let contexts = spanning_contexts(&inst, spec.cones).unwrap();
            for ctx in &contexts {
                assert!(
                    verify_chain(&inst, &ctx.chain),
                    "m = {m}: chain failed structural checks: {ctx:?}"
                );
                let y0 = inst.point(ctx.v0).y;
                for &v in &ctx.chain.vertices[1..] {
                    assert!(
                        inst.point(v).y > y0,
                        "m = {m}: chain dips below its first hop: {ctx:?}"
                    );
                }
                if ctx.mirrored {
                    mirrored += 1;
                }
                if let Ok(types) = classify_chain(&inst, ctx, &spec) {
                    classified += 1;
                    for pair in types.windows(2) {
                        assert!(
                            pair[0] <= pair[1],
                            "m = {m}: configuration types regressed: {types:?}"
                        );
                    }
                }
                per_m += 1;
                total += 1;
            }
        }
    }
    assert!(total >= 1000, "only {total} chains checked");
    assert!(mirrored > 0, "mirrored chains never exercised");
    assert!(
        classified * 2 >= total,
        "too few chains classified: {classified}/{total}"
    );
    println!("criterion 7: PASS");
}

#[test]
fn criterion_8_added_constraints_only_shrink_visibility() {
    let mut checked = 0usize;
    for i in 0..1000u64 {
        let m = 6 + (i % 8) as usize;
        let spec = family_of(m).unwrap();
        let base = random_instance(14, 3, 4000 + i, &[m]).unwrap();
        let base_vis = visibility_graph(&base);

        // Add one more constraint between a base-visible non-constraint
        // pair; such a segment crosses nothing, so the instance stays valid.
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + i);
        let n = base.n();
        let mut augmented = None;
        for _ in 0..200 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b || base.is_constraint(a, b) || !base_vis.visible(a, b) {
                continue;
            }
            let mut cons = base.constraints().to_vec();
            cons.push(Segment::new(a.min(b), a.max(b)));
            augmented = Some(Instance::new(base.points().to_vec(), cons).unwrap());
            break;
        }
        let augmented = augmented.expect("a visible non-constraint pair always exists");
        let aug_vis = visibility_graph(&augmented);
        for u in 0..n {
            for w in (u + 1)..n {
                if aug_vis.visible(u, w) {
                    assert!(
                        base_vis.visible(u, w),
                        "seed {i}: adding a constraint created visibility {u}-{w}"
                    );
                }
            }
        }

        let base_report = pair_ratio_report(&base, &spec).unwrap();
        let aug_report = pair_ratio_report(&augmented, &spec).unwrap();
        assert!(base_report.violations.is_empty(), "seed {i} (base)");
        assert!(aug_report.violations.is_empty(), "seed {i} (augmented)");
        checked += 1;
    }
    assert_eq!(checked, 1000);
    println!("criterion 8: PASS");
}
