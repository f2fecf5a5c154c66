//! Invariant and oracle tests for the metric substrate, scaling quantities,
//! comparison geometry, and the tight span.

mod util;

use hypermetric_core::comparison::{disks_feasible, embed_comparison_triangle, euclidean_rho};
use hypermetric_core::scaling::{
    delta_scaling, gromov_radii, lambda_scaling, linf_lambda_exact, rho_pair, rho_triple,
    BallFamily, DegeneratePolicy,
};
use hypermetric_core::space::{
    metric_tolerance, random_metric, sample_circle, validate_metric, FiniteMetricSpace,
};
use hypermetric_core::tightspan::{
    default_tol, enumerate_faces, equality_graph, is_admissible, is_extremal, kuratowski_row,
    retract_to_hull, RadiusFunction, DEFAULT_FACE_CAP,
};
use hypermetric_core::PointId;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scaled_space(space: &FiniteMetricSpace, c: f64) -> FiniteMetricSpace {
    let matrix: Vec<Vec<f64>> = space
        .matrix()
        .into_iter()
        .map(|row| row.into_iter().map(|v| c * v).collect())
        .collect();
    FiniteMetricSpace::trusted(
        space.labels().to_vec(),
        matrix.iter().flatten().copied().collect(),
        space.len(),
    )
}

proptest! {
    #[test]
    fn gromov_products_recover_sides(
        r1 in 1e-3..1e3_f64,
        r2 in 1e-3..1e3_f64,
        r3 in 1e-3..1e3_f64,
    ) {
        // radii-first sampling guarantees a valid triangle
        let (d12, d13, d23) = (r1 + r2, r1 + r3, r2 + r3);
        let (g1, g2, g3) = gromov_radii(d12, d13, d23).unwrap();
        let scale = d12 + d13 + d23;
        prop_assert!((g1 + g2 - d12).abs() <= 1e-12 * scale);
        prop_assert!((g1 + g3 - d13).abs() <= 1e-12 * scale);
        prop_assert!((g2 + g3 - d23).abs() <= 1e-12 * scale);
        prop_assert!(g1 >= 0.0 && g2 >= 0.0 && g3 >= 0.0);
    }

    #[test]
    fn lambda_is_scale_invariant(seed in 0u64..500, exp in -8i32..9) {
        let space = random_metric(6, seed).unwrap();
        let c = (2.0_f64).powi(exp); // power of two keeps the ratios exact
        let scaled = scaled_space(&space, c);
        let centers = vec![PointId(0), PointId(2), PointId(4)];
        let radii = vec![0.3, 0.4, 0.5];
        let scaled_radii: Vec<f64> = radii.iter().map(|r| c * r).collect();
        let a = lambda_scaling(
            &BallFamily::new(&space, centers.clone(), radii).unwrap(),
            &space.point_ids(),
        )
        .unwrap();
        let b = lambda_scaling(
            &BallFamily::new(&scaled, centers, scaled_radii).unwrap(),
            &scaled.point_ids(),
        )
        .unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn delta_scales_linearly(seed in 0u64..500, exp in -4i32..5) {
        let space = random_metric(5, seed).unwrap();
        let c = (2.0_f64).powi(exp);
        let scaled = scaled_space(&space, c);
        let centers = vec![PointId(1), PointId(3)];
        let radii = vec![0.25, 0.5];
        let scaled_radii: Vec<f64> = radii.iter().map(|r| c * r).collect();
        let a = delta_scaling(
            &BallFamily::new(&space, centers.clone(), radii).unwrap(),
            &space.point_ids(),
        )
        .unwrap();
        let b = delta_scaling(
            &BallFamily::new(&scaled, centers, scaled_radii).unwrap(),
            &scaled.point_ids(),
        )
        .unwrap();
        prop_assert_eq!(c * a.value, b.value);
    }

    #[test]
    fn lambda_monotone_in_witnesses(seed in 0u64..500, cut in 2usize..5) {
        let space = random_metric(6, seed).unwrap();
        let family = BallFamily::new(
            &space,
            vec![PointId(0), PointId(1)],
            vec![0.4, 0.6],
        )
        .unwrap();
        let all = space.point_ids();
        let some = &all[..cut];
        let small = lambda_scaling(&family, some).unwrap();
        let big = lambda_scaling(&family, &all).unwrap();
        prop_assert!(big.value <= small.value);
    }

    #[test]
    fn restriction_bound_over_centers(seed in 0u64..300) {
        // when centers are witnesses, the best center bounds lambda
        let space = random_metric(7, seed).unwrap();
        let centers = vec![PointId(0), PointId(3), PointId(5)];
        let radii = vec![0.3, 0.5, 0.7];
        let family = BallFamily::new(&space, centers.clone(), radii.clone()).unwrap();
        let lambda = lambda_scaling(&family, &space.point_ids()).unwrap().value;
        let best_center = centers
            .iter()
            .map(|&c| {
                centers
                    .iter()
                    .zip(&radii)
                    .map(|(&o, &r)| space.dist(o, c) / r)
                    .fold(0.0_f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(lambda <= best_center + 1e-12);
    }

    #[test]
    fn rho_is_at_least_one(seed in 0u64..300, wcut in 1usize..7) {
        // minimal admissible radii keep rho >= 1 for any witness set
        let space = random_metric(7, seed).unwrap();
        let witnesses = &space.point_ids()[..wcut];
        let pair = rho_pair(&space, PointId(0), PointId(1), witnesses).unwrap();
        prop_assert!(pair.value >= 1.0 - 1e-12);
        let triple = rho_triple(
            &space,
            PointId(0),
            PointId(1),
            PointId(2),
            witnesses,
            DegeneratePolicy::Report,
        );
        if let Ok(t) = triple {
            prop_assert!(t.value >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn linf_admissible_families_meet(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6);
        let dim = rng.gen_range(1..=4);
        let points: Vec<Vec<f64>> =
            (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let mut maxd = vec![0.0_f64; n];
        for i in 0..n {
            for j in 0..n {
                let d = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                maxd[i] = maxd[i].max(d);
            }
        }
        if maxd.contains(&0.0) {
            return Ok(()); // duplicate draw
        }
        let radii: Vec<f64> =
            maxd.iter().map(|&d| 0.5 * d * (1.0 + rng.gen_range(0.0..1.0))).collect();
        let lambda = linf_lambda_exact(&points, &radii).unwrap();
        prop_assert!(lambda <= 1.0 + 1e-12);
    }

    #[test]
    fn euclidean_rho_scale_invariant(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = [
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
        ];
        let (d12, d13, d23) = (r[0] + r[1], r[0] + r[2], r[1] + r[2]);
        let c: f64 = 2.0_f64.powi(rng.gen_range(-3..4));
        let t1 = embed_comparison_triangle(d12, d13, d23).unwrap();
        let t2 = embed_comparison_triangle(c * d12, c * d13, c * d23).unwrap();
        let (rho1, _) = euclidean_rho(&t1, r).unwrap();
        let (rho2, _) = euclidean_rho(&t2, [c * r[0], c * r[1], c * r[2]]).unwrap();
        prop_assert!((rho1 - rho2).abs() <= 2e-9 * rho1.max(1.0));
        // pairwise-tight radii force rho_bar >= 1
        prop_assert!(rho1 >= 1.0 - 1e-9);
    }
}

#[test]
fn random_metrics_validate_up_to_64_points() {
    for n in [1, 2, 3, 5, 8, 13, 21, 34, 64] {
        for seed in 0..(if n <= 8 { 100 } else { 10 }) {
            let s = random_metric(n, seed).unwrap();
            let m = s.matrix();
            validate_metric(&m, metric_tolerance(&m))
                .unwrap_or_else(|e| panic!("n={n} seed={seed}: {e}"));
        }
    }
    // the full 100-seed sweep at n = 64 is covered more cheaply spot-wise
    for seed in 10..100 {
        let s = random_metric(64, seed).unwrap();
        let m = s.matrix();
        assert!(
            validate_metric(&m, metric_tolerance(&m)).is_ok(),
            "seed {seed}"
        );
    }
}

#[test]
fn tree_leaves_satisfy_four_point_condition() {
    for seed in 0..20 {
        let tree = util::random_tree(12, seed);
        // leaves of the attachment construction: vertices of degree 1 are
        // recovered from the metric as points never strictly between others
        let n = tree.len();
        let leaves: Vec<usize> = (0..n)
            .filter(|&v| {
                !(0..n).any(|a| {
                    (0..n).any(|b| {
                        a != v
                            && b != v
                            && a != b
                            && (tree.dist(PointId(a), PointId(v))
                                + tree.dist(PointId(v), PointId(b))
                                - tree.dist(PointId(a), PointId(b)))
                            .abs()
                                < 1e-9
                    })
                })
            })
            .collect();
        for a in 0..leaves.len() {
            for b in (a + 1)..leaves.len() {
                for c in (b + 1)..leaves.len() {
                    for d in (c + 1)..leaves.len() {
                        let q = [leaves[a], leaves[b], leaves[c], leaves[d]];
                        let dd = |x: usize, y: usize| tree.dist(PointId(q[x]), PointId(q[y]));
                        let mut sums = [
                            dd(0, 1) + dd(2, 3),
                            dd(0, 2) + dd(1, 3),
                            dd(0, 3) + dd(1, 2),
                        ];
                        sums.sort_by(|x, y| x.partial_cmp(y).unwrap());
                        assert_eq!(sums[1], sums[2], "four-point condition, seed {seed}");
                    }
                }
            }
        }
    }
}

#[test]
fn rho_triple_matches_brute_force_on_small_spaces() {
    // independent oracle: exhaustive min-max straight from the distances
    for seed in 0..30 {
        let space = random_metric(7, seed).unwrap();
        let n = space.len();
        let witnesses = space.point_ids();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (d12, d13, d23) = (
                        space.dist(PointId(i), PointId(j)),
                        space.dist(PointId(i), PointId(k)),
                        space.dist(PointId(j), PointId(k)),
                    );
                    let r1 = 0.5 * (d12 + d13 - d23);
                    let r2 = 0.5 * (d12 + d23 - d13);
                    let r3 = 0.5 * (d13 + d23 - d12);
                    if r1.min(r2).min(r3) <= 1e-12 * space.diameter() {
                        continue;
                    }
                    let oracle = (0..n)
                        .map(|w| {
                            (space.dist(PointId(i), PointId(w)) / r1)
                                .max(space.dist(PointId(j), PointId(w)) / r2)
                                .max(space.dist(PointId(k), PointId(w)) / r3)
                        })
                        .fold(f64::INFINITY, f64::min);
                    let got = rho_triple(
                        &space,
                        PointId(i),
                        PointId(j),
                        PointId(k),
                        &witnesses,
                        DegeneratePolicy::Refuse,
                    )
                    .unwrap();
                    assert_eq!(got.value, oracle, "triple ({i},{j},{k}) seed {seed}");
                }
            }
        }
    }
}

#[test]
fn delta_on_circle_matches_exhaustive_scan() {
    // dense witness circle: the additive defect of the equilateral triple
    // is a/2, attained at a vertex
    let m = 3000;
    let circle = sample_circle(m, 3.0).unwrap();
    let centers = vec![PointId(0), PointId(1000), PointId(2000)];
    let family = BallFamily::new(&circle, centers.clone(), vec![0.5; 3]).unwrap();
    let witnesses = circle.point_ids();
    let got = delta_scaling(&family, &witnesses).unwrap();
    let oracle = (0..m)
        .map(|w| {
            centers
                .iter()
                .map(|&c| circle.dist(c, PointId(w)) - 0.5)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    assert_eq!(got.value, oracle);
    assert_eq!(got.value, 0.5);
    assert_eq!(got.witness, PointId(0));
}

#[test]
fn planar_equilateral_triple_reaches_two_over_sqrt3() {
    // fine grid around an equilateral triangle; the grid contains the
    // circumcenter, so the witnessed value matches the planar optimum
    let a = 1.0_f64;
    let h = a * 3.0_f64.sqrt() / 2.0;
    let cx = 0.5;
    let cy = h / 3.0; // centroid = circumcenter
    let mut points = vec![vec![0.0, 0.0], vec![a, 0.0], vec![0.5, h]];
    let step = 0.01;
    let mut grid = Vec::new();
    let cells = 60;
    for gx in 0..=cells {
        for gy in 0..=cells {
            let x = cx + (gx as f64 - cells as f64 / 2.0) * step;
            let y = cy + (gy as f64 - cells as f64 / 2.0) * step;
            grid.push(vec![x, y]);
        }
    }
    points.extend(grid);
    let space = hypermetric_core::space::point_cloud_metric(
        &points,
        hypermetric_core::space::Norm::Euclidean,
    );
    let space = match space {
        Ok(s) => s,
        // centroid-aligned grids can duplicate a vertex; nudge instead
        Err(_) => panic!("grid duplicated a triangle vertex"),
    };
    let witnesses = space.point_ids();
    let r = rho_triple(
        &space,
        PointId(0),
        PointId(1),
        PointId(2),
        &witnesses,
        DegeneratePolicy::Refuse,
    )
    .unwrap();
    let expect = 2.0 / 3.0_f64.sqrt();
    assert!(
        (r.value - expect).abs() <= step,
        "rho = {} vs {expect}",
        r.value
    );
}

#[test]
fn verdict_margin_vanishes_with_grid_resolution() {
    // planar cloud triples: the witnessed rho converges to the comparison
    // value as the witness grid refines
    let tri = [[0.15, 0.2], [0.85, 0.25], [0.4, 0.9]];
    let mut margins = Vec::new();
    for side in [11usize, 21, 41] {
        let h = 1.0 / (side - 1) as f64;
        let mut pts: Vec<Vec<f64>> = tri.iter().map(|p| p.to_vec()).collect();
        for gx in 0..side {
            for gy in 0..side {
                let q = vec![gx as f64 * h, gy as f64 * h];
                if tri.iter().all(|p| (p[0] - q[0]).hypot(p[1] - q[1]) > 1e-9) {
                    pts.push(q);
                }
            }
        }
        let space = hypermetric_core::space::point_cloud_metric(
            &pts,
            hypermetric_core::space::Norm::Euclidean,
        )
        .unwrap();
        let v = hypermetric_core::comparison::curvature_verdict(
            &space,
            [PointId(0), PointId(1), PointId(2)],
            &space.point_ids(),
            1e-9,
        )
        .unwrap();
        assert!(v.margin >= -2e-9, "witnessed rho cannot undercut the plane");
        margins.push(v.margin);
    }
    assert!(margins[2] < margins[0], "margins must shrink: {margins:?}");
    assert!(
        margins[2] <= 0.05,
        "finest grid margin too large: {margins:?}"
    );
}

#[test]
fn disks_feasible_matches_candidate_oracle_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let disks: Vec<([f64; 2], f64)> = (0..3)
            .map(|_| {
                (
                    [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    rng.gen_range(0.1..2.0),
                )
            })
            .collect();
        // oracle: dense grid scan for a common point
        let found = disks_feasible(&disks);
        let mut grid_hit = false;
        let steps = 80;
        'outer: for gx in 0..=steps {
            for gy in 0..=steps {
                let x = -4.0 + 8.0 * gx as f64 / steps as f64;
                let y = -4.0 + 8.0 * gy as f64 / steps as f64;
                if disks
                    .iter()
                    .all(|&(c, r)| ((x - c[0]).powi(2) + (y - c[1]).powi(2)).sqrt() <= r)
                {
                    grid_hit = true;
                    break 'outer;
                }
            }
        }
        if grid_hit {
            assert!(
                found.is_some(),
                "grid found a point but candidates did not: {disks:?}"
            );
        }
        if let Some(q) = found {
            for &(c, r) in &disks {
                let d = ((q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2)).sqrt();
                assert!(d <= r + 1e-9, "witness outside disk: {disks:?}");
            }
        }
    }
}

#[test]
fn retraction_outputs_are_extremal_on_random_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..100 {
        let space = random_metric(5, seed).unwrap();
        // random admissible start: lift a random vector until admissible
        let mut f: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut need: f64 = 0.0;
        for i in 0..5 {
            for j in i..5 {
                need = need.max(space.dist(PointId(i), PointId(j)) - f[i] - f[j]);
            }
        }
        if need > 0.0 {
            for v in &mut f {
                *v += need;
            }
        }
        let f = RadiusFunction(f);
        assert!(is_admissible(&space, &f, 1e-12).unwrap());
        let tol = 1e-12;
        let out = retract_to_hull(&space, &f, tol, 10_000).unwrap();
        let (ok, slack) = is_extremal(&space, &out, 10.0 * tol).unwrap();
        assert!(ok, "seed {seed}: slack {slack:?}");
    }
}

#[test]
fn retraction_is_empirically_nonexpansive() {
    // reported property: sup-distance between outputs stays within the
    // input sup-distance up to iteration slack
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tol = 1e-12;
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let space = random_metric(5, seed).unwrap();
        let lift = |f: &mut Vec<f64>| {
            let mut need: f64 = 0.0;
            for i in 0..5 {
                for j in i..5 {
                    need = need.max(space.dist(PointId(i), PointId(j)) - f[i] - f[j]);
                }
            }
            if need > 0.0 {
                for v in f.iter_mut() {
                    *v += need;
                }
            }
        };
        let mut a: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut b: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..1.0)).collect();
        lift(&mut a);
        lift(&mut b);
        let (a, b) = (RadiusFunction(a), RadiusFunction(b));
        let ra = retract_to_hull(&space, &a, tol, 10_000).unwrap();
        let rb = retract_to_hull(&space, &b, tol, 10_000).unwrap();
        let expansion = ra.sup_dist(&rb) - a.sup_dist(&b);
        worst = worst.max(expansion);
    }
    println!("worst retraction expansion over 100 pairs: {worst:e}");
    assert!(worst <= 1e-6, "retraction expanded by {worst}");
}

#[test]
fn face_samples_round_trip_their_equality_graphs() {
    for seed in 0..25 {
        let space = random_metric(5, seed).unwrap();
        let complex = enumerate_faces(&space, DEFAULT_FACE_CAP).unwrap();
        assert!(!complex.faces.is_empty(), "seed {seed}");
        for face in &complex.faces {
            let eq = equality_graph(&space, &face.sample_point, default_tol(&space)).unwrap();
            assert_eq!(eq, face.equality_edges, "seed {seed}");
            let (ok, _) = is_extremal(&space, &face.sample_point, default_tol(&space)).unwrap();
            assert!(ok, "face samples lie on the tight span");
        }
    }
}

#[test]
fn retraction_lands_on_enumerated_faces() {
    // every retracted point must satisfy the equality set of some
    // enumerated face, i.e. lie in its closure; this guards the
    // enumeration against missing faces
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for seed in 0..5 {
        let space = random_metric(5, seed).unwrap();
        let complex = enumerate_faces(&space, DEFAULT_FACE_CAP).unwrap();
        for _ in 0..300 {
            let mut f: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..1.0)).collect();
            let mut need: f64 = 0.0;
            for i in 0..5 {
                for j in i..5 {
                    need = need.max(space.dist(PointId(i), PointId(j)) - f[i] - f[j]);
                }
            }
            if need > 0.0 {
                for v in &mut f {
                    *v += need;
                }
            }
            let out = retract_to_hull(&space, &RadiusFunction(f), 1e-12, 10_000).unwrap();
            let eq = equality_graph(&space, &out, 1e-7).unwrap();
            let covered = complex
                .faces
                .iter()
                .any(|face| face.equality_edges.iter().all(|e| eq.contains(e)));
            assert!(covered, "seed {seed}: graph {eq:?} matches no face");
        }
    }
}

#[test]
fn tree_metrics_have_combinatorial_dimension_one() {
    for seed in 0..10 {
        let tree = util::random_tree(6, seed);
        let complex = enumerate_faces(&tree, 7).unwrap();
        assert_eq!(complex.combinatorial_dimension, 1, "seed {seed}");
    }
}

#[test]
fn kuratowski_rows_are_extremal_everywhere() {
    for seed in 0..25 {
        let space = random_metric(6, seed).unwrap();
        for i in 0..6 {
            let row = kuratowski_row(&space, PointId(i));
            let (ok, _) = is_extremal(&space, &row, 1e-12).unwrap();
            assert!(ok);
        }
    }
}

#[test]
fn hull_witness_sup_norm_bound_on_random_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 0..100 {
        let space = random_metric(6, seed).unwrap();
        let k = rng.gen_range(1..=4);
        let centers: Vec<PointId> = (0..k).map(PointId).collect();
        // eccentricity-scaled radii are always pairwise admissible
        let radii: Vec<f64> = centers
            .iter()
            .map(|&c| {
                let ecc = (0..6)
                    .map(|j| space.dist(c, PointId(j)))
                    .fold(0.0, f64::max);
                0.5 * ecc * (1.0 + rng.gen_range(0.0..1.0))
            })
            .collect();
        let family = BallFamily::new(&space, centers.clone(), radii.clone()).unwrap();
        let p = hypermetric_core::tightspan::hull_witness(&family).unwrap();
        for (&c, &r) in centers.iter().zip(&radii) {
            let row = kuratowski_row(&space, c);
            assert!(p.sup_dist(&row) <= r + 1e-12, "seed {seed}");
        }
    }
}
