//! Structural invariants of the complex constructions: containments, hull
//! equivalence, filtration monotonicity, persistence, and rank oracles.

mod util;

use hypermetric_core::complex::{
    betti_numbers, cech_complex, cech_filtration, cech_in_hull, flag_check, persistence,
    vr_cech_gap, vr_complex, vr_filtration, SimplicialComplex,
};
use hypermetric_core::space::{random_metric, sample_circle};
use hypermetric_core::PointId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_radii(space: &hypermetric_core::FiniteMetricSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = space.len();
    (0..n)
        .map(|i| {
            let ecc = (0..n)
                .map(|j| space.dist(PointId(i), PointId(j)))
                .fold(0.0, f64::max);
            rng.gen_range(0.25..0.75) * ecc
        })
        .collect()
}

#[test]
fn cech_is_contained_in_vr() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..50 {
        let space = random_metric(8, seed).unwrap();
        let radii = random_radii(&space, &mut rng);
        let lm = space.point_ids();
        let vr = vr_complex(&space, &lm, &radii, 3).unwrap();
        let cech = cech_complex(&space, &lm, &lm, &radii, 3).unwrap();
        for s in &cech.simplices {
            assert!(vr.contains(&s.vertices), "seed {seed}: {:?}", s.vertices);
        }
    }
}

#[test]
fn hull_cech_equals_vr_with_valid_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..100 {
        let space = random_metric(8, seed).unwrap();
        let radii = random_radii(&space, &mut rng);
        let lm = space.point_ids();
        let vr = vr_complex(&space, &lm, &radii, 3).unwrap();
        let (hull, certs) = cech_in_hull(&space, &lm, &radii, 3).unwrap();
        assert_eq!(vr.simplex_sets(), hull.simplex_sets(), "seed {seed}");
        for cert in &certs {
            for &v in &cert.simplex {
                let row = hypermetric_core::tightspan::kuratowski_row(&space, v);
                let r = radii[v.0];
                assert!(cert.witness.sup_dist(&row) <= r + 1e-9, "seed {seed}");
            }
        }
    }
}

#[test]
fn filtration_values_dominate_facets() {
    for seed in 0..30 {
        let space = random_metric(7, seed).unwrap();
        let lm = space.point_ids();
        for f in [
            vr_filtration(&space, &lm, 3).unwrap(),
            cech_filtration(&space, &lm, &lm, 3).unwrap(),
        ] {
            for s in &f.simplices {
                if s.vertices.len() < 2 {
                    continue;
                }
                for drop in 0..s.vertices.len() {
                    let facet: Vec<PointId> = s
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    let fv = f
                        .simplices
                        .iter()
                        .find(|o| o.vertices == facet)
                        .expect("downward closed")
                        .value;
                    assert!(fv <= s.value, "facet above coface, seed {seed}");
                }
            }
        }
    }
}

#[test]
fn vr_filtration_matches_per_simplex_recomputation() {
    for seed in 0..20 {
        let space = random_metric(6, seed).unwrap();
        let f = vr_filtration(&space, &space.point_ids(), 3).unwrap();
        for s in &f.simplices {
            let mut expect: f64 = 0.0;
            for (a, &i) in s.vertices.iter().enumerate() {
                for &j in &s.vertices[a + 1..] {
                    expect = expect.max(space.dist(i, j) / 2.0);
                }
            }
            assert_eq!(s.value, expect, "seed {seed}: {:?}", s.vertices);
        }
    }
}

#[test]
fn enlarging_witnesses_never_raises_cech_values() {
    for seed in 0..20 {
        let space = random_metric(8, seed).unwrap();
        let lm: Vec<PointId> = (0..4).map(PointId).collect();
        let few: Vec<PointId> = (0..5).map(PointId).collect();
        let all = space.point_ids();
        let coarse = cech_filtration(&space, &lm, &few, 2).unwrap();
        let fine = cech_filtration(&space, &lm, &all, 2).unwrap();
        for a in &coarse.simplices {
            let b = fine
                .simplices
                .iter()
                .find(|s| s.vertices == a.vertices)
                .expect("same simplex universe");
            assert!(b.value <= a.value + 1e-15, "seed {seed}");
        }
    }
}

#[test]
fn persistence_pairs_match_betti_snapshots() {
    for seed in 0..20 {
        let space = random_metric(7, seed).unwrap();
        let f = vr_filtration(&space, &space.point_ids(), 3).unwrap();
        let out = persistence(&f).unwrap();
        // five scales spanning the filtration range
        let max_v = f.simplices.last().unwrap().value;
        for step in 0..5 {
            let scale = max_v * (step as f64 + 0.5) / 5.0;
            let snapshot = f.at_scale(scale);
            let betti = betti_numbers(&snapshot, 2).unwrap();
            for (dim, &b) in betti.iter().enumerate() {
                assert_eq!(
                    out.betti_at(dim, scale),
                    b,
                    "seed {seed} dim {dim} scale {scale}"
                );
            }
        }
    }
}

#[test]
fn gf2_ranks_agree_with_dense_elimination() {
    // betti via the library vs. a naive dense boolean elimination
    fn dense_rank(mut m: Vec<Vec<bool>>) -> usize {
        let rows = m.len();
        if rows == 0 {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            if let Some(p) = (row..rows).find(|&r| m[r][col]) {
                m.swap(row, p);
                for r in 0..rows {
                    if r != row && m[r][col] {
                        for c in 0..cols {
                            m[r][c] ^= m[row][c];
                        }
                    }
                }
                rank += 1;
                row += 1;
                if row == rows {
                    break;
                }
            }
        }
        rank
    }

    for seed in 0..10 {
        let space = random_metric(7, seed).unwrap();
        let radii = vec![0.35 * space.diameter(); 7];
        let lm = space.point_ids();
        let complex = vr_complex(&space, &lm, &radii, 3).unwrap();
        let betti = betti_numbers(&complex, 2).unwrap();

        // rebuild the boundary matrices densely from scratch
        let by_dim = |d: usize| -> Vec<&hypermetric_core::complex::Simplex> {
            complex
                .simplices
                .iter()
                .filter(|s| s.vertices.len() == d + 1)
                .collect()
        };
        let rank_d = |d: usize| -> usize {
            let rows = by_dim(d - 1);
            let cols = by_dim(d);
            if cols.is_empty() {
                return 0;
            }
            let mut m = vec![vec![false; cols.len()]; rows.len()];
            for (ci, s) in cols.iter().enumerate() {
                for drop in 0..s.vertices.len() {
                    let facet: Vec<PointId> = s
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    let ri = rows.iter().position(|r| r.vertices == facet).unwrap();
                    m[ri][ci] = true;
                }
            }
            dense_rank(m)
        };
        let n0 = by_dim(0).len();
        let n1 = by_dim(1).len();
        let n2 = by_dim(2).len();
        let (r1, r2, r3) = (
            rank_d(1),
            rank_d(2),
            if by_dim(3).is_empty() { 0 } else { rank_d(3) },
        );
        assert_eq!(betti[0], n0 - r1, "seed {seed}");
        assert_eq!(betti[1], n1 - r1 - r2, "seed {seed}");
        assert_eq!(betti[2], n2 - r2 - r3, "seed {seed}");
    }
}

#[test]
fn gap_lambdas_exceed_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for seed in 0..40 {
        let space = random_metric(8, seed).unwrap();
        let radii = random_radii(&space, &mut rng);
        let lm = space.point_ids();
        let report = vr_cech_gap(&space, &lm, &lm, &radii, 3).unwrap();
        for entry in &report.entries {
            assert!(
                entry.lambda > 1.0 - 1e-12,
                "seed {seed}: {:?}",
                entry.simplex
            );
        }
    }
}

#[test]
fn vr_outputs_are_flag() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..30 {
        let space = random_metric(8, seed).unwrap();
        let radii = random_radii(&space, &mut rng);
        let c = vr_complex(&space, &space.point_ids(), &radii, 7).unwrap();
        assert!(flag_check(&c).is_empty(), "seed {seed}");
    }
}

#[test]
fn gap_bounded_on_sampled_circles() {
    // complete geodesic samples: lambda stays within 2 + sampling slack
    for (m, landmark_step) in [(60, 20), (120, 40), (90, 18)] {
        let circle = sample_circle(m, 3.0).unwrap();
        let landmarks: Vec<PointId> = (0..m).step_by(landmark_step).map(PointId).collect();
        let radii: Vec<f64> = landmarks.iter().map(|_| 0.5).collect();
        let report = vr_cech_gap(&circle, &landmarks, &circle.point_ids(), &radii, 3).unwrap();
        let spacing = 3.0 / m as f64;
        if let Some(max) = report.max_lambda {
            assert!(max <= 2.0 + 4.0 * spacing / 0.5, "m={m}: max lambda {max}");
        }
    }
}

#[test]
fn planar_gap_reaches_two_over_sqrt3() {
    // equilateral landmarks in the plane with a fine grid of witnesses: the
    // 2-simplex fills only at the circumradius over the Gromov radius
    let a = 1.0_f64;
    let height = a * 3.0_f64.sqrt() / 2.0;
    let (cx, cy) = (0.5, height / 3.0);
    let mut pts = vec![vec![0.0, 0.0], vec![a, 0.0], vec![0.5, height]];
    let step = 0.005;
    let cells = 80;
    for gx in 0..=cells {
        for gy in 0..=cells {
            pts.push(vec![
                cx + (gx as f64 - cells as f64 / 2.0) * step,
                cy + (gy as f64 - cells as f64 / 2.0) * step,
            ]);
        }
    }
    let space =
        hypermetric_core::space::point_cloud_metric(&pts, hypermetric_core::space::Norm::Euclidean)
            .unwrap();
    let landmarks = [PointId(0), PointId(1), PointId(2)];
    let report = vr_cech_gap(&space, &landmarks, &space.point_ids(), &[0.5, 0.5, 0.5], 2).unwrap();
    let max = report.max_lambda.unwrap();
    let expect = 2.0 / 3.0_f64.sqrt();
    assert!(
        (max - expect).abs() <= 2.0 * step,
        "max lambda {max} vs {expect}"
    );
    // the triangle is a gap entry; its lambda is the maximum
    let tri_entry = report
        .entries
        .iter()
        .find(|e| e.simplex.len() == 3)
        .expect("2-simplex gap");
    assert_eq!(tri_entry.lambda, max);
}

#[test]
fn persistence_on_cech_hull_filtration_equals_vr() {
    // cech-with-hull-witnesses at uniform radii has the VR critical values
    for seed in 0..10 {
        let space = random_metric(8, seed).unwrap();
        let lm = space.point_ids();
        let vr = vr_filtration(&space, &lm, 3).unwrap();
        let bars_vr = persistence(&vr).unwrap();
        // reuse VR values as the hull filtration (the equivalence theorem);
        // identical complexes must give identical diagrams
        let hull = SimplicialComplex {
            simplices: vr.simplices.clone(),
            max_dim: vr.max_dim,
        };
        let bars_hull = persistence(&hull).unwrap();
        assert_eq!(bars_vr.pairs, bars_hull.pairs, "seed {seed}");
    }
}
