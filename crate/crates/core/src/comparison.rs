//! Euclidean comparison triangles and the planar weighted-circumcenter test.
//!
//! A triple `(x1, x2, x3)` compares against the planar triangle with the
//! same side lengths: the space has non-positive curvature at the triple
//! when its witnessed scaling factor rho does not exceed the planar
//! `rho_bar = min_{x in R^2} max_i ||x - p_i|| / r_i` at the Gromov radii.
//! Balls then intersect at least as easily as in Euclidean space.

use thiserror::Error;

use crate::scaling::{self, DegeneratePolicy, ScalingError};
use crate::space::{FiniteMetricSpace, PointId};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ComparisonError {
    #[error("TriangleViolation: ({d12}, {d13}, {d23}) cannot be embedded")]
    TriangleViolation { d12: f64, d13: f64, d23: f64 },
    #[error("NonpositiveRadius: radius {value} at index {index}")]
    NonpositiveRadius { index: usize, value: f64 },
    #[error(transparent)]
    Scaling(#[from] ScalingError),
}

pub type Point2 = [f64; 2];

fn dist2(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// A closed planar disk: center and radius `>= 0`.
pub type Disk = (Point2, f64);

/// Planar triangle with prescribed side lengths `d12, d13, d23`.
///
/// `p1` sits at the origin, `p2` on the positive axis, `p3` in the closed
/// upper half-plane; collinear inputs land `p3` on the axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComparisonTriangle {
    pub p1: Point2,
    pub p2: Point2,
    pub p3: Point2,
}

impl ComparisonTriangle {
    pub fn points(&self) -> [Point2; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// Side lengths in the order `(d12, d13, d23)`.
    pub fn side_lengths(&self) -> (f64, f64, f64) {
        (
            dist2(self.p1, self.p2),
            dist2(self.p1, self.p3),
            dist2(self.p2, self.p3),
        )
    }
}

/// Embeds side lengths into the plane by the law of cosines.
pub fn embed_comparison_triangle(
    d12: f64,
    d13: f64,
    d23: f64,
) -> Result<ComparisonTriangle, ComparisonError> {
    let tol = 1e-12 * (d12 + d13 + d23);
    let bad = d12 < -tol
        || d13 < -tol
        || d23 < -tol
        || d12 > d13 + d23 + tol
        || d13 > d12 + d23 + tol
        || d23 > d12 + d13 + tol;
    if bad || !(d12 + d13 + d23).is_finite() {
        return Err(ComparisonError::TriangleViolation { d12, d13, d23 });
    }
    let p3 = if d12 > 0.0 {
        let x = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
        let y = (d13 * d13 - x * x).max(0.0).sqrt();
        [x, y]
    } else {
        // degenerate base: p1 = p2, so d13 = d23 and p3 goes on the axis
        [d13, 0.0]
    };
    Ok(ComparisonTriangle {
        p1: [0.0, 0.0],
        p2: [d12, 0.0],
        p3,
    })
}

/// A point in the intersection of all closed disks, if one exists.
///
/// Decided exactly by candidate enumeration: if the intersection is
/// nonempty it contains a disk center or a pairwise boundary-intersection
/// point, so testing those candidates against all disks settles
/// feasibility for any family size. Candidates within `1e-12 * scale` of
/// every boundary count as inside (closed balls).
pub fn disks_feasible(disks: &[Disk]) -> Option<Point2> {
    assert!(!disks.is_empty(), "disks_feasible needs at least one disk");
    let scale = disks
        .iter()
        .map(|&(c, r)| c[0].abs().max(c[1].abs()).max(r))
        .fold(1.0, f64::max);
    let tol = 1e-12 * scale;
    let inside_all = |q: Point2| disks.iter().all(|&(c, r)| dist2(q, c) <= r + tol);

    for &(c, _) in disks {
        if inside_all(c) {
            return Some(c);
        }
    }
    for a in 0..disks.len() {
        for b in (a + 1)..disks.len() {
            let (ca, ra) = disks[a];
            let (cb, rb) = disks[b];
            let d = dist2(ca, cb);
            if d == 0.0 {
                continue;
            }
            let t = (d * d + ra * ra - rb * rb) / (2.0 * d);
            let h2 = ra * ra - t * t;
            if h2 < -tol * scale {
                continue;
            }
            let h = h2.max(0.0).sqrt();
            let u = [(cb[0] - ca[0]) / d, (cb[1] - ca[1]) / d];
            let perp = [-u[1], u[0]];
            for sign in [1.0, -1.0] {
                let q = [
                    ca[0] + t * u[0] + sign * h * perp[0],
                    ca[1] + t * u[1] + sign * h * perp[1],
                ];
                if inside_all(q) {
                    return Some(q);
                }
            }
        }
    }
    None
}

/// Smallest `rho` at which the disks `B(p_i, rho * r_i)` share a point,
/// found by bisection over [`disks_feasible`] to relative tolerance
/// `1e-9`; returns the scale and the feasibility witness at that scale.
pub fn euclidean_rho(
    tri: &ComparisonTriangle,
    radii: [f64; 3],
) -> Result<(f64, Point2), ComparisonError> {
    for (index, &r) in radii.iter().enumerate() {
        if !(r > 0.0) || !r.is_finite() {
            return Err(ComparisonError::NonpositiveRadius { index, value: r });
        }
    }
    let points = tri.points();
    let scaled = |rho: f64| -> Vec<Disk> {
        points
            .iter()
            .zip(radii)
            .map(|(&p, r)| (p, rho * r))
            .collect()
    };
    if let Some(q) = disks_feasible(&scaled(0.0)) {
        return Ok((0.0, q));
    }
    let max_side = {
        let (a, b, c) = tri.side_lengths();
        a.max(b).max(c)
    };
    let mut hi = radii
        .iter()
        .map(|&r| 2.0 * max_side / r)
        .fold(f64::MIN, f64::max)
        .max(1e-300);
    // the bracket is feasible by construction (any vertex works), but grow
    // defensively in case of extreme scales
    let mut witness = loop {
        match disks_feasible(&scaled(hi)) {
            Some(q) => break q,
            None => hi *= 2.0,
        }
    };
    let mut lo = 0.0f64;
    let tol = 1e-9;
    while hi - lo > tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        match disks_feasible(&scaled(mid)) {
            Some(q) => {
                hi = mid;
                witness = q;
            }
            None => lo = mid,
        }
    }
    Ok((hi, witness))
}

/// Reference geometry for the comparison test. Only the Euclidean plane is
/// implemented; scaled spheres or hyperbolic planes would yield upper
/// curvature bounds other than zero and can slot in here.
#[non_exhaustive]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComparisonModel {
    #[default]
    Euclidean,
}

/// Comparison verdict for one triple.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurvatureVerdict {
    /// Witnessed triple scaling factor in the sample.
    pub rho: f64,
    /// Planar comparison value at the same Gromov radii.
    pub rho_bar: f64,
    /// `rho - rho_bar`.
    pub margin: f64,
    /// `margin <= tol`.
    pub nonpositive: bool,
}

/// Runs the comparison test on one non-degenerate triple: `rho` from the
/// witnessed scan, `rho_bar` from the comparison triangle at the Gromov
/// radii, verdict by `margin <= tol`.
pub fn curvature_verdict(
    space: &FiniteMetricSpace,
    triple: [PointId; 3],
    witnesses: &[PointId],
    tol: f64,
) -> Result<CurvatureVerdict, ComparisonError> {
    curvature_verdict_in(ComparisonModel::Euclidean, space, triple, witnesses, tol)
}

/// [`curvature_verdict`] against an explicit comparison model.
pub fn curvature_verdict_in(
    model: ComparisonModel,
    space: &FiniteMetricSpace,
    triple: [PointId; 3],
    witnesses: &[PointId],
    tol: f64,
) -> Result<CurvatureVerdict, ComparisonError> {
    let ComparisonModel::Euclidean = model;
    let [i, j, k] = triple;
    let rho = scaling::rho_triple(space, i, j, k, witnesses, DegeneratePolicy::Refuse)?.value;
    let (d12, d13, d23) = (space.dist(i, j), space.dist(i, k), space.dist(j, k));
    let (r1, r2, r3) = scaling::gromov_radii(d12, d13, d23)?;
    let tri = embed_comparison_triangle(d12, d13, d23)?;
    let (rho_bar, _) = euclidean_rho(&tri, [r1, r2, r3])?;
    let margin = rho - rho_bar;
    Ok(CurvatureVerdict {
        rho,
        rho_bar,
        margin,
        nonpositive: margin <= tol,
    })
}

/// Default verdict tolerance.
pub const CURVATURE_TOL: f64 = 1e-9;
