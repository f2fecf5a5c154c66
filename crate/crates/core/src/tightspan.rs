//! The tight span (hyperconvex hull) of small finite metric spaces.
//!
//! Radius functions `f` with `f_i + f_j >= d_ij` for all pairs form a
//! polyhedron in `R^n`; the minimal ones form the tight span `E(X)`, a
//! union of compact polyhedral faces. Each face is indexed by its equality
//! graph `G` (an edge where `f_i + f_j = d_ij`), which covers every vertex,
//! and has dimension `n - rank` of the equality system. This module checks
//! admissibility/extremality, enumerates the faces for `n <= n_cap`, and
//! produces explicit hull points witnessing ball intersections.

use rayon::prelude::*;
use thiserror::Error;

use crate::scaling::BallFamily;
use crate::space::{FiniteMetricSpace, PointId};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TightSpanError {
    #[error("LengthMismatch: function has {got} entries for {expected} points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("NotAdmissible({i},{j}): f_i + f_j < d(i,j)")]
    NotAdmissible { i: usize, j: usize },
    #[error("NotPairwiseAdmissible({i},{j}): r_i + r_j < d(x_i, x_j)")]
    NotPairwiseAdmissible { i: PointId, j: PointId },
    #[error("NonConvergence: residual {residual} after {iters} iterations")]
    NonConvergence { residual: f64, iters: usize },
    #[error("SizeCapExceeded: n = {n} exceeds cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
}

/// A real vector over the points of a space; a candidate point of the
/// ambient radius-function polyhedron.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct RadiusFunction(pub Vec<f64>);

impl RadiusFunction {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sup-norm distance to another function.
    pub fn sup_dist(&self, other: &RadiusFunction) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Default equality/feasibility slack: `1e-9 * diameter`.
pub fn default_tol(space: &FiniteMetricSpace) -> f64 {
    1e-9 * space.diameter()
}

fn check_len(space: &FiniteMetricSpace, f: &RadiusFunction) -> Result<(), TightSpanError> {
    if f.len() != space.len() {
        return Err(TightSpanError::LengthMismatch {
            got: f.len(),
            expected: space.len(),
        });
    }
    Ok(())
}

/// The distance row `d(x_i, .)`: the Kuratowski embedding of point `i`.
/// Always extremal.
pub fn kuratowski_row(space: &FiniteMetricSpace, i: PointId) -> RadiusFunction {
    RadiusFunction(space.row(i).to_vec())
}

/// First pair violating `f_i + f_j >= d_ij - tol`, or `None` when
/// admissible. The diagonal pair `(i, i)` enforces `f_i >= -tol/2`.
pub fn admissibility_violation(
    space: &FiniteMetricSpace,
    f: &RadiusFunction,
    tol: f64,
) -> Result<Option<(PointId, PointId)>, TightSpanError> {
    check_len(space, f)?;
    let n = space.len();
    for i in 0..n {
        for j in i..n {
            let d = space.dist(PointId(i), PointId(j));
            if f.0[i] + f.0[j] < d - tol {
                return Ok(Some((PointId(i), PointId(j))));
            }
        }
    }
    Ok(None)
}

pub fn is_admissible(
    space: &FiniteMetricSpace,
    f: &RadiusFunction,
    tol: f64,
) -> Result<bool, TightSpanError> {
    Ok(admissibility_violation(space, f, tol)?.is_none())
}

/// Extremality check with per-point slack `f_i - max_{j != i}(d_ij - f_j)`.
///
/// An admissible `f` is extremal (a point of the tight span) exactly when
/// every slack is `<= tol`. For a single point only `f = (0)` is extremal.
pub fn is_extremal(
    space: &FiniteMetricSpace,
    f: &RadiusFunction,
    tol: f64,
) -> Result<(bool, Vec<f64>), TightSpanError> {
    check_len(space, f)?;
    if let Some((i, j)) = admissibility_violation(space, f, tol)? {
        return Err(TightSpanError::NotAdmissible { i: i.0, j: j.0 });
    }
    let n = space.len();
    let mut slack = Vec::with_capacity(n);
    for i in 0..n {
        // floor the reach at 0: values cannot drop below zero, and the
        // empty max (n = 1) then pins f to 0
        let reach = (0..n)
            .filter(|&j| j != i)
            .map(|j| space.dist(PointId(i), PointId(j)) - f.0[j])
            .fold(0.0_f64.min(f.0[i]), f64::max);
        slack.push(f.0[i] - reach);
    }
    let extremal = slack.iter().all(|&s| s <= tol);
    Ok((extremal, slack))
}

/// Edges where an admissible function is tight: `|f_i + f_j - d_ij| <= tol`.
pub fn equality_graph(
    space: &FiniteMetricSpace,
    f: &RadiusFunction,
    tol: f64,
) -> Result<Vec<(PointId, PointId)>, TightSpanError> {
    check_len(space, f)?;
    if let Some((i, j)) = admissibility_violation(space, f, tol)? {
        return Err(TightSpanError::NotAdmissible { i: i.0, j: j.0 });
    }
    let n = space.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if (f.0[i] + f.0[j] - space.dist(PointId(i), PointId(j))).abs() <= tol {
                edges.push((PointId(i), PointId(j)));
            }
        }
    }
    Ok(edges)
}

/// Default convergence tolerance for [`retract_to_hull`].
pub fn default_retract_tol(space: &FiniteMetricSpace) -> f64 {
    1e-10 * space.diameter().max(1.0)
}

pub const DEFAULT_RETRACT_ITERS: usize = 10_000;

/// Pulls an admissible function onto the tight span by averaging with its
/// lower envelope: `f <- (f + f^)/2`, `f^_i = max_j (d_ij - f_j)` (the
/// `j = i` term keeps iterates admissible and nonnegative). Stops when the
/// sup-norm step is `<= tol`; the result must pass the extremality check at
/// `10 * tol` or the iteration reports non-convergence.
pub fn retract_to_hull(
    space: &FiniteMetricSpace,
    f: &RadiusFunction,
    tol: f64,
    max_iter: usize,
) -> Result<RadiusFunction, TightSpanError> {
    check_len(space, f)?;
    if let Some((i, j)) = admissibility_violation(space, f, tol)? {
        return Err(TightSpanError::NotAdmissible { i: i.0, j: j.0 });
    }
    let n = space.len();
    let mut cur = f.0.clone();
    let mut residual = f64::INFINITY;
    let mut iters = 0;
    for it in 1..=max_iter.max(1) {
        iters = it;
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let envelope = (0..n)
                .map(|j| space.dist(PointId(i), PointId(j)) - cur[j])
                .fold(f64::NEG_INFINITY, f64::max);
            next.push(0.5 * (cur[i] + envelope));
        }
        residual = cur
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            // fixed point within tolerance: keep the unstepped value so
            // already-extremal inputs come back unchanged
            break;
        }
        cur = next;
    }
    let out = RadiusFunction(cur);
    let (extremal, slack) = is_extremal(space, &out, 10.0 * tol)?;
    if !extremal {
        let worst = slack.iter().cloned().fold(0.0, f64::max);
        return Err(TightSpanError::NonConvergence {
            residual: worst.max(residual),
            iters,
        });
    }
    Ok(out)
}

/// Explicit common point of a pairwise-compatible ball family inside the
/// ambient function space: `p_y = max_j (d(y, x_j) - r_j)` clamped at 0.
/// Satisfies `||p - d_{x_i}||_inf <= r_i` for every center.
pub fn hull_witness(family: &BallFamily) -> Result<RadiusFunction, TightSpanError> {
    hull_witness_for(family.space(), family.centers(), family.radii())
}

/// [`hull_witness`] for raw centers and nonnegative radii (complexes admit
/// zero radii, which `BallFamily` does not).
pub fn hull_witness_for(
    space: &FiniteMetricSpace,
    centers: &[PointId],
    radii: &[f64],
) -> Result<RadiusFunction, TightSpanError> {
    let tol = 1e-12 * space.diameter();
    for a in 0..centers.len() {
        for b in (a + 1)..centers.len() {
            if radii[a] + radii[b] < space.dist(centers[a], centers[b]) - tol {
                return Err(TightSpanError::NotPairwiseAdmissible {
                    i: centers[a],
                    j: centers[b],
                });
            }
        }
    }
    let n = space.len();
    let mut p = Vec::with_capacity(n);
    for y in 0..n {
        let v = centers
            .iter()
            .zip(radii)
            .map(|(&c, &r)| space.dist(PointId(y), c) - r)
            .fold(0.0, f64::max);
        p.push(v);
    }
    Ok(RadiusFunction(p))
}

/// Extremal hull witness: the upper envelope `min_j (d(y, x_j) + r_j)` — an
/// admissible function within `r_i` of every center row — retracted onto
/// the tight span. The retraction is sup-norm nonexpansive and fixes the
/// distance rows, so the ball conditions survive.
pub fn hull_witness_extremal(
    family: &BallFamily,
    tol: f64,
    max_iter: usize,
) -> Result<RadiusFunction, TightSpanError> {
    let space = family.space();
    if !family.pairwise_admissible() {
        let (i, j) = first_incompatible(family);
        return Err(TightSpanError::NotPairwiseAdmissible { i, j });
    }
    let n = space.len();
    // upper box corner of the ball intersection in l_inf(X)
    let mut u = Vec::with_capacity(n);
    for y in 0..n {
        let v = family
            .centers()
            .iter()
            .zip(family.radii())
            .map(|(&c, &r)| space.dist(PointId(y), c) + r)
            .fold(f64::INFINITY, f64::min);
        u.push(v);
    }
    retract_to_hull(space, &RadiusFunction(u), tol, max_iter)
}

fn first_incompatible(family: &BallFamily) -> (PointId, PointId) {
    let space = family.space();
    let tol = 1e-12 * space.diameter();
    for a in 0..family.centers().len() {
        for b in (a + 1)..family.centers().len() {
            let d = space.dist(family.centers()[a], family.centers()[b]);
            if family.radii()[a] + family.radii()[b] < d - tol {
                return (family.centers()[a], family.centers()[b]);
            }
        }
    }
    unreachable!("called on a compatible family")
}

/// One compact face of the tight span: its equality graph, dimension,
/// a relative-interior sample, and (for dimension <= 2) its extreme points.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FaceDescriptor {
    pub equality_edges: Vec<(PointId, PointId)>,
    pub dimension: usize,
    pub sample_point: RadiusFunction,
    pub vertices: Vec<RadiusFunction>,
}

/// The tight span as a face complex.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TightSpanComplex {
    pub faces: Vec<FaceDescriptor>,
    pub combinatorial_dimension: usize,
}

pub const DEFAULT_FACE_CAP: usize = 7;

// ---------------------------------------------------------------------------
// face enumeration internals
// ---------------------------------------------------------------------------

/// Affine solution of an equality system {f_i + f_j = d_ij}: per connected
/// component either a fixed value (odd cycle) or one free parameter, with
/// `f_i = offset_i + sign_i * t_comp(i)`.
struct EqSolution {
    comp: Vec<usize>,
    sign: Vec<f64>,
    offset: Vec<f64>,
    /// per component: fixed parameter value, or None when free
    fixed: Vec<Option<f64>>,
    free: Vec<usize>,
}

fn solve_equality_system(
    space: &FiniteMetricSpace,
    edges: &[(usize, usize)],
    tol: f64,
) -> Option<EqSolution> {
    let n = space.len();
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut comp = vec![usize::MAX; n];
    let mut sign = vec![0.0; n];
    let mut offset = vec![0.0; n];
    let mut fixed: Vec<Option<f64>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let c = fixed.len();
        fixed.push(None);
        comp[start] = c;
        sign[start] = 1.0;
        offset[start] = 0.0;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                let d = space.dist(PointId(u), PointId(v));
                if comp[v] == usize::MAX {
                    comp[v] = c;
                    sign[v] = -sign[u];
                    offset[v] = d - offset[u];
                    stack.push(v);
                } else if sign[v] == -sign[u] {
                    // even cycle: equation must close up exactly
                    if (offset[u] + offset[v] - d).abs() > tol {
                        return None;
                    }
                } else {
                    // odd cycle pins the component parameter
                    let t = (d - offset[u] - offset[v]) / (2.0 * sign[u]);
                    match fixed[c] {
                        None => fixed[c] = Some(t),
                        Some(prev) if (prev - t).abs() > tol => return None,
                        Some(_) => {}
                    }
                }
            }
        }
    }
    let free: Vec<usize> = (0..fixed.len()).filter(|&c| fixed[c].is_none()).collect();
    Some(EqSolution {
        comp,
        sign,
        offset,
        fixed,
        free,
    })
}

impl EqSolution {
    /// Coefficient of `f_i` over the free-parameter slots, plus its constant.
    fn coords(&self, i: usize) -> (f64, Option<usize>, f64) {
        let c = self.comp[i];
        match self.fixed[c] {
            Some(t) => (0.0, None, self.offset[i] + self.sign[i] * t),
            None => {
                let slot = self.free.iter().position(|&fc| fc == c).unwrap();
                (self.sign[i], Some(slot), self.offset[i])
            }
        }
    }

    fn value(&self, i: usize, t: &[f64]) -> f64 {
        let (coef, slot, base) = self.coords(i);
        base + slot.map_or(0.0, |s| coef * t[s])
    }
}

/// A linear constraint `sum_s coef[s] * t_s >= rhs` over up to 4 free slots.
#[derive(Clone, Copy, Debug)]
struct Constraint {
    coef: [f64; 4],
    rhs: f64,
}

/// Fourier-Motzkin feasibility over `k <= 4` variables; returns an interior
/// point built from interval midpoints during back-substitution.
fn fm_feasible(k: usize, cons: &[Constraint], tol: f64) -> Option<Vec<f64>> {
    if k == 0 {
        return cons.iter().all(|c| c.rhs <= tol).then(Vec::new);
    }
    let v = k - 1;
    let mut rest: Vec<Constraint> = Vec::new();
    let mut lowers: Vec<Constraint> = Vec::new();
    let mut uppers: Vec<Constraint> = Vec::new();
    for &c in cons {
        if c.coef[v] > 0.0 {
            lowers.push(c);
        } else if c.coef[v] < 0.0 {
            uppers.push(c);
        } else {
            rest.push(c);
        }
    }
    for lo in &lowers {
        for up in &uppers {
            // need U(t) >= L(t): sum (lo_s/lo_v - up_s/up_v) t_s >= lo_b/lo_v - up_b/up_v
            let mut coef = [0.0; 4];
            for s in 0..v {
                coef[s] = lo.coef[s] / lo.coef[v] - up.coef[s] / up.coef[v];
            }
            let rhs = lo.rhs / lo.coef[v] - up.rhs / up.coef[v];
            rest.push(Constraint { coef, rhs });
        }
    }
    let partial = fm_feasible(v, &rest, tol)?;
    let mut lo_bound = f64::NEG_INFINITY;
    let mut hi_bound = f64::INFINITY;
    for c in &lowers {
        let mut acc = c.rhs;
        for s in 0..v {
            acc -= c.coef[s] * partial[s];
        }
        lo_bound = lo_bound.max(acc / c.coef[v]);
    }
    for c in &uppers {
        let mut acc = c.rhs;
        for s in 0..v {
            acc -= c.coef[s] * partial[s];
        }
        hi_bound = hi_bound.min(acc / c.coef[v]);
    }
    if lo_bound > hi_bound + tol {
        return None;
    }
    let t_v = match (lo_bound.is_finite(), hi_bound.is_finite()) {
        (true, true) => 0.5 * (lo_bound + hi_bound),
        (true, false) => lo_bound,
        (false, true) => hi_bound,
        (false, false) => 0.0,
    };
    let mut t = partial;
    t.push(t_v);
    Some(t)
}

struct FaceCandidate {
    mask: u32,
    dimension: usize,
    sample: Vec<f64>,
    sol: EqSolution,
}

fn try_face(
    space: &FiniteMetricSpace,
    pairs: &[(usize, usize)],
    mask: u32,
    strict: f64,
    tol: f64,
) -> Option<FaceCandidate> {
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|(b, _)| mask >> b & 1 == 1)
        .map(|(_, &p)| p)
        .collect();
    let sol = solve_equality_system(space, &edges, tol)?;
    let k = sol.free.len();
    debug_assert!(k <= 4, "covering components have >= 2 vertices");

    let mut cons: Vec<Constraint> = Vec::new();
    let mut push = |coef: [f64; 4], rhs: f64| cons.push(Constraint { coef, rhs });
    let diam = space.diameter();
    for i in 0..space.len() {
        let (ci, slot, base) = sol.coords(i);
        let mut coef = [0.0; 4];
        if let Some(s) = slot {
            coef[s] = ci;
        }
        // 0 <= f_i <= 2 diam (tight span lives in [0, diam]^n)
        push(coef, -base);
        if slot.is_some() {
            push([-coef[0], -coef[1], -coef[2], -coef[3]], base - 2.0 * diam);
        } else if base < -tol || base > 2.0 * diam + tol {
            return None;
        }
    }
    for (b, &(i, j)) in pairs.iter().enumerate() {
        if mask >> b & 1 == 1 {
            continue;
        }
        let d = space.dist(PointId(i), PointId(j));
        let (ci, si, bi) = sol.coords(i);
        let (cj, sj, bj) = sol.coords(j);
        let mut coef = [0.0; 4];
        if let Some(s) = si {
            coef[s] += ci;
        }
        if let Some(s) = sj {
            coef[s] += cj;
        }
        let rhs = d + strict - bi - bj;
        if coef == [0.0; 4] {
            // constant pair: must be strictly slack, otherwise the equality
            // is implied and this graph is not the exact equality set
            if rhs > 0.0 {
                return None;
            }
        } else {
            push(coef, rhs);
        }
    }
    let t = fm_feasible(k, &cons, 1e-12 * diam.max(1.0))?;
    let sample: Vec<f64> = (0..space.len()).map(|i| sol.value(i, &t)).collect();
    Some(FaceCandidate {
        mask,
        dimension: k,
        sample,
        sol,
    })
}

/// Extreme points of the closed face (dimension <= 2 only).
fn face_vertices(
    space: &FiniteMetricSpace,
    pairs: &[(usize, usize)],
    cand: &FaceCandidate,
    tol: f64,
) -> Vec<RadiusFunction> {
    let sol = &cand.sol;
    let k = sol.free.len();
    let n = space.len();
    let to_f = |t: &[f64]| RadiusFunction((0..n).map(|i| sol.value(i, t)).collect());
    if k == 0 {
        return vec![to_f(&[])];
    }
    if k > 2 {
        return Vec::new();
    }
    // closed constraints: coef . t >= rhs
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let (ci, slot, base) = sol.coords(i);
        let mut coef = vec![0.0; k];
        if let Some(s) = slot {
            coef[s] = ci;
            cons.push((coef, -base));
        }
    }
    for (b, &(i, j)) in pairs.iter().enumerate() {
        if cand.mask >> b & 1 == 1 {
            continue;
        }
        let d = space.dist(PointId(i), PointId(j));
        let (ci, si, bi) = sol.coords(i);
        let (cj, sj, bj) = sol.coords(j);
        let mut coef = vec![0.0; k];
        if let Some(s) = si {
            coef[s] += ci;
        }
        if let Some(s) = sj {
            coef[s] += cj;
        }
        if coef.iter().any(|&c| c != 0.0) {
            cons.push((coef, d - bi - bj));
        }
    }
    let feasible = |t: &[f64]| {
        cons.iter()
            .all(|(c, rhs)| c.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() >= rhs - tol)
    };
    let mut pts: Vec<Vec<f64>> = Vec::new();
    if k == 1 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (c, rhs) in &cons {
            if c[0] > 0.0 {
                lo = lo.max(rhs / c[0]);
            } else if c[0] < 0.0 {
                hi = hi.min(rhs / c[0]);
            }
        }
        if lo.is_finite() {
            pts.push(vec![lo]);
        }
        if hi.is_finite() && (hi - lo).abs() > tol {
            pts.push(vec![hi]);
        }
    } else {
        for a in 0..cons.len() {
            for b in (a + 1)..cons.len() {
                let (ca, ra) = (&cons[a].0, cons[a].1);
                let (cb, rb) = (&cons[b].0, cons[b].1);
                let det = ca[0] * cb[1] - ca[1] * cb[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let t = vec![
                    (ra * cb[1] - ca[1] * rb) / det,
                    (ca[0] * rb - ra * cb[0]) / det,
                ];
                if feasible(&t)
                    && !pts
                        .iter()
                        .any(|p| (p[0] - t[0]).abs() <= tol && (p[1] - t[1]).abs() <= tol)
                {
                    pts.push(t);
                }
            }
        }
        // order polygon vertices by angle around the centroid
        if pts.len() > 2 {
            let cx = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
            let cy = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
            pts.sort_by(|p, q| {
                let ap = (p[1] - cy).atan2(p[0] - cx);
                let aq = (q[1] - cy).atan2(q[0] - cx);
                ap.partial_cmp(&aq).unwrap()
            });
        }
    }
    pts.iter().map(|t| to_f(t)).collect()
}

/// Enumerates the compact faces of the tight span.
///
/// Candidate equality graphs must cover every vertex (the minimality
/// condition); each is accepted when a point exists with exactly those
/// equalities, all other pair constraints strictly slack. Accepted graphs
/// are reduced to maximal faces (inclusion-minimal equality sets). Faces of
/// covering graphs are automatically bounded: each `f_i` is pinned below a
/// tight partner, so the whole face sits in `[0, diameter]^n`.
pub fn enumerate_faces(
    space: &FiniteMetricSpace,
    n_cap: usize,
) -> Result<TightSpanComplex, TightSpanError> {
    let n = space.len();
    if n > n_cap {
        return Err(TightSpanError::SizeCapExceeded { n, cap: n_cap });
    }
    // the mask/parameter representation tops out at 8 points (28 pairs,
    // at most 4 free components)
    if n > 8 {
        return Err(TightSpanError::SizeCapExceeded { n, cap: 8 });
    }
    if n == 1 {
        let face = FaceDescriptor {
            equality_edges: Vec::new(),
            dimension: 0,
            sample_point: RadiusFunction(vec![0.0]),
            vertices: vec![RadiusFunction(vec![0.0])],
        };
        return Ok(TightSpanComplex {
            faces: vec![face],
            combinatorial_dimension: 0,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let cover_bits: Vec<u32> = pairs.iter().map(|&(i, j)| (1 << i) | (1 << j)).collect();
    let full: u32 = (1 << n) - 1;
    let tol = default_tol(space);
    let strict = tol;

    let total: u32 = 1 << pairs.len();
    let chunk = 1 << 12;
    let candidates: Vec<FaceCandidate> = (0..total)
        .into_par_iter()
        .chunks(chunk)
        .flat_map_iter(|masks| {
            let mut local = Vec::new();
            for mask in masks {
                if mask == 0 {
                    continue;
                }
                let mut covered = 0u32;
                for (b, &cb) in cover_bits.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        covered |= cb;
                    }
                }
                if covered != full {
                    continue;
                }
                if let Some(c) = try_face(space, &pairs, mask, strict, tol) {
                    local.push(c);
                }
            }
            local
        })
        .collect();

    // maximal faces = inclusion-minimal equality sets
    let kept: Vec<&FaceCandidate> = candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|o| o.mask != c.mask && o.mask & c.mask == o.mask)
        })
        .collect();

    let mut faces: Vec<FaceDescriptor> = kept
        .iter()
        .map(|c| {
            let equality_edges: Vec<(PointId, PointId)> = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| c.mask >> b & 1 == 1)
                .map(|(_, &(i, j))| (PointId(i), PointId(j)))
                .collect();
            FaceDescriptor {
                equality_edges,
                dimension: c.dimension,
                sample_point: RadiusFunction(c.sample.clone()),
                vertices: face_vertices(space, &pairs, c, tol),
            }
        })
        .collect();
    faces.sort_by(|a, b| (a.dimension, &a.equality_edges).cmp(&(b.dimension, &b.equality_edges)));
    let combinatorial_dimension = faces.iter().map(|f| f.dimension).max().unwrap_or(0);
    Ok(TightSpanComplex {
        faces,
        combinatorial_dimension,
    })
}
