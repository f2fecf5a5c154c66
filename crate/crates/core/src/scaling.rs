//! Ball-enlargement scales over finite witness sets.
//!
//! For a family of closed balls `B(x_i, r_i)` and a witness set `W`, the
//! multiplicative scale is `lambda = min_{w in W} max_i d(x_i, w) / r_i` and
//! the additive scale is `delta = min_{w in W} max_i (d(x_i, w) - r_i)`.
//! The pair/triple scaling factor rho specializes lambda to the minimal
//! admissible radii: half the distance for a pair, the Gromov products for a
//! triple. Witness sets default to the whole space; restricting them models
//! landmark-only sampling and is reported raw (the classical `<= 2` bound
//! assumes a complete ambient space and is not asserted here).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::space::{FiniteMetricSpace, PointId};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScalingError {
    #[error("EmptyWitnessSet")]
    EmptyWitnessSet,
    #[error("PointOutOfRange({0})")]
    PointOutOfRange(PointId),
    #[error("DistinctPointsRequired: point {0} repeated")]
    DistinctPointsRequired(PointId),
    #[error("NonpositiveRadius: radius {value} at index {index}")]
    NonpositiveRadius { index: usize, value: f64 },
    #[error("MismatchedLengths: {centers} centers vs {radii} radii")]
    MismatchedLengths { centers: usize, radii: usize },
    #[error("TriangleViolation: ({d12}, {d13}, {d23}) is not a metric triple")]
    TriangleViolation { d12: f64, d13: f64, d23: f64 },
    #[error("DegenerateTriple({i},{j},{k}): Gromov radius {radius} below threshold")]
    DegenerateTriple {
        i: PointId,
        j: PointId,
        k: PointId,
        radius: f64,
    },
    #[error("NoExactWitness: no witness hits the zero-radius point {0}")]
    NoExactWitness(PointId),
    #[error("NoValidTriple: all triples are degenerate")]
    NoValidTriple,
    #[error("NoQualifyingFamily: no subset passed the {k}-subfamily filter")]
    NoQualifyingFamily { k: usize },
    #[error("BadRadiiRule: {0}")]
    BadRadiiRule(String),
    #[error("BadParameter: {0}")]
    BadParameter(String),
    #[error("DuplicatePoints({i},{j})")]
    DuplicatePoints { i: usize, j: usize },
    #[error("DimensionMismatch at point {0}")]
    DimensionMismatch(usize),
}

/// Landmark balls: distinct centers with strictly positive radii.
#[derive(Debug, Clone)]
pub struct BallFamily<'a> {
    space: &'a FiniteMetricSpace,
    centers: Vec<PointId>,
    radii: Vec<f64>,
}

impl<'a> BallFamily<'a> {
    pub fn new(
        space: &'a FiniteMetricSpace,
        centers: Vec<PointId>,
        radii: Vec<f64>,
    ) -> Result<Self, ScalingError> {
        if centers.len() != radii.len() {
            return Err(ScalingError::MismatchedLengths {
                centers: centers.len(),
                radii: radii.len(),
            });
        }
        if centers.is_empty() {
            return Err(ScalingError::BadParameter("empty ball family".into()));
        }
        for (index, &r) in radii.iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(ScalingError::NonpositiveRadius { index, value: r });
            }
        }
        for (a, &c) in centers.iter().enumerate() {
            if !space.contains(c) {
                return Err(ScalingError::PointOutOfRange(c));
            }
            if centers[..a].contains(&c) {
                return Err(ScalingError::DistinctPointsRequired(c));
            }
        }
        Ok(Self {
            space,
            centers,
            radii,
        })
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn centers(&self) -> &[PointId] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Pairwise compatibility `r_i + r_j >= d(x_i, x_j)`, the "balls can
    /// intersect" relation, with slack `1e-12 * diameter`.
    pub fn pairwise_admissible(&self) -> bool {
        let tol = 1e-12 * self.space.diameter();
        for a in 0..self.centers.len() {
            for b in (a + 1)..self.centers.len() {
                let d = self.space.dist(self.centers[a], self.centers[b]);
                if self.radii[a] + self.radii[b] < d - tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Outcome of a scaling query: the scale, the optimal witness (ties resolve
/// to the lowest point index), and whether the family was pairwise
/// compatible to begin with.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScalingResult {
    pub value: f64,
    pub witness: PointId,
    pub admissible: bool,
}

/// Wire format of a scaling query for external tools; `quantity` is one of
/// `"lambda"`, `"delta"`, `"rho2"`, `"rho3"`.
pub fn scaling_report(
    quantity: &str,
    centers: &[PointId],
    radii: &[f64],
    result: &ScalingResult,
) -> serde_json::Value {
    serde_json::json!({
        "quantity": quantity,
        "value": result.value,
        "witness": result.witness.0,
        "centers": centers.iter().map(|c| c.0).collect::<Vec<_>>(),
        "radii": radii,
        "admissible": result.admissible,
    })
}

/// How to treat triples with a vanishing Gromov radius (collinear triples).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneratePolicy {
    /// Refuse with [`ScalingError::DegenerateTriple`].
    Refuse,
    /// Evaluate over the nonzero-radius constraints, requiring witnesses to
    /// hit each zero-radius center exactly.
    #[default]
    Report,
}

/// Degeneracy threshold for Gromov radii: `1e-12 * diameter`.
pub fn degeneracy_threshold(space: &FiniteMetricSpace) -> f64 {
    1e-12 * space.diameter()
}

/// The unique radii with `r_i + r_j = d_ij`: the Gromov products
/// `r_1 = (d12 + d13 - d23) / 2` and cyclic.
pub fn gromov_radii(d12: f64, d13: f64, d23: f64) -> Result<(f64, f64, f64), ScalingError> {
    let tol = 1e-12 * (d12 + d13 + d23);
    let bad = d12 < -tol
        || d13 < -tol
        || d23 < -tol
        || d12 > d13 + d23 + tol
        || d13 > d12 + d23 + tol
        || d23 > d12 + d13 + tol;
    if bad || !(d12 + d13 + d23).is_finite() {
        return Err(ScalingError::TriangleViolation { d12, d13, d23 });
    }
    let r1 = 0.5 * (d12 + d13 - d23);
    let r2 = 0.5 * (d12 + d23 - d13);
    let r3 = 0.5 * (d13 + d23 - d12);
    // roundoff can leave tiny negatives on collinear input
    Ok((r1.max(0.0), r2.max(0.0), r3.max(0.0)))
}

/// Gromov radii of a triple of points of a space.
pub fn triple_gromov_radii(
    space: &FiniteMetricSpace,
    i: PointId,
    j: PointId,
    k: PointId,
) -> Result<(f64, f64, f64), ScalingError> {
    gromov_radii(space.dist(i, j), space.dist(i, k), space.dist(j, k))
}

fn check_witnesses(space: &FiniteMetricSpace, witnesses: &[PointId]) -> Result<(), ScalingError> {
    if witnesses.is_empty() {
        return Err(ScalingError::EmptyWitnessSet);
    }
    for &w in witnesses {
        if !space.contains(w) {
            return Err(ScalingError::PointOutOfRange(w));
        }
    }
    Ok(())
}

fn best_witness<F: Fn(PointId) -> f64>(witnesses: &[PointId], objective: F) -> (f64, PointId) {
    let mut best_v = f64::INFINITY;
    let mut best_w = witnesses[0];
    for &w in witnesses {
        let v = objective(w);
        if v < best_v || (v == best_v && w < best_w) {
            best_v = v;
            best_w = w;
        }
    }
    (best_v, best_w)
}

/// Smallest multiplicative enlargement at which the family shares a witness:
/// `min_w max_i d(x_i, w) / r_i`.
pub fn lambda_scaling(
    family: &BallFamily,
    witnesses: &[PointId],
) -> Result<ScalingResult, ScalingError> {
    let space = family.space;
    check_witnesses(space, witnesses)?;
    let (value, witness) = best_witness(witnesses, |w| {
        family
            .centers
            .iter()
            .zip(&family.radii)
            .map(|(&c, &r)| space.dist(c, w) / r)
            .fold(0.0, f64::max)
    });
    Ok(ScalingResult {
        value,
        witness,
        admissible: family.pairwise_admissible(),
    })
}

/// Smallest additive enlargement: `min_w max_i (d(x_i, w) - r_i)`. Negative
/// when the balls already share a witness strictly inside all of them.
pub fn delta_scaling(
    family: &BallFamily,
    witnesses: &[PointId],
) -> Result<ScalingResult, ScalingError> {
    let space = family.space;
    check_witnesses(space, witnesses)?;
    let (value, witness) = best_witness(witnesses, |w| {
        family
            .centers
            .iter()
            .zip(&family.radii)
            .map(|(&c, &r)| space.dist(c, w) - r)
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(ScalingResult {
        value,
        witness,
        admissible: family.pairwise_admissible(),
    })
}

/// Pair scaling factor: lambda at the midpoint radii `d/2, d/2`, i.e.
/// `min_w max(2 d(i,w), 2 d(j,w)) / d(i,j)`. Equals 1 exactly when the
/// witness set contains a midpoint.
pub fn rho_pair(
    space: &FiniteMetricSpace,
    i: PointId,
    j: PointId,
    witnesses: &[PointId],
) -> Result<ScalingResult, ScalingError> {
    if i == j {
        return Err(ScalingError::DistinctPointsRequired(i));
    }
    let d = space.dist(i, j);
    let family = BallFamily::new(space, vec![i, j], vec![d / 2.0, d / 2.0])?;
    lambda_scaling(&family, witnesses)
}

/// Triple scaling factor: lambda at the Gromov radii. The optimal witness is
/// the weighted-circumcenter candidate within the witness set.
///
/// Collinear triples (some Gromov radius below [`degeneracy_threshold`]) are
/// handled per `policy`: refused, or evaluated over the nonzero-radius
/// constraints with an exact-hit requirement on the zero-radius point.
pub fn rho_triple(
    space: &FiniteMetricSpace,
    i: PointId,
    j: PointId,
    k: PointId,
    witnesses: &[PointId],
    policy: DegeneratePolicy,
) -> Result<ScalingResult, ScalingError> {
    if i == j || j == k {
        return Err(ScalingError::DistinctPointsRequired(if i == j {
            i
        } else {
            j
        }));
    }
    if i == k {
        return Err(ScalingError::DistinctPointsRequired(i));
    }
    let (r1, r2, r3) = triple_gromov_radii(space, i, j, k)?;
    let tau = degeneracy_threshold(space);
    let centers = [i, j, k];
    let radii = [r1, r2, r3];
    let min_radius = r1.min(r2).min(r3);
    if min_radius <= tau {
        if policy == DegeneratePolicy::Refuse {
            return Err(ScalingError::DegenerateTriple {
                i,
                j,
                k,
                radius: min_radius,
            });
        }
        check_witnesses(space, witnesses)?;
        // witnesses must land on every zero-radius center
        let zero: Vec<PointId> = centers
            .iter()
            .zip(radii)
            .filter(|(_, r)| *r <= tau)
            .map(|(&c, _)| c)
            .collect();
        let live: Vec<(PointId, f64)> = centers
            .iter()
            .zip(radii)
            .filter(|(_, r)| *r > tau)
            .map(|(&c, r)| (c, r))
            .collect();
        let feasible: Vec<PointId> = witnesses
            .iter()
            .copied()
            .filter(|&w| zero.iter().all(|&z| space.dist(z, w) <= tau))
            .collect();
        if feasible.is_empty() {
            return Err(ScalingError::NoExactWitness(zero[0]));
        }
        let (value, witness) = best_witness(&feasible, |w| {
            live.iter()
                .map(|&(c, r)| space.dist(c, w) / r)
                .fold(0.0, f64::max)
        });
        // Gromov radii are pairwise tight by construction
        return Ok(ScalingResult {
            value,
            witness,
            admissible: true,
        });
    }
    let family = BallFamily::new(space, centers.to_vec(), radii.to_vec())?;
    lambda_scaling(&family, witnesses)
}

/// Exact minimal lambda for max-norm balls in continuous ambient space:
/// coordinatewise interval intersection gives
/// `max over pairs and coordinates of |x_ic - x_jc| / (r_i + r_j)`.
pub fn linf_lambda_exact(points: &[Vec<f64>], radii: &[f64]) -> Result<f64, ScalingError> {
    if points.len() != radii.len() {
        return Err(ScalingError::MismatchedLengths {
            centers: points.len(),
            radii: radii.len(),
        });
    }
    if points.is_empty() {
        return Err(ScalingError::BadParameter("empty family".into()));
    }
    let dim = points[0].len();
    for (idx, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(ScalingError::DimensionMismatch(idx));
        }
    }
    for (index, &r) in radii.iter().enumerate() {
        if !(r > 0.0) {
            return Err(ScalingError::NonpositiveRadius { index, value: r });
        }
    }
    let mut lambda: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i] == points[j] {
                return Err(ScalingError::DuplicatePoints { i, j });
            }
            for c in 0..dim {
                lambda = lambda.max((points[i][c] - points[j][c]).abs() / (radii[i] + radii[j]));
            }
        }
    }
    Ok(lambda)
}

/// Exhaustive-scan budget; scans past `cap` subsets fall back to seeded
/// subsampling, with the seed echoed in the report.
#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub cap: usize,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            cap: 2_000_000,
            seed: 0,
        }
    }
}

/// Worst triple found by [`max_triple_deviation`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct TripleDeviation {
    pub value: f64,
    pub triple: [PointId; 3],
    pub witness: PointId,
    pub admissible: bool,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub scanned: usize,
}

fn triple_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Maximum of [`rho_triple`] over non-degenerate triples; ties go to the
/// lexicographically smallest triple.
pub fn max_triple_deviation(
    space: &FiniteMetricSpace,
    witnesses: &[PointId],
    cfg: &ScanConfig,
) -> Result<TripleDeviation, ScalingError> {
    let n = space.len();
    if n < 3 {
        return Err(ScalingError::BadParameter(format!(
            "need n >= 3 points, got {n}"
        )));
    }
    check_witnesses(space, witnesses)?;

    type Best = Option<([usize; 3], ScalingResult)>;
    let merge = |a: Best, b: Best| -> Best {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some((ta, ra)), Some((tb, rb))) => {
                if rb.value > ra.value || (rb.value == ra.value && tb < ta) {
                    Some((tb, rb))
                } else {
                    Some((ta, ra))
                }
            }
        }
    };
    let eval = |i: usize, j: usize, k: usize| -> Best {
        match rho_triple(
            space,
            PointId(i),
            PointId(j),
            PointId(k),
            witnesses,
            DegeneratePolicy::Refuse,
        ) {
            Ok(r) => Some(([i, j, k], r)),
            Err(ScalingError::DegenerateTriple { .. }) => None,
            Err(_) => None,
        }
    };

    let total = triple_count(n);
    let exhaustive = total <= cfg.cap;
    let (best, scanned) = if exhaustive {
        let best = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut local: Best = None;
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        local = merge(local, eval(i, j, k));
                    }
                }
                local
            })
            .reduce(|| None, merge);
        (best, total)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut best: Best = None;
        for _ in 0..cfg.cap {
            let t = loop {
                let mut c = [
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ];
                c.sort_unstable();
                if c[0] < c[1] && c[1] < c[2] {
                    break c;
                }
            };
            best = merge(best, eval(t[0], t[1], t[2]));
        }
        (best, cfg.cap)
    };

    let (triple, result) = best.ok_or(ScalingError::NoValidTriple)?;
    Ok(TripleDeviation {
        value: result.value,
        triple: [PointId(triple[0]), PointId(triple[1]), PointId(triple[2])],
        witness: result.witness,
        admissible: result.admissible,
        exhaustive,
        seed: (!exhaustive).then_some(cfg.seed),
        scanned,
    })
}

/// Radii assignment for [`helly_defect`] families.
#[derive(Debug, Clone)]
pub enum RadiiRule {
    /// Minimal pairwise-tight radii; canonical only for triples.
    Gromov,
    /// One radius per point of the space; subsets restrict it.
    Explicit(Vec<f64>),
}

/// Result of a Helly-type `(n, k)` scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HellyReport {
    pub n_size: usize,
    pub k_size: usize,
    pub max_lambda: f64,
    pub worst_subset: Vec<PointId>,
    pub worst_witness: PointId,
    pub qualifying: usize,
    pub scanned: usize,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn subset_radii(
    space: &FiniteMetricSpace,
    subset: &[usize],
    rule: &RadiiRule,
) -> Result<Vec<f64>, ScalingError> {
    match rule {
        RadiiRule::Gromov => {
            if subset.len() != 3 {
                return Err(ScalingError::BadRadiiRule(format!(
                    "gromov radii are canonical only for triples; family size {} needs explicit radii",
                    subset.len()
                )));
            }
            let (r1, r2, r3) = triple_gromov_radii(
                space,
                PointId(subset[0]),
                PointId(subset[1]),
                PointId(subset[2]),
            )?;
            Ok(vec![r1, r2, r3])
        }
        RadiiRule::Explicit(radii) => {
            if radii.len() != space.len() {
                return Err(ScalingError::MismatchedLengths {
                    centers: space.len(),
                    radii: radii.len(),
                });
            }
            Ok(subset.iter().map(|&p| radii[p]).collect())
        }
    }
}

/// Scans `n_size`-subsets whose every `k_size`-subfamily already "fills"
/// (pairwise compatibility for `k = 2`, witnessed lambda within `1 + tol`
/// for `k >= 3`) and reports the largest full-family lambda — the scale
/// needed to fill the top simplex once its `(k-1)`-faces are filled.
pub fn helly_defect(
    space: &FiniteMetricSpace,
    n_size: usize,
    k_size: usize,
    witnesses: &[PointId],
    rule: &RadiiRule,
    tol: f64,
    cfg: &ScanConfig,
) -> Result<HellyReport, ScalingError> {
    let n = space.len();
    if !(2 <= k_size && k_size < n_size && n_size <= n) {
        return Err(ScalingError::BadParameter(format!(
            "need 2 <= k ({k_size}) < n_size ({n_size}) <= n ({n})"
        )));
    }
    check_witnesses(space, witnesses)?;

    let qualifies = |subset: &[usize], radii: &[f64]| -> Result<bool, ScalingError> {
        let mut pick = vec![0usize; k_size];
        for (slot, p) in pick.iter_mut().enumerate() {
            *p = slot;
        }
        loop {
            if k_size == 2 {
                let (a, b) = (pick[0], pick[1]);
                let d = space.dist(PointId(subset[a]), PointId(subset[b]));
                if radii[a] + radii[b] < d - tol {
                    return Ok(false);
                }
            } else {
                let centers: Vec<PointId> = pick.iter().map(|&s| PointId(subset[s])).collect();
                let sub_radii: Vec<f64> = pick.iter().map(|&s| radii[s]).collect();
                let family = BallFamily::new(space, centers, sub_radii)?;
                if lambda_scaling(&family, witnesses)?.value > 1.0 + tol {
                    return Ok(false);
                }
            }
            // next k-combination of 0..n_size
            let mut pos = k_size;
            while pos > 0 {
                pos -= 1;
                if pick[pos] != pos + n_size - k_size {
                    pick[pos] += 1;
                    for q in (pos + 1)..k_size {
                        pick[q] = pick[q - 1] + 1;
                    }
                    break;
                }
                if pos == 0 {
                    return Ok(true);
                }
            }
        }
    };

    let evaluate = |subset: &[usize]| -> Result<Option<(f64, PointId)>, ScalingError> {
        let radii = subset_radii(space, subset, rule)?;
        // collinear triples have no positive canonical radii; skip them
        if radii.iter().any(|&r| r <= degeneracy_threshold(space)) {
            return Ok(None);
        }
        if !qualifies(subset, &radii)? {
            return Ok(None);
        }
        let centers: Vec<PointId> = subset.iter().map(|&p| PointId(p)).collect();
        let family = BallFamily::new(space, centers, radii)?;
        let r = lambda_scaling(&family, witnesses)?;
        Ok(Some((r.value, r.witness)))
    };

    let total = binomial(n, n_size);
    let exhaustive = total <= cfg.cap;
    let mut best: Option<(f64, Vec<usize>, PointId)> = None;
    let mut qualifying = 0usize;
    let mut scanned = 0usize;

    let mut consider = |subset: &[usize]| -> Result<(), ScalingError> {
        scanned += 1;
        if let Some((value, witness)) = evaluate(subset)? {
            qualifying += 1;
            let better = match &best {
                None => true,
                Some((bv, bs, _)) => value > *bv || (value == *bv && subset < bs.as_slice()),
            };
            if better {
                best = Some((value, subset.to_vec(), witness));
            }
        }
        Ok(())
    };

    if exhaustive {
        let mut subset: Vec<usize> = (0..n_size).collect();
        loop {
            consider(&subset)?;
            let mut pos = n_size;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                if subset[pos] != pos + n - n_size {
                    subset[pos] += 1;
                    for q in (pos + 1)..n_size {
                        subset[q] = subset[q - 1] + 1;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.cap {
            let mut set = std::collections::BTreeSet::new();
            while set.len() < n_size {
                set.insert(rng.gen_range(0..n));
            }
            let subset: Vec<usize> = set.into_iter().collect();
            consider(&subset)?;
        }
    }

    match best {
        None => Err(ScalingError::NoQualifyingFamily { k: k_size }),
        Some((max_lambda, subset, worst_witness)) => Ok(HellyReport {
            n_size,
            k_size,
            max_lambda,
            worst_subset: subset.into_iter().map(PointId).collect(),
            worst_witness,
            qualifying,
            scanned,
            exhaustive,
            seed: (!exhaustive).then_some(cfg.seed),
        }),
    }
}
