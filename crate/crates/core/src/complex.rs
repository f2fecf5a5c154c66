//! Cech and Vietoris-Rips complexes over landmark/witness pairs, their
//! filtrations, Z/2 homology and persistence, and the VR/Cech gap.
//!
//! A Cech simplex needs one witness point inside every vertex ball; a VR
//! simplex only needs the balls to be pairwise compatible
//! (`d_ij <= r_i + r_j`, closed balls). Taking the hyperconvex hull as the
//! witness set makes the two coincide, which `cech_in_hull` certifies per
//! simplex with an explicit hull point.

use std::collections::HashMap;

use thiserror::Error;

use crate::scaling::ScalingError;
use crate::space::{FiniteMetricSpace, PointId};
use crate::tightspan::{self, RadiusFunction, TightSpanError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ComplexError {
    #[error("EmptyWitnessSet")]
    EmptyWitnessSet,
    #[error("PointOutOfRange({0})")]
    PointOutOfRange(PointId),
    #[error("DuplicateLandmark({0})")]
    DuplicateLandmark(PointId),
    #[error("MismatchedLengths: {landmarks} landmarks vs {radii} radii")]
    MismatchedLengths { landmarks: usize, radii: usize },
    #[error("NegativeRadius: {value} at landmark index {index}")]
    NegativeRadius { index: usize, value: f64 },
    #[error("NotDownwardClosed: missing facet {0:?}")]
    NotDownwardClosed(Vec<PointId>),
    #[error("InvalidFiltration: {0}")]
    InvalidFiltration(String),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    TightSpan(#[from] TightSpanError),
}

/// A simplex: strictly increasing landmark ids plus its filtration value
/// (0 for complexes built at a fixed radius assignment).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Simplex {
    pub vertices: Vec<PointId>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices sorted by `(value, dimension, lexicographic vertices)` and
/// closed under faces.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimplicialComplex {
    pub simplices: Vec<Simplex>,
    pub max_dim: usize,
}

impl SimplicialComplex {
    fn build(mut simplices: Vec<Simplex>, max_dim: usize) -> Self {
        simplices.sort_by(|a, b| {
            a.value
                .partial_cmp(&b.value)
                .unwrap()
                .then(a.vertices.len().cmp(&b.vertices.len()))
                .then(a.vertices.cmp(&b.vertices))
        });
        Self { simplices, max_dim }
    }

    pub fn contains(&self, vertices: &[PointId]) -> bool {
        self.simplices.iter().any(|s| s.vertices == vertices)
    }

    /// Vertex sets only, for set comparisons across constructions.
    pub fn simplex_sets(&self) -> Vec<Vec<PointId>> {
        let mut sets: Vec<Vec<PointId>> =
            self.simplices.iter().map(|s| s.vertices.clone()).collect();
        sets.sort();
        sets
    }

    /// Subcomplex of simplices with value `<= scale`.
    pub fn at_scale(&self, scale: f64) -> SimplicialComplex {
        SimplicialComplex {
            simplices: self
                .simplices
                .iter()
                .filter(|s| s.value <= scale)
                .cloned()
                .collect(),
            max_dim: self.max_dim,
        }
    }

    fn index_map(&self) -> HashMap<&[PointId], usize> {
        self.simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.as_slice(), i))
            .collect()
    }

    /// Checks that every facet is present with a value not above its coface.
    fn verify_closure(&self) -> Result<(), ComplexError> {
        let index = self.index_map();
        for s in &self.simplices {
            if s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ComplexError::InvalidFiltration(format!(
                    "vertices not strictly increasing: {:?}",
                    s.vertices
                )));
            }
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
                match index.get(facet.as_slice()) {
                    None => return Err(ComplexError::NotDownwardClosed(facet)),
                    Some(&f) => {
                        if self.simplices[f].value > s.value {
                            return Err(ComplexError::InvalidFiltration(format!(
                                "facet {:?} enters after {:?}",
                                facet, s.vertices
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_landmarks(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
) -> Result<Vec<PointId>, ComplexError> {
    let mut sorted = landmarks.to_vec();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(ComplexError::DuplicateLandmark(pair[0]));
        }
    }
    for &l in &sorted {
        if !space.contains(l) {
            return Err(ComplexError::PointOutOfRange(l));
        }
    }
    Ok(sorted)
}

fn check_radii(landmarks: usize, radii: &[f64]) -> Result<(), ComplexError> {
    if radii.len() != landmarks {
        return Err(ComplexError::MismatchedLengths {
            landmarks,
            radii: radii.len(),
        });
    }
    for (index, &value) in radii.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(ComplexError::NegativeRadius { index, value });
        }
    }
    Ok(())
}

/// Sorts landmarks and keeps their radii aligned.
fn sorted_with_radii(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    radii: &[f64],
) -> Result<(Vec<PointId>, Vec<f64>), ComplexError> {
    check_radii(landmarks.len(), radii)?;
    let mut pairs: Vec<(PointId, f64)> = landmarks
        .iter()
        .copied()
        .zip(radii.iter().copied())
        .collect();
    pairs.sort_by_key(|&(l, _)| l);
    let sorted: Vec<PointId> = pairs.iter().map(|&(l, _)| l).collect();
    check_landmarks(space, &sorted)?;
    Ok((sorted, pairs.into_iter().map(|(_, r)| r).collect()))
}

/// Emits every clique of `adj` with 2..=max_size vertices, in lexicographic
/// order of the landmark-slice indices.
fn for_each_clique(adj: &[Vec<bool>], max_size: usize, mut visit: impl FnMut(&[usize])) {
    fn extend(
        adj: &[Vec<bool>],
        stack: &mut Vec<usize>,
        candidates: &[usize],
        max_size: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        for (pos, &c) in candidates.iter().enumerate() {
            stack.push(c);
            if stack.len() >= 2 {
                visit(stack);
            }
            if stack.len() < max_size {
                let next: Vec<usize> = candidates[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&o| adj[c][o])
                    .collect();
                if !next.is_empty() {
                    extend(adj, stack, &next, max_size, visit);
                }
            }
            stack.pop();
        }
    }
    let all: Vec<usize> = (0..adj.len()).collect();
    let mut stack = Vec::new();
    extend(adj, &mut stack, &all, max_size, &mut visit);
}

/// Vietoris-Rips complex at a radius assignment: a simplex whenever every
/// vertex pair satisfies `d_ij <= r_i + r_j` (closed balls, slack
/// `1e-12 * diameter`). Flag by construction.
pub fn vr_complex(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    radii: &[f64],
    max_dim: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let (lm, rad) = sorted_with_radii(space, landmarks, radii)?;
    let tol = 1e-12 * space.diameter();
    let m = lm.len();
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let ok = space.dist(lm[i], lm[j]) <= rad[i] + rad[j] + tol;
            adj[i][j] = ok;
            adj[j][i] = ok;
        }
    }
    let mut simplices: Vec<Simplex> = lm
        .iter()
        .map(|&l| Simplex {
            vertices: vec![l],
            value: 0.0,
        })
        .collect();
    for_each_clique(&adj, max_dim + 1, |clique| {
        simplices.push(Simplex {
            vertices: clique.iter().map(|&c| lm[c]).collect(),
            value: 0.0,
        });
    });
    Ok(SimplicialComplex::build(simplices, max_dim))
}

fn check_witness_set(space: &FiniteMetricSpace, witnesses: &[PointId]) -> Result<(), ComplexError> {
    if witnesses.is_empty() {
        return Err(ComplexError::EmptyWitnessSet);
    }
    for &w in witnesses {
        if !space.contains(w) {
            return Err(ComplexError::PointOutOfRange(w));
        }
    }
    Ok(())
}

/// Witness-strict Vietoris-Rips variant: each edge needs a witness common
/// to its two balls rather than bare pairwise compatibility; higher
/// simplices are cliques of those edges. For sparse-witness studies.
pub fn vr_complex_witnessed(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    witnesses: &[PointId],
    radii: &[f64],
    max_dim: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let (lm, rad) = sorted_with_radii(space, landmarks, radii)?;
    check_witness_set(space, witnesses)?;
    let tol = 1e-12 * space.diameter();
    let m = lm.len();
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let ok = witnesses.iter().any(|&w| {
                space.dist(lm[i], w) <= rad[i] + tol && space.dist(lm[j], w) <= rad[j] + tol
            });
            adj[i][j] = ok;
            adj[j][i] = ok;
        }
    }
    let mut simplices: Vec<Simplex> = lm
        .iter()
        .map(|&l| Simplex {
            vertices: vec![l],
            value: 0.0,
        })
        .collect();
    for_each_clique(&adj, max_dim + 1, |clique| {
        simplices.push(Simplex {
            vertices: clique.iter().map(|&c| lm[c]).collect(),
            value: 0.0,
        });
    });
    Ok(SimplicialComplex::build(simplices, max_dim))
}

/// Cech complex over a witness set: a simplex whenever some witness lies in
/// every vertex ball (closed balls, slack `1e-12 * diameter`).
pub fn cech_complex(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    witnesses: &[PointId],
    radii: &[f64],
    max_dim: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let (lm, rad) = sorted_with_radii(space, landmarks, radii)?;
    check_witness_set(space, witnesses)?;
    let tol = 1e-12 * space.diameter();
    let m = lm.len();
    let witnessed = |idxs: &[usize]| -> bool {
        witnesses
            .iter()
            .any(|&w| idxs.iter().all(|&i| space.dist(lm[i], w) <= rad[i] + tol))
    };
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let ok = witnessed(&[i, j]);
            adj[i][j] = ok;
            adj[j][i] = ok;
        }
    }
    let mut simplices: Vec<Simplex> = (0..m)
        .filter(|&i| witnessed(&[i]))
        .map(|i| Simplex {
            vertices: vec![lm[i]],
            value: 0.0,
        })
        .collect();
    for_each_clique(&adj, max_dim + 1, |clique| {
        if clique.len() <= 2 || witnessed(clique) {
            simplices.push(Simplex {
                vertices: clique.iter().map(|&c| lm[c]).collect(),
                value: 0.0,
            });
        }
    });
    Ok(SimplicialComplex::build(simplices, max_dim))
}

/// Per-simplex certificate that the vertex balls meet in the hull.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HullCertificate {
    pub simplex: Vec<PointId>,
    pub witness: RadiusFunction,
}

/// Cech complex with the hyperconvex hull as witness set: a simplex
/// whenever its vertex pairs are compatible — so it equals [`vr_complex`]
/// — with a constructive hull point certifying each acceptance.
pub fn cech_in_hull(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    radii: &[f64],
    max_dim: usize,
) -> Result<(SimplicialComplex, Vec<HullCertificate>), ComplexError> {
    let complex = vr_complex(space, landmarks, radii, max_dim)?;
    let (lm, rad) = sorted_with_radii(space, landmarks, radii)?;
    let radius_of: HashMap<PointId, f64> = lm.iter().copied().zip(rad).collect();
    let mut certificates = Vec::with_capacity(complex.simplices.len());
    for s in &complex.simplices {
        let radii: Vec<f64> = s.vertices.iter().map(|v| radius_of[v]).collect();
        let witness = tightspan::hull_witness_for(space, &s.vertices, &radii)?;
        certificates.push(HullCertificate {
            simplex: s.vertices.clone(),
            witness,
        });
    }
    Ok((complex, certificates))
}

/// Uniform-radius Vietoris-Rips filtration: each simplex enters at half its
/// vertex diameter, `max d_ij / 2`.
pub fn vr_filtration(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    max_dim: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let lm = check_landmarks(space, landmarks)?;
    let m = lm.len();
    let full = vec![vec![true; m]; m];
    let mut simplices: Vec<Simplex> = lm
        .iter()
        .map(|&l| Simplex {
            vertices: vec![l],
            value: 0.0,
        })
        .collect();
    for_each_clique(&full, max_dim + 1, |clique| {
        let mut value: f64 = 0.0;
        for (a, &i) in clique.iter().enumerate() {
            for &j in &clique[a + 1..] {
                value = value.max(space.dist(lm[i], lm[j]) / 2.0);
            }
        }
        simplices.push(Simplex {
            vertices: clique.iter().map(|&c| lm[c]).collect(),
            value,
        });
    });
    Ok(SimplicialComplex::build(simplices, max_dim))
}

/// Uniform-radius Cech filtration over a witness set: each simplex enters
/// at `min_w max_i d(x_i, w)`.
pub fn cech_filtration(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    witnesses: &[PointId],
    max_dim: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let lm = check_landmarks(space, landmarks)?;
    check_witness_set(space, witnesses)?;
    let m = lm.len();
    let full = vec![vec![true; m]; m];
    let critical = |idxs: &[usize]| -> f64 {
        witnesses
            .iter()
            .map(|&w| {
                idxs.iter()
                    .map(|&i| space.dist(lm[i], w))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut simplices: Vec<Simplex> = (0..m)
        .map(|i| Simplex {
            vertices: vec![lm[i]],
            value: critical(&[i]),
        })
        .collect();
    for_each_clique(&full, max_dim + 1, |clique| {
        simplices.push(Simplex {
            vertices: clique.iter().map(|&c| lm[c]).collect(),
            value: critical(clique),
        });
    });
    Ok(SimplicialComplex::build(simplices, max_dim))
}

// ---------------------------------------------------------------------------
// Z/2 homology
// ---------------------------------------------------------------------------

/// Column rank of a sparse Z/2 matrix given as row-index lists.
fn gf2_rank(columns: &[Vec<usize>], rows: usize) -> usize {
    let words = rows.div_ceil(64).max(1);
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; rows];
    let mut rank = 0;
    for col in columns {
        let mut bits = vec![0u64; words];
        for &r in col {
            bits[r / 64] ^= 1 << (r % 64);
        }
        loop {
            let low = match bits.iter().enumerate().rev().find(|(_, &w)| w != 0) {
                None => break,
                Some((wi, &w)) => wi * 64 + (63 - w.leading_zeros() as usize),
            };
            match pivots[low].take() {
                Some(p) => {
                    for (b, pw) in bits.iter_mut().zip(&p) {
                        *b ^= pw;
                    }
                    pivots[low] = Some(p);
                }
                None => {
                    pivots[low] = Some(bits);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Betti numbers over Z/2 up to dimension `up_to`:
/// `beta_k = n_k - rank d_k - rank d_{k+1}`.
pub fn betti_numbers(
    complex: &SimplicialComplex,
    up_to: usize,
) -> Result<Vec<usize>, ComplexError> {
    complex.verify_closure()?;
    let mut by_dim: Vec<Vec<&Simplex>> = Vec::new();
    for s in &complex.simplices {
        let d = s.dim();
        while by_dim.len() <= d {
            by_dim.push(Vec::new());
        }
        by_dim[d].push(s);
    }
    let boundary_rank = |d: usize| -> usize {
        if d == 0 || d >= by_dim.len() || by_dim[d].is_empty() {
            return 0;
        }
        let rows_index: HashMap<&[PointId], usize> = by_dim[d - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.as_slice(), i))
            .collect();
        let columns: Vec<Vec<usize>> = by_dim[d]
            .iter()
            .map(|s| {
                (0..s.vertices.len())
                    .map(|drop| {
                        let facet: Vec<PointId> = s
                            .vertices
                            .iter()
                            .enumerate()
                            .filter(|(p, _)| *p != drop)
                            .map(|(_, &v)| v)
                            .collect();
                        rows_index[facet.as_slice()]
                    })
                    .collect()
            })
            .collect();
        gf2_rank(&columns, rows_index.len())
    };
    let mut betti = Vec::new();
    for k in 0..=up_to {
        let n_k = by_dim.get(k).map_or(0, |v| v.len());
        let b = n_k
            .saturating_sub(boundary_rank(k))
            .saturating_sub(boundary_rank(k + 1));
        betti.push(b);
    }
    Ok(betti)
}

/// A homology class along the filtration; `death` is infinite for classes
/// that never die.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PersistencePair {
    pub dimension: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

/// Persistence pairs plus the column-addition count of the reduction.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PersistenceOutput {
    pub pairs: Vec<PersistencePair>,
    pub column_additions: u64,
}

impl PersistenceOutput {
    /// Number of dimension-`k` classes alive at `scale`
    /// (`birth <= scale < death`).
    pub fn betti_at(&self, dimension: usize, scale: f64) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.dimension == dimension && p.birth <= scale && scale < p.death)
            .count()
    }
}

/// Standard boundary-matrix column reduction over Z/2 in filtration order
/// `(value, dimension, lexicographic)`.
pub fn persistence(filtered: &SimplicialComplex) -> Result<PersistenceOutput, ComplexError> {
    filtered.verify_closure()?;
    let complex = SimplicialComplex::build(filtered.simplices.clone(), filtered.max_dim);
    let n = complex.simplices.len();
    let index = complex.index_map();

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    for s in &complex.simplices {
        let mut col = Vec::new();
        if s.vertices.len() > 1 {
            for drop in 0..s.vertices.len() {
                let facet: Vec<PointId> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != drop)
                    .map(|(_, &v)| v)
                    .collect();
                col.push(index[facet.as_slice()]);
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    let mut pivot_of: Vec<Option<usize>> = vec![None; n];
    let mut column_additions: u64 = 0;
    let mut pairs = Vec::new();
    let mut paired = vec![false; n];
    for j in 0..n {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match pivot_of[low] {
                None => break,
                Some(other) => {
                    col = symmetric_difference(&col, &columns[other]);
                    column_additions += 1;
                }
            }
        }
        if let Some(&low) = col.last() {
            pivot_of[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            pairs.push(PersistencePair {
                dimension: complex.simplices[low].dim(),
                birth: complex.simplices[low].value,
                death: complex.simplices[j].value,
            });
        }
        columns[j] = col;
    }
    for (j, s) in complex.simplices.iter().enumerate() {
        if !paired[j] && columns[j].is_empty() {
            pairs.push(PersistencePair {
                dimension: s.dim(),
                birth: s.value,
                death: f64::INFINITY,
            });
        }
    }
    pairs.sort_by(|a, b| {
        (a.dimension, a.birth, a.death)
            .partial_cmp(&(b.dimension, b.birth, b.death))
            .unwrap()
    });
    Ok(PersistenceOutput {
        pairs,
        column_additions,
    })
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            std::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

/// Vertex sets whose pairs are all edges but which are missing as
/// simplices, up to the complex's `max_dim`. Empty exactly when the
/// complex is flag.
pub fn flag_check(complex: &SimplicialComplex) -> Vec<Vec<PointId>> {
    let vertices: Vec<PointId> = complex
        .simplices
        .iter()
        .filter(|s| s.vertices.len() == 1)
        .map(|s| s.vertices[0])
        .collect();
    let m = vertices.len();
    let pos: HashMap<PointId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![vec![false; m]; m];
    for s in complex.simplices.iter().filter(|s| s.vertices.len() == 2) {
        let (i, j) = (pos[&s.vertices[0]], pos[&s.vertices[1]]);
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let mut missing = Vec::new();
    for_each_clique(&adj, complex.max_dim + 1, |clique| {
        if clique.len() >= 3 {
            let verts: Vec<PointId> = clique.iter().map(|&c| vertices[c]).collect();
            if !complex.contains(&verts) {
                missing.push(verts);
            }
        }
    });
    missing.sort();
    missing
}

/// One VR simplex missing from the Cech complex, with the multiplicative
/// enlargement at which it appears.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GapEntry {
    pub simplex: Vec<PointId>,
    pub lambda: f64,
    pub witness: PointId,
}

/// The VR/Cech discrepancy at a radius assignment.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GapReport {
    pub entries: Vec<GapEntry>,
    pub max_lambda: Option<f64>,
}

/// Reports, for each simplex in the VR complex but missing from the
/// witnessed Cech complex, the scale at which its balls acquire a common
/// witness.
pub fn vr_cech_gap(
    space: &FiniteMetricSpace,
    landmarks: &[PointId],
    witnesses: &[PointId],
    radii: &[f64],
    max_dim: usize,
) -> Result<GapReport, ComplexError> {
    let vr = vr_complex(space, landmarks, radii, max_dim)?;
    let cech = cech_complex(space, landmarks, witnesses, radii, max_dim)?;
    let (lm, rad) = sorted_with_radii(space, landmarks, radii)?;
    let radius_of: HashMap<PointId, f64> = lm.iter().copied().zip(rad).collect();
    let tol = 1e-12 * space.diameter();
    let cech_sets: std::collections::HashSet<&[PointId]> = cech
        .simplices
        .iter()
        .map(|s| s.vertices.as_slice())
        .collect();

    let mut entries = Vec::new();
    for s in &vr.simplices {
        if cech_sets.contains(s.vertices.as_slice()) {
            continue;
        }
        // zero radii demand exact hits, mirroring the degenerate-triple rule
        let objective = |w: PointId| -> f64 {
            s.vertices
                .iter()
                .map(|&c| {
                    let d = space.dist(c, w);
                    let r = radius_of[&c];
                    if r > 0.0 {
                        d / r
                    } else if d <= tol {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max)
        };
        let mut best_v = f64::INFINITY;
        let mut best_w = witnesses[0];
        for &w in witnesses {
            let v = objective(w);
            if v < best_v || (v == best_v && w < best_w) {
                best_v = v;
                best_w = w;
            }
        }
        entries.push(GapEntry {
            simplex: s.vertices.clone(),
            lambda: best_v,
            witness: best_w,
        });
    }
    let max_lambda = entries
        .iter()
        .map(|e| e.lambda)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    Ok(GapReport {
        entries,
        max_lambda,
    })
}
