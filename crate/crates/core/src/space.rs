//! Finite metric spaces: validation, accessors, and test-geometry generators.
//!
//! Distances are stored dense (row-major `n x n`); the crate targets spaces
//! of up to a few hundred points, so quadratic memory is deliberate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Index of a point in a [`FiniteMetricSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Violations of the metric axioms and generator preconditions.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MetricError {
    #[error("Empty: a metric space needs at least one point")]
    Empty,
    #[error("NotSquare: row {row} has {got} entries, expected {expected}")]
    NotSquare {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("LabelCount: {labels} labels for {points} points")]
    LabelCount { labels: usize, points: usize },
    #[error("NonzeroDiagonal({i}): {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("NegativeEntry({i},{j}): {value}")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("Asymmetric({i},{j}): {forward} vs {backward}")]
    Asymmetric {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("DuplicatePoints({i},{j}): zero distance between distinct points")]
    DuplicatePoints { i: usize, j: usize },
    #[error("TriangleViolation({i},{j},{k}): d = {direct} exceeds {via} via {k}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },
    #[error("NotFinite({i},{j}): {value}")]
    NotFinite { i: usize, j: usize, value: f64 },
    #[error("DisconnectedGraph: vertex {0} is unreachable from vertex 0")]
    DisconnectedGraph(usize),
    #[error("InvalidEdge({i},{j}): {reason}")]
    InvalidEdge { i: usize, j: usize, reason: String },
    #[error("DimensionMismatch: point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("BadParameter: {0}")]
    BadParameter(String),
}

/// Norms available to [`point_cloud_metric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// l2.
    Euclidean,
    /// l-infinity (coordinate maximum).
    Max,
    /// l1 (coordinate sum).
    Sum,
}

impl Norm {
    fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::Max => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            Norm::Sum => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

/// A finite metric space: point labels plus a validated dense distance matrix.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
    diameter: f64,
}

impl FiniteMetricSpace {
    /// Validates `matrix` against the metric axioms and wraps it.
    ///
    /// Checks run in a fixed order (shape, diagonal, sign, symmetry,
    /// distinctness, triangle inequality) and report the first violation.
    /// `tol` is the slack allowed on symmetry/diagonal/triangle checks; use
    /// [`metric_tolerance`] for the default `1e-9 * max entry`.
    pub fn validated(
        labels: Vec<String>,
        matrix: &[Vec<f64>],
        tol: f64,
    ) -> Result<Self, MetricError> {
        let n = matrix.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    got: r.len(),
                    expected: n,
                });
            }
        }
        if labels.len() != n {
            return Err(MetricError::LabelCount {
                labels: labels.len(),
                points: n,
            });
        }
        for (i, r) in matrix.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MetricError::NotFinite { i, j, value: v });
                }
            }
        }
        for i in 0..n {
            if matrix[i][i].abs() > tol {
                return Err(MetricError::NonzeroDiagonal {
                    i,
                    value: matrix[i][i],
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if matrix[i][j] < -tol {
                    return Err(MetricError::NegativeEntry {
                        i,
                        j,
                        value: matrix[i][j],
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (matrix[i][j] - matrix[j][i]).abs() > tol {
                    return Err(MetricError::Asymmetric {
                        i,
                        j,
                        forward: matrix[i][j],
                        backward: matrix[j][i],
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if matrix[i][j] <= tol {
                    return Err(MetricError::DuplicatePoints { i, j });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let via = matrix[i][k] + matrix[k][j];
                    if matrix[i][j] > via + tol {
                        return Err(MetricError::TriangleViolation {
                            i,
                            j,
                            k,
                            direct: matrix[i][j],
                            via,
                        });
                    }
                }
            }
        }
        Ok(Self::trusted(
            labels,
            matrix.iter().flatten().copied().collect(),
            n,
        ))
    }

    /// Wraps a flat row-major matrix the caller guarantees to be a metric.
    ///
    /// Generators take this path: their outputs satisfy the axioms by
    /// construction and the full triangle check is cubic in `n`.
    pub fn trusted(labels: Vec<String>, dist: Vec<f64>, n: usize) -> Self {
        debug_assert_eq!(labels.len(), n);
        debug_assert_eq!(dist.len(), n * n);
        let diameter = dist.iter().copied().fold(0.0, f64::max);
        Self {
            labels,
            dist,
            n,
            diameter,
        }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the space has exactly one point.
    pub fn is_empty(&self) -> bool {
        false // n >= 1 is enforced at construction
    }

    /// Distance between two points.
    #[inline]
    pub fn dist(&self, i: PointId, j: PointId) -> f64 {
        self.dist[i.0 * self.n + j.0]
    }

    /// Row `i` of the distance matrix (the Kuratowski coordinates of `i`).
    pub fn row(&self, i: PointId) -> &[f64] {
        &self.dist[i.0 * self.n..(i.0 + 1) * self.n]
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Point labels, in index order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// All point indices, in order; the default witness/landmark set.
    pub fn point_ids(&self) -> Vec<PointId> {
        (0..self.n).map(PointId).collect()
    }

    /// The distance matrix as rows.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(PointId(i)).to_vec()).collect()
    }

    /// True when `p` indexes a point of this space.
    pub fn contains(&self, p: PointId) -> bool {
        p.0 < self.n
    }
}

/// Default validation slack: `1e-9 *` the largest matrix entry.
///
/// Point-cloud norms introduce rounding at this scale; exact inputs are
/// unaffected since their violations are either zero or macroscopic.
pub fn metric_tolerance(matrix: &[Vec<f64>]) -> f64 {
    let m = matrix
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    1e-9 * m
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Validates a bare matrix with generated labels `p0..p{n-1}`.
pub fn validate_metric(matrix: &[Vec<f64>], tol: f64) -> Result<FiniteMetricSpace, MetricError> {
    FiniteMetricSpace::validated(default_labels(matrix.len()), matrix, tol)
}

/// Floyd-Warshall closure, in place on a flat matrix. Symmetry is preserved
/// exactly because updates use the same two addends on both sides.
fn shortest_path_closure(dist: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k * n + j];
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                }
            }
        }
    }
}

/// Shortest-path metric of a connected positively weighted graph.
///
/// Vertices are `0..n`; parallel edges keep the lighter weight. Realizes
/// tree metrics (with internal branch points as honest points of the space)
/// and general graph metrics.
pub fn graph_metric(
    n: usize,
    edges: &[(usize, usize, f64)],
) -> Result<FiniteMetricSpace, MetricError> {
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let mut dist = vec![f64::INFINITY; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    for &(i, j, w) in edges {
        if i >= n || j >= n {
            return Err(MetricError::InvalidEdge {
                i,
                j,
                reason: format!("vertex out of range 0..{n}"),
            });
        }
        if i == j {
            return Err(MetricError::InvalidEdge {
                i,
                j,
                reason: "self-loop".into(),
            });
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(MetricError::InvalidEdge {
                i,
                j,
                reason: format!("weight {w} must be positive"),
            });
        }
        if w < dist[i * n + j] {
            dist[i * n + j] = w;
            dist[j * n + i] = w;
        }
    }
    shortest_path_closure(&mut dist, n);
    if let Some(bad) = (0..n).find(|&v| !dist[v].is_finite()) {
        return Err(MetricError::DisconnectedGraph(bad));
    }
    Ok(FiniteMetricSpace::trusted(default_labels(n), dist, n))
}

/// Arc-length metric on `m` equally spaced samples of a circle with the
/// given circumference: `d(i,j) = (L/m) * min(|i-j|, m-|i-j|)`.
pub fn sample_circle(m: usize, circumference: f64) -> Result<FiniteMetricSpace, MetricError> {
    if m < 2 {
        return Err(MetricError::BadParameter(format!(
            "need m >= 2 circle samples, got {m}"
        )));
    }
    if !(circumference > 0.0) || !circumference.is_finite() {
        return Err(MetricError::BadParameter(format!(
            "circumference must be positive, got {circumference}"
        )));
    }
    let step = circumference / m as f64;
    let mut dist = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let gap = i.abs_diff(j);
            dist[i * m + j] = step * gap.min(m - gap) as f64;
        }
    }
    Ok(FiniteMetricSpace::trusted(default_labels(m), dist, m))
}

/// Metric induced on a point cloud by the chosen norm. Duplicate points are
/// rejected; all points must share a dimension.
pub fn point_cloud_metric(
    points: &[Vec<f64>],
    norm: Norm,
) -> Result<FiniteMetricSpace, MetricError> {
    let n = points.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let dim = points[0].len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(MetricError::DimensionMismatch {
                index,
                got: p.len(),
                expected: dim,
            });
        }
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = norm.distance(&points[i], &points[j]);
            if d == 0.0 {
                return Err(MetricError::DuplicatePoints { i, j });
            }
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(FiniteMetricSpace::trusted(default_labels(n), dist, n))
}

/// Seeded random metric: symmetric uniform entries in `[0.1, 1.1)` repaired
/// into a metric by shortest-path closure. Deterministic per `(n, seed)`.
pub fn random_metric(n: usize, seed: u64) -> Result<FiniteMetricSpace, MetricError> {
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w: f64 = rng.gen_range(0.1..1.1);
            dist[i * n + j] = w;
            dist[j * n + i] = w;
        }
    }
    shortest_path_closure(&mut dist, n);
    Ok(FiniteMetricSpace::trusted(default_labels(n), dist, n))
}
