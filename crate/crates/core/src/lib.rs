//! Quantitative ball-intersection geometry for finite metric spaces.
//!
//! Topological data analysis asks *whether* balls around sample points
//! intersect; this crate measures *how much* they must be enlarged to do so.
//! It provides:
//!
//! - [`space`]: validated finite metric spaces plus generators (graphs,
//!   circles, point clouds, seeded random metrics) and CSV/JSON loaders.
//! - [`scaling`]: Gromov products, the pair/triple scaling factor rho, the
//!   multiplicative lambda and additive delta ball-enlargement scales, and
//!   Helly-type intersection defects over finite witness sets.
//! - [`comparison`]: Euclidean comparison triangles, exact disk-intersection
//!   feasibility, the planar weighted-circumcenter min-max, and the
//!   comparison-based non-positive-curvature verdict.
//! - [`tightspan`]: admissible/extremal radius functions, equality graphs,
//!   and enumeration of the compact faces of the tight span of small spaces.
//! - [`complex`]: Cech and Vietoris-Rips complexes over landmark/witness
//!   pairs, filtrations, Z/2 homology and persistence, and the VR/Cech gap.

pub mod comparison;
pub mod complex;
pub mod io;
pub mod scaling;
pub mod space;
pub mod tightspan;

pub use space::{FiniteMetricSpace, PointId};
