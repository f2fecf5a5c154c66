//! Shared fixtures for the benchmark harness.

use hypermetric_core::space::{random_metric, sample_circle};
use hypermetric_core::FiniteMetricSpace;

/// Seeded random metric, the standard scan substrate.
pub fn fixture_random(n: usize) -> FiniteMetricSpace {
    random_metric(n, 42).expect("n >= 1")
}

/// Arc-length circle with unit-length samples.
pub fn fixture_circle(m: usize) -> FiniteMetricSpace {
    sample_circle(m, m as f64).expect("m >= 2")
}
