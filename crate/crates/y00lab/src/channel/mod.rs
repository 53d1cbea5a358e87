//! Quantum channel model: coherent-state overlaps, heterodyne measurement,
//! confusion matrices, and the induced error-pattern statistics.

mod confusion;
mod error_dist;

pub use confusion::{
    confusion_matrix, confusion_matrix_monte_carlo, heterodyne_sample, ml_decide, ConfusionMatrix,
    NoiseModel,
};
pub use error_dist::{
    aggregate_error_dist, error_pattern_dist, AggregatedDist, ConditioningTag, ErrorPatternDist,
};

use num_complex::Complex64;

/// Coherent-state inner product `<a|b> = exp(-(|a|^2 + |b|^2)/2 + a* b)`.
pub fn overlap(a: Complex64, b: Complex64) -> Complex64 {
    (Complex64::new(-0.5 * (a.norm_sqr() + b.norm_sqr()), 0.0) + a.conj() * b).exp()
}
