//! Correlation-attack analysis: count thresholds, exact success
//! probabilities, tail bounds, and the security-margin solver.
//!
//! The attacker model: a known-plaintext eavesdropper bins her per-slot
//! readings into error patterns, keeps per-pattern counts over N slots, and
//! accepts a key hypothesis only when every count stays inside a Bayes-derived
//! cap. The analysis side asks the converse question: how much per-pattern
//! probability excess over the acceptance fractions forces her success below
//! a target, and what that demands of the mapping.

mod analyze;
mod bounds;
mod budget;
mod recovery;
mod security;
mod success;
mod thresholds;

pub use analyze::{analyze, AnalyzeConfig, AnalysisReport, ThresholdEntry, Verdict};
pub use bounds::{count_bound_holds_exact, entropy_bound, kl_chernoff_bound, EntropyBoundReport};
pub use budget::{solve_delta, DeltaSolution};
pub use recovery::{check_recovery_condition, PatternCondition, RecoveryVerdict};
pub use security::{security_condition, BudgetGroup, SecurityBudget};
pub use success::{
    exact_success_binomial, exact_success_binomial_rational, exact_success_multinomial,
    exact_success_multinomial_rational, ratio_to_f64, EXHAUSTIVE_N_LIMIT,
};
pub use thresholds::{bayes_threshold, threshold_floor_n0, BayesThresholds, PairThreshold};

use crate::error::{Error, Result};

/// Shannon binary entropy in bits, with 0*log2(0) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Domain(format!("binary entropy needs p in [0, 1], got {p}")));
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropy_reference_points() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            binary_entropy(0.25).unwrap(),
            0.8112781244591328,
            epsilon = 1e-15
        );
        // Symmetric around 1/2.
        assert_eq!(binary_entropy(0.3).unwrap(), binary_entropy(0.7).unwrap());
        // A 1-in-4096 event carries little entropy.
        assert_abs_diff_eq!(
            binary_entropy(1.0 / 4096.0).unwrap(),
            0.0032818649698048932,
            epsilon = 1e-15
        );
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }
}
