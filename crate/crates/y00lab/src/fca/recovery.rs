//! Structural break checks on an error-pattern distribution.
//!
//! Two questions: does any pattern occur with certainty (a deterministic
//! pattern, the all-ones one included, hands the attacker the keystream
//! outright), and per pattern, what acceptance fraction makes the entropy
//! comparison H2(a) >= H2(p) hold. The comparison is always satisfiable by
//! picking a equal to p, so the interesting part is how much room past that
//! equality the distribution leaves.

use serde::Serialize;

use crate::channel::ErrorPatternDist;

const CERTAIN: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternCondition {
    pub pattern: u32,
    pub probability: f64,
    /// Smallest acceptance fraction with H2(a) >= H2(p): min(p, 1-p).
    pub minimal_acceptance: f64,
    /// Always true; the witness is a = p.
    pub satisfiable: bool,
    /// Whether some a satisfies the comparison strictly, i.e. H2(p) < 1.
    pub strict_excess_possible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryVerdict {
    /// Some pattern is (numerically) certain: the keystream is recoverable
    /// slot by slot, no counting statistics needed.
    pub total_break: bool,
    pub break_patterns: Vec<u32>,
    pub per_pattern: Vec<PatternCondition>,
    /// p(0) minus the largest nonzero-pattern probability. Zero means no
    /// reading is distinguishable from the error-free one by frequency.
    pub discrimination_slack: f64,
    /// The slack is (numerically) zero: the entropy comparison can only be
    /// met with equality everywhere, leaving the attacker nothing.
    pub vacuous: bool,
}

pub fn check_recovery_condition(dist: &ErrorPatternDist) -> RecoveryVerdict {
    let probs = dist.probs();
    let break_patterns: Vec<u32> = probs
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p >= CERTAIN)
        .map(|(e, _)| e as u32)
        .collect();
    let per_pattern = probs
        .iter()
        .enumerate()
        .map(|(e, &p)| PatternCondition {
            pattern: e as u32,
            probability: p,
            minimal_acceptance: p.min(1.0 - p),
            satisfiable: true,
            strict_excess_possible: (p - 0.5).abs() > 1e-15,
        })
        .collect();
    let worst_nonzero = probs[1..].iter().cloned().fold(0.0, f64::max);
    let slack = probs[0] - worst_nonzero;
    RecoveryVerdict {
        total_break: !break_patterns.is_empty(),
        break_patterns,
        per_pattern,
        discrimination_slack: slack,
        vacuous: slack.abs() < 1e-12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn noiseless_distribution_is_a_total_break() {
        let d = ErrorPatternDist::from_probs(2, vec![1.0, 0.0, 0.0, 0.0], None).unwrap();
        let v = check_recovery_condition(&d);
        assert!(v.total_break);
        assert_eq!(v.break_patterns, vec![0]);
    }

    #[test]
    fn certain_inverted_pattern_is_a_total_break() {
        // All bits reliably wrong is as good as all bits right.
        let d = ErrorPatternDist::from_probs(2, vec![0.0, 0.0, 0.0, 1.0], None).unwrap();
        let v = check_recovery_condition(&d);
        assert!(v.total_break);
        assert_eq!(v.break_patterns, vec![3]);
    }

    #[test]
    fn uniform_distribution_is_vacuous() {
        let d = ErrorPatternDist::uniform(3);
        let v = check_recovery_condition(&d);
        assert!(!v.total_break);
        assert!(v.vacuous);
        assert_abs_diff_eq!(v.discrimination_slack, 0.0, epsilon = 1e-15);
        for c in &v.per_pattern {
            assert!(c.satisfiable);
            assert!(c.strict_excess_possible);
            assert_abs_diff_eq!(c.minimal_acceptance, 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn skewed_distribution_leaves_slack() {
        let d = ErrorPatternDist::from_probs(2, vec![0.55, 0.25, 0.15, 0.05], None).unwrap();
        let v = check_recovery_condition(&d);
        assert!(!v.total_break);
        assert!(!v.vacuous);
        assert_abs_diff_eq!(v.discrimination_slack, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(v.per_pattern[1].minimal_acceptance, 0.25, epsilon = 1e-15);
        // A pattern at exactly 1/2 admits no strict excess.
        let d = ErrorPatternDist::from_probs(1, vec![0.5, 0.5], None).unwrap();
        let v = check_recovery_condition(&d);
        assert!(!v.per_pattern[0].strict_excess_possible);
    }
}
