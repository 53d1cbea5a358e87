//! End-to-end analysis: thresholds, exact values, bounds, budget, verdict.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;
use std::cmp::Ordering;

use crate::channel::ErrorPatternDist;
use crate::error::{Error, Result};
use crate::fca::bounds::{entropy_bound, kl_chernoff_bound};
use crate::fca::recovery::{check_recovery_condition, RecoveryVerdict};
use crate::fca::security::{security_condition, BudgetGroup};
use crate::fca::success::{exact_success_binomial, exact_success_multinomial};
use crate::fca::thresholds::{bayes_threshold, BayesThresholds};
use crate::hp::HpCtx;

#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    /// Error-pattern width in bits (1 + log2 M).
    pub width: u32,
    /// Slot count N of the attack horizon.
    pub n_slots: BigUint,
    /// log2 of the tolerated success probability.
    pub log2_epsilon: f64,
    /// Acceptance fraction per nonzero pattern (length 2^width - 1), each
    /// strictly inside (0, 1/2). None means the uniform 1/2^width.
    pub acceptance: Option<Vec<f64>>,
    /// log2 prior odds for the informational cap table.
    pub prior_log2_ratio: f64,
    /// Fractional bits for all solver arithmetic.
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Some pattern is deterministic; the keystream falls out slot by slot.
    ClassicallyBroken,
    /// The margin is negative: no distribution meets the budget.
    Infeasible,
    /// The supplied distribution misses the per-pattern requirement or the
    /// error-free ceiling.
    Violated,
    /// The supplied distribution meets every requirement at this budget.
    Satisfied,
    /// No distribution supplied; the budget itself is consistent.
    Satisfiable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEntry {
    pub pattern: u32,
    pub p_true: f64,
    pub p_wrong: f64,
    /// Count cap (clamped into [0, N]); None when the pair is degenerate.
    pub cap: Option<String>,
    pub accept_below: Option<bool>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub n0_floor: String,
    pub consistent: bool,
    pub per_pattern: Vec<ThresholdEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeFlags {
    pub per_sequence_term_valid: Option<bool>,
    pub count_bound_valid: Option<bool>,
    pub entropy_is_upper_bound: Option<bool>,
    pub kl_applicable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaEntry {
    pub group_size: u64,
    pub acceptance: String,
    pub delta: String,
    pub residual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportConfig {
    pub width: u32,
    pub n_slots: String,
    pub log2_epsilon: f64,
    pub acceptance_mode: String,
    pub prior_log2_ratio: f64,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub config: ReportConfig,
    pub recovery: Option<RecoveryVerdict>,
    pub thresholds: Option<ThresholdReport>,
    /// log2 of the joint success probability, when exhaustively computable
    /// and nonzero.
    pub log2_exact: Option<f64>,
    /// log2 of the aggregated count-only relaxation (any-error tail).
    pub log2_exact_binomial: Option<f64>,
    pub log2_entropy_bound: Option<f64>,
    pub log2_kl_bound: Option<f64>,
    pub regime_flags: RegimeFlags,
    pub delta_per_pattern: Vec<DeltaEntry>,
    pub sum_delta: String,
    pub n0_over_n: String,
    pub margin: String,
    pub verdict: Verdict,
}

impl AnalysisReport {
    /// Flat per-group table of the budget solution.
    pub fn per_pattern_csv(&self) -> String {
        let mut out = String::from("group_size,acceptance,delta,residual\n");
        for d in &self.delta_per_pattern {
            out.push_str(&format!(
                "{},{},{},{}\n",
                d.group_size, d.acceptance, d.delta, d.residual
            ));
        }
        out
    }
}

fn acceptance_vector(config: &AnalyzeConfig) -> Result<Vec<f64>> {
    let count = (1usize << config.width) - 1;
    match &config.acceptance {
        None => Ok(vec![1.0 / (1u64 << config.width) as f64; count]),
        Some(v) => {
            if v.len() != count {
                return Err(Error::LengthMismatch { expected: count, got: v.len() });
            }
            for &a in v {
                if !(a > 0.0 && a < 0.5) {
                    return Err(Error::Domain(format!(
                        "acceptance fraction {a} outside (0, 1/2)"
                    )));
                }
            }
            Ok(v.clone())
        }
    }
}

/// Run the full analysis. `dist` may be omitted to evaluate a budget
/// without reference to any channel (the design-requirements view).
pub fn analyze(dist: Option<&ErrorPatternDist>, config: &AnalyzeConfig) -> Result<AnalysisReport> {
    if config.width == 0 || config.width > 24 {
        return Err(Error::Domain(format!("pattern width {} outside 1..=24", config.width)));
    }
    if let Some(d) = dist {
        if d.width() != config.width {
            return Err(Error::LengthMismatch {
                expected: 1 << config.width,
                got: d.len(),
            });
        }
    }
    if config.prior_log2_ratio.abs() > 2000.0 {
        return Err(Error::Domain("prior log2 ratio beyond +-2000".into()));
    }
    let ctx = HpCtx::new(config.precision_bits);
    let acceptance = acceptance_vector(config)?;

    // Group equal fractions so each distinct value is solved once.
    let mut groups: Vec<BudgetGroup> = Vec::new();
    let mut keys: Vec<u64> = Vec::new();
    let mut group_of: Vec<usize> = Vec::with_capacity(acceptance.len());
    let mut sum_accept = ctx.zero();
    for &a in &acceptance {
        let a_hp = ctx.from_f64(a)?;
        sum_accept = sum_accept.add(&a_hp);
        let key = a.to_bits();
        match keys.iter().position(|&k| k == key) {
            Some(i) => {
                groups[i].pattern_count += 1;
                group_of.push(i);
            }
            None => {
                keys.push(key);
                groups.push(BudgetGroup { pattern_count: 1, acceptance: a_hp });
                group_of.push(groups.len() - 1);
            }
        }
    }
    // A group whose entropy target exceeds one bit has no attainable
    // excess at all; that is an infeasible budget, not a caller error.
    let budget = match security_condition(&ctx, config.log2_epsilon, &config.n_slots, &groups) {
        Ok(b) => Some(b),
        Err(Error::InfeasibleDelta { .. }) => None,
        Err(e) => return Err(e),
    };

    let recovery = dist.map(check_recovery_condition);

    // Informational cap table against a flat wrong-key alternative.
    let p_wrong = 1.0 / (1u64 << config.width) as f64;
    let prior_r = (config.prior_log2_ratio / 2.0).exp2();
    let prior_rp = (-config.prior_log2_ratio / 2.0).exp2();
    let mut thresholds_table: Option<BayesThresholds> = None;
    // The cap table expresses acceptance as upper bounds on counts, which
    // only fits pairs where small counts favor the candidate. A pair in
    // the other direction leaves its slot unconstrained and disables the
    // exact joint computation.
    let mut caps_are_upper = true;
    let thresholds = match dist {
        None => None,
        Some(d) => {
            let mut entries = Vec::new();
            let mut raw = Vec::new();
            for e in 1..(1u32 << config.width) {
                let p_true = d.prob(e);
                let degenerate = !(p_true > 0.0 && p_true < 1.0) || p_true == p_wrong;
                if degenerate {
                    // No leverage from this pair; an unconstrained count.
                    raw.push(BigInt::from(config.n_slots.clone()));
                    entries.push(ThresholdEntry {
                        pattern: e,
                        p_true,
                        p_wrong,
                        cap: None,
                        accept_below: None,
                        degenerate: true,
                    });
                } else {
                    let t = bayes_threshold(&ctx, p_true, p_wrong, prior_r, prior_rp, &config.n_slots)?;
                    let (cap, shown) = if t.accept_below {
                        // Largest count still strictly on the candidate side.
                        let c: BigInt = t.crossing - 1;
                        let s = c.to_string();
                        (c, s)
                    } else {
                        caps_are_upper = false;
                        (BigInt::from(config.n_slots.clone()), t.crossing.to_string())
                    };
                    raw.push(cap);
                    entries.push(ThresholdEntry {
                        pattern: e,
                        p_true,
                        p_wrong,
                        cap: Some(shown),
                        accept_below: Some(t.accept_below),
                        degenerate: false,
                    });
                }
            }
            let table = BayesThresholds::from_raw(config.n_slots.clone(), config.width, raw)?;
            let report = ThresholdReport {
                n0_floor: table.n0_floor().to_string(),
                consistent: table.is_consistent(),
                per_pattern: entries,
            };
            thresholds_table = Some(table);
            Some(report)
        }
    };

    // Exact values and bounds, where the scale allows them.
    let mut log2_exact = None;
    let mut log2_exact_binomial = None;
    let mut log2_entropy_bound = None;
    let mut log2_kl_bound = None;
    let mut flags = RegimeFlags {
        per_sequence_term_valid: None,
        count_bound_valid: None,
        entropy_is_upper_bound: None,
        kl_applicable: false,
    };
    if let (Some(d), Some(table)) = (dist, thresholds_table.as_ref()) {
        if let Some(n_small) = config.n_slots.to_u64() {
            if n_small <= crate::fca::success::EXHAUSTIVE_N_LIMIT && caps_are_upper {
                let v = exact_success_multinomial(d, table, n_small)?;
                if v > 0.0 {
                    log2_exact = Some(v.log2());
                }
            }
        }
        // Aggregated distributions sum to 1 only within fp tolerance, so an
        // essentially error-free channel can leave 1 - p(0) a hair negative.
        let p_agg = (1.0 - d.prob(0)).clamp(0.0, 1.0);
        let n_f = config.n_slots.to_f64().unwrap_or(f64::INFINITY);
        let a_agg = {
            let floor_f = table
                .n0_floor()
                .to_f64()
                .unwrap_or(0.0);
            (1.0 - floor_f / n_f).clamp(0.0, 1.0)
        };
        if let Some(n128) = config.n_slots.to_u128() {
            let eb = entropy_bound(a_agg, p_agg, n128)?;
            log2_entropy_bound = Some(eb.log2_bound);
            flags.per_sequence_term_valid = Some(eb.per_sequence_term_valid);
            flags.count_bound_valid = Some(eb.count_bound_valid);
            flags.entropy_is_upper_bound = Some(eb.is_upper_bound);
            if a_agg > 0.0 && a_agg < p_agg && p_agg < 1.0 {
                log2_kl_bound = Some(kl_chernoff_bound(a_agg, p_agg, n128)?);
                flags.kl_applicable = true;
            }
            if let Some(n_small) = config.n_slots.to_u64() {
                if n_small <= 1_000_000 {
                    let cap = (n_f * a_agg + 1e-9).floor() as u64;
                    let v = exact_success_binomial(p_agg, cap.min(n_small), n_small)?;
                    if v > 0.0 {
                        log2_exact_binomial = Some(v.log2());
                    }
                }
            }
        }
    }

    // Verdict, in order of severity.
    let broken = recovery.as_ref().is_some_and(|r| r.total_break);
    let verdict = if broken {
        Verdict::ClassicallyBroken
    } else {
        match &budget {
            None => Verdict::Infeasible,
            Some(b) if !b.feasible => Verdict::Infeasible,
            Some(b) => {
                if let Some(d) = dist {
                    let mut ok = true;
                    for e in 1..(1u32 << config.width) {
                        let g = group_of[(e - 1) as usize];
                        let need = groups[g].acceptance.add(&b.delta[g].delta);
                        if ctx.from_f64(d.prob(e))?.cmp(&need) == Ordering::Less {
                            ok = false;
                            break;
                        }
                    }
                    if ok && ctx.from_f64(d.prob(0))?.cmp(&b.margin) == Ordering::Greater {
                        ok = false;
                    }
                    if ok {
                        Verdict::Satisfied
                    } else {
                        Verdict::Violated
                    }
                } else {
                    Verdict::Satisfiable
                }
            }
        }
    };

    let delta_per_pattern = match &budget {
        None => Vec::new(),
        Some(b) => b
            .groups
            .iter()
            .zip(&b.delta)
            .map(|(g, s)| DeltaEntry {
                group_size: g.pattern_count,
                acceptance: g.acceptance.to_scientific_string(21),
                delta: s.delta.to_scientific_string(25),
                residual: s.residual.to_scientific_string(6),
            })
            .collect(),
    };
    let n0_over_n = ctx.one().sub(&sum_accept);
    let (sum_delta_s, margin_s) = match &budget {
        None => ("inf".to_string(), "-inf".to_string()),
        Some(b) => (
            b.sum_delta.to_scientific_string(25),
            b.margin.to_scientific_string(25),
        ),
    };

    Ok(AnalysisReport {
        config: ReportConfig {
            width: config.width,
            n_slots: config.n_slots.to_string(),
            log2_epsilon: config.log2_epsilon,
            acceptance_mode: if config.acceptance.is_some() {
                "explicit".into()
            } else {
                "uniform".into()
            },
            prior_log2_ratio: config.prior_log2_ratio,
            precision_bits: config.precision_bits,
        },
        recovery,
        thresholds,
        log2_exact,
        log2_exact_binomial,
        log2_entropy_bound,
        log2_kl_bound,
        regime_flags: flags,
        delta_per_pattern,
        sum_delta: sum_delta_s,
        n0_over_n: n0_over_n.to_scientific_string(25),
        margin: margin_s,
        verdict,
    })
}
