//! The mapping-design security condition.
//!
//! Summing the per-pattern requirement p(e) >= a(e) + delta(e) over all
//! nonzero patterns and using that probabilities and acceptance fractions
//! each total 1 leaves a ceiling on the error-free probability:
//!
//!   p(0) <= N(0)/N - sum_e delta(e),
//!
//! with N(0)/N = 1 - sum_e a(e). The margin on the right is what a mapping
//! designer has to work with; a negative value means no distribution
//! meets the requirement at this budget, which is a reportable outcome,
//! not a failure.

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::fca::budget::{solve_delta, DeltaSolution};
use crate::hp::{Hp, HpCtx};

/// A set of patterns sharing one acceptance fraction. Identical fractions
/// are solved once and multiplied out, which is what makes the
/// 4095-pattern uniform configuration instant.
#[derive(Debug, Clone)]
pub struct BudgetGroup {
    pub pattern_count: u64,
    pub acceptance: Hp,
}

#[derive(Debug, Clone)]
pub struct SecurityBudget {
    pub log2_epsilon: f64,
    pub n: BigUint,
    pub groups: Vec<BudgetGroup>,
    /// One solution per group, in group order.
    pub delta: Vec<DeltaSolution>,
    pub sum_delta: Hp,
    /// 1 - sum of all acceptance fractions.
    pub n0_over_n: Hp,
    /// n0_over_n - sum_delta: the ceiling on the error-free probability.
    pub margin: Hp,
    pub feasible: bool,
}

/// Solve every group's excess and assemble the margin.
pub fn security_condition(
    ctx: &HpCtx,
    log2_epsilon: f64,
    n: &BigUint,
    groups: &[BudgetGroup],
) -> Result<SecurityBudget> {
    if groups.is_empty() {
        return Err(Error::Domain("no acceptance groups given".into()));
    }
    let mut delta = Vec::with_capacity(groups.len());
    let mut sum_delta = ctx.zero();
    let mut sum_accept = ctx.zero();
    for g in groups {
        if g.pattern_count == 0 {
            return Err(Error::Domain("empty acceptance group".into()));
        }
        let s = solve_delta(ctx, log2_epsilon, n, &g.acceptance)?;
        sum_delta = sum_delta.add(&s.delta.mul_int(g.pattern_count as i64));
        sum_accept = sum_accept.add(&g.acceptance.mul_int(g.pattern_count as i64));
        delta.push(s);
    }
    let n0_over_n = ctx.one().sub(&sum_accept);
    let margin = n0_over_n.sub(&sum_delta);
    let feasible = !margin.is_negative();
    Ok(SecurityBudget {
        log2_epsilon,
        n: n.clone(),
        groups: groups.to_vec(),
        delta,
        sum_delta,
        n0_over_n,
        margin,
        feasible,
    })
}

impl SecurityBudget {
    /// The floor N(0) as an integer count (rounded down), for reporting.
    pub fn n0_floor(&self) -> BigInt {
        let ctx = HpCtx::new(self.n0_over_n.frac_bits());
        let n_hp = ctx
            .from_ratio(&BigInt::from(self.n.clone()), &BigInt::from(1))
            .expect("integer conversion cannot fail");
        self.n0_over_n.mul(&n_hp).floor()
    }
}
