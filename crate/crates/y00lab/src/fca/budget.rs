//! The per-pattern excess solver.
//!
//! Given a success budget epsilon over N slots, a pattern accepted at
//! fraction a must actually occur with probability at least a + delta,
//! where delta is the smallest value with
//!
//!   H2(a) + (-log2 epsilon)/N <= H2(a + delta).
//!
//! At cryptographic scale the budget term is far below f64 resolution
//! (order 1e-36 against entropies of order 1e-3), so the whole search runs
//! in fixed-point big-integer arithmetic; doubles are only accepted at the
//! boundary of the API.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hp::{Hp, HpCtx, MIN_SOLVER_PRECISION_BITS};

const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct DeltaSolution {
    pub delta: Hp,
    /// H2(a + delta) - H2(a) - budget; guaranteed in [0, REL_TOL * budget].
    pub residual: Hp,
    pub iterations: u32,
}

/// Minimal probability excess for acceptance fraction `a` under success
/// budget `epsilon = 2^log2_epsilon` over `n` slots. Monotone bisection on
/// the increasing branch of H2.
pub fn solve_delta(ctx: &HpCtx, log2_epsilon: f64, n: &BigUint, a: &Hp) -> Result<DeltaSolution> {
    if ctx.precision_bits() < MIN_SOLVER_PRECISION_BITS {
        return Err(Error::PrecisionTooLow {
            bits: ctx.precision_bits(),
            required: MIN_SOLVER_PRECISION_BITS,
        });
    }
    if !(log2_epsilon <= 0.0) || log2_epsilon.is_nan() {
        return Err(Error::Domain(format!(
            "log2 of the budget must be <= 0, got {log2_epsilon}"
        )));
    }
    if n.is_zero() {
        return Err(Error::Domain("slot count must be positive".into()));
    }
    let half = ctx.one().half();
    if a.is_negative() || a.is_zero() || a.cmp(&half) != std::cmp::Ordering::Less {
        return Err(Error::Domain(format!(
            "acceptance fraction {} must lie in (0, 1/2)",
            a.to_f64()
        )));
    }
    if log2_epsilon == 0.0 {
        return Ok(DeltaSolution { delta: ctx.zero(), residual: ctx.zero(), iterations: 0 });
    }
    let n_hp = ctx.from_ratio(&BigInt::from(n.clone()), &BigInt::from(1))?;
    let budget = ctx.from_f64(-log2_epsilon)?.div(&n_hp)?;
    let h2a = ctx.h2(a)?;
    let target = h2a.add(&budget);
    if target.cmp(&ctx.one()) == std::cmp::Ordering::Greater {
        return Err(Error::InfeasibleDelta { target: target.to_f64() });
    }
    let tol = budget.mul(&ctx.from_f64(REL_TOL)?);
    let mut lo = ctx.zero();
    let mut hi = half.sub(a);
    // g(hi) = 1 - target >= 0 holds at the top of the bracket, so the
    // invariant g(lo) < 0 <= g(hi) is established from the start.
    let mut g_hi = ctx.one().sub(&target);
    let max_iter = ctx.precision_bits() + 80;
    for it in 0..max_iter {
        if g_hi.cmp(&tol) == std::cmp::Ordering::Less {
            return Ok(DeltaSolution { delta: hi, residual: g_hi, iterations: it });
        }
        let mid = lo.add(&hi).half();
        let g_mid = ctx.h2(&a.add(&mid))?.sub(&target);
        if g_mid.is_negative() {
            lo = mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Err(Error::NoConvergence { iterations: max_iter })
}
