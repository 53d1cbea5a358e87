//! Tail bounds on the acceptance probability, with regime bookkeeping.
//!
//! The entropy-difference bound N*(H2(a) - H2(p)) is assembled from two
//! component inequalities: a per-sequence term bound (each length-N record
//! with at most aN flagged slots has probability at most 2^{-N H2(p)}) and a
//! counting bound (at most 2^{N H2(a)} such records). Neither component is
//! universally valid, and in the small-tail regime a < p < 1/2 the combined
//! expression is typically NOT an upper bound at all. Rather than silently
//! "fixing" it, the validity of each component at the given (a, p, N) is
//! reported alongside the value, and an information-inequality bound
//! -N*D(a||p), valid whenever 0 < a < p < 1, serves as the trustworthy
//! cross-check.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fca::binary_entropy;
use crate::hp::{HpCtx, DEFAULT_PRECISION_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyBoundReport {
    /// N * (H2(a) - H2(p)), in log2.
    pub log2_bound: f64,
    /// Whether every sequence in the acceptance region individually obeys
    /// the 2^{-N H2(p)} term bound. Fails for p < 1/2 unless p = 0, since
    /// the region contains records with fewer than Np flagged slots.
    pub per_sequence_term_valid: bool,
    /// Whether the 2^{N H2(a)} region-size bound holds. Checked exactly by
    /// big-integer summation for N <= 1000, analytically (a <= 1/2) beyond.
    pub count_bound_valid: bool,
    /// Both components hold, so the combined value is a genuine upper bound.
    pub is_upper_bound: bool,
}

/// Entropy-difference bound for acceptance fraction `a`, per-slot
/// probability `p`, over `n` slots.
pub fn entropy_bound(a: f64, p: f64, n: u128) -> Result<EntropyBoundReport> {
    let h2a = binary_entropy(a)?;
    let h2p = binary_entropy(p)?;
    let nf = n as f64;
    let cap = (a * nf + 1e-9).floor();
    let per_sequence_term_valid = if p == 0.5 || p == 0.0 {
        true
    } else if p < 0.5 {
        false
    } else {
        cap <= nf * p
    };
    let count_bound_valid = if n <= 1000 {
        count_bound_holds_exact(n as u64, a)?
    } else {
        a <= 0.5
    };
    Ok(EntropyBoundReport {
        log2_bound: nf * (h2a - h2p),
        per_sequence_term_valid,
        count_bound_valid,
        is_upper_bound: per_sequence_term_valid && count_bound_valid,
    })
}

/// Exact big-integer check of the counting bound:
/// sum_{k=0}^{floor(a n)} C(n, k) <= 2^{n H2(a)}.
pub fn count_bound_holds_exact(n: u64, a: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&a) || a.is_nan() {
        return Err(Error::Domain(format!("acceptance fraction {a} outside [0, 1]")));
    }
    if n > 1000 {
        return Err(Error::ExhaustiveLimit { n, limit: 1000 });
    }
    if n == 0 {
        return Ok(true);
    }
    let k = (a * n as f64 + 1e-9).floor() as u64;
    let mut coef = BigUint::one();
    let mut sum = BigUint::one();
    for i in 1..=k {
        coef = coef * BigUint::from(n - i + 1) / BigUint::from(i);
        sum += coef.clone();
    }
    let ctx = HpCtx::new(DEFAULT_PRECISION_BITS);
    let lhs = ctx.log2(&ctx.from_uint_ratio(&sum, &BigUint::one())?)?;
    let rhs = ctx.h2(&ctx.from_f64(a)?)?.mul(&ctx.from_int(n as i64));
    Ok(lhs.cmp(&rhs) != Ordering::Greater)
}

/// Information-inequality tail bound: P(X <= a n) <= 2^{-n D(a||p)} for
/// X ~ Binomial(n, p) with 0 < a < p < 1. Returns the bound in log2.
pub fn kl_chernoff_bound(a: f64, p: f64, n: u128) -> Result<f64> {
    if !(a > 0.0 && a < p && p < 1.0) {
        return Err(Error::Domain(format!(
            "divergence bound needs 0 < a < p < 1, got a = {a}, p = {p}"
        )));
    }
    let d = a * (a / p).log2() + (1.0 - a) * ((1.0 - a) / (1.0 - p)).log2();
    Ok(-(n as f64) * d)
}
