//! Exact attack success probabilities at desk scale.
//!
//! The acceptance region is a product of per-pattern count caps. For a
//! single pattern that is a binomial lower tail; for the joint region it is
//! a sum of multinomial terms over all compositions that respect every cap.
//! Both come in a fast log-domain flavor and an exact-rational flavor used
//! as the oracle in property tests.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::channel::ErrorPatternDist;
use crate::error::{Error, Result};
use crate::fca::thresholds::BayesThresholds;

/// Largest N the joint composition enumeration accepts.
pub const EXHAUSTIVE_N_LIMIT: u64 = 30;

const BINOMIAL_N_LIMIT: u64 = 20_000_000;
const RATIONAL_N_LIMIT: u64 = 64;
const COMPOSITION_TERM_LIMIT: u64 = 3_000_000;

fn check_unit(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability { value: p });
    }
    Ok(())
}

/// P(X <= ne) for X ~ Binomial(n, p), evaluated in log-domain with
/// compensated summation.
pub fn exact_success_binomial(p: f64, ne: u64, n: u64) -> Result<f64> {
    check_unit(p)?;
    if ne > n {
        return Err(Error::Domain(format!("cap {ne} exceeds slot count {n}")));
    }
    if n > BINOMIAL_N_LIMIT {
        return Err(Error::Domain(format!("n = {n} beyond the summation limit {BINOMIAL_N_LIMIT}")));
    }
    if p == 0.0 || ne == n {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let lp = p.ln();
    let lq = (-p).ln_1p();
    let lg_n = libm::lgamma((n + 1) as f64);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 0..=ne {
        let lt = lg_n - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
            + k as f64 * lp
            + (n - k) as f64 * lq;
        let term = lt.exp();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Exact-rational version of the binomial tail, for small n. The f64
/// probability is taken at its exact dyadic value.
pub fn exact_success_binomial_rational(p: f64, ne: u64, n: u64) -> Result<BigRational> {
    check_unit(p)?;
    if ne > n {
        return Err(Error::Domain(format!("cap {ne} exceeds slot count {n}")));
    }
    if n > RATIONAL_N_LIMIT {
        return Err(Error::ExhaustiveLimit { n, limit: RATIONAL_N_LIMIT });
    }
    let pr = BigRational::from_float(p).unwrap();
    let qr = BigRational::one() - pr.clone();
    let mut coef = BigUint::one();
    let mut sum = BigRational::zero();
    for k in 0..=ne {
        if k > 0 {
            coef = coef * BigUint::from(n - k + 1) / BigUint::from(k);
        }
        let mut term = BigRational::from_integer(coef.clone().into());
        for _ in 0..k {
            term *= pr.clone();
        }
        for _ in 0..(n - k) {
            term *= qr.clone();
        }
        sum += term;
    }
    Ok(sum)
}

fn composition_sum(
    probs: &[BigRational],
    caps: &[u64],
    pattern: usize,
    remaining: u64,
    coef: BigRational,
    terms: &mut u64,
) -> Result<BigRational> {
    if pattern == probs.len() {
        // Whatever is left is the error-free count.
        *terms += 1;
        if *terms > COMPOSITION_TERM_LIMIT {
            return Err(Error::Domain(
                "composition enumeration too large; reduce N or the pattern width".into(),
            ));
        }
        if probs[0].is_zero() && remaining > 0 {
            return Ok(BigRational::zero());
        }
        let mut term = coef;
        for _ in 0..remaining {
            term *= probs[0].clone();
        }
        return Ok(term);
    }
    let p = &probs[pattern];
    let mut total = BigRational::zero();
    let top = caps[pattern - 1].min(remaining);
    let mut choose = BigUint::one();
    for k in 0..=top {
        if k > 0 {
            choose = choose * BigUint::from(remaining - k + 1) / BigUint::from(k);
        }
        if k > 0 && p.is_zero() {
            break;
        }
        let mut c = coef.clone() * BigRational::from_integer(choose.clone().into());
        for _ in 0..k {
            c *= p.clone();
        }
        total += composition_sum(probs, caps, pattern + 1, remaining - k, c, terms)?;
    }
    Ok(total)
}

/// Joint success probability: every nonzero pattern count within its cap.
/// `probs[0]` is the error-free probability, `caps[i]` caps pattern `i + 1`.
/// Exact over the dyadic values of the inputs.
pub fn exact_success_multinomial_rational(
    probs: &[f64],
    caps: &[u64],
    n: u64,
) -> Result<BigRational> {
    if probs.is_empty() || probs.len() != caps.len() + 1 {
        return Err(Error::LengthMismatch { expected: caps.len() + 1, got: probs.len() });
    }
    if n > EXHAUSTIVE_N_LIMIT {
        return Err(Error::ExhaustiveLimit { n, limit: EXHAUSTIVE_N_LIMIT });
    }
    let mut rat = Vec::with_capacity(probs.len());
    let mut sum = 0.0;
    for &p in probs {
        check_unit(p)?;
        sum += p;
        rat.push(BigRational::from_float(p).unwrap());
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
    }
    let mut terms = 0u64;
    composition_sum(&rat, caps, 1, n, BigRational::one(), &mut terms)
}

/// [`exact_success_multinomial_rational`] wired to a distribution and its
/// cap table, returned as f64.
pub fn exact_success_multinomial(
    dist: &ErrorPatternDist,
    thresholds: &BayesThresholds,
    n: u64,
) -> Result<f64> {
    if n > EXHAUSTIVE_N_LIMIT {
        return Err(Error::ExhaustiveLimit { n, limit: EXHAUSTIVE_N_LIMIT });
    }
    if dist.width() != thresholds.width() {
        return Err(Error::LengthMismatch {
            expected: 1 << thresholds.width(),
            got: dist.len(),
        });
    }
    if thresholds.n() != &BigUint::from(n) {
        return Err(Error::Domain(format!(
            "threshold table was built for N = {}, not {n}",
            thresholds.n()
        )));
    }
    let caps: Vec<u64> = thresholds
        .caps()
        .iter()
        .map(|c| c.to_u64().map_or(n, |v| v.min(n)))
        .collect();
    let r = exact_success_multinomial_rational(dist.probs(), &caps, n)?;
    Ok(ratio_to_f64(&r))
}

/// Conversion that survives astronomically small or large ratios: the
/// quotient is taken with about 64 significant bits and the scale is
/// restored through the exponent.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let shift = 64i64 + d.bits() as i64 - n.bits() as i64;
    let q: BigUint = if shift >= 0 {
        (n << (shift as u64)) / d
    } else {
        n / (d << ((-shift) as u64))
    };
    let v = libm::ldexp(
        q.to_f64().unwrap_or(f64::INFINITY),
        (-shift).clamp(-2098, 2098) as i32,
    );
    if neg {
        -v
    } else {
        v
    }
}
