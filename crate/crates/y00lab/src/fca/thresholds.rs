//! Bayes count thresholds for per-pattern acceptance.
//!
//! Comparing two hypotheses r and r' for a pattern observed n times in N
//! slots, the posterior odds cross 1 at a real-valued count
//!
//!   B = N + (N log2(p_r/p_r') + log2(prior_r/prior_r')) / A,
//!   A = log2(1/p_r - 1) - log2(1/p_r' - 1),
//!
//! and the integer threshold is the ceiling of B. The ceiling is taken in
//! high precision with a snap window so that a B that is an exact integer up
//! to rounding noise is not pushed one count too far.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::hp::{Hp, HpCtx};

/// Integer crossing count for one hypothesis pair.
#[derive(Debug, Clone)]
pub struct PairThreshold {
    /// Smallest count at or past the point where the posterior odds flip.
    pub crossing: BigInt,
    /// True when p_r < p_r': counts below the crossing favor r. Otherwise
    /// counts at or above it do.
    pub accept_below: bool,
    /// The real-valued crossing before the ceiling.
    pub exact: Hp,
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("{name} = {p} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

/// Bayes crossing count for pattern probability `p_r` under hypothesis r
/// versus `p_rp` under r', with the given priors, over `n` slots.
pub fn bayes_threshold(
    ctx: &HpCtx,
    p_r: f64,
    p_rp: f64,
    prior_r: f64,
    prior_rp: f64,
    n: &BigUint,
) -> Result<PairThreshold> {
    check_prob("p_r", p_r)?;
    check_prob("p_rp", p_rp)?;
    if p_r == p_rp {
        return Err(Error::DegeneratePair);
    }
    if !(prior_r > 0.0 && prior_r.is_finite() && prior_rp > 0.0 && prior_rp.is_finite()) {
        return Err(Error::InvalidPriors(format!(
            "priors must be positive and finite, got {prior_r} and {prior_rp}"
        )));
    }
    let one = ctx.one();
    let pr = ctx.from_f64(p_r)?;
    let prp = ctx.from_f64(p_rp)?;
    let l_pr = ctx.log2(&pr)?;
    let l_prp = ctx.log2(&prp)?;
    let l_qr = ctx.log2(&one.sub(&pr))?;
    let l_qrp = ctx.log2(&one.sub(&prp))?;
    // A = log2((1-p_r)/p_r) - log2((1-p_r')/p_r')
    let a = l_qr.sub(&l_pr).sub(&l_qrp.sub(&l_prp));
    if a.is_zero() {
        return Err(Error::DegeneratePair);
    }
    let n_hp = ctx.from_ratio(&BigInt::from(n.clone()), &BigInt::from(1))?;
    let prior_term = ctx.log2(&ctx.from_f64(prior_r)?)?.sub(&ctx.log2(&ctx.from_f64(prior_rp)?)?);
    let num = n_hp.mul(&l_pr.sub(&l_prp)).add(&prior_term);
    let b = n_hp.add(&num.div(&a)?);
    let crossing = b.ceil_snap(ctx.precision_bits() / 2);
    Ok(PairThreshold { crossing, accept_below: p_r < p_rp, exact: b })
}

/// Per-pattern count caps over N slots, plus the floor on the error-free
/// count they leave. Caps are stored for every nonzero pattern of the given
/// width; the error-free slot count is whatever the others leave behind,
/// so its floor is N minus the sum of the caps. A negative floor means the
/// cap set is inconsistent and is reported as a flag, never clipped away.
#[derive(Debug, Clone)]
pub struct BayesThresholds {
    n: BigUint,
    width: u32,
    caps: Vec<BigUint>,
    n0_floor: BigInt,
}

impl BayesThresholds {
    /// `caps[i]` is the cap for pattern `i + 1`; length must be 2^width - 1
    /// and each cap at most `n`.
    pub fn new(n: BigUint, width: u32, caps: Vec<BigUint>) -> Result<BayesThresholds> {
        if width == 0 || width > 24 {
            return Err(Error::Domain(format!("pattern width {width} outside 1..=24")));
        }
        let expect = (1usize << width) - 1;
        if caps.len() != expect {
            return Err(Error::LengthMismatch { expected: expect, got: caps.len() });
        }
        if let Some(bad) = caps.iter().find(|&c| c > &n) {
            return Err(Error::Domain(format!("cap {bad} exceeds slot count {n}")));
        }
        let total: BigUint = caps.iter().sum();
        let n0_floor = BigInt::from(n.clone()) - BigInt::from(total);
        Ok(BayesThresholds { n, width, caps, n0_floor })
    }

    /// Same, from raw crossing counts: values are clamped into [0, n] since
    /// a count cap outside that range is just "never" or "always".
    pub fn from_raw(n: BigUint, width: u32, raw: Vec<BigInt>) -> Result<BayesThresholds> {
        let n_int = BigInt::from(n.clone());
        let caps = raw
            .into_iter()
            .map(|c| {
                if c.is_negative() {
                    BigUint::zero()
                } else if c > n_int {
                    n.clone()
                } else {
                    c.to_biguint().unwrap()
                }
            })
            .collect();
        BayesThresholds::new(n, width, caps)
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn cap(&self, pattern: u32) -> Result<&BigUint> {
        if pattern == 0 || pattern >= 1 << self.width {
            return Err(Error::IndexOutOfRange { index: pattern, size: 1 << self.width });
        }
        Ok(&self.caps[pattern as usize - 1])
    }

    pub fn caps(&self) -> &[BigUint] {
        &self.caps
    }

    pub fn n0_floor(&self) -> &BigInt {
        &self.n0_floor
    }

    pub fn is_consistent(&self) -> bool {
        !self.n0_floor.is_negative()
    }
}

/// Floor on the error-free count: N minus the sum of the nonzero-pattern
/// caps. Any count assignment that respects every cap automatically leaves
/// at least this many error-free slots.
pub fn threshold_floor_n0(thresholds: &BayesThresholds) -> BigInt {
    thresholds.n0_floor().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::DEFAULT_PRECISION_BITS;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};

    fn ctx() -> HpCtx {
        HpCtx::new(DEFAULT_PRECISION_BITS)
    }

    /// Exact-rational crossing scan: smallest k where the favored side
    /// flips, with ties going to r.
    fn crossing_oracle(n: u64, p_r: f64, p_rp: f64, prior_r: f64, prior_rp: f64) -> Option<u64> {
        let pr = BigRational::from_float(p_r).unwrap();
        let prp = BigRational::from_float(p_rp).unwrap();
        let rr = BigRational::from_float(prior_r).unwrap();
        let rrp = BigRational::from_float(prior_rp).unwrap();
        let one = BigRational::one();
        let increasing = p_r > p_rp;
        for k in 0..=n {
            let mut lr = rr.clone();
            let mut lrp = rrp.clone();
            for _ in 0..k {
                lr *= pr.clone();
                lrp *= prp.clone();
            }
            for _ in 0..(n - k) {
                lr *= one.clone() - pr.clone();
                lrp *= one.clone() - prp.clone();
            }
            if increasing {
                if lr >= lrp {
                    return Some(k);
                }
            } else if lr <= lrp {
                return Some(k);
            }
        }
        None
    }

    #[test]
    fn degenerate_pair_is_an_error() {
        let c = ctx();
        let n = BigUint::from(20u32);
        assert!(matches!(
            bayes_threshold(&c, 0.3, 0.3, 1.0, 1.0, &n),
            Err(Error::DegeneratePair)
        ));
        assert!(bayes_threshold(&c, 0.0, 0.3, 1.0, 1.0, &n).is_err());
        assert!(bayes_threshold(&c, 0.3, 1.0, 1.0, 1.0, &n).is_err());
        assert!(bayes_threshold(&c, 0.3, 0.1, 0.0, 1.0, &n).is_err());
    }

    #[test]
    fn crossing_matches_rational_scan() {
        let c = ctx();
        let t = bayes_threshold(&c, 0.3, 0.1, 1.0, 1.0, &BigUint::from(20u32)).unwrap();
        assert_eq!(t.crossing, BigInt::from(4));
        assert!(!t.accept_below);
        assert_eq!(crossing_oracle(20, 0.3, 0.1, 1.0, 1.0), Some(4));

        for &(n, p_r, p_rp, w_r, w_rp) in &[
            (12u64, 0.05, 0.45, 1.0, 1.0),
            (12, 0.45, 0.05, 1.0, 1.0),
            (25, 0.2, 0.35, 4.0, 1.0),
            (25, 0.35, 0.2, 1.0, 4.0),
            (30, 0.3, 0.7, 1.0, 1.0),
            (9, 0.15, 0.6, 1.0, 4.0),
        ] {
            let t = bayes_threshold(&c, p_r, p_rp, w_r, w_rp, &BigUint::from(n)).unwrap();
            let oracle = crossing_oracle(n, p_r, p_rp, w_r, w_rp);
            assert_eq!(
                t.crossing.to_u64(),
                oracle,
                "mismatch at n={n} p_r={p_r} p_rp={p_rp} priors {w_r}/{w_rp}"
            );
            assert_eq!(t.accept_below, p_r < p_rp);
        }
    }

    #[test]
    fn exact_tie_snaps_to_the_integer() {
        // Mirrored pair p and 1-p with equal priors crosses exactly at N/2.
        let c = ctx();
        let t = bayes_threshold(&c, 0.7, 0.3, 1.0, 1.0, &BigUint::from(10u32)).unwrap();
        assert_eq!(t.crossing, BigInt::from(5));
        assert_eq!(crossing_oracle(10, 0.7, 0.3, 1.0, 1.0), Some(5));
    }

    #[test]
    fn crossing_fraction_converges_with_n() {
        let c = ctx();
        let mut fractions = Vec::new();
        for &n in &[100u64, 1_000, 10_000] {
            let t = bayes_threshold(&c, 0.3, 0.1, 1.0, 1.0, &BigUint::from(n)).unwrap();
            fractions.push(t.crossing.to_f64().unwrap() / n as f64);
        }
        // Limit fraction 1 + log2(3)/A for this pair.
        let a = (1.0f64 / 0.3 - 1.0).log2() - (1.0f64 / 0.1 - 1.0).log2();
        let limit = 1.0 + 3.0f64.log2() / a;
        for (f, tol) in fractions.iter().zip([1e-1, 1e-2, 1e-3]) {
            assert!((f - limit).abs() < tol, "fraction {f} vs limit {limit} at tol {tol}");
        }
    }

    #[test]
    fn floor_arithmetic_and_consistency() {
        let n = BigUint::from(100u32);
        let t = BayesThresholds::new(
            n.clone(),
            2,
            vec![BigUint::from(10u32), BigUint::from(20u32), BigUint::zero()],
        )
        .unwrap();
        assert_eq!(threshold_floor_n0(&t), BigInt::from(70));
        assert!(t.is_consistent());
        assert_eq!(t.cap(2).unwrap(), &BigUint::from(20u32));
        assert!(t.cap(0).is_err());
        assert!(t.cap(4).is_err());

        let bad = BayesThresholds::new(
            n.clone(),
            2,
            vec![BigUint::from(50u32), BigUint::from(60u32), BigUint::zero()],
        )
        .unwrap();
        assert!(!bad.is_consistent());
        assert_eq!(threshold_floor_n0(&bad), BigInt::from(-10));

        assert!(BayesThresholds::new(n.clone(), 2, vec![BigUint::from(101u32); 3]).is_err());
        assert!(BayesThresholds::new(n, 2, vec![BigUint::zero(); 2]).is_err());
    }

    #[test]
    fn raw_caps_clamp_into_range() {
        let n = BigUint::from(10u32);
        let t = BayesThresholds::from_raw(
            n,
            2,
            vec![BigInt::from(-3), BigInt::from(25), BigInt::from(7)],
        )
        .unwrap();
        assert_eq!(t.caps(), &[BigUint::zero(), BigUint::from(10u32), BigUint::from(7u32)]);
        assert_eq!(threshold_floor_n0(&t), BigInt::from(-7));
    }

    #[test]
    fn no_error_patterns_means_full_floor() {
        let t = BayesThresholds::new(BigUint::from(42u32), 1, vec![BigUint::zero()]).unwrap();
        assert_eq!(threshold_floor_n0(&t), BigInt::from(42));
    }
}
