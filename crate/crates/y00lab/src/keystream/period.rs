//! Exact period bookkeeping. Periods are big integers throughout; the
//! block count is floored because only whole error-pattern blocks count.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Period of a maximal-length LFSR of the given register length.
pub fn lfsr_max_period(length: usize) -> BigUint {
    (BigUint::one() << length) - BigUint::one()
}

/// State-space period bound of the 127-bit TinyMT32 family.
pub fn tinymt32_period() -> BigUint {
    (BigUint::one() << 127) - BigUint::one()
}

/// Exact LCM of the generator periods, plus the derived block count
/// `N = floor(T_LCM / log2(2M))` for half-size `m`.
pub fn lcm_period(periods: &[BigUint], m: u32) -> Result<(BigUint, BigUint)> {
    if periods.is_empty() {
        return Err(Error::EmptyPeriodList);
    }
    if periods.iter().any(|p| p.is_zero()) {
        return Err(Error::Domain("period must be positive".into()));
    }
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { what: "M", value: m as u64 });
    }
    let t_lcm = periods.iter().fold(BigUint::one(), |acc, p| acc.lcm(p));
    let bits_per_block = BigUint::from(m.trailing_zeros() + 1);
    let n = &t_lcm / &bits_per_block;
    Ok((t_lcm, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lcm() {
        let (t, _) = lcm_period(&[15u32.into(), 7u32.into()], 2).unwrap();
        assert_eq!(t, BigUint::from(105u32));
    }

    #[test]
    fn mersenne_scale() {
        let p = tinymt32_period();
        let (t, n) = lcm_period(&[p.clone(), p.clone()], 2048).unwrap();
        assert_eq!(t, tinymt32_period());
        // floor((2^127 - 1) / 12), checked against exact integer division.
        let expect: BigUint = "14178431955039102644307275309657008810".parse().unwrap();
        assert_eq!(n, expect);
    }

    #[test]
    fn flooring_and_validation() {
        // T = 7, M = 2 -> 2 bits per block -> N = 3.
        let (_, n) = lcm_period(&[7u32.into()], 2).unwrap();
        assert_eq!(n, BigUint::from(3u32));
        assert!(lcm_period(&[], 2).is_err());
        assert!(lcm_period(&[BigUint::zero()], 2).is_err());
        assert!(lcm_period(&[7u32.into()], 3).is_err());
        assert_eq!(lfsr_max_period(4), BigUint::from(15u32));
    }
}
