//! Fixed-point arithmetic on big-integer mantissas.
//!
//! A value is a `BigInt` mantissa at scale `2^-frac`. All values produced by
//! one [`HpCtx`] share the same `frac`, so addition is exact and only
//! multiplication, division, and the transcendental ops round (to nearest,
//! ties away from zero). `log2` runs through `ln(m) = 2*atanh((m-1)/(m+1))`
//! on the normalized mantissa `m` in `[1,2]`, where the series argument stays
//! below 1/3 and gains more than three bits per term. Internally everything
//! runs with [`GUARD_BITS`] extra fractional bits, so results are accurate to
//! about one ulp of the context precision.
//!
//! The solver paths that resolve differences around `1e-37` against anchors
//! around `1e-4` need roughly 140 fractional bits; contexts below
//! [`MIN_SOLVER_PRECISION_BITS`] are rejected by those entry points.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Default fractional bits for security-margin arithmetic.
pub const DEFAULT_PRECISION_BITS: u32 = 192;
/// Hard floor for the solver entry points.
pub const MIN_SOLVER_PRECISION_BITS: u32 = 160;
/// Extra internal bits carried by the transcendental ops.
const GUARD_BITS: u32 = 64;

/// Right shift with round-to-nearest, ties away from zero.
fn shr_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 || x.is_zero() {
        return x.clone();
    }
    let half = BigUint::one() << (k - 1) as usize;
    let mag = (x.magnitude() + half) >> k as usize;
    BigInt::from_biguint(x.sign(), mag)
}

/// Rounded division, ties away from zero.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    let two_r = &r << 1usize;
    if two_r.magnitude() >= den.magnitude() {
        if num.is_negative() != den.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Floor of `x / 2^k` (shift toward negative infinity).
fn floor_div_pow2(x: &BigInt, k: u32) -> BigInt {
    let mag = x.magnitude();
    match x.sign() {
        Sign::Minus => {
            let mask = (BigUint::one() << k as usize) - BigUint::one();
            -BigInt::from((mag + mask) >> k as usize)
        }
        _ => BigInt::from(mag >> k as usize),
    }
}

/// `atanh(z)` at scale `2^-work` for `|z| <= 1/3 + ulp`.
fn atanh_series(z: &BigInt, work: u32) -> BigInt {
    let z2 = shr_round(&(z * z), work);
    let mut term = z.clone();
    let mut acc = z.clone();
    let mut k = 1u64;
    loop {
        term = shr_round(&(&term * &z2), work);
        if term.is_zero() {
            break;
        }
        let contrib = div_round(&term, &BigInt::from(2 * k + 1));
        if contrib.is_zero() {
            break;
        }
        acc += contrib;
        k += 1;
        assert!(k < 1_000_000, "atanh series failed to converge");
    }
    acc
}

/// A fixed-point value: `mant / 2^frac`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hp {
    mant: BigInt,
    frac: u32,
}

impl Hp {
    fn check(&self, other: &Hp) {
        assert_eq!(
            self.frac, other.frac,
            "mixed-precision operands; values must come from one context"
        );
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn add(&self, other: &Hp) -> Hp {
        self.check(other);
        Hp { mant: &self.mant + &other.mant, frac: self.frac }
    }

    pub fn sub(&self, other: &Hp) -> Hp {
        self.check(other);
        Hp { mant: &self.mant - &other.mant, frac: self.frac }
    }

    pub fn neg(&self) -> Hp {
        Hp { mant: -&self.mant, frac: self.frac }
    }

    pub fn abs(&self) -> Hp {
        Hp { mant: self.mant.abs(), frac: self.frac }
    }

    pub fn mul(&self, other: &Hp) -> Hp {
        self.check(other);
        Hp { mant: shr_round(&(&self.mant * &other.mant), self.frac), frac: self.frac }
    }

    pub fn div(&self, other: &Hp) -> Result<Hp> {
        self.check(other);
        if other.mant.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let num = &self.mant << self.frac as usize;
        Ok(Hp { mant: div_round(&num, &other.mant), frac: self.frac })
    }

    pub fn mul_int(&self, k: i64) -> Hp {
        Hp { mant: &self.mant * k, frac: self.frac }
    }

    pub fn div_int(&self, k: i64) -> Result<Hp> {
        if k == 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(Hp { mant: div_round(&self.mant, &BigInt::from(k)), frac: self.frac })
    }

    /// Halve in place-free form; exact when the mantissa is even, else rounds.
    pub fn half(&self) -> Hp {
        Hp { mant: shr_round(&self.mant, 1), frac: self.frac }
    }

    pub fn cmp(&self, other: &Hp) -> Ordering {
        self.check(other);
        self.mant.cmp(&other.mant)
    }

    pub fn min(self, other: Hp) -> Hp {
        if self.cmp(&other) == Ordering::Greater { other } else { self }
    }

    pub fn floor(&self) -> BigInt {
        floor_div_pow2(&self.mant, self.frac)
    }

    /// Ceiling, except values within `2^-snap_bits` of an integer snap to that
    /// integer first. Exact-integer crossings otherwise get pushed one unit up
    /// by harmless last-ulp rounding.
    pub fn ceil_snap(&self, snap_bits: u32) -> BigInt {
        assert!(snap_bits < self.frac, "snap window must be finer than the precision");
        let floor = self.floor();
        let frac_part = &self.mant - (&floor << self.frac as usize);
        let tau = BigInt::one() << (self.frac - snap_bits) as usize;
        let one_whole = BigInt::one() << self.frac as usize;
        if frac_part <= tau {
            floor
        } else if frac_part >= &one_whole - &tau {
            &floor + 1
        } else {
            &floor + 1
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        // Keep the conversion inside f64 range regardless of the scale.
        let (m, extra) = if bits > 500 {
            let shift = (bits - 500) as u32;
            (shr_round(&self.mant, shift), shift as i64)
        } else {
            (self.mant.clone(), 0)
        };
        let base = m.to_f64().unwrap_or(f64::NAN);
        libm::ldexp(base, (extra - self.frac as i64) as i32)
    }

    /// Fixed-point decimal rendering with `digits` places after the point.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let neg = self.mant.is_negative();
        let mag = self.mant.magnitude().clone();
        let int_part = &mag >> self.frac as usize;
        let frac_part = &mag - (&int_part << self.frac as usize);
        let ten_k = BigUint::from(10u32).pow(digits as u32);
        let scaled = &frac_part * &ten_k;
        let half = BigUint::one() << (self.frac - 1) as usize;
        let mut dec = (scaled + half) >> self.frac as usize;
        let mut int_part = int_part;
        if dec >= ten_k {
            dec -= &ten_k;
            int_part += BigUint::one();
        }
        let sign = if neg && !(int_part.is_zero() && dec.is_zero()) { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{:0>width$}", dec.to_string(), width = digits)
        }
    }

    /// Scientific notation with `sig` significant digits.
    pub fn to_scientific_string(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let neg = self.mant.is_negative();
        let mag = BigInt::from(self.mant.magnitude().clone());
        // Estimate the decimal exponent from the binary one, then correct.
        let bitpos = mag.bits() as i64 - 1 - self.frac as i64;
        let mut d10 = (bitpos as f64 * std::f64::consts::LOG10_2).floor() as i64;
        for _ in 0..3 {
            let k = sig as i64 - 1 - d10;
            let t = if k >= 0 {
                let num = &mag * BigInt::from(BigUint::from(10u32).pow(k as u32));
                shr_round(&num, self.frac)
            } else {
                let den = BigInt::from(BigUint::from(10u32).pow((-k) as u32)) << self.frac as usize;
                div_round(&mag, &den)
            };
            let s = t.to_string();
            if s.len() == sig {
                let (first, rest) = s.split_at(1);
                let sign = if neg { "-" } else { "" };
                return if rest.is_empty() {
                    format!("{sign}{first}e{d10}")
                } else {
                    format!("{sign}{first}.{rest}e{d10}")
                };
            }
            // Off-by-one from the f64 estimate or from rounding up to 10^sig.
            d10 += s.len() as i64 - sig as i64;
        }
        unreachable!("scientific rendering failed to settle");
    }
}

/// Precision context: fixes the scale and caches `ln 2`.
#[derive(Clone, Debug)]
pub struct HpCtx {
    frac: u32,
    work: u32,
    ln2_work: BigInt,
}

impl HpCtx {
    pub fn new(frac: u32) -> HpCtx {
        assert!((32..=65536).contains(&frac), "precision out of supported range");
        let work = frac + GUARD_BITS;
        let third = div_round(&(BigInt::one() << work as usize), &BigInt::from(3));
        let ln2_work = atanh_series(&third, work) << 1usize;
        HpCtx { frac, work, ln2_work }
    }

    pub fn precision_bits(&self) -> u32 {
        self.frac
    }

    pub fn zero(&self) -> Hp {
        Hp { mant: BigInt::zero(), frac: self.frac }
    }

    pub fn one(&self) -> Hp {
        Hp { mant: BigInt::one() << self.frac as usize, frac: self.frac }
    }

    pub fn from_int(&self, v: i64) -> Hp {
        Hp { mant: BigInt::from(v) << self.frac as usize, frac: self.frac }
    }

    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Hp> {
        if den.is_zero() {
            return Err(Error::Domain("ratio with zero denominator".into()));
        }
        let scaled = num << self.frac as usize;
        Ok(Hp { mant: div_round(&scaled, den), frac: self.frac })
    }

    pub fn from_uint_ratio(&self, num: &BigUint, den: &BigUint) -> Result<Hp> {
        self.from_ratio(&BigInt::from(num.clone()), &BigInt::from(den.clone()))
    }

    pub fn from_f64(&self, x: f64) -> Result<Hp> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite input {x}")));
        }
        if x == 0.0 {
            return Ok(self.zero());
        }
        let r = num_rational::BigRational::from_float(x)
            .ok_or_else(|| Error::Domain(format!("unrepresentable input {x}")))?;
        self.from_ratio(r.numer(), r.denom())
    }

    /// Parse plain or scientific decimal notation ("0.25", "-3.76e-37").
    pub fn from_decimal_str(&self, s: &str) -> Result<Hp> {
        let s = s.trim();
        let (mant_str, exp10) = match s.split_once(['e', 'E']) {
            Some((m, e)) => {
                let exp: i64 = e
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
                (m, exp)
            }
            None => (s, 0),
        };
        let (neg, digits_str) = match mant_str.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mant_str.strip_prefix('+').unwrap_or(mant_str)),
        };
        let (int_digits, frac_digits) = match digits_str.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits_str, ""),
        };
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(Error::Parse(format!("no digits in {s:?}")));
        }
        let all: String = format!("{int_digits}{frac_digits}");
        if !all.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal literal {s:?}")));
        }
        let digits = all.parse::<BigUint>().map_err(|_| Error::Parse(format!("bad digits in {s:?}")))?;
        let mut num = BigInt::from(digits);
        if neg {
            num = -num;
        }
        let scale = exp10 - frac_digits.len() as i64;
        if scale >= 0 {
            num *= BigInt::from(BigUint::from(10u32).pow(scale as u32));
            self.from_ratio(&num, &BigInt::one())
        } else {
            let den = BigInt::from(BigUint::from(10u32).pow((-scale) as u32));
            self.from_ratio(&num, &den)
        }
    }

    /// Base-2 logarithm of a positive value.
    pub fn log2(&self, x: &Hp) -> Result<Hp> {
        assert_eq!(x.frac, self.frac);
        if x.mant.sign() != Sign::Plus {
            return Err(Error::Domain("log2 requires a positive argument".into()));
        }
        let work = self.work;
        let guard = work - self.frac;
        let xm = &x.mant << guard as usize;
        let bits = xm.bits() as i64;
        let e = bits - 1 - work as i64;
        let m = if e >= 0 {
            shr_round(&xm, e as u32)
        } else {
            &xm << (-e) as usize
        };
        let unit = BigInt::one() << work as usize;
        let num = (&m - &unit) << work as usize;
        let den = &m + &unit;
        let z = div_round(&num, &den);
        let ln_m = atanh_series(&z, work) << 1usize;
        let log2_m = div_round(&(&ln_m << work as usize), &self.ln2_work);
        let result = (BigInt::from(e) << work as usize) + log2_m;
        Ok(Hp { mant: shr_round(&result, guard), frac: self.frac })
    }

    /// Binary entropy `-p log2 p - (1-p) log2 (1-p)` for `p` in `[0, 1]`.
    pub fn h2(&self, p: &Hp) -> Result<Hp> {
        assert_eq!(p.frac, self.frac);
        let one = self.one();
        if p.is_negative() || p.cmp(&one) == Ordering::Greater {
            return Err(Error::Domain(format!(
                "entropy argument {} outside [0, 1]",
                p.to_f64()
            )));
        }
        if p.is_zero() || p == &one {
            return Ok(self.zero());
        }
        let q = one.sub(p);
        let t1 = p.mul(&self.log2(p)?);
        let t2 = q.mul(&self.log2(&q)?);
        Ok(t1.add(&t2).neg())
    }
}
