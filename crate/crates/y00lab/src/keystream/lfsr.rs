//! Fibonacci LFSR over GF(2).
//!
//! Conventions: taps are 1-based positions of the nonzero feedback
//! coefficients, so taps `{4, 1}` mean `s[n] = s[n-4] ^ s[n-1]`
//! (polynomial x^4 + x + 1). Bit `i` of `state` holds `s[i]` of the sliding
//! window, so the LSB is the oldest bit and the next output.

use crate::error::{Error, Result};

pub const MAX_LFSR_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfsrSpec {
    length: usize,
    taps: Vec<usize>,
    state: u64,
}

impl LfsrSpec {
    pub fn new(length: usize, taps: &[usize], state: u64) -> Result<Self> {
        if length == 0 || length > MAX_LFSR_LEN {
            return Err(Error::InvalidLfsrSpec(format!(
                "length {length} outside 1..={MAX_LFSR_LEN}"
            )));
        }
        let mut taps: Vec<usize> = taps.to_vec();
        taps.sort_unstable();
        taps.dedup();
        if taps.is_empty() {
            return Err(Error::InvalidLfsrSpec("no feedback taps".into()));
        }
        if let Some(&bad) = taps.iter().find(|&&t| t == 0 || t > length) {
            return Err(Error::InvalidLfsrSpec(format!(
                "tap {bad} outside 1..={length}"
            )));
        }
        if length < MAX_LFSR_LEN && state >> length != 0 {
            return Err(Error::InvalidLfsrSpec(format!(
                "state {state:#x} wider than {length} bits"
            )));
        }
        if state == 0 {
            return Err(Error::DegenerateLfsrState);
        }
        Ok(LfsrSpec { length, taps, state })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    fn step(&mut self) -> u8 {
        let out = (self.state & 1) as u8;
        let mut fb = 0u64;
        for &t in &self.taps {
            fb ^= (self.state >> (self.length - t)) & 1;
        }
        self.state = (self.state >> 1) | (fb << (self.length - 1));
        out
    }
}

/// Produce `n` output bits, advancing the register state.
pub fn lfsr_generate(spec: &mut LfsrSpec, n: usize) -> Result<Vec<u8>> {
    if spec.state == 0 {
        return Err(Error::DegenerateLfsrState);
    }
    Ok((0..n).map(|_| spec.step()).collect())
}
