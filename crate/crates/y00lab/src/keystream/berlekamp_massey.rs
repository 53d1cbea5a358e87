//! Berlekamp-Massey synthesis over GF(2) and LFSR seed recovery.
//!
//! Given enough keystream (twice the true register length), the minimal
//! LFSR is unique, so recovering `(taps, initial state)` from ciphertext
//! and known plaintext is a certainty, not a statistical attack.

use super::lfsr::{lfsr_generate, LfsrSpec};

/// Result of a recovery attempt. `spec` is present when the synthesized
/// recurrence forms a usable register (nonzero length, at least one tap).
#[derive(Debug, Clone)]
pub struct BmRecovery {
    pub length: usize,
    pub taps: Vec<usize>,
    pub initial_state: u64,
    pub spec: Option<LfsrSpec>,
    /// All-zero input: any length reproduces it, result is degenerate.
    pub ambiguous: bool,
}

/// Minimal-LFSR synthesis. Returns the shortest register that generates
/// `keystream`; for an all-zero stream the length-0 result is flagged.
pub fn bm_recover_lfsr(keystream: &[u8]) -> BmRecovery {
    if keystream.iter().all(|&b| b == 0) {
        return BmRecovery {
            length: 0,
            taps: Vec::new(),
            initial_state: 0,
            spec: None,
            ambiguous: true,
        };
    }
    // Connection polynomial c(x), current and previous-best, as coefficient
    // vectors indexed by degree.
    let mut c = vec![1u8];
    let mut b = vec![1u8];
    let mut l = 0usize;
    let mut m = -1i64;
    for n in 0..keystream.len() {
        let mut d = keystream[n];
        for i in 1..=l {
            if i < c.len() {
                d ^= c[i] & keystream[n - i];
            }
        }
        if d == 1 {
            let t = c.clone();
            let shift = (n as i64 - m) as usize;
            if c.len() < b.len() + shift {
                c.resize(b.len() + shift, 0);
            }
            for (i, &bi) in b.iter().enumerate() {
                c[i + shift] ^= bi;
            }
            if 2 * l <= n {
                l = n + 1 - l;
                m = n as i64;
                b = t;
            }
        }
    }
    let taps: Vec<usize> = (1..=l).filter(|&i| i < c.len() && c[i] == 1).collect();
    let mut initial_state = 0u64;
    for (i, &bit) in keystream.iter().take(l).enumerate() {
        initial_state |= (bit as u64) << i;
    }
    let spec = if taps.is_empty() {
        None
    } else {
        LfsrSpec::new(l, &taps, initial_state).ok()
    };
    BmRecovery { length: l, taps, initial_state, spec, ambiguous: false }
}

/// Recovery plus replay check: regenerates the observed bits from the
/// recovered spec and confirms exact agreement.
pub fn recover_and_verify(keystream: &[u8]) -> (BmRecovery, bool) {
    let rec = bm_recover_lfsr(keystream);
    let ok = match &rec.spec {
        Some(spec) => {
            let mut replay = spec.clone();
            lfsr_generate(&mut replay, keystream.len())
                .map(|bits| bits == keystream)
                .unwrap_or(false)
        }
        None => rec.ambiguous && keystream.iter().all(|&b| b == 0),
    };
    (rec, ok)
}
