//! Key expansion: two independently seeded PRNG bitstreams become the basis
//! symbol stream `s(t)` (log2 M bits per slot, MSB first) and the
//! randomization bit stream `dx(t)` (one bit per slot).

use serde::{Deserialize, Serialize};

use super::lfsr::LfsrSpec;
use super::tinymt32::{TinyMt32, TinyMtParams};
use crate::error::{Error, Result};

/// Generator family shared by both key streams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PrngKind {
    Lfsr { length: usize, taps: Vec<usize> },
    #[serde(rename = "tinymt32")]
    TinyMt32 {
        #[serde(default = "default_mat1")]
        mat1: u32,
        #[serde(default = "default_mat2")]
        mat2: u32,
        #[serde(default = "default_tmat")]
        tmat: u32,
    },
}

fn default_mat1() -> u32 {
    super::tinymt32::DEFAULT_MAT1
}
fn default_mat2() -> u32 {
    super::tinymt32::DEFAULT_MAT2
}
fn default_tmat() -> u32 {
    super::tinymt32::DEFAULT_TMAT
}

impl PrngKind {
    /// Seed length in bits demanded of each key.
    pub fn seed_bits(&self) -> usize {
        match self {
            PrngKind::Lfsr { length, .. } => *length,
            PrngKind::TinyMt32 { .. } => 32,
        }
    }
}

/// Shared secret seeds: `k` drives the basis stream, `dk` the
/// randomization stream. Both are bit vectors (LSB first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub k: Vec<u8>,
    pub dk: Vec<u8>,
}

impl KeyPair {
    pub fn from_words(k: u64, dk: u64, bits: usize) -> KeyPair {
        let expand = |w: u64| (0..bits).map(|i| ((w >> i) & 1) as u8).collect();
        KeyPair { k: expand(k), dk: expand(dk) }
    }
}

fn bits_to_word(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}

/// Per-slot keyed values: basis symbol `s(t) < M` and randomization bit
/// `dx(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolStream {
    pub m: u32,
    pub s: Vec<u32>,
    pub dx: Vec<u8>,
}

impl SymbolStream {
    pub fn slots(&self) -> usize {
        self.s.len()
    }
}

enum BitSource {
    Lfsr(LfsrSpec),
    Tiny { g: TinyMt32, word: u32, left: u32 },
}

impl BitSource {
    fn new(kind: &PrngKind, seed_bits: &[u8]) -> Result<BitSource> {
        if seed_bits.len() != kind.seed_bits() {
            return Err(Error::InvalidKey(format!(
                "seed is {} bits, generator wants {}",
                seed_bits.len(),
                kind.seed_bits()
            )));
        }
        match kind {
            PrngKind::Lfsr { length, taps } => {
                let state = bits_to_word(seed_bits);
                Ok(BitSource::Lfsr(LfsrSpec::new(*length, taps, state)?))
            }
            PrngKind::TinyMt32 { mat1, mat2, tmat } => {
                let seed = bits_to_word(seed_bits) as u32;
                let params = TinyMtParams { mat1: *mat1, mat2: *mat2, tmat: *tmat, seed };
                Ok(BitSource::Tiny { g: TinyMt32::new(&params), word: 0, left: 0 })
            }
        }
    }

    fn next_bit(&mut self) -> Result<u8> {
        match self {
            BitSource::Lfsr(spec) => {
                Ok(super::lfsr::lfsr_generate(spec, 1)?[0])
            }
            BitSource::Tiny { g, word, left } => {
                if *left == 0 {
                    *word = g.next_u32();
                    *left = 32;
                }
                *left -= 1;
                Ok(((*word >> *left) & 1) as u8)
            }
        }
    }
}

/// Expand a key pair into `t` slots of keyed symbols. `m` must be a power of
/// two; a slot consumes `log2 m` bits from the `k` stream (MSB first) and one
/// bit from the `dk` stream. `t = 0` yields an empty stream.
pub fn expand_keys(pair: &KeyPair, m: u32, t: usize, kind: &PrngKind) -> Result<SymbolStream> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { what: "M", value: m as u64 });
    }
    let sym_bits = m.trailing_zeros();
    let mut src_s = BitSource::new(kind, &pair.k)?;
    let mut src_dx = BitSource::new(kind, &pair.dk)?;
    let mut s = Vec::with_capacity(t);
    let mut dx = Vec::with_capacity(t);
    for _ in 0..t {
        let mut sym = 0u32;
        for _ in 0..sym_bits {
            sym = (sym << 1) | u32::from(src_s.next_bit()?);
        }
        s.push(sym);
        dx.push(src_dx.next_bit()?);
    }
    Ok(SymbolStream { m, s, dx })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lfsr4() -> PrngKind {
        PrngKind::Lfsr { length: 4, taps: vec![4, 1] }
    }

    #[test]
    fn hand_enumerated_expansion() {
        // k stream 100011110101100..., chopped into 2-bit symbols; dk seeded
        // at state 0b1000 produces 0001111...
        let pair = KeyPair::from_words(0b0001, 0b1000, 4);
        let stream = expand_keys(&pair, 4, 7, &lfsr4()).unwrap();
        assert_eq!(stream.s, vec![2, 0, 3, 3, 1, 1, 2]);
        assert_eq!(stream.dx, vec![0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(stream.slots(), 7);
    }

    #[test]
    fn msb_first_chopping() {
        // First six generator bits 011011 -> symbols 0b01, 0b10.
        let pair = KeyPair::from_words(0b110110, 0b000001, 6);
        let kind = PrngKind::Lfsr { length: 6, taps: vec![6, 5] };
        let stream = expand_keys(&pair, 4, 2, &kind).unwrap();
        assert_eq!(stream.s, vec![0b01, 0b10]);
    }

    #[test]
    fn single_slot_minimal_m() {
        let pair = KeyPair::from_words(0b01, 0b10, 2);
        let kind = PrngKind::Lfsr { length: 2, taps: vec![2, 1] };
        let stream = expand_keys(&pair, 2, 1, &kind).unwrap();
        assert_eq!(stream.s.len(), 1);
        assert_eq!(stream.dx.len(), 1);
        assert!(stream.s[0] < 2);
    }

    #[test]
    fn tinymt_word_chopping() {
        // First output word for the default matrices at seed 1 is 0x97b6d625;
        // its leading nibbles are the first M=16 symbols.
        let pair = KeyPair::from_words(1, 2, 32);
        let kind = PrngKind::TinyMt32 {
            mat1: default_mat1(),
            mat2: default_mat2(),
            tmat: default_tmat(),
        };
        let stream = expand_keys(&pair, 16, 4, &kind).unwrap();
        assert_eq!(stream.s, vec![0x9, 0x7, 0xb, 0x6]);
    }

    #[test]
    fn determinism_and_validation() {
        let pair = KeyPair::from_words(0b1011, 0b0110, 4);
        let a = expand_keys(&pair, 4, 50, &lfsr4()).unwrap();
        let b = expand_keys(&pair, 4, 50, &lfsr4()).unwrap();
        assert_eq!(a, b);
        assert!(a.s.iter().all(|&v| v < 4));

        assert!(matches!(
            expand_keys(&pair, 3, 1, &lfsr4()),
            Err(Error::NotPowerOfTwo { .. })
        ));
        let short = KeyPair::from_words(1, 1, 3);
        assert!(matches!(
            expand_keys(&short, 4, 1, &lfsr4()),
            Err(Error::InvalidKey(_))
        ));
        let zero_seed = KeyPair::from_words(0, 1, 4);
        assert!(expand_keys(&zero_seed, 4, 1, &lfsr4()).is_err());
        assert_eq!(expand_keys(&pair, 4, 0, &lfsr4()).unwrap().slots(), 0);
    }

    #[test]
    fn prng_kind_serde_names() {
        let l: PrngKind = serde_json::from_str(
            r#"{"kind":"lfsr","length":8,"taps":[8,6,5,4]}"#,
        )
        .unwrap();
        assert_eq!(l.seed_bits(), 8);
        let t: PrngKind = serde_json::from_str(r#"{"kind":"tinymt32"}"#).unwrap();
        assert_eq!(t.seed_bits(), 32);
        match t {
            PrngKind::TinyMt32 { mat1, .. } => assert_eq!(mat1, default_mat1()),
            _ => unreachable!(),
        }
    }
}
