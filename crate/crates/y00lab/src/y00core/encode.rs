//! Slot encoding and decoding. The transmitted state index is
//!
//! `m = Map[s] + M * ((Map[s] + x + dx) mod 2)`
//!
//! so the basis (which antipodal pair) is keyed by `s`, and the bit parity on
//! that basis is whitened by both the mapped symbol and the randomization
//! bit. Given `x`, the slot is exactly invertible back to `(s, dx)`.

use num_complex::Complex64;

use super::constellation::Constellation;
use super::mapping::MappingTable;
use crate::error::{Error, Result};
use crate::keystream::SymbolStream;

/// State index for data bit `x` under keyed values `(s, dx)`. Bits are taken
/// mod 2.
pub fn encode_slot(s: u32, x: u8, dx: u8, map: &MappingTable) -> Result<u32> {
    let mapped = map.map(s)?;
    let parity = (mapped + u32::from(x & 1) + u32::from(dx & 1)) & 1;
    Ok(mapped + map.half_size() * parity)
}

/// Invert a state index under known plaintext `x`: recover `(s, dx)`.
pub fn invert_slot(m_index: u32, x: u8, map: &MappingTable) -> Result<(u32, u8)> {
    let m = map.half_size();
    if m_index >= 2 * m {
        return Err(Error::IndexOutOfRange { index: m_index, size: 2 * m });
    }
    let mapped = m_index % m;
    let parity = m_index / m;
    let s = map.unmap(mapped)?;
    let dx = ((parity + mapped + u32::from(x & 1)) & 1) as u8;
    Ok((s, dx))
}

/// An encoded transmission: plaintext bits and the per-slot state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y00Frame {
    pub x: Vec<u8>,
    pub m: Vec<u32>,
    pub stream: SymbolStream,
}

pub fn encode_frame(x: &[u8], stream: &SymbolStream, map: &MappingTable) -> Result<Y00Frame> {
    if x.len() != stream.slots() {
        return Err(Error::LengthMismatch { expected: stream.slots(), got: x.len() });
    }
    if stream.m != map.half_size() {
        return Err(Error::LengthMismatch {
            expected: map.half_size() as usize,
            got: stream.m as usize,
        });
    }
    let m = x
        .iter()
        .zip(stream.s.iter().zip(stream.dx.iter()))
        .map(|(&xi, (&si, &dxi))| encode_slot(si, xi, dxi, map))
        .collect::<Result<Vec<u32>>>()?;
    Ok(Y00Frame { x: x.to_vec(), m, stream: stream.clone() })
}

/// Bob's keyed minimum-distance decision for one slot. Knowing `(s, dx)`,
/// only the two basis states are possible; pick the closer one to the
/// received point `y` (`eta` scales the nominal amplitudes for channel
/// loss). Ties resolve to bit 0.
pub fn bob_decode_slot(
    y: Complex64,
    s: u32,
    dx: u8,
    map: &MappingTable,
    constellation: &Constellation,
    eta: f64,
) -> Result<u8> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta = {eta} outside [0, 1]")));
    }
    let m0 = encode_slot(s, 0, dx, map)?;
    let m1 = encode_slot(s, 1, dx, map)?;
    let a0 = constellation.amplitude(m0)? * eta;
    let a1 = constellation.amplitude(m1)? * eta;
    let d0 = (y - a0).norm_sqr();
    let d1 = (y - a1).norm_sqr();
    Ok(u8::from(d1 < d0))
}
