//! Keyed basis mapping: a permutation of `{0..M-1}` applied to the symbol
//! stream before encoding. The protocol's security analysis asks for an
//! "irregular" permutation; which permutations are good is left to the
//! caller, so this type only guarantees bijectivity.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingTable {
    m: u32,
    perm: Vec<u32>,
    inverse: Vec<u32>,
}

impl MappingTable {
    pub fn from_perm(perm: Vec<u32>) -> Result<MappingTable> {
        let m = perm.len() as u32;
        if m == 0 {
            return Err(Error::InvalidMapping("empty permutation".into()));
        }
        let mut inverse = vec![u32::MAX; m as usize];
        for (i, &v) in perm.iter().enumerate() {
            if v >= m {
                return Err(Error::InvalidMapping(format!("entry {v} out of range 0..{m}")));
            }
            if inverse[v as usize] != u32::MAX {
                return Err(Error::InvalidMapping(format!("entry {v} repeated")));
            }
            inverse[v as usize] = i as u32;
        }
        Ok(MappingTable { m, perm, inverse })
    }

    pub fn identity(m: u32) -> Result<MappingTable> {
        if m == 0 {
            return Err(Error::InvalidMapping("empty permutation".into()));
        }
        MappingTable::from_perm((0..m).collect())
    }

    /// Uniform random permutation from a dedicated seed (Fisher-Yates).
    pub fn random(m: u32, seed: u64) -> Result<MappingTable> {
        if m == 0 {
            return Err(Error::InvalidMapping("empty permutation".into()));
        }
        let mut perm: Vec<u32> = (0..m).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        MappingTable::from_perm(perm)
    }

    pub fn half_size(&self) -> u32 {
        self.m
    }

    pub fn map(&self, s: u32) -> Result<u32> {
        self.perm
            .get(s as usize)
            .copied()
            .ok_or(Error::SymbolOutOfRange { symbol: s, m: self.m })
    }

    pub fn unmap(&self, v: u32) -> Result<u32> {
        self.inverse
            .get(v as usize)
            .copied()
            .ok_or(Error::SymbolOutOfRange { symbol: v, m: self.m })
    }

    /// File format: line 1 `M=<int>`, line 2 the permutation as M
    /// space-separated integers.
    pub fn parse(text: &str) -> Result<MappingTable> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty mapping file".into()))?
            .trim();
        let m: u32 = head
            .strip_prefix("M=")
            .ok_or_else(|| Error::Parse(format!("expected M=<int>, got {head:?}")))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad M in {head:?}")))?;
        let body = lines
            .next()
            .ok_or_else(|| Error::Parse("missing permutation line".into()))?;
        let perm = body
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad permutation entry {tok:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        if perm.len() != m as usize {
            return Err(Error::InvalidMapping(format!(
                "header says M={m}, found {} entries",
                perm.len()
            )));
        }
        MappingTable::from_perm(perm)
    }

    pub fn to_file_string(&self) -> String {
        let entries: Vec<String> = self.perm.iter().map(|v| v.to_string()).collect();
        format!("M={}\n{}\n", self.m, entries.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bijection_roundtrip() {
        let t = MappingTable::random(16, 7).unwrap();
        for s in 0..16 {
            assert_eq!(t.unmap(t.map(s).unwrap()).unwrap(), s);
        }
        let id = MappingTable::identity(8).unwrap();
        assert_eq!(id.map(5).unwrap(), 5);
        assert!(id.map(8).is_err());
        assert!(id.unmap(9).is_err());
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(MappingTable::random(32, 1).unwrap(), MappingTable::random(32, 1).unwrap());
        assert_ne!(MappingTable::random(32, 1).unwrap(), MappingTable::random(32, 2).unwrap());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(MappingTable::from_perm(vec![]).is_err());
        assert!(MappingTable::from_perm(vec![0, 0, 1]).is_err());
        assert!(MappingTable::from_perm(vec![0, 3]).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let t = MappingTable::random(8, 3).unwrap();
        let text = t.to_file_string();
        assert_eq!(MappingTable::parse(&text).unwrap(), t);
        assert!(MappingTable::parse("M=3\n0 1\n").is_err());
        assert!(MappingTable::parse("M=2\n0 0\n").is_err());
        assert!(MappingTable::parse("bogus\n0 1\n").is_err());
        assert!(MappingTable::parse("").is_err());
        let ok = MappingTable::parse("M=4\n2 0 3 1\n").unwrap();
        assert_eq!(ok.map(0).unwrap(), 2);
    }
}
