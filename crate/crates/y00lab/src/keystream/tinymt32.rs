//! TinyMT32 pseudo-random generator (127-bit state), bit-exact with the
//! reference C distribution. Parameter words select the member of the
//! generator family; the defaults are the check parameters shipped with the
//! reference code, kept so fixture files stay reproducible.

use crate::error::{Error, Result};

const SH0: u32 = 1;
const SH1: u32 = 10;
const SH8: u32 = 8;
const MASK: u32 = 0x7fff_ffff;
const MIN_LOOP: usize = 8;
const PRE_LOOP: usize = 8;

/// Reference check parameters (mat1, mat2, tmat).
pub const DEFAULT_MAT1: u32 = 0x8f70_11ee;
pub const DEFAULT_MAT2: u32 = 0xfc78_ff1f;
pub const DEFAULT_TMAT: u32 = 0x3793_fdff;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyMtParams {
    pub mat1: u32,
    pub mat2: u32,
    pub tmat: u32,
    pub seed: u32,
}

impl TinyMtParams {
    pub fn with_default_matrices(seed: u32) -> Self {
        TinyMtParams { mat1: DEFAULT_MAT1, mat2: DEFAULT_MAT2, tmat: DEFAULT_TMAT, seed }
    }
}

#[derive(Debug, Clone)]
pub struct TinyMt32 {
    status: [u32; 4],
    mat1: u32,
    mat2: u32,
    tmat: u32,
}

impl TinyMt32 {
    /// Reference initialization, including the period-certification step that
    /// rules out the all-zero 127-bit state.
    pub fn new(params: &TinyMtParams) -> Self {
        let mut g = TinyMt32 {
            status: [params.seed, params.mat1, params.mat2, params.tmat],
            mat1: params.mat1,
            mat2: params.mat2,
            tmat: params.tmat,
        };
        for i in 1..MIN_LOOP {
            g.status[i & 3] ^= (i as u32).wrapping_add(
                1_812_433_253u32
                    .wrapping_mul(g.status[(i - 1) & 3] ^ (g.status[(i - 1) & 3] >> 30)),
            );
        }
        g.period_certification();
        for _ in 0..PRE_LOOP {
            g.next_state();
        }
        g
    }

    fn period_certification(&mut self) {
        if self.status[0] & MASK == 0
            && self.status[1] == 0
            && self.status[2] == 0
            && self.status[3] == 0
        {
            self.status = [u32::from(b'T'), u32::from(b'I'), u32::from(b'N'), u32::from(b'Y')];
        }
    }

    fn next_state(&mut self) {
        let mut x = (self.status[0] & MASK) ^ self.status[1] ^ self.status[2];
        let mut y = self.status[3];
        x ^= x << SH0;
        y ^= (y >> SH0) ^ x;
        self.status[0] = self.status[1];
        self.status[1] = self.status[2];
        self.status[2] = x ^ (y << SH1);
        self.status[3] = y;
        if y & 1 != 0 {
            self.status[1] ^= self.mat1;
            self.status[2] ^= self.mat2;
        }
    }

    fn temper(&self) -> u32 {
        let mut t0 = self.status[3];
        let t1 = self.status[0].wrapping_add(self.status[2] >> SH8);
        t0 ^= t1;
        if t1 & 1 != 0 {
            t0 ^= self.tmat;
        }
        t0
    }

    pub fn next_u32(&mut self) -> u32 {
        self.next_state();
        self.temper()
    }
}

/// Generate `n` output words from a fresh generator.
pub fn tinymt32_generate(params: &TinyMtParams, n: usize) -> Vec<u32> {
    let mut g = TinyMt32::new(params);
    (0..n).map(|_| g.next_u32()).collect()
}

/// Reference-vector fixture: header `# seed=<u32> mat1=<hex> mat2=<hex>
/// tmat=<hex>`, then one 32-bit hex word per line.
#[derive(Debug, Clone)]
pub struct TinyMtFixture {
    pub params: TinyMtParams,
    pub words: Vec<u32>,
}

pub fn parse_tinymt_fixture(text: &str) -> Result<TinyMtFixture> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty fixture file".into()))?
        .trim();
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("fixture header must start with '#'".into()))?;
    let mut seed = None;
    let mut mat1 = None;
    let mut mat2 = None;
    let mut tmat = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
        let parsed = match key {
            "seed" => value
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad seed {value:?}")))?,
            "mat1" | "mat2" | "tmat" => u32::from_str_radix(value, 16)
                .map_err(|_| Error::Parse(format!("bad hex word {value:?}")))?,
            other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
        };
        match key {
            "seed" => seed = Some(parsed),
            "mat1" => mat1 = Some(parsed),
            "mat2" => mat2 = Some(parsed),
            _ => tmat = Some(parsed),
        }
    }
    let params = TinyMtParams {
        seed: seed.ok_or_else(|| Error::Parse("header missing seed".into()))?,
        mat1: mat1.ok_or_else(|| Error::Parse("header missing mat1".into()))?,
        mat2: mat2.ok_or_else(|| Error::Parse("header missing mat2".into()))?,
        tmat: tmat.ok_or_else(|| Error::Parse("header missing tmat".into()))?,
    };
    let words = lines
        .map(|l| {
            u32::from_str_radix(l.trim(), 16)
                .map_err(|_| Error::Parse(format!("bad fixture word {l:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(TinyMtFixture { params, words })
}
