//! Error-pattern distributions seen by a known-plaintext eavesdropper.
//!
//! A pattern is w = 1 + log2(M) bits wide: the low log2(M) bits are the XOR
//! between the decoded and true basis symbols, the top bit is the running-key
//! refresh bit error. Pattern 0 is the error-free event.

use serde::Serialize;

use crate::channel::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::y00core::{encode_slot, invert_slot, MappingTable};

/// Which slot a conditional distribution was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditioningTag {
    pub x: u8,
    pub m_sent: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorPatternDist {
    width: u32,
    p: Vec<f64>,
    tag: Option<ConditioningTag>,
}

impl ErrorPatternDist {
    pub fn from_probs(width: u32, p: Vec<f64>, tag: Option<ConditioningTag>) -> Result<ErrorPatternDist> {
        if width == 0 || width > 24 {
            return Err(Error::Domain(format!("pattern width {width} outside 1..=24")));
        }
        if p.len() != 1usize << width {
            return Err(Error::LengthMismatch { expected: 1 << width, got: p.len() });
        }
        for &v in &p {
            if !(0.0..=1.0 + 1e-12).contains(&v) || v.is_nan() {
                return Err(Error::InvalidProbability { value: v });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("pattern probabilities sum to {sum}, not 1")));
        }
        Ok(ErrorPatternDist { width, p, tag })
    }

    /// All 2^w patterns equally likely. The distribution an attacker faces
    /// when the cipher leaks nothing.
    pub fn uniform(width: u32) -> ErrorPatternDist {
        let n = 1usize << width;
        ErrorPatternDist { width, p: vec![1.0 / n as f64; n], tag: None }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prob(&self, pattern: u32) -> f64 {
        self.p[pattern as usize]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn tag(&self) -> Option<ConditioningTag> {
        self.tag
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("pattern_bits,probability\n");
        for (e, &v) in self.p.iter().enumerate() {
            out.push_str(&format!("{:0w$b},{:.17e}\n", e, v, w = self.width as usize));
        }
        out
    }
}

/// Distribution of `(basis XOR, refresh-bit XOR)` conditioned on plaintext
/// `x` and transmitted state `m_sent`, induced by a confusion matrix.
/// This is a row of the matrix re-indexed by pattern, so it sums to 1
/// exactly as well as the row does.
pub fn error_pattern_dist(
    pm: &ConfusionMatrix,
    map: &MappingTable,
    x: u8,
    m_sent: u32,
) -> Result<ErrorPatternDist> {
    let m = map.half_size();
    if pm.size() != 2 * m {
        return Err(Error::LengthMismatch { expected: (2 * m) as usize, got: pm.size() as usize });
    }
    if m_sent >= 2 * m {
        return Err(Error::SymbolOutOfRange { symbol: m_sent, m: 2 * m });
    }
    if x > 1 {
        return Err(Error::Domain(format!("plaintext bit {x} not in {{0, 1}}")));
    }
    let log2m = m.trailing_zeros();
    let width = 1 + log2m;
    let (s_true, dx_true) = invert_slot(m_sent, x, map)?;
    let mut p = vec![0.0; 1 << width];
    for (e, slot) in p.iter_mut().enumerate() {
        let e_s = e as u32 & (m - 1);
        let e_dx = (e as u32 >> log2m) as u8;
        let m_read = encode_slot(s_true ^ e_s, x, dx_true ^ e_dx, map)?;
        *slot = pm.entry(m_sent, m_read);
    }
    ErrorPatternDist::from_probs(width, p, Some(ConditioningTag { x, m_sent }))
}

/// Weighted mixture of conditional pattern distributions plus the
/// per-pattern min/max envelope over the inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedDist {
    pub dist: ErrorPatternDist,
    pub min_envelope: Vec<f64>,
    pub max_envelope: Vec<f64>,
}

pub fn aggregate_error_dist(dists: &[ErrorPatternDist], weights: &[f64]) -> Result<AggregatedDist> {
    if dists.is_empty() {
        return Err(Error::Domain("no distributions to aggregate".into()));
    }
    if dists.len() != weights.len() {
        return Err(Error::LengthMismatch { expected: dists.len(), got: weights.len() });
    }
    let width = dists[0].width();
    if dists.iter().any(|d| d.width() != width) {
        return Err(Error::WeightMismatch("pattern widths differ across inputs".into()));
    }
    if weights.iter().any(|&w| w < 0.0 || w.is_nan()) {
        return Err(Error::WeightMismatch("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::WeightMismatch(format!("weights sum to {total}, not 1")));
    }
    let n = 1usize << width;
    let mut avg = vec![0.0; n];
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for (d, &w) in dists.iter().zip(weights) {
        for e in 0..n {
            let v = d.prob(e as u32);
            avg[e] += w * v;
            lo[e] = lo[e].min(v);
            hi[e] = hi[e].max(v);
        }
    }
    Ok(AggregatedDist {
        dist: ErrorPatternDist::from_probs(width, avg, None)?,
        min_envelope: lo,
        max_envelope: hi,
    })
}
