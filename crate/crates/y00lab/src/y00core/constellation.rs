//! Coherent-state signal sets. A constellation holds the 2M transmit
//! amplitudes indexed by the encoded state `m`; basis pairs are `{m, m+M}`,
//! so the two members of a pair carry opposite data bits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Phase keying: `alpha_m = alpha0 * exp(i*pi*m/M)`, 2M points on a ring.
    Phase,
    /// Intensity keying: 2M real amplitudes with equally spaced intensities.
    Intensity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    m: u32,
    scheme: Scheme,
    amplitudes: Vec<Complex64>,
}

impl Constellation {
    /// Phase scheme with ring amplitude `alpha0 > 0`.
    pub fn phase(m: u32, alpha0: f64) -> Result<Constellation> {
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { what: "M", value: m as u64 });
        }
        if !(alpha0 > 0.0) || !alpha0.is_finite() {
            return Err(Error::Domain(format!("alpha0 = {alpha0} must be positive")));
        }
        let n = 2 * m;
        let amplitudes = (0..n)
            .map(|k| {
                let theta = std::f64::consts::PI * k as f64 / m as f64;
                Complex64::from_polar(alpha0, theta)
            })
            .collect();
        Ok(Constellation { m, scheme: Scheme::Phase, amplitudes })
    }

    /// Intensity scheme: photon numbers linear from `alpha_lo^2` to
    /// `alpha_hi^2` over the 2M levels, amplitudes real and ascending.
    pub fn intensity(m: u32, alpha_lo: f64, alpha_hi: f64) -> Result<Constellation> {
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { what: "M", value: m as u64 });
        }
        if !(0.0 <= alpha_lo && alpha_lo < alpha_hi) || !alpha_hi.is_finite() {
            return Err(Error::Domain(format!(
                "need 0 <= alpha_lo < alpha_hi, got {alpha_lo}, {alpha_hi}"
            )));
        }
        let n = 2 * m;
        let lo = alpha_lo * alpha_lo;
        let hi = alpha_hi * alpha_hi;
        let amplitudes = (0..n)
            .map(|k| {
                let intensity = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                Complex64::new(intensity.sqrt(), 0.0)
            })
            .collect();
        Ok(Constellation { m, scheme: Scheme::Intensity, amplitudes })
    }

    pub fn half_size(&self) -> u32 {
        self.m
    }

    /// Number of signal states, `2M`.
    pub fn size(&self) -> u32 {
        2 * self.m
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn amplitude(&self, index: u32) -> Result<Complex64> {
        self.amplitudes
            .get(index as usize)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, size: self.size() })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn phase_ring_geometry() {
        let c = Constellation::phase(8, 3.0).unwrap();
        assert_eq!(c.size(), 16);
        for k in 0..16 {
            let a = c.amplitude(k).unwrap();
            assert_abs_diff_eq!(a.norm(), 3.0, epsilon = 1e-12);
        }
        // Basis partners sit diametrically opposite.
        for k in 0..8 {
            let a = c.amplitude(k).unwrap();
            let b = c.amplitude(k + 8).unwrap();
            assert_abs_diff_eq!((a + b).norm(), 0.0, epsilon = 1e-12);
        }
        assert!(c.amplitude(16).is_err());
    }

    #[test]
    fn phase_points_distinct() {
        let c = Constellation::phase(16, 1.0).unwrap();
        for i in 0..c.size() {
            for j in (i + 1)..c.size() {
                let d = (c.amplitude(i).unwrap() - c.amplitude(j).unwrap()).norm();
                assert!(d > 1e-9, "states {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn intensity_levels_ascend() {
        let c = Constellation::intensity(4, 1.0, 3.0).unwrap();
        let amps = c.amplitudes();
        assert_eq!(amps.len(), 8);
        assert_abs_diff_eq!(amps[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(amps[7].re, 3.0, epsilon = 1e-12);
        for w in amps.windows(2) {
            assert!(w[0].re < w[1].re);
            assert_eq!(w[0].im, 0.0);
        }
        // Intensities are equally spaced.
        let step = amps[1].norm_sqr() - amps[0].norm_sqr();
        for w in amps.windows(2) {
            assert_abs_diff_eq!(w[1].norm_sqr() - w[0].norm_sqr(), step, epsilon = 1e-9);
        }
    }

    #[test]
    fn construction_validation() {
        assert!(Constellation::phase(3, 1.0).is_err());
        assert!(Constellation::phase(4, 0.0).is_err());
        assert!(Constellation::phase(4, f64::NAN).is_err());
        assert!(Constellation::intensity(4, 2.0, 1.0).is_err());
        assert!(Constellation::intensity(0, 0.0, 1.0).is_err());
    }
}
