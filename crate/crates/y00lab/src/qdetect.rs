//! Collective discrimination bounds for short frames of coherent states.
//!
//! The square-root (pretty-good) measurement needs only the Gram matrix of
//! the hypothesis states. For product states of per-slot coherent amplitudes
//! the Gram entries are products of pairwise overlaps, so frames of any
//! length reduce to a K x K Hermitian eigenproblem.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::channel::overlap;
use crate::error::{Error, Result};

/// Gram matrix of the hypothesis frames together with their priors.
#[derive(Debug, Clone)]
pub struct GramEnsemble {
    gram: DMatrix<Complex64>,
    priors: Vec<f64>,
}

fn validate_priors(priors: &[f64]) -> Result<()> {
    if priors.iter().any(|&p| !(p > 0.0) || p.is_nan()) {
        return Err(Error::InvalidPriors(format!("priors must be strictly positive: {priors:?}")));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPriors(format!("priors sum to {sum}, not 1")));
    }
    Ok(())
}

impl GramEnsemble {
    /// Build from K frames of per-slot amplitudes. Loss scales every
    /// amplitude by `eta` before the overlaps are taken; `priors = None`
    /// means uniform.
    pub fn from_frames(
        frames: &[Vec<Complex64>],
        eta: f64,
        priors: Option<&[f64]>,
    ) -> Result<GramEnsemble> {
        if frames.is_empty() {
            return Err(Error::Domain("need at least one hypothesis frame".into()));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("eta = {eta} outside [0, 1]")));
        }
        let t = frames[0].len();
        if frames.iter().any(|f| f.len() != t) {
            return Err(Error::LengthMismatch { expected: t, got: frames.iter().map(Vec::len).find(|&l| l != t).unwrap() });
        }
        let k = frames.len();
        let priors = match priors {
            Some(p) => {
                if p.len() != k {
                    return Err(Error::LengthMismatch { expected: k, got: p.len() });
                }
                validate_priors(p)?;
                p.to_vec()
            }
            None => vec![1.0 / k as f64; k],
        };
        let gram = DMatrix::from_fn(k, k, |i, j| {
            frames[i]
                .iter()
                .zip(&frames[j])
                .map(|(&a, &b)| overlap(a * eta, b * eta))
                .product()
        });
        Ok(GramEnsemble { gram, priors })
    }

    pub fn size(&self) -> usize {
        self.priors.len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> Complex64 {
        self.gram[(i, j)]
    }
}

/// Outcome of the square-root measurement over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub success: f64,
    pub per_hypothesis: Vec<f64>,
    pub priors: Vec<f64>,
    /// Advantage over blind-guessing the most likely hypothesis.
    pub margin: f64,
}

impl DetectionReport {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("hypothesis_index,prior,p_correct\n");
        for (i, (&p, &q)) in self.priors.iter().zip(&self.per_hypothesis).enumerate() {
            out.push_str(&format!("{i},{p:.17e},{q:.17e}\n"));
        }
        out.push_str("success_total,margin\n");
        out.push_str(&format!("{:.17e},{:.17e}\n", self.success, self.margin));
        out
    }
}

const EIG_CLIP: f64 = -1e-9;

/// Square-root measurement success probability.
///
/// With `Gt[i][j] = sqrt(p_i p_j) G[i][j]`, the total success probability is
/// `sum_i (sqrt(Gt)_ii)^2` and the conditional per-hypothesis rate divides
/// out the prior. Eigenvalues of `Gt` in `[-1e-9, 0)` are treated as the
/// rounding noise they are and clipped to zero; anything lower means the
/// input was not a Gram matrix.
pub fn srm_success(ensemble: &GramEnsemble) -> Result<DetectionReport> {
    let k = ensemble.size();
    let p = &ensemble.priors;
    let gt = DMatrix::from_fn(k, k, |i, j| ensemble.gram[(i, j)] * (p[i] * p[j]).sqrt());
    let eig = SymmetricEigen::new(gt);
    let mut roots = Vec::with_capacity(k);
    for &lambda in eig.eigenvalues.iter() {
        if lambda < EIG_CLIP {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: lambda });
        }
        roots.push(lambda.max(0.0).sqrt());
    }
    let mut per = Vec::with_capacity(k);
    let mut success = 0.0;
    for i in 0..k {
        // (sqrt(Gt))_ii = sum_k sqrt(lambda_k) |U_ik|^2
        let mut d = 0.0;
        for (kk, &r) in roots.iter().enumerate() {
            d += r * eig.eigenvectors[(i, kk)].norm_sqr();
        }
        success += d * d;
        per.push((d * d / p[i]).min(1.0));
    }
    // Near-orthogonal ensembles sum to within a few ulp of 1 and rounding
    // can land on either side; a probability must not be reported above 1.
    if success > 1.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "square-root measurement success {success} exceeds 1 beyond rounding tolerance"
        )));
    }
    let success = success.min(1.0);
    let margin = success - p.iter().cloned().fold(f64::NAN, f64::max);
    Ok(DetectionReport { success, per_hypothesis: per, priors: p.clone(), margin })
}

/// Optimal (Helstrom) success probability for two coherent hypotheses with
/// squared overlap `overlap_sq`.
pub fn helstrom_binary(p0: f64, p1: f64, overlap_sq: f64) -> Result<f64> {
    validate_priors(&[p0, p1])?;
    if !(0.0..=1.0).contains(&overlap_sq) {
        return Err(Error::InvalidProbability { value: overlap_sq });
    }
    Ok(0.5 * (1.0 + (1.0 - 4.0 * p0 * p1 * overlap_sq).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identical_frames_give_coin_flip() {
        let frames = vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]];
        let ens = GramEnsemble::from_frames(&frames, 1.0, None).unwrap();
        let rep = srm_success(&ens).unwrap();
        assert_abs_diff_eq!(rep.success, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.margin, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn binary_srm_equals_helstrom() {
        // Antipodal pair at alpha = 1: squared overlap e^{-4}.
        let frames = vec![vec![c(1.0, 0.0)], vec![c(-1.0, 0.0)]];
        let ens = GramEnsemble::from_frames(&frames, 1.0, None).unwrap();
        let rep = srm_success(&ens).unwrap();
        let hel = helstrom_binary(0.5, 0.5, (-4.0f64).exp()).unwrap();
        assert_abs_diff_eq!(rep.success, hel, epsilon = 1e-10);
        assert_abs_diff_eq!(hel, 0.9953999296304113, epsilon = 1e-12);

        // Loss shrinks the separation, never below chance.
        let lossy = GramEnsemble::from_frames(&frames, 0.5, None).unwrap();
        let r2 = srm_success(&lossy).unwrap();
        assert!(r2.success < rep.success);
        assert!(r2.success > 0.5);
        assert_abs_diff_eq!(
            r2.success,
            helstrom_binary(0.5, 0.5, (-1.0f64).exp()).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn far_separated_ensemble_stays_a_probability() {
        // Overlaps around e^{-58} are far below f64 resolution at 1, so the
        // eigensolver noise decides the last few ulp. The report must still
        // be a probability.
        let frames = vec![
            vec![c(3.8, 0.0), c(3.8, 0.0)],
            vec![c(-3.8, 0.0), c(-3.8, 0.0)],
            vec![c(0.0, 3.8), c(0.0, -3.8)],
        ];
        let ens = GramEnsemble::from_frames(&frames, 1.0, None).unwrap();
        let rep = srm_success(&ens).unwrap();
        assert!(rep.success <= 1.0);
        assert!(rep.per_hypothesis.iter().all(|&q| q <= 1.0));
        assert!(rep.success > 1.0 - 1e-9);
    }

    #[test]
    fn product_frames_multiply_overlaps() {
        let a = vec![c(0.4, 0.1), c(-0.3, 0.8)];
        let b = vec![c(-0.4, 0.7), c(0.2, 0.0)];
        let ens = GramEnsemble::from_frames(&[a.clone(), b.clone()], 0.9, None).unwrap();
        let manual = overlap(a[0] * 0.9, b[0] * 0.9) * overlap(a[1] * 0.9, b[1] * 0.9);
        let got = ens.gram_entry(0, 1);
        assert_abs_diff_eq!(got.re, manual.re, epsilon = 1e-15);
        assert_abs_diff_eq!(got.im, manual.im, epsilon = 1e-15);
        assert_abs_diff_eq!(ens.gram_entry(1, 1).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn per_hypothesis_rates_average_to_success() {
        let frames: Vec<Vec<Complex64>> = (0..4)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / 2.0;
                vec![c(th.cos(), th.sin()), c(-th.sin(), th.cos())]
            })
            .collect();
        let priors = [0.4, 0.3, 0.2, 0.1];
        let ens = GramEnsemble::from_frames(&frames, 1.0, Some(&priors)).unwrap();
        let rep = srm_success(&ens).unwrap();
        let avg: f64 = rep.priors.iter().zip(&rep.per_hypothesis).map(|(p, q)| p * q).sum();
        assert_abs_diff_eq!(rep.success, avg, epsilon = 1e-12);
        assert!(rep.success > 0.25 && rep.success <= 1.0);
        assert_abs_diff_eq!(rep.margin, rep.success - 0.4, epsilon = 1e-15);
    }

    #[test]
    fn stronger_signal_discriminates_better() {
        let mut last = 0.0;
        for &amp in &[0.2, 0.5, 1.0, 2.0] {
            let frames: Vec<Vec<Complex64>> = (0..8)
                .map(|k| {
                    let th = std::f64::consts::PI * k as f64 / 4.0;
                    vec![c(amp * th.cos(), amp * th.sin())]
                })
                .collect();
            let ens = GramEnsemble::from_frames(&frames, 1.0, None).unwrap();
            let s = srm_success(&ens).unwrap().success;
            assert!(s > last, "success {s} not above {last} at amp {amp}");
            last = s;
        }
    }

    #[test]
    fn input_validation() {
        let frames = vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]];
        assert!(GramEnsemble::from_frames(&[], 1.0, None).is_err());
        assert!(GramEnsemble::from_frames(&frames, 1.5, None).is_err());
        assert!(GramEnsemble::from_frames(&frames, 1.0, Some(&[0.5])).is_err());
        assert!(GramEnsemble::from_frames(&frames, 1.0, Some(&[0.7, 0.7])).is_err());
        assert!(GramEnsemble::from_frames(&frames, 1.0, Some(&[1.0, 0.0])).is_err());
        let ragged = vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]];
        assert!(GramEnsemble::from_frames(&ragged, 1.0, None).is_err());

        assert!(helstrom_binary(0.5, 0.5, 1.5).is_err());
        assert!(helstrom_binary(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn csv_shape() {
        let frames = vec![vec![c(1.0, 0.0)], vec![c(-1.0, 0.0)]];
        let ens = GramEnsemble::from_frames(&frames, 1.0, None).unwrap();
        let rep = srm_success(&ens).unwrap();
        let csv = rep.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "hypothesis_index,prior,p_correct");
        assert!(lines[1].starts_with("0,"));
        assert_eq!(lines[3], "success_total,margin");
        assert_eq!(lines.len(), 5);
    }
}
