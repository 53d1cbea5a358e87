//! State confusion under heterodyne detection.
//!
//! Heterodyne on a coherent state |a> yields a complex point y = a + g with
//! g circularly Gaussian, variance 1/2 per quadrature. The eavesdropper's
//! maximum-likelihood rule is nearest transmitted amplitude. For the phase
//! scheme that reduces to angular sectors and the marginal angle density
//!
//! p(theta) = e^{-s^2}/(2pi) + u/(2 sqrt(pi)) * e^{-s^2 sin^2 theta} * (1 + erf u),
//!
//! with s the (loss-scaled) ring amplitude and u = s cos theta; sector
//! integrals are evaluated by adaptive Simpson quadrature. For the intensity
//! scheme the decision is 1-D Gaussian with midpoint thresholds and the
//! entries are erfc differences in closed form.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::y00core::{Constellation, Scheme};

/// Lossy heterodyne channel: amplitude transmittance `eta` applied to the
/// nominal amplitudes before the unit-variance measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    eta: f64,
}

impl NoiseModel {
    pub fn heterodyne(eta: f64) -> Result<NoiseModel> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("eta = {eta} outside [0, 1]")));
        }
        Ok(NoiseModel { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// One heterodyne draw from state `alpha`.
pub fn heterodyne_sample<R: Rng + ?Sized>(alpha: Complex64, rng: &mut R) -> Complex64 {
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    alpha + Complex64::new(g1, g2) / 2f64.sqrt()
}

/// Nearest-amplitude decision among the `eta`-scaled constellation points.
/// Ties resolve to the lowest index.
pub fn ml_decide(constellation: &Constellation, eta: f64, y: Complex64) -> u32 {
    let mut best = 0u32;
    let mut best_d = f64::INFINITY;
    for (j, &a) in constellation.amplitudes().iter().enumerate() {
        let d = (y - a * eta).norm_sqr();
        if d < best_d {
            best_d = d;
            best = j as u32;
        }
    }
    best
}

/// Row-stochastic `2M x 2M` matrix: `P[i][j] = Pr(decide j | sent i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    size: u32,
    p: Vec<f64>,
}

impl ConfusionMatrix {
    fn from_rows(size: u32, p: Vec<f64>) -> ConfusionMatrix {
        debug_assert_eq!(p.len(), (size * size) as usize);
        ConfusionMatrix { size, p }
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn entry(&self, i: u32, j: u32) -> f64 {
        self.p[(i * self.size + j) as usize]
    }

    pub fn row(&self, i: u32) -> &[f64] {
        let s = self.size as usize;
        &self.p[i as usize * s..(i as usize + 1) * s]
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.size)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn one_plus_erf(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 + libm::erf(u)
    } else {
        libm::erfc(-u)
    }
}

/// Marginal angle density of the heterodyne outcome for ring amplitude `s`
/// at mean angle zero.
fn angle_density(s: f64, theta: f64) -> f64 {
    let c = theta.cos();
    let u = s * c;
    let sin2 = (1.0 - c * c).max(0.0);
    let t1 = (-s * s).exp() / (2.0 * std::f64::consts::PI);
    let t2 = u / (2.0 * std::f64::consts::PI.sqrt()) * (-s * s * sin2).exp() * one_plus_erf(u);
    (t1 + t2).max(0.0)
}

struct Quad {
    value: f64,
    err: f64,
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    out: &mut Quad,
) {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        out.value += left + right + delta / 15.0;
        out.err += delta.abs() / 15.0;
        return;
    }
    adapt(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1, out);
    adapt(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1, out);
}

/// Adaptive Simpson quadrature with absolute target `eps`.
fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> Quad {
    let mut out = Quad { value: 0.0, err: 0.0 };
    // Pre-split so narrow features inside wide sectors are not missed.
    let panels = 8;
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let pa = a + k as f64 * h;
        let pb = pa + h;
        let fa = f(pa);
        let fb = f(pb);
        let (m, fm, whole) = simpson(f, pa, fa, pb, fb);
        adapt(f, pa, fa, pb, fb, m, fm, whole, eps / panels as f64, 48, &mut out);
    }
    out
}

const ENTRY_TOL: f64 = 1e-10;

fn phase_confusion(constellation: &Constellation, eta: f64) -> Result<ConfusionMatrix> {
    let n = constellation.size();
    let m = constellation.half_size() as f64;
    let s = constellation.amplitudes()[0].norm() * eta;
    let f = |theta: f64| angle_density(s, theta);
    // Sector widths pi/M around each state angle; row 0 computed once, the
    // ring symmetry gives every other row by rotation.
    let mut row0 = Vec::with_capacity(n as usize);
    let half_w = std::f64::consts::PI / (2.0 * m);
    let mut err_total = 0.0;
    for j in 0..n {
        let center = std::f64::consts::PI * j as f64 / m;
        let q = integrate(&f, center - half_w, center + half_w, 1e-13);
        err_total += q.err;
        row0.push(q.value);
    }
    if err_total > ENTRY_TOL {
        return Err(Error::QuadratureTolerance { residual: err_total });
    }
    let mut p = vec![0.0; (n * n) as usize];
    for i in 0..n {
        for j in 0..n {
            p[(i * n + j) as usize] = row0[((j + n - i) % n) as usize];
        }
    }
    Ok(ConfusionMatrix::from_rows(n, p))
}

fn intensity_confusion(constellation: &Constellation, eta: f64) -> Result<ConfusionMatrix> {
    let n = constellation.size() as usize;
    let means: Vec<f64> = constellation.amplitudes().iter().map(|a| a.re * eta).collect();
    // sigma = 1/sqrt(2) per quadrature; Phi((t - mu)/sigma) = erfc(-(t-mu))/2
    // after absorbing sigma*sqrt(2) = 1.
    let phi = |z: f64| 0.5 * libm::erfc(-z);
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        let mut prev = 0.0;
        for j in 0..n {
            let upper = if j + 1 < n {
                phi(0.5 * (means[j] + means[j + 1]) - means[i])
            } else {
                1.0
            };
            p[i * n + j] = (upper - prev).max(0.0);
            prev = upper;
        }
    }
    Ok(ConfusionMatrix::from_rows(n as u32, p))
}

/// Analytic confusion matrix for ML heterodyne reception through loss
/// `noise.eta()`. Rows sum to 1 within 1e-9 by construction, not by
/// renormalization.
pub fn confusion_matrix(
    constellation: &Constellation,
    noise: &NoiseModel,
) -> Result<ConfusionMatrix> {
    let cm = match constellation.scheme() {
        Scheme::Phase => phase_confusion(constellation, noise.eta())?,
        Scheme::Intensity => intensity_confusion(constellation, noise.eta())?,
    };
    let worst = cm.max_row_sum_error();
    if worst > 1e-9 {
        return Err(Error::QuadratureTolerance { residual: worst });
    }
    Ok(cm)
}

/// Monte Carlo confusion matrix by simulated heterodyne + ML decisions;
/// deterministic in `seed`. Cross-validation path for [`confusion_matrix`].
pub fn confusion_matrix_monte_carlo(
    constellation: &Constellation,
    noise: &NoiseModel,
    samples_per_state: usize,
    seed: u64,
) -> ConfusionMatrix {
    let n = constellation.size();
    let mut p = vec![0.0; (n * n) as usize];
    for i in 0..n {
        let mut rng =
            ChaCha12Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1)));
        let alpha = constellation.amplitudes()[i as usize] * noise.eta();
        for _ in 0..samples_per_state {
            let y = heterodyne_sample(alpha, &mut rng);
            let j = ml_decide(constellation, noise.eta(), y);
            p[(i * n + j) as usize] += 1.0;
        }
        for j in 0..n {
            p[(i * n + j) as usize] /= samples_per_state as f64;
        }
    }
    ConfusionMatrix::from_rows(n, p)
}
