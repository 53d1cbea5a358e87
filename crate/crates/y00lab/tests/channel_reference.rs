//! Monte Carlo heterodyne simulation against the analytic matrices.

use y00lab::channel::{confusion_matrix, confusion_matrix_monte_carlo, NoiseModel};
use y00lab::y00core::Constellation;

/// Every analytic entry sits within four binomial standard deviations of
/// its simulated frequency.
fn mc_agrees(constellation: &Constellation, eta: f64, samples: usize, seed: u64) {
    let noise = NoiseModel::heterodyne(eta).unwrap();
    let analytic = confusion_matrix(constellation, &noise).unwrap();
    let mc = confusion_matrix_monte_carlo(constellation, &noise, samples, seed);
    let n = constellation.size();
    for i in 0..n {
        for j in 0..n {
            let p = analytic.entry(i, j);
            let f = mc.entry(i, j);
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            let slack = 4.0 * sigma + 2.0 / samples as f64;
            assert!(
                (f - p).abs() <= slack,
                "entry ({i},{j}): analytic {p}, simulated {f}, allowance {slack}"
            );
        }
    }
}

#[test]
fn psk_eight_states_match_simulation() {
    let c = Constellation::phase(4, 0.8).unwrap();
    mc_agrees(&c, 1.0, 200_000, 41);
}

#[test]
fn psk_with_loss_matches_simulation() {
    let c = Constellation::phase(4, 1.1).unwrap();
    mc_agrees(&c, 0.8, 200_000, 97);
}

#[test]
fn intensity_ladder_matches_simulation() {
    let c = Constellation::intensity(4, 0.6, 2.2).unwrap();
    mc_agrees(&c, 0.9, 200_000, 7);
}
