//! Small-ensemble quantum detection: random keyed frames, square-root
//! measurement success, and the binary Helstrom cross-check.

use num_complex::Complex64;
use rand_chacha::rand_core::RngCore;
use serde_json::json;

use y00lab::channel::overlap;
use y00lab::qdetect::{helstrom_binary, srm_success, GramEnsemble};

use crate::config;
use crate::{streams, CommonArgs, CmdResult};

/// Gram feasibility guard; beyond this the dense eigenproblem is the wrong
/// tool.
const MAX_K: u32 = 64;
const MAX_T: u32 = 16;

pub fn run(args: &CommonArgs) -> CmdResult {
    let (cfg, resolved) = config::resolve(args)?;
    let dir = config::out_dir(args)?;
    let k = cfg.qdetect.k;
    let t = cfg.qdetect.t;
    if k < 2 {
        return Err(format!("qdetect.k = {k} needs at least two hypotheses"));
    }
    if k > MAX_K || t > MAX_T {
        return Err(format!(
            "ensemble {k} hypotheses x {t} slots exceeds the guard (K <= {MAX_K}, T <= {MAX_T})"
        ));
    }
    let constellation = cfg.build_constellation()?;
    let size = constellation.size();

    // Each hypothesis is one candidate key's frame: T independent uniform
    // constellation states. The state count is a power of two, so masking
    // the generator word is bias-free.
    let mut rng = streams::substream(cfg.master_seed, "ensemble");
    let mut frames: Vec<Vec<Complex64>> = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let mut frame = Vec::with_capacity(t as usize);
        for _ in 0..t {
            let idx = rng.next_u32() & (size - 1);
            frame.push(constellation.amplitude(idx).map_err(|e| e.to_string())?);
        }
        frames.push(frame);
    }

    let ensemble = GramEnsemble::from_frames(&frames, cfg.eta, cfg.qdetect.priors.as_deref())
        .map_err(|e| e.to_string())?;
    let detection = srm_success(&ensemble).map_err(|e| e.to_string())?;

    // At K=2 the Helstrom bound is closed-form; report it next to the SRM
    // value (they coincide for two pure states).
    let helstrom = if k == 2 {
        let ov: Complex64 = frames[0]
            .iter()
            .zip(&frames[1])
            .map(|(&a, &b)| overlap(a * cfg.eta, b * cfg.eta))
            .product();
        let p = &detection.priors;
        Some(helstrom_binary(p[0], p[1], ov.norm_sqr()).map_err(|e| e.to_string())?)
    } else {
        None
    };

    let report = json!({
        "command": "qdetect",
        "k": k,
        "t": t,
        "success": detection.success,
        "margin": detection.margin,
        "per_hypothesis": detection.per_hypothesis,
        "priors": detection.priors,
        "helstrom": helstrom,
    });
    super::write_run(
        &dir,
        "qdetect",
        cfg.master_seed,
        resolved,
        report,
        &[("detection.csv", detection.to_csv_string())],
    )?;
    println!(
        "qdetect: K={k} T={t} success {:.12} margin {:.3e}",
        detection.success, detection.margin
    );
    Ok(0)
}
