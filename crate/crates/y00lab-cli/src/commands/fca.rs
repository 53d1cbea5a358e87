//! Correlation-attack analysis of a configured channel: build or load the
//! error-pattern distribution, run the bound machinery, exit 2 on any
//! security-violating verdict.

use serde_json::json;

use y00lab::channel::{
    aggregate_error_dist, confusion_matrix, confusion_matrix_monte_carlo, error_pattern_dist,
    ErrorPatternDist, NoiseModel,
};
use y00lab::fca::{analyze, AnalyzeConfig, Verdict};

use crate::config::{self, ExperimentConfig};
use crate::{streams, CommonArgs, CmdResult};

pub fn exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Satisfied | Verdict::Satisfiable => 0,
        Verdict::ClassicallyBroken | Verdict::Infeasible | Verdict::Violated => 2,
    }
}

/// Mixture over plaintext bit and transmitted state, uniform weights.
fn channel_dist(cfg: &ExperimentConfig) -> Result<(ErrorPatternDist, Vec<f64>, Vec<f64>), String> {
    let map = cfg.build_mapping()?;
    let constellation = cfg.build_constellation()?;
    let noise = NoiseModel::heterodyne(cfg.eta).map_err(|e| e.to_string())?;
    let pm = confusion_matrix(&constellation, &noise).map_err(|e| e.to_string())?;
    let mut dists = Vec::new();
    for x in 0..2u8 {
        for m_sent in 0..constellation.size() {
            dists.push(error_pattern_dist(&pm, &map, x, m_sent).map_err(|e| e.to_string())?);
        }
    }
    let w = 1.0 / dists.len() as f64;
    let agg = aggregate_error_dist(&dists, &vec![w; dists.len()]).map_err(|e| e.to_string())?;
    Ok((agg.dist, agg.min_envelope, agg.max_envelope))
}

struct DistChoice {
    dist: Option<ErrorPatternDist>,
    source: &'static str,
    envelope: Option<(Vec<f64>, Vec<f64>)>,
}

fn resolve_dist(cfg: &ExperimentConfig) -> Result<DistChoice, String> {
    let width = cfg.pattern_width();
    match &cfg.fca.dist {
        serde_json::Value::String(s) if s == "channel" => {
            let (dist, lo, hi) = channel_dist(cfg)?;
            Ok(DistChoice { dist: Some(dist), source: "channel", envelope: Some((lo, hi)) })
        }
        serde_json::Value::String(s) if s == "uniform" => Ok(DistChoice {
            dist: Some(ErrorPatternDist::uniform(width)),
            source: "uniform",
            envelope: None,
        }),
        serde_json::Value::String(s) if s == "none" => {
            Ok(DistChoice { dist: None, source: "none", envelope: None })
        }
        serde_json::Value::Array(items) => {
            let p: Vec<f64> = items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| format!("fca.dist entry {v} is not a number")))
                .collect::<Result<_, _>>()?;
            let dist =
                ErrorPatternDist::from_probs(width, p, None).map_err(|e| e.to_string())?;
            Ok(DistChoice { dist: Some(dist), source: "explicit", envelope: None })
        }
        other => Err(format!(
            "fca.dist must be \"channel\", \"uniform\", \"none\", or a probability array, got {other}"
        )),
    }
}

/// Monte Carlo cross-check of the analytic confusion matrix, when samples
/// are budgeted.
fn mc_check(cfg: &ExperimentConfig) -> Result<Option<serde_json::Value>, String> {
    if cfg.mc_samples == 0 {
        return Ok(None);
    }
    let constellation = cfg.build_constellation()?;
    let noise = NoiseModel::heterodyne(cfg.eta).map_err(|e| e.to_string())?;
    let analytic = confusion_matrix(&constellation, &noise).map_err(|e| e.to_string())?;
    let per_state = (cfg.mc_samples / u64::from(constellation.size())).max(1) as usize;
    let mut seed_rng = streams::substream(cfg.master_seed, "mc-check");
    let seed = rand_chacha::rand_core::RngCore::next_u64(&mut seed_rng);
    let mc = confusion_matrix_monte_carlo(&constellation, &noise, per_state, seed);
    let mut max_abs_diff = 0.0f64;
    for i in 0..analytic.size() {
        for j in 0..analytic.size() {
            max_abs_diff = max_abs_diff.max((analytic.entry(i, j) - mc.entry(i, j)).abs());
        }
    }
    Ok(Some(json!({
        "samples_per_state": per_state,
        "max_abs_diff": max_abs_diff,
    })))
}

pub fn run(args: &CommonArgs) -> CmdResult {
    let (cfg, resolved) = config::resolve(args)?;
    let dir = config::out_dir(args)?;
    let choice = resolve_dist(&cfg)?;
    let analyze_cfg = AnalyzeConfig {
        width: cfg.pattern_width(),
        n_slots: cfg.n_slots()?,
        log2_epsilon: cfg.epsilon_log2,
        acceptance: cfg.fca.acceptance.clone(),
        prior_log2_ratio: cfg.fca.prior_log2_ratio,
        precision_bits: config::precision_bits()?,
    };
    let report = analyze(choice.dist.as_ref(), &analyze_cfg).map_err(|e| e.to_string())?;
    let code = exit_code(report.verdict);

    let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    let obj = value.as_object_mut().expect("analysis report is an object");
    obj.insert("command".into(), json!("fca"));
    obj.insert("dist_source".into(), json!(choice.source));
    if let Some((lo, hi)) = &choice.envelope {
        obj.insert("dist_envelope".into(), json!({ "min": lo, "max": hi }));
    }
    obj.insert(
        "mc_check".into(),
        mc_check(&cfg)?.unwrap_or(serde_json::Value::Null),
    );

    let mut csvs: Vec<(&str, String)> = vec![("per_pattern.csv", report.per_pattern_csv())];
    if let Some(d) = &choice.dist {
        csvs.push(("dist.csv", d.to_csv_string()));
    }
    super::write_run(&dir, "fca", cfg.master_seed, resolved, value, &csvs)?;
    println!(
        "fca: verdict {}",
        serde_json::to_value(report.verdict).expect("verdict serializes").as_str().unwrap()
    );
    Ok(code)
}
