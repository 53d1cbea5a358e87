//! Experiment configuration: one JSON file, flag overrides on top.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::path::Path;

use y00lab::hp::{DEFAULT_PRECISION_BITS, MIN_SOLVER_PRECISION_BITS};
use y00lab::keystream::{lcm_period, lfsr_max_period, tinymt32_period, PrngKind};
use y00lab::y00core::{Constellation, MappingTable};

use crate::CommonArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    #[default]
    Phase,
    Intensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    /// Finite run of `slots` transmission slots.
    #[default]
    Slots,
    /// Attack horizon: the exact LCM of the generator periods, in slots.
    Lcm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct FcaSection {
    /// Error-pattern source: "channel" (analytic from the constellation),
    /// "uniform", "none" (budget-only view), or an explicit probability
    /// array over all 2^w patterns.
    #[serde(default = "default_dist")]
    pub dist: serde_json::Value,
    /// Acceptance fraction per nonzero pattern; null means uniform 1/2^w.
    #[serde(default)]
    pub acceptance: Option<Vec<f64>>,
    #[serde(default)]
    pub prior_log2_ratio: f64,
}

fn default_dist() -> serde_json::Value {
    serde_json::Value::String("channel".into())
}

impl Default for FcaSection {
    fn default() -> Self {
        FcaSection { dist: default_dist(), acceptance: None, prior_log2_ratio: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct QdetectSection {
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default = "default_frame_slots")]
    pub t: u32,
    /// Hypothesis priors; null means uniform.
    #[serde(default)]
    pub priors: Option<Vec<f64>>,
}

fn default_k() -> u32 {
    8
}
fn default_frame_slots() -> u32 {
    3
}

impl Default for QdetectSection {
    fn default() -> Self {
        QdetectSection { k: default_k(), t: default_frame_slots(), priors: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct RegisterSpec {
    pub length: usize,
    pub taps: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct BreakSection {
    #[serde(default = "default_registers")]
    pub registers: Vec<RegisterSpec>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    /// Observed keystream bits per trial; null means twice the register
    /// length.
    #[serde(default)]
    pub observed_bits: Option<usize>,
}

fn default_registers() -> Vec<RegisterSpec> {
    vec![
        RegisterSpec { length: 8, taps: vec![8, 6, 5, 4] },
        RegisterSpec { length: 16, taps: vec![16, 15, 13, 4] },
        RegisterSpec { length: 24, taps: vec![24, 23, 22, 17] },
    ]
}

fn default_trials() -> u32 {
    100
}

impl Default for BreakSection {
    fn default() -> Self {
        BreakSection {
            registers: default_registers(),
            trials: default_trials(),
            observed_bits: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct ExperimentConfig {
    /// Half-size M: the constellation carries 2M states.
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default = "default_alpha0")]
    pub alpha0: f64,
    /// Upper amplitude of the intensity ladder (intensity scheme only).
    #[serde(default)]
    pub alpha_hi: Option<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// "identity", "random:<seed>", or a mapping file path.
    #[serde(default = "default_mapping")]
    pub mapping: String,
    #[serde(default = "default_prng")]
    pub prng: PrngKind,
    /// Seed words for the basis and randomization streams.
    #[serde(default = "default_key")]
    pub key: u64,
    #[serde(default = "default_key")]
    pub dkey: u64,
    #[serde(default = "default_key")]
    pub master_seed: u64,
    #[serde(default)]
    pub horizon: Horizon,
    #[serde(default = "default_slots")]
    pub slots: u64,
    /// log2 of the tolerated attack success probability epsilon.
    #[serde(default = "default_eps")]
    pub epsilon_log2: f64,
    #[serde(default = "default_mc")]
    pub mc_samples: u64,
    #[serde(default)]
    pub fca: FcaSection,
    #[serde(default)]
    pub qdetect: QdetectSection,
    #[serde(default)]
    pub classical_break: BreakSection,
}

fn default_m() -> u32 {
    16
}
fn default_alpha0() -> f64 {
    1.0
}
fn default_eta() -> f64 {
    1.0
}
fn default_mapping() -> String {
    "identity".into()
}
fn default_prng() -> PrngKind {
    PrngKind::Lfsr { length: 16, taps: vec![16, 15, 13, 4] }
}
fn default_key() -> u64 {
    1
}
fn default_slots() -> u64 {
    1000
}
fn default_eps() -> f64 {
    -64.0
}
fn default_mc() -> u64 {
    100_000
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::Value::Object(Default::default()))
            .expect("empty config deserializes through the defaults")
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.m == 0 || !self.m.is_power_of_two() {
            return Err(format!("m = {} must be a power of two", self.m));
        }
        if self.m > 1 << 23 {
            return Err(format!("m = {} leaves no room for the parity bit", self.m));
        }
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(format!("alpha0 = {} must be positive and finite", self.alpha0));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(format!("eta = {} outside [0, 1]", self.eta));
        }
        if self.scheme == SchemeName::Intensity {
            match self.alpha_hi {
                None => return Err("intensity scheme needs alpha_hi".into()),
                Some(hi) if !(hi > self.alpha0 && hi.is_finite()) => {
                    return Err(format!(
                        "alpha_hi = {hi} must exceed alpha0 = {}",
                        self.alpha0
                    ));
                }
                _ => {}
            }
        }
        if !(self.epsilon_log2 < 0.0 && self.epsilon_log2.is_finite()) {
            return Err(format!(
                "epsilon_log2 = {} must be negative (epsilon strictly inside (0, 1))",
                self.epsilon_log2
            ));
        }
        if self.slots > 100_000_000 {
            return Err(format!("slots = {} exceeds the simulation cap of 1e8", self.slots));
        }
        Ok(())
    }

    /// Pattern width in bits: log2 of the state count 2M.
    pub fn pattern_width(&self) -> u32 {
        self.m.trailing_zeros() + 1
    }

    pub fn build_constellation(&self) -> Result<Constellation, String> {
        match self.scheme {
            SchemeName::Phase => {
                Constellation::phase(self.m, self.alpha0).map_err(|e| e.to_string())
            }
            SchemeName::Intensity => Constellation::intensity(
                self.m,
                self.alpha0,
                self.alpha_hi.expect("validated above"),
            )
            .map_err(|e| e.to_string()),
        }
    }

    pub fn build_mapping(&self) -> Result<MappingTable, String> {
        if self.mapping == "identity" {
            return MappingTable::identity(self.m).map_err(|e| e.to_string());
        }
        if let Some(seed) = self.mapping.strip_prefix("random:") {
            let seed: u64 = seed
                .parse()
                .map_err(|_| format!("mapping {:?}: bad random seed", self.mapping))?;
            return MappingTable::random(self.m, seed).map_err(|e| e.to_string());
        }
        let text = std::fs::read_to_string(&self.mapping)
            .map_err(|e| format!("mapping file {:?}: {e}", self.mapping))?;
        let map = MappingTable::parse(&text).map_err(|e| e.to_string())?;
        if map.half_size() != self.m {
            return Err(format!(
                "mapping file is for M = {}, config says M = {}",
                map.half_size(),
                self.m
            ));
        }
        Ok(map)
    }

    /// Slot count of the analysis horizon.
    pub fn n_slots(&self) -> Result<BigUint, String> {
        match self.horizon {
            Horizon::Slots => Ok(BigUint::from(self.slots)),
            Horizon::Lcm => {
                let period = match &self.prng {
                    PrngKind::Lfsr { length, .. } => lfsr_max_period(*length),
                    PrngKind::TinyMt32 { .. } => tinymt32_period(),
                };
                let (_, n) = lcm_period(&[period.clone(), period], self.m)
                    .map_err(|e| e.to_string())?;
                Ok(n)
            }
        }
    }
}

/// Solver precision from the environment, default 192 fractional bits.
pub fn precision_bits() -> Result<u32, String> {
    match std::env::var("Y00LAB_PRECISION_BITS") {
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
        Ok(v) => {
            let bits: u32 = v
                .parse()
                .map_err(|_| format!("Y00LAB_PRECISION_BITS = {v:?} is not a bit count"))?;
            if bits < MIN_SOLVER_PRECISION_BITS {
                return Err(format!(
                    "Y00LAB_PRECISION_BITS = {bits} below the solver minimum {MIN_SOLVER_PRECISION_BITS}"
                ));
            }
            Ok(bits)
        }
    }
}

fn apply_override(root: &mut serde_json::Value, spec: &str) -> Result<(), String> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| format!("override {spec:?} is not key=value"))?;
    if path.is_empty() {
        return Err(format!("override {spec:?} has an empty key"));
    }
    // A value that parses as JSON is taken typed; anything else is a string.
    let value: serde_json::Value =
        serde_json::from_str(raw).unwrap_or(serde_json::Value::String(raw.to_string()));
    let mut cursor = root;
    let mut parts = path.split('.').peekable();
    while let Some(part) = parts.next() {
        let obj = cursor
            .as_object_mut()
            .ok_or_else(|| format!("override {spec:?}: {part:?} is not inside an object"))?;
        if parts.peek().is_none() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cursor = obj
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one part");
}

/// Load the config file (or defaults), apply `--override` pairs, then
/// `--seed`. Returns the typed config plus the resolved JSON for the
/// manifest.
pub fn resolve(args: &CommonArgs) -> Result<(ExperimentConfig, serde_json::Value), String> {
    let mut value = match &args.config {
        None => serde_json::Value::Object(Default::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("config {:?}: {e}", path))?;
            serde_json::from_str(&text).map_err(|e| format!("config {:?}: {e}", path))?
        }
    };
    if !value.is_object() {
        return Err("config root must be a JSON object".into());
    }
    for spec in &args.overrides {
        apply_override(&mut value, spec)?;
    }
    let mut config: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| format!("config: {e}"))?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    let resolved = serde_json::to_value(&config).expect("config reserializes");
    Ok((config, resolved))
}

/// Output directory, created if needed.
pub fn out_dir(args: &CommonArgs) -> Result<std::path::PathBuf, String> {
    let dir = args.out.clone().unwrap_or_else(|| Path::new(".").to_path_buf());
    std::fs::create_dir_all(&dir).map_err(|e| format!("output dir {dir:?}: {e}"))?;
    Ok(dir)
}
