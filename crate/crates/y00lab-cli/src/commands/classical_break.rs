//! Key recovery against the bare classical stream: random seeds, short
//! observed prefixes, Berlekamp-Massey, replay verification. The expected
//! outcome is recovery every single time.

use rand_chacha::rand_core::RngCore;
use serde_json::json;

use y00lab::keystream::{lfsr_generate, recover_and_verify, LfsrSpec};

use crate::config;
use crate::{streams, CommonArgs, CmdResult};

pub fn run(args: &CommonArgs) -> CmdResult {
    let (cfg, resolved) = config::resolve(args)?;
    let dir = config::out_dir(args)?;
    let section = &cfg.classical_break;
    if section.registers.is_empty() {
        return Err("classical_break.registers is empty".into());
    }
    if section.trials == 0 {
        return Err("classical_break.trials must be positive".into());
    }

    let mut rng = streams::substream(cfg.master_seed, "classical-break");
    let mut csv = String::from("length,trial,seed,observed_bits,recovered_length,state_match\n");
    let mut registers = Vec::new();
    let mut all_recovered = true;
    let mut insufficient = false;

    for reg in &section.registers {
        let observed_bits = section.observed_bits.unwrap_or(2 * reg.length);
        let mask = if reg.length >= 64 { u64::MAX } else { (1u64 << reg.length) - 1 };
        let mut successes = 0u32;
        for trial in 0..section.trials {
            let seed = loop {
                let s = rng.next_u64() & mask;
                if s != 0 {
                    break s;
                }
            };
            let spec =
                LfsrSpec::new(reg.length, &reg.taps, seed).map_err(|e| e.to_string())?;
            let observed =
                lfsr_generate(&mut spec.clone(), observed_bits).map_err(|e| e.to_string())?;
            if observed_bits == 0 {
                insufficient = true;
                all_recovered = false;
                csv.push_str(&format!("{},{trial},{seed:#x},0,,false\n", reg.length));
                continue;
            }
            let (rec, replay_ok) = recover_and_verify(&observed);
            let state_match =
                replay_ok && rec.length == reg.length && rec.initial_state == seed;
            successes += u32::from(state_match);
            all_recovered &= state_match;
            csv.push_str(&format!(
                "{},{trial},{seed:#x},{observed_bits},{},{state_match}\n",
                reg.length, rec.length
            ));
        }
        registers.push(json!({
            "length": reg.length,
            "taps": reg.taps,
            "observed_bits": observed_bits,
            "trials": section.trials,
            "successes": successes,
        }));
    }

    let report = json!({
        "command": "classical-break",
        "registers": registers,
        "recovered": all_recovered,
        "reason": if insufficient { json!("insufficient") } else { serde_json::Value::Null },
    });
    super::write_run(
        &dir,
        "classical-break",
        cfg.master_seed,
        resolved,
        report,
        &[("trials.csv", csv)],
    )?;
    println!(
        "classical-break: recovered {all_recovered} over {} register(s) x {} trial(s)",
        section.registers.len(),
        section.trials
    );
    Ok(0)
}
