//! End-to-end transmission: keyed encode, lossy heterodyne channel, Bob's
//! keyed decision against Eve's unkeyed maximum-likelihood read.

use rand_chacha::rand_core::RngCore;
use serde_json::json;

use y00lab::channel::{heterodyne_sample, ml_decide};
use y00lab::keystream::{expand_keys, KeyPair};
use y00lab::y00core::{bob_decode_slot, encode_frame, invert_slot};

use crate::config::{self, Horizon};
use crate::{streams, CommonArgs, CmdResult};

pub fn run(args: &CommonArgs) -> CmdResult {
    let (cfg, resolved) = config::resolve(args)?;
    let dir = config::out_dir(args)?;
    if cfg.horizon != Horizon::Slots {
        return Err("simulate needs a finite slot horizon (horizon = \"slots\")".into());
    }
    let slots = cfg.slots as usize;
    let map = cfg.build_mapping()?;
    let constellation = cfg.build_constellation()?;
    let width = cfg.pattern_width();
    let log2m = width - 1;

    let pair = KeyPair::from_words(cfg.key, cfg.dkey, cfg.prng.seed_bits());
    let stream = expand_keys(&pair, cfg.m, slots, &cfg.prng).map_err(|e| e.to_string())?;

    let mut plaintext_rng = streams::substream(cfg.master_seed, "plaintext");
    let x: Vec<u8> = (0..slots).map(|_| (plaintext_rng.next_u32() & 1) as u8).collect();
    let frame = encode_frame(&x, &stream, &map).map_err(|e| e.to_string())?;

    let mut channel_rng = streams::substream(cfg.master_seed, "channel");
    let mut bob_errors = 0u64;
    let mut eve_symbol_errors = 0u64;
    let mut basis_errors = 0u64;
    let mut refresh_errors = 0u64;
    let mut pattern_counts = vec![0u64; 1 << width];
    for t in 0..slots {
        let sent = constellation.amplitude(frame.m[t]).map_err(|e| e.to_string())?;
        let y = heterodyne_sample(sent * cfg.eta, &mut channel_rng);

        let bob = bob_decode_slot(y, stream.s[t], stream.dx[t], &map, &constellation, cfg.eta)
            .map_err(|e| e.to_string())?;
        bob_errors += u64::from(bob != x[t]);

        let m_read = ml_decide(&constellation, cfg.eta, y);
        eve_symbol_errors += u64::from(m_read != frame.m[t]);
        // Eve's implied keyed-bit errors: the (s, dx) pair her reading would
        // require, XORed against the truth.
        let (s_read, dx_read) = invert_slot(m_read, x[t], &map).map_err(|e| e.to_string())?;
        let e_s = s_read ^ stream.s[t];
        let e_dx = dx_read ^ stream.dx[t];
        basis_errors += u64::from(e_s != 0);
        refresh_errors += u64::from(e_dx != 0);
        pattern_counts[(e_s | (u32::from(e_dx) << log2m)) as usize] += 1;
    }

    let rate = |n: u64| {
        if slots == 0 { serde_json::Value::Null } else { json!(n as f64 / slots as f64) }
    };
    let report = json!({
        "command": "simulate",
        "slots": slots,
        "bob_bit_errors": bob_errors,
        "bob_ber": rate(bob_errors),
        "eve_symbol_errors": eve_symbol_errors,
        "eve_symbol_error_rate": rate(eve_symbol_errors),
        "eve_pattern_error_rate": rate(slots as u64 - pattern_counts[0]),
        "eve_basis_error_rate": rate(basis_errors),
        "eve_refresh_error_rate": rate(refresh_errors),
    });

    let mut csv = String::from("pattern_bits,count,rate\n");
    if slots > 0 {
        for (e, &c) in pattern_counts.iter().enumerate() {
            csv.push_str(&format!(
                "{:0w$b},{},{:.17e}\n",
                e,
                c,
                c as f64 / slots as f64,
                w = width as usize
            ));
        }
    }

    super::write_run(
        &dir,
        "simulate",
        cfg.master_seed,
        resolved,
        report,
        &[("eve_patterns.csv", csv)],
    )?;
    if slots == 0 {
        println!("simulate: 0 slots, empty report");
    } else {
        println!(
            "simulate: {} slots, bob_ber {:.3e}, eve_symbol_error_rate {:.3e}",
            slots,
            bob_errors as f64 / slots as f64,
            eve_symbol_errors as f64 / slots as f64
        );
    }
    Ok(0)
}
