//! Classical PRNG layer: LFSR and TinyMT32 generators, key expansion into
//! per-slot symbols, exact period arithmetic, and Berlekamp-Massey recovery
//! (the executable form of the classical-stream-cipher break).

mod berlekamp_massey;
mod expand;
mod lfsr;
mod period;
mod tinymt32;

pub use berlekamp_massey::{bm_recover_lfsr, recover_and_verify, BmRecovery};
pub use expand::{expand_keys, KeyPair, PrngKind, SymbolStream};
pub use lfsr::{lfsr_generate, LfsrSpec, MAX_LFSR_LEN};
pub use period::{lcm_period, lfsr_max_period, tinymt32_period};
pub use tinymt32::{
    parse_tinymt_fixture, tinymt32_generate, TinyMt32, TinyMtFixture, TinyMtParams,
    DEFAULT_MAT1, DEFAULT_MAT2, DEFAULT_TMAT,
};
