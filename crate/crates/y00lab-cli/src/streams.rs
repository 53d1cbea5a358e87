//! Named randomness sub-streams derived from the single master seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Independent RNG for one named purpose. Every consumer of randomness pulls
/// from its own stream so adding a consumer never shifts another's draws.
pub fn substream(master_seed: u64, name: &str) -> ChaCha12Rng {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(name.as_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(seed)
}
