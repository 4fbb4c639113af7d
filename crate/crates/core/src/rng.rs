//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`. Dataset jobs derive one stream per file as
//! `seed ^ path_hash(relative_path)`, so output never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// First eight bytes (little-endian) of the SHA-256 of a `/`-separated path.
pub fn path_hash(relative: &str) -> u64 {
    let digest = Sha256::digest(relative.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

pub fn stream_for(seed: u64, relative: &str) -> Rng {
    seeded(seed ^ path_hash(relative))
}
