//! Counter-based seeding so that parallel loops stay reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for a two-level counter such as `(trial, sub-index)`.
pub fn stream2(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    stream(seed ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15), a)
}
