//! Counter-style random substreams.
//!
//! Every replication draws from its own ChaCha8 stream selected by
//! `(master seed, replication index)`, so results do not depend on how
//! replications are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The generator for replication `stream` under master seed `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Inverse-CDF map from a uniform variate to a standard exponential one.
/// Monotone, so it couples `U(0,1)` and `Exp(1)` with `exp >= uniform`.
pub fn exp1_from_uniform(u: f64) -> f64 {
    -(-u).ln_1p()
}
