//! Counter-based random streams: every configuration index owns an
//! independent ChaCha stream derived from the master seed, so results never
//! depend on how samples are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream offset separating temporal-noise draws from configuration draws.
pub(crate) const NOISE_STREAM: u64 = 1 << 62;

/// Random stream for sample `index` under `master`.
pub fn substream(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Work is reduced in fixed-size blocks so summation order is independent of
/// the worker count.
pub(crate) const REDUCTION_BLOCK: usize = 16;
