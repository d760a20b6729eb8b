use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Streams at or above this index are reserved for library internals.
pub(crate) const RESERVED_STREAMS: u64 = 1 << 62;
pub(crate) const POINT_STREAM: u64 = RESERVED_STREAMS;
pub(crate) const ISOMETRY_STREAM: u64 = RESERVED_STREAMS + 1;

/// ChaCha generator keyed by `seed`, positioned at the start of `stream`.
pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal variates for replicate `stream_index` under `seed`.
///
/// The sequence is a pure function of `(seed, stream_index)`: the ChaCha key
/// comes from the seed and the stream selects an independent counter space.
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.rng.sample(StandardNormal);
        }
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.rng.sample(StandardNormal))
    }
}

pub fn rng_stream(seed: u64, stream_index: u64) -> NormalStream {
    NormalStream {
        rng: rng_for(seed, stream_index),
    }
}
