//! Seeded, counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream selected by `(seed, stream)`; draws
//! are a pure function of that pair and the position within the stream, so
//! work partitioned by stream index gives the same numbers on any number of
//! threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quadrature::UnitPoint;

/// Rows generated from one stream before moving to the next.
pub const ROWS_PER_STREAM: usize = 4096;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        StreamRng { inner }
    }

    /// Uniform draw from the open interval (0, 1) with its exact complement.
    pub fn open01(&mut self) -> UnitPoint {
        // (2k + 1) / 2^53 with k < 2^52: both it and its complement are exact
        let k = self.inner.next_u64() >> 12;
        let scale = 1.0 / (1u64 << 53) as f64;
        let num = (2 * k + 1) as f64;
        UnitPoint { p: num * scale, q: ((1u64 << 53) as f64 - num) * scale }
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Splits `n` rows into `(stream, start, end)` blocks of at most
/// [`ROWS_PER_STREAM`] rows.
pub fn stream_blocks(n: usize) -> Vec<(u64, usize, usize)> {
    (0..n.div_ceil(ROWS_PER_STREAM))
        .map(|b| (b as u64, b * ROWS_PER_STREAM, ((b + 1) * ROWS_PER_STREAM).min(n)))
        .collect()
}
