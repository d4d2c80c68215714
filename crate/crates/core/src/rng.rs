//! Seeded random substreams, one per link class, keyed by trial block.
//!
//! Every block of trials owns an independent ChaCha8 stream per link class, so
//! a block's draws depend only on `(seed, block, class)` and never on which
//! worker runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkClass {
    SourcePrimary = 0,
    RelayPrimary = 1,
    SourceRelay = 2,
    SourceDestination = 3,
    RelayDestination = 4,
}

const CLASSES: usize = 5;
const STREAMS_PER_BLOCK: u64 = 8;

#[derive(Debug, Clone)]
pub struct LinkStreams {
    streams: [ChaCha8Rng; CLASSES],
}

impl LinkStreams {
    pub fn new(seed: u64, block: u64) -> Self {
        let streams = std::array::from_fn(|class| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block * STREAMS_PER_BLOCK + class as u64);
            rng
        });
        Self { streams }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self, class: LinkClass) -> f64 {
        self.streams[class as usize].random::<f64>()
    }

    /// Exponential draw with the given mean.
    pub fn exponential(&mut self, class: LinkClass, mean: f64) -> f64 {
        -mean * (-self.uniform(class)).ln_1p()
    }

    /// Exponential draw conditioned on being strictly positive.
    pub fn positive_exponential(&mut self, class: LinkClass, mean: f64) -> f64 {
        loop {
            let v = self.exponential(class, mean);
            if v > 0.0 {
                return v;
            }
        }
    }
}
