//! Per-task RNG streams.
//!
//! A stream is keyed by `(master seed, point, trial, role)`; the four words are
//! laid out verbatim as the 256-bit ChaCha key, so distinct keys never share
//! a stream and results do not depend on which worker runs a task.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    FadingSd,
    FadingSr,
    FadingRd,
    Symbols,
    Noise,
    Outage,
    Diagnostics,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            Self::FadingSd => 1,
            Self::FadingSr => 2,
            Self::FadingRd => 3,
            Self::Symbols => 4,
            Self::Noise => 5,
            Self::Outage => 6,
            Self::Diagnostics => 7,
        }
    }
}

pub fn stream_seed(master: u64, point: u64, trial: u64, role: StreamRole) -> [u8; 32] {
    let mut seed = [0u8; 32];
    for (chunk, word) in seed.chunks_exact_mut(8).zip([master, point, trial, role.tag()]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    seed
}

pub fn stream_rng(master: u64, point: u64, trial: u64, role: StreamRole) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_seed(master, point, trial, role))
}
