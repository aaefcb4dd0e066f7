//! Seeded random substreams.
//!
//! Every stage of a generation run draws from its own ChaCha stream derived
//! from the run seed, so adding draws to one stage never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Identifies a substream of a run.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Stream {
    Graph,
    Function(usize),
    Plan,
    Propagation,
    Mutation(usize),
    Noise,
}

impl Stream {
    fn id(self) -> u64 {
        const FUNCTION: u64 = 1 << 32;
        const MUTATION: u64 = 2 << 32;
        match self {
            Stream::Graph => 1,
            Stream::Plan => 2,
            Stream::Propagation => 3,
            Stream::Noise => 4,
            Stream::Function(v) => FUNCTION + v as u64,
            Stream::Mutation(i) => MUTATION + i as u64,
        }
    }
}

pub fn substream(seed: u64, stream: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
