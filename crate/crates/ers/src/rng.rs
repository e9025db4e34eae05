//! Seeded, splittable random-number streams.
//!
//! Every source of randomness in this crate is an [`RngStream`] identified
//! by a `(seed, stream)` pair. Streams with distinct ids are statistically
//! independent, and a stream's output depends only on its id pair, never on
//! draw order elsewhere. That is what makes trials safe to farm out to
//! worker threads: trial `k` always runs on the stream labelled `k`, so the
//! results are identical no matter which thread executes it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream label used for selection draws inside a trial.
pub(crate) const LABEL_SELECT: u64 = 1 << 48;
/// Stream label used for the trial's single acceptance uniform.
pub(crate) const LABEL_ACCEPT: u64 = (1 << 48) + 1;

/// A reproducible random stream addressed by `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Creates the stream addressed by `(seed, stream)`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// Seed shared by every stream derived from the same root.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream id within the seed's family.
    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Derives the child stream for `label`.
    ///
    /// Children are a pure function of `(seed, stream, label)`; deriving a
    /// child does not advance the parent. Labels only need to be distinct
    /// among siblings.
    pub fn substream(&self, label: u64) -> RngStream {
        RngStream::new(self.seed, mix(self.stream, label))
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Mixes a parent stream id with a child label into a fresh stream id.
///
/// SplitMix64 finalizer; labels that differ in any bit land in unrelated
/// streams.
fn mix(stream: u64, label: u64) -> u64 {
    let mut z = stream ^ label.rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
