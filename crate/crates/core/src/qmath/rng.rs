use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded, replayable random stream.
///
/// Two streams built from the same seed produce the same draws. Independent
/// substreams for parallel work are derived with [`RngStream::substream`], so
/// results do not depend on how work is scheduled across threads.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    counter: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            counter: 0,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of raw draws taken from this stream so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Child stream number `index`. Depends only on this stream's seed and
    /// `index`, not on how many draws were already taken.
    pub fn substream(&self, index: u64) -> RngStream {
        let child = splitmix64(splitmix64(self.seed) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)));
        RngStream::new(child)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.counter += 1;
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.counter += 1;
        self.inner.fill_bytes(dst)
    }
}
