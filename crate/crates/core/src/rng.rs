//! PCG32 (64-bit LCG state, XSH-RR output) and the sampling helpers built
//! on it. The generator is fixed here rather than taken from a crate so that
//! sampled splits stay bit-identical across platforms and library versions.

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Pcg32 {
    /// Seeds the generator on the default stream.
    pub fn new(seed: u64) -> Self {
        Self::with_increment(seed, INCREMENT)
    }

    /// Reference `pcg32_srandom_r` seeding on stream `stream`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self::with_increment(seed, (stream << 1) | 1)
    }

    fn with_increment(seed: u64, inc: u64) -> Self {
        let mut rng = Self { state: 0, inc };
        rng.step();
        rng.state = rng.state.wrapping_add(seed);
        rng.step();
        rng
    }

    fn step(&mut self) {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(self.inc);
    }

    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.step();
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    /// Unbiased integer in `0..bound` by Lemire's multiply-and-reject method.
    ///
    /// # Panics
    ///
    /// Panics if `bound` is zero.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "bound must be positive");
        let mut m = u64::from(self.next_u32()) * u64::from(bound);
        let mut low = m as u32;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = u64::from(self.next_u32()) * u64::from(bound);
                low = m as u32;
            }
        }
        (m >> 32) as u32
    }

    /// Partial Fisher-Yates: after the call, `items[..n]` holds a uniform
    /// random `n`-subset of the original contents in random order.
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], n: usize) {
        let len = items.len();
        assert!(
            len <= u32::MAX as usize,
            "slice too long for a 32-bit generator"
        );
        for i in 0..n.min(len) {
            let j = i + self.below((len - i) as u32) as usize;
            items.swap(i, j);
        }
    }
}
