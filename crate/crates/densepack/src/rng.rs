//! Counter-based uniforms.
//!
//! Every draw is a pure function of `(seed, cycle, pass, site)`, so a class
//! pass gives the same result whatever order or thread the sites are
//! visited in.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn to_unit(z: u64) -> f64 {
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Key for one class pass of one cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PassKey(u64);

impl PassKey {
    pub fn new(seed: u64, cycle: u64, pass: u64) -> Self {
        let a = mix64(seed ^ 0x5eed_0000_0000_0001);
        let b = mix64(a.wrapping_add(cycle.wrapping_mul(GOLDEN)));
        PassKey(mix64(b ^ pass.wrapping_add(1).wrapping_mul(0xd1b5_4a32_d192_ed03)))
    }

    /// Uniform in [0, 1) for `site`.
    #[inline]
    pub fn uniform(self, site: usize) -> f64 {
        to_unit(mix64(self.0.wrapping_add((site as u64 + 1).wrapping_mul(GOLDEN))))
    }
}

/// Sequential stream for initial conditions and other non-PCA sampling.
#[derive(Clone, Debug)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64, tag: u64) -> Self {
        Stream {
            key: mix64(mix64(seed) ^ tag.wrapping_mul(GOLDEN)),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    pub fn uniform(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform site-indexed draw that does not advance the stream.
    pub fn at(&self, i: usize) -> f64 {
        to_unit(mix64(self.key ^ mix64(i as u64 + 1)))
    }
}
