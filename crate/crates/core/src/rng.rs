//! Counter-based randomness: every draw is a pure function of
//! `(seed, tag, iteration, node)`, so a node's coin flips are the same no
//! matter which process evaluates them or in what order.

#[inline]
fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed family of independent uniform draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    key: u64,
}

impl RngStream {
    pub fn new(seed: u64, tag: u64) -> Self {
        let key = mix(mix(seed ^ 0x9e37_79b9_7f4a_7c15) ^ tag.wrapping_mul(0xd1b5_4a32_d192_ed03));
        Self { key }
    }

    /// A sub-stream, e.g. one per pipeline run.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            key: mix(self.key ^ mix(tag.wrapping_add(0x2545_f491_4f6c_dd1d))),
        }
    }

    #[inline]
    pub fn draw(&self, iteration: u64, node: u64) -> u64 {
        let h = mix(self.key ^ iteration.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7));
        mix(h ^ node.wrapping_mul(0x9fb2_1c65_1e98_df25))
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&self, iteration: u64, node: u64) -> f64 {
        (self.draw(iteration, node) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial; `p >= 1` always succeeds.
    #[inline]
    pub fn coin(&self, iteration: u64, node: u64, p: f64) -> bool {
        self.uniform(iteration, node) < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_keyed() {
        let a = RngStream::new(7, 1);
        assert_eq!(a.draw(3, 10), RngStream::new(7, 1).draw(3, 10));
        assert_ne!(a.draw(3, 10), RngStream::new(8, 1).draw(3, 10));
        assert_ne!(a.draw(3, 10), RngStream::new(7, 2).draw(3, 10));
        assert_ne!(a.draw(3, 10), a.draw(4, 10));
        assert_ne!(a.draw(3, 10), a.draw(3, 11));
        assert_ne!(a.child(0).draw(0, 0), a.child(1).draw(0, 0));
    }

    #[test]
    fn uniform_mean_is_half() {
        let s = RngStream::new(42, 0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|i| s.uniform(0, i)).sum::<f64>() / n as f64;
        // sd of the mean is ~0.00065
        assert!((mean - 0.5).abs() < 0.003, "mean {mean}");
        assert!((0..1000).all(|i| s.coin(1, i, 1.0)));
        assert!((0..1000).all(|i| !s.coin(1, i, 0.0)));
    }
}
