//! Seeded, stream-addressable Gaussian variates.
//!
//! Every stream is a ChaCha8 keystream keyed by `seed` (expanded with
//! `SeedableRng::seed_from_u64`) with the 64-bit ChaCha stream id set to
//! `stream_index`. Standard normals are drawn with the ziggurat sampler of
//! `rand_distr::StandardNormal`. Both the keystream and the sampler are pure
//! functions of `(seed, stream_index)` and the number of draws so far, so a
//! path's variates do not depend on which thread generates them or in what
//! order paths are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    /// Sub-stream `component` (0, 1 or 2) of this stream. Path `k` uses
    /// stream indices `3k`, `3k + 1`, `3k + 2` for the three bridge
    /// components of its excursion.
    pub fn component(&self, component: u64) -> RngStream {
        debug_assert!(component < 3);
        RngStream::new(
            self.seed,
            self.stream_index.wrapping_mul(3).wrapping_add(component),
        )
    }

    pub fn generator(&self) -> GaussianSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        GaussianSource { rng }
    }
}

pub struct GaussianSource {
    rng: ChaCha8Rng,
}

impl GaussianSource {
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_gaussian();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draw(stream: RngStream, n: usize) -> Vec<f64> {
        let mut buf = vec![0.0; n];
        stream.generator().fill(&mut buf);
        buf
    }

    #[test]
    fn same_stream_same_sequence() {
        let s = RngStream::new(42, 7);
        assert_eq!(draw(s, 1000), draw(s, 1000));
    }

    #[test]
    fn streams_differ() {
        let a = draw(RngStream::new(42, 0), 64);
        let b = draw(RngStream::new(42, 1), 64);
        let c = draw(RngStream::new(43, 0), 64);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn components_are_disjoint_across_paths() {
        let p0 = RngStream::new(1, 0);
        let p1 = RngStream::new(1, 1);
        assert_eq!(p0.component(2).stream_index, 2);
        assert_eq!(p1.component(0).stream_index, 3);
    }

    #[test]
    fn adjacent_streams_uncorrelated() {
        let n = 100_000;
        let a = draw(RngStream::new(9, 10), n);
        let b = draw(RngStream::new(9, 11), n);
        let corr: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n as f64;
        // sd of the sample correlation is 1/sqrt(n)
        assert!(corr.abs() < 5.0 / (n as f64).sqrt(), "corr = {corr}");
    }

    #[test]
    fn moments_standard_normal() {
        let n = 200_000;
        let a = draw(RngStream::new(3, 0), n);
        let mean = a.iter().sum::<f64>() / n as f64;
        let var = a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt());
    }
}
