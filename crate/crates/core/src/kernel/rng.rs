use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reproducible random stream keyed by `(seed_root, stream_id)`.
///
/// Streams share the ChaCha key derived from the root seed and differ in the
/// ChaCha stream number, so adding a station never perturbs the draws of the
/// others.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed_root: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed_root: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_root);
        rng.set_stream(stream_id);
        RandomStream {
            seed_root,
            stream_id,
            rng,
        }
    }

    pub fn seed_root(&self) -> u64 {
        self.seed_root
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    ///
    /// # Panics
    ///
    /// If `lo > hi`.
    pub fn uniform_int(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "uniform_int: empty range [{lo}, {hi}]");
        if lo == hi {
            return lo;
        }
        self.rng.random_range(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_range() {
        let mut s = RandomStream::new(1, 0);
        for _ in 0..10 {
            assert_eq!(s.uniform_int(0, 0), 0);
            assert_eq!(s.uniform_int(7, 7), 7);
        }
    }

    #[test]
    fn same_key_same_sequence() {
        let mut a = RandomStream::new(42, 3);
        let mut b = RandomStream::new(42, 3);
        let xs: Vec<_> = (0..64).map(|_| a.uniform_int(0, 1023)).collect();
        let ys: Vec<_> = (0..64).map(|_| b.uniform_int(0, 1023)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RandomStream::new(42, 3);
        let mut b = RandomStream::new(42, 4);
        let xs: Vec<_> = (0..64).map(|_| a.uniform_int(0, 1023)).collect();
        let ys: Vec<_> = (0..64).map(|_| b.uniform_int(0, 1023)).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    #[should_panic(expected = "empty range")]
    fn inverted_range_panics() {
        RandomStream::new(0, 0).uniform_int(5, 4);
    }

    #[test]
    fn uniform_histogram_within_five_sigma() {
        let mut s = RandomStream::new(2024, 1);
        let mut hist = [0u32; 16];
        let draws = 100_000;
        for _ in 0..draws {
            hist[s.uniform_int(0, 15) as usize] += 1;
        }
        let expected = draws as f64 / 16.0;
        let sigma = (draws as f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
        for (v, &c) in hist.iter().enumerate() {
            assert!(
                (c as f64 - expected).abs() < 5.0 * sigma,
                "value {v}: {c} vs {expected}"
            );
        }
    }
}
