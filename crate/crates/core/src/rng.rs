//! Deterministic, splittable randomness.
//!
//! Every run is driven by a single 64-bit seed. Child streams are derived
//! from `(seed, label)` pairs, never from the parent's position, so trials
//! can run in any order (or in parallel) and still draw identical values.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random stream with reproducible child derivation.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

/// FNV-1a over an arbitrary byte stream. Used for child-seed derivation;
/// stable across platforms and releases, unlike `DefaultHasher`.
fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

impl RandomSource {
    pub fn new(seed: u64) -> RandomSource {
        RandomSource { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// The seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream derived from `(seed, label)`.
    pub fn child(&self, label: &str) -> RandomSource {
        let seed = fnv1a(&[&self.seed.to_le_bytes(), label.as_bytes()]);
        RandomSource::new(seed)
    }

    /// Independent child stream derived from `(seed, label, index)`.
    pub fn child_indexed(&self, label: &str, index: u64) -> RandomSource {
        let seed = fnv1a(&[&self.seed.to_le_bytes(), label.as_bytes(), &index.to_le_bytes()]);
        RandomSource::new(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw; `p = 1.0` is always true, `p = 0.0` always false.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.f64() < p
    }

    /// Uniform integer in `0..n` (unbiased; `n > 0`).
    pub fn range_usize(&mut self, n: usize) -> usize {
        assert!(n > 0, "range_usize requires n > 0");
        let n = n as u64;
        let zone = (u64::MAX / n) * n;
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Uniform in `[lo, hi)`.
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.f64() * (hi - lo)
    }
}

impl RngCore for RandomSource {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn children_are_independent_of_parent_position() {
        let parent1 = RandomSource::new(7);
        let mut parent2 = RandomSource::new(7);
        parent2.next_u64(); // advance
        let mut c1 = parent1.child("trial");
        let mut c2 = parent2.child("trial");
        assert_eq!(c1.next_u64(), c2.next_u64());
    }

    #[test]
    fn distinct_labels_distinct_streams() {
        let root = RandomSource::new(7);
        let mut a = root.child("a");
        let mut b = root.child("b");
        assert_ne!(a.next_u64(), b.next_u64());
        let mut i0 = root.child_indexed("t", 0);
        let mut i1 = root.child_indexed("t", 1);
        assert_ne!(i0.next_u64(), i1.next_u64());
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut r = RandomSource::new(3);
        for _ in 0..1000 {
            let v = r.f64();
            assert!((0.0..1.0).contains(&v));
        }
        assert!(r.bernoulli(1.0));
        assert!(!r.bernoulli(0.0));
    }

    #[test]
    fn range_usize_covers_all_values() {
        let mut r = RandomSource::new(11);
        let mut seen = [false; 5];
        for _ in 0..200 {
            seen[r.range_usize(5)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
