use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ring::Rational;

/// Deterministic source of rational points `p/q` with `1 <= q <= 16` in the
/// box `[-10, 10]^n`.
pub struct PointSampler {
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub const MAX_DEN: i64 = 16;
    pub const BOX: i64 = 10;

    pub fn new(seed: u64) -> PointSampler {
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_coord(&mut self) -> Rational {
        let q = self.rng.gen_range(1..=Self::MAX_DEN);
        let p = self.rng.gen_range(-Self::BOX * q..=Self::BOX * q);
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn next_point(&mut self, n: usize) -> Vec<Rational> {
        (0..n).map(|_| self.next_coord()).collect()
    }

    pub fn points(&mut self, n: usize, count: usize) -> Vec<Vec<Rational>> {
        (0..count).map(|_| self.next_point(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn deterministic_and_bounded() {
        let a = PointSampler::new(42).points(3, 50);
        let b = PointSampler::new(42).points(3, 50);
        assert_eq!(a, b);
        for p in &a {
            for c in p {
                assert!(c.abs() <= crate::ring::rat(10));
                assert!(*c.denom() <= BigInt::from(16));
            }
        }
        assert_ne!(a, PointSampler::new(7).points(3, 50));
    }
}
