//! Seeded sampling of rational points away from the coordinate hyperplanes.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symbolic::PointState;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the grid `±{0.10, 0.11, ..., 10.00}`.
pub fn rational(rng: &mut SampleRng) -> BigRational {
    let n: i64 = rng.gen_range(10..=1000);
    let n = if rng.gen_bool(0.5) { n } else { -n };
    BigRational::new(BigInt::from(n), BigInt::from(100))
}

pub fn rational_array<const N: usize>(rng: &mut SampleRng) -> [BigRational; N] {
    std::array::from_fn(|_| rational(rng))
}

/// Point with every value nonzero and `jets - 1` derivative orders filled.
pub fn point(rng: &mut SampleRng, jets: usize) -> PointState<BigRational> {
    let mut p = PointState::new(rational_array(rng), rational_array(rng));
    for order in 1..jets {
        p = p.with_jet(order, rational_array(rng), rational_array(rng));
    }
    p
}

pub fn points(seed: u64, count: usize, jets: usize) -> Vec<PointState<BigRational>> {
    let mut r = rng(seed);
    (0..count).map(|_| point(&mut r, jets)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, Zero};

    #[test]
    fn samples_respect_the_band() {
        let lo = BigRational::new(1.into(), 10.into());
        let hi = BigRational::from_integer(10.into());
        let mut r = rng(7);
        for _ in 0..500 {
            let x = rational(&mut r).abs();
            assert!(!x.is_zero() && x >= lo && x <= hi);
        }
    }

    #[test]
    fn seed_determines_sequence() {
        assert_eq!(points(3, 4, 2), points(3, 4, 2));
        assert_ne!(points(3, 4, 2), points(4, 4, 2));
    }
}
