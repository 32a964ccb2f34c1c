//! Seeded draws of exact rationals.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;

pub type SeededRng = ChaCha8Rng;

pub const UNIT_BITS: u32 = 53;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; mixes a base seed with cell coordinates.
pub fn derive_seed(base: u64, coords: &[u64]) -> u64 {
    let mut z = base;
    for &c in coords {
        z = z
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(c.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn unit_den() -> BigInt {
    BigInt::from(1u64 << UNIT_BITS)
}

/// Uniform on `[0, 1)` with denominator `2^53`.
pub fn unit(rng: &mut impl Rng) -> Rational {
    let x = rng.gen::<u64>() >> (64 - UNIT_BITS);
    Rational::new(BigInt::from(x), unit_den())
}

/// Uniform on `(0, 1]` with denominator `2^53`.
pub fn unit_positive(rng: &mut impl Rng) -> Rational {
    let x = (rng.gen::<u64>() >> (64 - UNIT_BITS)) + 1;
    Rational::new(BigInt::from(x), unit_den())
}

/// Uniform point on the probability simplex with `k` vertices: spacings of
/// `k - 1` sorted unit draws. Sums to exactly one.
pub fn simplex(rng: &mut impl Rng, k: usize) -> Vec<Rational> {
    assert!(k > 0);
    let mut cuts: Vec<Rational> = (0..k - 1).map(|_| unit(rng)).collect();
    cuts.sort();
    let mut out = Vec::with_capacity(k);
    let mut prev = Rational::from_integer(0.into());
    for c in cuts {
        out.push(&c - &prev);
        prev = c;
    }
    out.push(Rational::from_integer(1.into()) - prev);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn simplex_sums_to_one_and_is_nonnegative() {
        let mut r = rng(3);
        for k in 1..8 {
            let p = simplex(&mut r, k);
            assert_eq!(p.len(), k);
            assert!(p.iter().all(|x| *x >= Rational::zero()));
            assert_eq!(p.iter().sum::<Rational>(), Rational::one());
        }
    }

    #[test]
    fn draws_are_seeded() {
        let a: Vec<_> = (0..5).map(|_| unit(&mut rng(9))).collect();
        let b: Vec<_> = (0..5).map(|_| unit(&mut rng(9))).collect();
        assert_eq!(a, b);
        assert!(unit_positive(&mut rng(1)) > Rational::zero());
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
    }
}
