//! Big-integer helpers shared across the crate: primality, square roots,
//! base-2 logarithms of huge values, deterministic rounding.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// log2 of |x| as f64, accurate to ~1e-15 relative error, defined for x != 0.
pub fn log2_bigint(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    assert!(!mag.is_zero(), "log2 of zero");
    let bits = mag.bits();
    if bits <= 64 {
        return (mag.to_u64().unwrap() as f64).log2();
    }
    // Take the top 64 bits as a mantissa.
    let shift = bits - 64;
    let top: BigUint = mag >> shift;
    (top.to_u64().unwrap() as f64).log2() + shift as f64
}

/// log2 of a positive rational.
pub fn log2_ratio(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "log2 of non-positive rational");
    log2_bigint(x.numer()) - log2_bigint(x.denom())
}

/// Floor square root of a non-negative integer.
pub fn floor_sqrt(x: &BigInt) -> BigInt {
    assert!(!x.is_negative());
    x.sqrt()
}

/// Ceiling square root of a non-negative integer.
pub fn ceil_sqrt(x: &BigInt) -> BigInt {
    let r = floor_sqrt(x);
    if &(&r * &r) == x {
        r
    } else {
        r + 1
    }
}

/// Largest integer t >= 0 with t^2 <= x, for rational x >= 0.
pub fn floor_sqrt_ratio(x: &BigRational) -> BigInt {
    assert!(!x.is_negative());
    // t^2 <= p/q  <=>  t^2 * q <= p; start from sqrt(floor(p/q)) and adjust.
    let mut t = floor_sqrt(&(x.numer() / x.denom()));
    while &(&t + 1u32) * &(&t + 1u32) * x.denom() <= x.numer().clone() {
        t += 1u32;
    }
    while !t.is_zero() && &(&t * &t) * x.denom() > x.numer().clone() {
        t -= 1u32;
    }
    t
}

/// Nearest-integer quotient a/b for b > 0, ties rounded up. Deterministic.
pub fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    let num: BigInt = a * 2 + b;
    let den: BigInt = b * 2;
    num.div_floor(&den)
}

/// f64 value of a rational (may overflow to infinity for huge values).
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

const MR_BASES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Miller-Rabin primality test with 25 fixed prime bases. Deterministic for
/// all 64-bit inputs; error probability below 4^-25 beyond that.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    let n = n.magnitude().clone();
    let two = BigUint::from(2u32);
    for b in MR_BASES {
        if n == BigUint::from(b) {
            return true;
        }
    }
    if (&n % &two).is_zero() {
        return false;
    }
    let n_minus_1 = &n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    'witness: for b in MR_BASES {
        let mut x = BigUint::from(b).modpow(&d, &n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The smallest prime strictly larger than 2^a.
pub fn next_prime_above_pow2(a: u32) -> BigInt {
    let mut candidate = (BigInt::one() << a) + 1u32;
    while !is_probable_prime(&candidate) {
        candidate += 2u32;
    }
    candidate
}

/// Uniform random prime in [2^(bits-1), 2^bits).
pub fn random_prime_with_bits<R: Rng>(bits: u64, rng: &mut R) -> BigInt {
    assert!(bits >= 2);
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        let candidate = BigInt::from_biguint(Sign::Plus, candidate);
        if is_probable_prime(&candidate) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn log2_matches_f64_at_small_scale() {
        for v in [1u64, 2, 3, 1000, 1 << 52] {
            let exact = (v as f64).log2();
            assert!((log2_bigint(&BigInt::from(v)) - exact).abs() < 1e-12);
        }
        let big = BigInt::from(7u32) << 300;
        assert!((log2_bigint(&big) - (300.0 + 7f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn sqrt_bounds() {
        assert_eq!(ceil_sqrt(&BigInt::from(14u32)), BigInt::from(4u32));
        assert_eq!(ceil_sqrt(&BigInt::from(16u32)), BigInt::from(4u32));
        let x = BigRational::new(BigInt::from(25), BigInt::from(4)); // 6.25
        assert_eq!(floor_sqrt_ratio(&x), BigInt::from(2));
    }

    #[test]
    fn mr_agrees_with_small_sieve() {
        let primes: Vec<u64> = (2..200u64)
            .filter(|&n| (2..n).all(|d| d * d > n || n % d != 0))
            .collect();
        for n in 2..200u64 {
            assert_eq!(
                is_probable_prime(&BigInt::from_u64(n).unwrap()),
                primes.contains(&n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime_above_pow2(4), BigInt::from(17u32));
        assert_eq!(next_prime_above_pow2(8), BigInt::from(257u32));
        assert!(is_probable_prime(&next_prime_above_pow2(60)));
    }

    #[test]
    fn round_div_ties() {
        let d = |a: i64, b: i64| {
            round_div(&BigInt::from(a), &BigInt::from(b))
                .to_i64()
                .unwrap()
        };
        assert_eq!(d(7, 2), 4);
        assert_eq!(d(-7, 2), -3);
        assert_eq!(d(6, 3), 2);
        assert_eq!(d(-6, 4), -1);
    }
}
