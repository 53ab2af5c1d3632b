//! Probabilistic primality testing.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

const MILLER_RABIN_ROUNDS: u32 = 40;

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109,
    113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251,
];

/// Trial division by the primes below 256, then 40 Miller-Rabin rounds.
///
/// Witness bases are derived from SHA-256 of the candidate, so the answer is
/// a pure function of `n`.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    // every composite below 257^2 has a factor under 256
    if *n < BigUint::from(257u32 * 257) {
        return true;
    }

    let n_minus_one = n - 1u32;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }

    let n_bytes = n.to_bytes_be();
    let range = n - 3u32;
    'rounds: for round in 0..MILLER_RABIN_ROUNDS {
        let base = witness(&n_bytes, round, &range) + &two;
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'rounds;
            }
            if x.is_one() {
                return false;
            }
        }
        return false;
    }
    true
}

// Deterministic base in [0, range).
fn witness(n_bytes: &[u8], round: u32, range: &BigUint) -> BigUint {
    let mut wide = alloc::vec::Vec::with_capacity(n_bytes.len() + 32);
    let mut counter = 0u32;
    while wide.len() < n_bytes.len() + 16 {
        let mut h = Sha256::new();
        h.update(b"mr-witness");
        h.update(round.to_be_bytes());
        h.update(counter.to_be_bytes());
        h.update(n_bytes);
        wide.extend_from_slice(&h.finalize());
        counter += 1;
    }
    BigUint::from_bytes_be(&wide) % range
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve(limit: usize) -> alloc::vec::Vec<bool> {
        let mut is_p = alloc::vec![true; limit];
        is_p[0] = false;
        is_p[1] = false;
        let mut i = 2;
        while i * i < limit {
            if is_p[i] {
                let mut j = i * i;
                while j < limit {
                    is_p[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is_p
    }

    #[test]
    fn agrees_with_sieve_below_200k() {
        let table = sieve(200_000);
        for (n, &expected) in table.iter().enumerate() {
            assert_eq!(is_probable_prime(&BigUint::from(n)), expected, "n = {n}");
        }
    }

    #[test]
    fn carmichael_numbers_are_composite() {
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 41041, 825265, 321197185] {
            assert!(!is_probable_prime(&BigUint::from(n)), "{n}");
        }
    }

    #[test]
    fn known_large_primes() {
        // 2^127 - 1 and 2^89 - 1
        let m127 = (BigUint::one() << 127u32) - 1u32;
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert!(is_probable_prime(&m127));
        assert!(is_probable_prime(&m89));
        assert!(!is_probable_prime(&(&m127 * &m89)));
    }
}
