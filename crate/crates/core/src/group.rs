//! Group parameters and the arithmetic every scheme is built on.
//!
//! All group values are reduced mod `p`, all exponents mod `q`. Since every
//! element the schemes exponentiate lives in the order-`q` subgroup, a
//! "negative" exponent `-k` is simply `q - k` (see [`GroupParams::neg`]).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_core::RngCore;

use crate::error::{Error, Modulus, Result};
use crate::prime::is_probable_prime;

/// An exponent, always in `[0, q)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigUint);

/// A value mod `p`, always in `[1, p)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(BigUint);

macro_rules! integer_newtype {
    ($t:ident) => {
        impl $t {
            pub fn value(&self) -> &BigUint {
                &self.0
            }

            /// Minimal big-endian magnitude; zero encodes as the empty string.
            pub fn to_bytes(&self) -> Vec<u8> {
                magnitude_bytes(&self.0)
            }

            pub fn to_hex(&self) -> String {
                self.0.to_str_radix(16)
            }

            pub fn is_zero(&self) -> bool {
                self.0.is_zero()
            }

            pub fn is_one(&self) -> bool {
                self.0.is_one()
            }
        }

        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($t), self.0)
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }

        impl PartialEq<u64> for $t {
            fn eq(&self, other: &u64) -> bool {
                self.0 == BigUint::from(*other)
            }
        }
    };
}

integer_newtype!(Scalar);
integer_newtype!(Element);

pub(crate) fn magnitude_bytes(v: &BigUint) -> Vec<u8> {
    if v.is_zero() {
        Vec::new()
    } else {
        v.to_bytes_be()
    }
}

/// Parse a big-endian hex string, optionally `0x`-prefixed.
pub fn parse_hex(s: &str) -> Result<BigUint> {
    let s = s.trim();
    let s = s.strip_prefix("0x").unwrap_or(s);
    if s.is_empty() {
        return Err(Error::InvalidHex);
    }
    BigUint::parse_bytes(s.as_bytes(), 16).ok_or(Error::InvalidHex)
}

/// The public triple `(p, q, g)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    g: BigUint,
}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupParams(p={}, q={}, g={})", self.p, self.q, self.g)
    }
}

const GENERATION_ATTEMPTS: usize = 100_000;

impl GroupParams {
    /// Check `p`, `q` prime, `q | p - 1`, `g != 1` and `g^q = 1 mod p`.
    pub fn new(p: BigUint, q: BigUint, g: BigUint) -> Result<Self> {
        if !is_probable_prime(&p) {
            return Err(Error::NotPrime(Modulus::P));
        }
        if !is_probable_prime(&q) {
            return Err(Error::NotPrime(Modulus::Q));
        }
        if !(&p - 1u32).is_multiple_of(&q) {
            return Err(Error::OrderMismatch);
        }
        let g = g % &p;
        if g.is_zero() {
            return Err(Error::OrderMismatch);
        }
        if g.is_one() {
            return Err(Error::TrivialGenerator);
        }
        if !g.modpow(&q, &p).is_one() {
            return Err(Error::OrderMismatch);
        }
        Ok(GroupParams { p, q, g })
    }

    pub fn from_u64(p: u64, q: u64, g: u64) -> Result<Self> {
        Self::new(p.into(), q.into(), g.into())
    }

    /// Random parameters with a `q_bits`-bit `q` and a `p_bits`-bit `p = kq + 1`.
    pub fn generate<R: RngCore + ?Sized>(q_bits: usize, p_bits: usize, rng: &mut R) -> Result<Self> {
        if q_bits < 8 || p_bits <= q_bits {
            return Err(Error::InvalidBitLengths { q_bits, p_bits });
        }
        let mut attempts = 0usize;
        while attempts < GENERATION_ATTEMPTS {
            let q = random_prime(q_bits, rng, &mut attempts)?;
            // k ranges so that kq + 1 has exactly p_bits bits
            let lo = ((BigUint::one() << (p_bits - 1)) - 1u32).div_ceil(&q);
            let hi = ((BigUint::one() << p_bits) - 2u32) / &q;
            if lo > hi {
                attempts += 1;
                continue;
            }
            let span = &hi - &lo + 1u32;
            // a handful of k values per q before drawing a fresh q
            for _ in 0..(4 * p_bits) {
                attempts += 1;
                let mut k = &lo + random_below(&span, rng);
                if k.is_odd() {
                    k += 1u32;
                    if k > hi {
                        continue;
                    }
                }
                let p = &k * &q + 1u32;
                if !is_probable_prime(&p) {
                    continue;
                }
                let exp = (&p - 1u32) / &q;
                let two = BigUint::from(2u32);
                let range = &p - 3u32;
                for _ in 0..64 {
                    let alpha = random_below(&range, rng) + &two;
                    let g = alpha.modpow(&exp, &p);
                    if !g.is_one() {
                        return Self::new(p, q, g);
                    }
                }
            }
        }
        Err(Error::GenerationTimeout(attempts))
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn generator(&self) -> Element {
        Element(self.g.clone())
    }

    pub fn identity(&self) -> Element {
        Element(BigUint::one())
    }

    /// Reduce any integer mod `q`.
    pub fn scalar(&self, v: impl Into<BigUint>) -> Scalar {
        Scalar(v.into() % &self.q)
    }

    /// Signed convenience constructor: `scalar_i64(-7)` is `q - 7`.
    pub fn scalar_i64(&self, v: i64) -> Scalar {
        let s = self.scalar(v.unsigned_abs());
        if v < 0 {
            self.neg(&s)
        } else {
            s
        }
    }

    /// Accept an integer already in `[0, q)`.
    pub fn scalar_checked(&self, v: BigUint) -> Result<Scalar> {
        if v < self.q {
            Ok(Scalar(v))
        } else {
            Err(Error::ScalarOutOfRange)
        }
    }

    /// Accept an integer in `[1, p)`. Subgroup membership is not checked here.
    pub fn element(&self, v: impl Into<BigUint>) -> Result<Element> {
        let v = v.into();
        if v.is_zero() || v >= self.p {
            return Err(Error::ElementOutOfRange);
        }
        Ok(Element(v))
    }

    /// Accept an integer in `[1, p)` that also satisfies `v^q = 1`.
    pub fn subgroup_element(&self, v: impl Into<BigUint>) -> Result<Element> {
        let e = self.element(v)?;
        if self.in_subgroup(&e) {
            Ok(e)
        } else {
            Err(Error::NotInSubgroup)
        }
    }

    pub fn in_subgroup(&self, e: &Element) -> bool {
        e.0.modpow(&self.q, &self.p).is_one()
    }

    pub fn scalar_from_bytes(&self, bytes: &[u8]) -> Result<Scalar> {
        self.scalar_checked(BigUint::from_bytes_be(bytes))
    }

    pub fn element_from_bytes(&self, bytes: &[u8]) -> Result<Element> {
        self.element(BigUint::from_bytes_be(bytes))
    }

    pub fn scalar_from_hex(&self, s: &str) -> Result<Scalar> {
        self.scalar_checked(parse_hex(s)?)
    }

    pub fn element_from_hex(&self, s: &str) -> Result<Element> {
        self.element(parse_hex(s)?)
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % &self.q)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &self.q - &b.0) % &self.q)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 * &b.0) % &self.q)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        Scalar((&self.q - &a.0) % &self.q)
    }

    /// Inverse mod `q` by the extended Euclidean algorithm.
    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        mod_inverse(&a.0, &self.q).map(Scalar).ok_or(Error::NonInvertible)
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Scalar>>(&self, items: I) -> Scalar {
        items
            .into_iter()
            .fold(Scalar(BigUint::zero()), |acc, s| self.add(&acc, s))
    }

    /// `base^e mod p`.
    pub fn exp(&self, base: &Element, e: &Scalar) -> Element {
        Element(base.0.modpow(&e.0, &self.p))
    }

    /// `g^e mod p`.
    pub fn gexp(&self, e: &Scalar) -> Element {
        Element(self.g.modpow(&e.0, &self.p))
    }

    /// `base^(-e)`, i.e. `base^(q - e)`; valid for subgroup members only.
    pub fn exp_neg(&self, base: &Element, e: &Scalar) -> Element {
        self.exp(base, &self.neg(e))
    }

    /// Product mod `p`.
    pub fn mul_el(&self, a: &Element, b: &Element) -> Element {
        Element((&a.0 * &b.0) % &self.p)
    }

    pub fn product<'a, I: IntoIterator<Item = &'a Element>>(&self, items: I) -> Element {
        items.into_iter().fold(self.identity(), |acc, e| self.mul_el(&acc, e))
    }

    /// Uniform in `[0, q)`.
    pub fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(random_below(&self.q, rng))
    }

    /// Uniform in `[1, q)`.
    pub fn random_nonzero_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random_scalar(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }
}

/// Inverse of `a` mod `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let m_int = BigInt::from(m.clone());
    let ext = BigInt::from(a % m).extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return None;
    }
    ext.x.mod_floor(&m_int).to_biguint()
}

/// Uniform in `[0, bound)` by rejection sampling; `bound` must be nonzero.
pub(crate) fn random_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits() as usize;
    let nbytes = bits.div_ceil(8);
    let excess = nbytes * 8 - bits;
    let mut buf = alloc::vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(first) = buf.first_mut() {
            *first &= 0xffu8 >> excess;
        }
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

fn random_prime<R: RngCore + ?Sized>(bits: usize, rng: &mut R, attempts: &mut usize) -> Result<BigUint> {
    let span = BigUint::one() << (bits - 1);
    while *attempts < GENERATION_ATTEMPTS {
        *attempts += 1;
        let mut c = random_below(&span, rng) + &span;
        c |= BigUint::one();
        if is_probable_prime(&c) {
            return Ok(c);
        }
    }
    Err(Error::GenerationTimeout(*attempts))
}

/// A private exponent and its public key `y = g^x`.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub secret: Scalar,
    pub public: Element,
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl KeyPair {
    pub fn from_secret(params: &GroupParams, secret: Scalar) -> Result<Self> {
        if secret.is_zero() {
            return Err(Error::ZeroSecret);
        }
        let public = params.gexp(&secret);
        Ok(KeyPair { secret, public })
    }

    pub fn generate<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> Self {
        let secret = params.random_nonzero_scalar(rng);
        let public = params.gexp(&secret);
        KeyPair { secret, public }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn toy() -> GroupParams {
        GroupParams::from_u64(23, 11, 3).unwrap()
    }

    #[test]
    fn validates_worked_example_parameters() {
        assert!(GroupParams::from_u64(23, 11, 3).is_ok());
        assert!(GroupParams::from_u64(47, 23, 2).is_ok());
        assert_eq!(GroupParams::from_u64(23, 11, 1), Err(Error::TrivialGenerator));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(GroupParams::from_u64(21, 11, 3), Err(Error::NotPrime(Modulus::P)));
        assert_eq!(GroupParams::from_u64(23, 9, 3), Err(Error::NotPrime(Modulus::Q)));
        assert_eq!(GroupParams::from_u64(23, 7, 3), Err(Error::OrderMismatch));
        // 5 generates all of Z_23^*, so its order is 22, not 11
        assert_eq!(GroupParams::from_u64(23, 11, 5), Err(Error::OrderMismatch));
        assert_eq!(GroupParams::from_u64(23, 11, 23), Err(Error::OrderMismatch));
    }

    #[test]
    fn generated_parameters_validate() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let params = GroupParams::generate(8, 16, &mut rng).unwrap();
        assert_eq!(params.q().bits(), 8);
        assert_eq!(params.p().bits(), 16);
        let again = GroupParams::new(
            params.p().clone(),
            params.q().clone(),
            params.generator().value().clone(),
        );
        assert_eq!(again.unwrap(), params);
    }

    #[test]
    fn generation_rejects_bad_bit_lengths() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(matches!(
            GroupParams::generate(4, 4, &mut rng),
            Err(Error::InvalidBitLengths { .. })
        ));
        assert!(matches!(
            GroupParams::generate(16, 16, &mut rng),
            Err(Error::InvalidBitLengths { .. })
        ));
    }

    #[test]
    fn exponentiation_examples() {
        let params = toy();
        assert_eq!(params.gexp(&params.scalar(4u32)), 12);
        assert_eq!(params.gexp(&params.scalar(0u32)), 1);
        let params = GroupParams::from_u64(47, 23, 2).unwrap();
        assert_eq!(params.gexp(&params.scalar_i64(-7)), 18);
        assert_eq!(params.exp_neg(&params.generator(), &params.scalar(7u32)), 18);
    }

    #[test]
    fn scalar_examples() {
        let params = toy();
        assert_eq!(params.inv(&params.scalar(4u32)).unwrap(), 3);
        assert_eq!(params.inv(&params.scalar(1u32)).unwrap(), 1);
        assert_eq!(params.inv(&params.scalar(0u32)), Err(Error::NonInvertible));
        assert_eq!(params.sub(&params.scalar(2u32), &params.scalar(30u32)), 5);
    }

    #[test]
    fn inverse_matches_brute_force() {
        let params = GroupParams::from_u64(47, 23, 2).unwrap();
        for a in 1u32..23 {
            let brute = (1u32..23).find(|b| (a * b) % 23 == 1).unwrap();
            assert_eq!(params.inv(&params.scalar(a)).unwrap(), brute as u64);
        }
    }

    #[test]
    fn keygen_examples() {
        let kp = |p, q, g, x: u32| {
            let params = GroupParams::from_u64(p, q, g).unwrap();
            KeyPair::from_secret(&params, params.scalar(x)).unwrap().public
        };
        assert_eq!(kp(23, 11, 3, 4), 12);
        assert_eq!(kp(23, 11, 6, 3), 9);
        assert_eq!(kp(47, 23, 25, 13), 16);
        let params = toy();
        assert_eq!(
            KeyPair::from_secret(&params, params.scalar(11u32)),
            Err(Error::ZeroSecret)
        );
    }

    #[test]
    fn element_range_is_enforced() {
        let params = toy();
        assert_eq!(params.element(0u32), Err(Error::ElementOutOfRange));
        assert_eq!(params.element(23u32), Err(Error::ElementOutOfRange));
        assert!(params.element(22u32).is_ok());
        assert_eq!(params.subgroup_element(5u32), Err(Error::NotInSubgroup));
        assert!(params.subgroup_element(12u32).is_ok());
    }

    proptest! {
        #[test]
        fn exponent_laws(x in 1u64..11, y in 1u64..11, e in 0u64..1000) {
            let params = toy();
            let (sx, sy) = (params.scalar(x), params.scalar(y));
            let gx = params.gexp(&sx);
            prop_assert_eq!(params.exp(&gx, &sy), params.gexp(&params.mul(&sx, &sy)));
            prop_assert_eq!(params.gexp(&params.scalar(11u32)), params.identity());
            // exp with the raw integer e matches exp with e mod q
            let raw = params.generator().value().modpow(&BigUint::from(e), params.p());
            prop_assert_eq!(params.gexp(&params.scalar(e)).value().clone(), raw);
        }

        #[test]
        fn byte_roundtrip(seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let params = GroupParams::from_u64(47, 23, 2).unwrap();
            let s = params.random_scalar(&mut rng);
            prop_assert_eq!(params.scalar_from_bytes(&s.to_bytes()).unwrap(), s.clone());
            prop_assert_eq!(params.scalar_from_hex(&s.to_hex()).unwrap(), s);
            let e = params.element(1 + (seed % 46)).unwrap();
            prop_assert_eq!(params.element_from_bytes(&e.to_bytes()).unwrap(), e.clone());
            prop_assert_eq!(params.element_from_hex(&e.to_hex()).unwrap(), e);
        }
    }
}
