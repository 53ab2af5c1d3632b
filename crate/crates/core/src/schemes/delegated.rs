//! Proxy-directed signatures.
//!
//! Delegation is a three-message exchange: the original signer A sends
//! `r_A = g^k_A`, the proxy B blinds it to `r = g^α · r_A`, A answers with
//! `s_A = x_A · r + k_A`, and B keeps `S = s_A + α` once
//! `g^S = y_A^r · r` holds. Wherever `r` is used as an exponent it is
//! reduced mod `q`.
//!
//! The proxy then signs for a designated receiver C. Only C can compute
//! `Z = μ^x_C` with `μ = g^S_B · (y_A^r · r)^r_B · W_B` and compare
//! `r_B = h(Z, W_B, m)`.

use alloc::vec::Vec;

use rand_core::RngCore;

use super::Verification;
use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, KeyPair, Scalar};
use crate::hash::{HashItem, HashOracle};
use crate::zk::Statement;

pub const TAG: &str = "ch2";
const BLINDING_ATTEMPTS: usize = 1000;

fn token_exponent(params: &GroupParams, r: &Element) -> Scalar {
    params.scalar(r.value().clone())
}

/// `r_A = g^k_A`.
pub fn del_commit(params: &GroupParams, k_a: &Scalar) -> Element {
    params.gexp(k_a)
}

/// `r = g^α · r_A`, or `None` when `r ≡ 0 mod q` and a fresh `α` is needed.
pub fn del_blind(params: &GroupParams, r_a: &Element, alpha: &Scalar) -> Option<Element> {
    let r = params.mul_el(&params.gexp(alpha), r_a);
    if token_exponent(params, &r).is_zero() {
        None
    } else {
        Some(r)
    }
}

/// Draws `α` until the blinded token is usable.
pub fn del_blind_random<R: RngCore + ?Sized>(
    params: &GroupParams,
    r_a: &Element,
    rng: &mut R,
) -> Result<(Scalar, Element)> {
    for _ in 0..BLINDING_ATTEMPTS {
        let alpha = params.random_scalar(rng);
        if let Some(r) = del_blind(params, r_a, &alpha) {
            return Ok((alpha, r));
        }
    }
    Err(Error::BlindingTimeout(BLINDING_ATTEMPTS))
}

/// `s_A = x_A · (r mod q) + k_A mod q`.
pub fn del_sign(params: &GroupParams, signer: &KeyPair, k_a: &Scalar, r: &Element) -> Scalar {
    params.add(&params.mul(&signer.secret, &token_exponent(params, r)), k_a)
}

/// The proxy's signing key and the public delegation token.
#[derive(Clone, PartialEq, Eq)]
pub struct ProxyKey {
    pub s: Scalar,
    pub r: Element,
}

impl core::fmt::Debug for ProxyKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProxyKey").field("r", &self.r).finish_non_exhaustive()
    }
}

/// `y_A^r · r`, the public counterpart of the proxy key.
pub fn proxy_public(params: &GroupParams, signer_public: &Element, r: &Element) -> Element {
    params.mul_el(&params.exp(signer_public, &token_exponent(params, r)), r)
}

pub fn del_accept(
    params: &GroupParams,
    s_a: &Scalar,
    alpha: &Scalar,
    signer_public: &Element,
    r: &Element,
) -> Result<ProxyKey> {
    let s = params.add(s_a, alpha);
    if params.gexp(&s) == proxy_public(params, signer_public, r) {
        Ok(ProxyKey { s, r: r.clone() })
    } else {
        Err(Error::DelegationCheckFailed)
    }
}

/// Original signer's half of a delegation session.
#[derive(Clone, Debug)]
pub struct Delegator {
    params: GroupParams,
    key: KeyPair,
    k_a: Scalar,
    committed: bool,
    signed: bool,
}

impl Delegator {
    pub fn new(params: &GroupParams, key: KeyPair, k_a: Scalar) -> Self {
        Delegator {
            params: params.clone(),
            key,
            k_a,
            committed: false,
            signed: false,
        }
    }

    pub fn commit(&mut self) -> Result<Element> {
        if self.committed {
            return Err(Error::OutOfOrder);
        }
        self.committed = true;
        Ok(del_commit(&self.params, &self.k_a))
    }

    /// Answers once per session, and only after committing.
    pub fn sign(&mut self, r: &Element) -> Result<Scalar> {
        if !self.committed || self.signed {
            return Err(Error::OutOfOrder);
        }
        self.signed = true;
        Ok(del_sign(&self.params, &self.key, &self.k_a, r))
    }
}

/// Proxy's half of a delegation session.
#[derive(Clone, Debug)]
pub struct Delegate {
    params: GroupParams,
    signer_public: Element,
    alpha: Scalar,
    r: Option<Element>,
    done: bool,
}

impl Delegate {
    pub fn new(params: &GroupParams, signer_public: Element, alpha: Scalar) -> Self {
        Delegate {
            params: params.clone(),
            signer_public,
            alpha,
            r: None,
            done: false,
        }
    }

    /// `None` asks the caller to restart with a fresh `α`.
    pub fn blind(&mut self, r_a: &Element) -> Result<Option<Element>> {
        if self.r.is_some() || self.done {
            return Err(Error::OutOfOrder);
        }
        let r = del_blind(&self.params, r_a, &self.alpha);
        self.r = r.clone();
        Ok(r)
    }

    pub fn accept(&mut self, s_a: &Scalar) -> Result<ProxyKey> {
        let r = self.r.clone().ok_or(Error::OutOfOrder)?;
        if self.done {
            return Err(Error::OutOfOrder);
        }
        self.done = true;
        del_accept(&self.params, s_a, &self.alpha, &self.signer_public, &r)
    }
}

/// `{S_B, W_B, r_B, m}` plus the delegation token `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProxyDirectedSignature {
    pub s: Scalar,
    pub w: Element,
    pub r_b: Scalar,
    pub r: Element,
    pub message: Vec<u8>,
}

fn challenge(params: &GroupParams, z: &Element, w: &Element, message: &[u8], oracle: &HashOracle) -> Result<Scalar> {
    oracle.hash_to_scalar(
        params,
        TAG,
        &[HashItem::Element(z), HashItem::Element(w), HashItem::Bytes(message)],
    )
}

pub fn pd_sign(
    params: &GroupParams,
    proxy: &ProxyKey,
    receiver_public: &Element,
    message: &[u8],
    k1: &Scalar,
    k2: &Scalar,
    oracle: &HashOracle,
) -> Result<ProxyDirectedSignature> {
    let w = params.gexp(&params.sub(k1, k2));
    let z = params.exp(receiver_public, k1);
    let r_b = challenge(params, &z, &w, message, oracle)?;
    Ok(ProxyDirectedSignature {
        s: params.sub(k2, &params.mul(&proxy.s, &r_b)),
        w,
        r_b,
        r: proxy.r.clone(),
        message: message.to_vec(),
    })
}

pub fn pd_verify(
    params: &GroupParams,
    sig: &ProxyDirectedSignature,
    receiver: &KeyPair,
    signer_public: &Element,
    oracle: &HashOracle,
) -> Result<Verification> {
    let public = proxy_public(params, signer_public, &sig.r);
    let mu = params.product([&params.gexp(&sig.s), &params.exp(&public, &sig.r_b), &sig.w]);
    let z = params.exp(&mu, &receiver.secret);
    let accepted = challenge(params, &z, &sig.w, &sig.message, oracle)? == sig.r_b;
    Ok(Verification { accepted, mu, z })
}

/// `log_μ Z = log_g y_C`, proved by the receiver to a third party.
pub fn validity_statement(params: &GroupParams, v: &Verification, receiver_public: &Element) -> Statement {
    Statement::new(params, v.mu.clone(), v.z.clone(), receiver_public.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::FixtureTable;
    use crate::zk::confirm;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    const MSG: &[u8] = b"m";

    fn setup() -> (GroupParams, KeyPair, KeyPair, KeyPair) {
        let p = GroupParams::from_u64(23, 11, 6).unwrap();
        let key = |x: u64| KeyPair::from_secret(&p, p.scalar(x)).unwrap();
        (p.clone(), key(3), key(5), key(6))
    }

    #[test]
    fn worked_example_delegation() {
        let (p, a, _, _) = setup();
        assert_eq!(a.public, 9);
        let r_a = del_commit(&p, &p.scalar(7u32));
        assert_eq!(r_a, 3);
        let r = del_blind(&p, &r_a, &p.scalar(5u32)).unwrap();
        assert_eq!(r, 6);
        let s_a = del_sign(&p, &a, &p.scalar(7u32), &r);
        assert_eq!(s_a, 3);
        let key = del_accept(&p, &s_a, &p.scalar(5u32), &a.public, &r).unwrap();
        assert_eq!(key.s, 8);
        assert_eq!(p.gexp(&key.s), 18);
        assert_eq!(proxy_public(&p, &a.public, &r), 18);
    }

    #[test]
    fn worked_example_signing_and_proof() {
        let (p, a, _, c) = setup();
        assert_eq!(c.public, 12);
        let key = ProxyKey {
            s: p.scalar(8u32),
            r: p.element(6u32).unwrap(),
        };
        let mut table = FixtureTable::new();
        let (z, w) = (p.element(16u32).unwrap(), p.element(2u32).unwrap());
        table.insert(
            TAG,
            &[HashItem::Element(&z), HashItem::Element(&w), HashItem::Bytes(MSG)],
            2u32.into(),
        );
        let oracle = HashOracle::Fixture(table);
        let sig = pd_sign(&p, &key, &c.public, MSG, &p.scalar(7u32), &p.scalar(2u32), &oracle).unwrap();
        assert_eq!(sig.w, 2);
        assert_eq!(sig.r_b, 2);
        assert_eq!(sig.s, 8);
        let v = pd_verify(&p, &sig, &c, &a.public, &oracle).unwrap();
        assert!(v.accepted);
        assert_eq!(v.mu, 3);
        assert_eq!(v.z, 16);

        let st = validity_statement(&p, &v, &c.public);
        let run = confirm(&p, &st, &c.secret, &p.scalar(13u32), &p.scalar(15u32), &p.scalar(8u32)).unwrap();
        assert!(run.accepted);
        assert!(
            !confirm(
                &p,
                &st,
                &p.scalar(5u32),
                &p.scalar(13u32),
                &p.scalar(15u32),
                &p.scalar(8u32)
            )
            .unwrap()
            .accepted
        );
    }

    #[test]
    fn degenerate_inputs() {
        let (p, a, _, c) = setup();
        assert!(del_commit(&p, &p.scalar(0u32)).is_one());
        let r_a = p.element(3u32).unwrap();
        assert_eq!(del_blind(&p, &r_a, &p.scalar(0u32)), Some(r_a.clone()));
        // α = 0: the token is r_A itself and S = s_A
        let r = del_blind(&p, &r_a, &p.scalar(0u32)).unwrap();
        let s_a = del_sign(&p, &a, &p.scalar(7u32), &r);
        assert_eq!(del_accept(&p, &s_a, &p.scalar(0u32), &a.public, &r).unwrap().s, s_a);
        let zero = KeyPair {
            secret: p.scalar(0u32),
            public: p.identity(),
        };
        assert!(del_sign(&p, &zero, &p.scalar(0u32), &r).is_zero());
        let proxy = ProxyKey {
            s: p.scalar(8u32),
            r: p.element(6u32).unwrap(),
        };
        let sig = pd_sign(
            &p,
            &proxy,
            &c.public,
            MSG,
            &p.scalar(4u32),
            &p.scalar(4u32),
            &HashOracle::Standard,
        )
        .unwrap();
        assert!(sig.w.is_one());
    }

    #[test]
    fn blinding_never_yields_zero_token() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let p = GroupParams::generate(8, 12, &mut rng).unwrap();
        for _ in 0..1000 {
            let r_a = p.gexp(&p.random_scalar(&mut rng));
            let (alpha, r) = del_blind_random(&p, &r_a, &mut rng).unwrap();
            assert!(!token_exponent(&p, &r).is_zero());
            assert_eq!(r, p.mul_el(&p.gexp(&alpha), &r_a));
        }
    }

    #[test]
    fn blinding_refuses_zero_token() {
        // over (59, 29, 3) the subgroup contains 29 itself
        let p = GroupParams::from_u64(59, 29, 3).unwrap();
        let r_a = p.element(29u32).unwrap();
        assert!(p.in_subgroup(&r_a));
        assert_eq!(del_blind(&p, &r_a, &p.scalar(0u32)), None);
        assert!(del_blind(&p, &r_a, &p.scalar(1u32)).is_some());
    }

    #[test]
    fn tampered_delegation_is_refused() {
        let (p, a, _, _) = setup();
        let r = p.element(6u32).unwrap();
        assert_eq!(
            del_accept(&p, &p.scalar(4u32), &p.scalar(5u32), &a.public, &r),
            Err(Error::DelegationCheckFailed)
        );
        // binding to the original signer's key
        let other = p.gexp(&p.scalar(4u32));
        assert_eq!(
            del_accept(&p, &p.scalar(3u32), &p.scalar(5u32), &other, &r),
            Err(Error::DelegationCheckFailed)
        );
    }

    #[test]
    fn session_phases() {
        let (p, a, _, _) = setup();
        let mut alice = Delegator::new(&p, a.clone(), p.scalar(7u32));
        let mut bob = Delegate::new(&p, a.public.clone(), p.scalar(5u32));
        assert_eq!(alice.sign(&p.element(6u32).unwrap()), Err(Error::OutOfOrder));
        assert_eq!(bob.accept(&p.scalar(3u32)), Err(Error::OutOfOrder));
        let r_a = alice.commit().unwrap();
        let r = bob.blind(&r_a).unwrap().unwrap();
        let s_a = alice.sign(&r).unwrap();
        assert_eq!(alice.sign(&r), Err(Error::OutOfOrder));
        assert_eq!(bob.accept(&s_a).unwrap().s, 8);
        assert_eq!(bob.accept(&s_a), Err(Error::OutOfOrder));
    }

    fn delegate<R: RngCore>(p: &GroupParams, a: &KeyPair, rng: &mut R) -> ProxyKey {
        let k_a = p.random_scalar(rng);
        let r_a = del_commit(p, &k_a);
        let (alpha, r) = del_blind_random(p, &r_a, rng).unwrap();
        let s_a = del_sign(p, a, &k_a, &r);
        del_accept(p, &s_a, &alpha, &a.public, &r).unwrap()
    }

    #[test]
    fn random_delegations_and_signatures() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let p = GroupParams::generate(16, 32, &mut rng).unwrap();
        for _ in 0..200 {
            let a = KeyPair::generate(&p, &mut rng);
            let c = KeyPair::generate(&p, &mut rng);
            let key = delegate(&p, &a, &mut rng);
            // one proxy key, many messages
            for m in [&b"first"[..], b"second", b""] {
                let (k1, k2) = (p.random_scalar(&mut rng), p.random_scalar(&mut rng));
                let sig = pd_sign(&p, &key, &c.public, m, &k1, &k2, &HashOracle::Standard).unwrap();
                let v = pd_verify(&p, &sig, &c, &a.public, &HashOracle::Standard).unwrap();
                assert!(v.accepted);
                assert_eq!(v.mu, p.gexp(&k1));
            }
        }
    }

    #[test]
    fn forged_signature_or_wrong_key_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let p = GroupParams::generate(32, 48, &mut rng).unwrap();
        let a = KeyPair::generate(&p, &mut rng);
        let c = KeyPair::generate(&p, &mut rng);
        let other = KeyPair::generate(&p, &mut rng);
        let key = delegate(&p, &a, &mut rng);
        let (k1, k2) = (p.random_scalar(&mut rng), p.random_scalar(&mut rng));
        let sig = pd_sign(&p, &key, &c.public, MSG, &k1, &k2, &HashOracle::Standard).unwrap();
        let forged = ProxyDirectedSignature {
            s: p.add(&sig.s, &p.scalar(1u32)),
            ..sig.clone()
        };
        let v = pd_verify(&p, &forged, &c, &a.public, &HashOracle::Standard).unwrap();
        assert!(!v.accepted);
        assert_ne!(v.mu, p.gexp(&k1));
        assert!(
            !pd_verify(&p, &sig, &other, &a.public, &HashOracle::Standard)
                .unwrap()
                .accepted
        );
    }
}
