//! Directed signatures: only the designated receiver can check them.
//!
//! The signer hides `g^K1` as `V = g^K1 · y_B^K2` next to `W = g^-K2`, so
//! the receiver recovers `R = V · W^x_B = g^K1` and checks
//! `g^S = R · y_A^h(R, m)`. The receiver can hand the same signature to a
//! third party by re-wrapping `R` for that party's key.
//!
//! The threshold variants share `K1` among a group with a polynomial and
//! mask each member's point value for the public channel; any `k` members
//! jointly rebuild `R` from their exponentiated modified shadows.

use alloc::vec::Vec;

use num_bigint::BigUint;
use rand_core::RngCore;

use super::{check_threshold, Member};
use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, KeyPair, Scalar};
use crate::hash::{digest, HashItem, HashOracle};
use crate::sharing::{check_holder_points, mask_share, modified_shadow, unmask_share, Polynomial, Share};

pub const TAG: &str = "ch1";
pub const TC_KEY_TAG: &str = "ch1-tc-key";
const TC_STREAM_TAG: &str = "tc-stream";
const TC_MAC_TAG: &str = "tc-mac";

/// `{S_A, W_B, V_B, m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedSignature {
    pub s: Scalar,
    pub w: Element,
    pub v: Element,
    pub message: Vec<u8>,
}

impl DirectedSignature {
    /// The same signature re-addressed with a new `(W, V)` pair.
    pub fn redirected(&self, w: Element, v: Element) -> Self {
        DirectedSignature {
            s: self.s.clone(),
            w,
            v,
            message: self.message.clone(),
        }
    }
}

fn challenge(params: &GroupParams, r: &Element, message: &[u8], oracle: &HashOracle) -> Result<Scalar> {
    oracle.hash_to_scalar(params, TAG, &[HashItem::Element(r), HashItem::Bytes(message)])
}

/// `g^S == R · y_A^h(R, m)`.
fn check_commitment(
    params: &GroupParams,
    s: &Scalar,
    r: &Element,
    signer_public: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<bool> {
    let e = challenge(params, r, message, oracle)?;
    Ok(params.gexp(s) == params.mul_el(r, &params.exp(signer_public, &e)))
}

/// `S_A = K1 + x_A · h(g^K1, m)`.
fn signature_scalar(
    params: &GroupParams,
    signer: &KeyPair,
    r: &Element,
    message: &[u8],
    k1: &Scalar,
    oracle: &HashOracle,
) -> Result<Scalar> {
    let e = challenge(params, r, message, oracle)?;
    Ok(params.add(k1, &params.mul(&signer.secret, &e)))
}

pub fn sign(
    params: &GroupParams,
    signer: &KeyPair,
    receiver_public: &Element,
    message: &[u8],
    k1: &Scalar,
    k2: &Scalar,
    oracle: &HashOracle,
) -> Result<DirectedSignature> {
    let r = params.gexp(k1);
    let s = signature_scalar(params, signer, &r, message, k1, oracle)?;
    Ok(DirectedSignature {
        s,
        w: params.exp_neg(&params.generator(), k2),
        v: params.mul_el(&r, &params.exp(receiver_public, k2)),
        message: message.to_vec(),
    })
}

/// `R = V · W^x`.
pub fn recover_commitment(params: &GroupParams, sig: &DirectedSignature, receiver: &KeyPair) -> Element {
    params.mul_el(&sig.v, &params.exp(&sig.w, &receiver.secret))
}

pub fn verify(
    params: &GroupParams,
    sig: &DirectedSignature,
    receiver: &KeyPair,
    signer_public: &Element,
    oracle: &HashOracle,
) -> Result<bool> {
    let r = recover_commitment(params, sig, receiver);
    check_commitment(params, &sig.s, &r, signer_public, &sig.message, oracle)
}

/// `(W_C, V_C) = (g^-K, R · y_C^K)`.
pub fn redesignate(params: &GroupParams, r: &Element, third_public: &Element, k: &Scalar) -> (Element, Element) {
    (
        params.exp_neg(&params.generator(), k),
        params.mul_el(r, &params.exp(third_public, k)),
    )
}

/// One member's masked point value `f(u_i) · y_i^K2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedShadow {
    pub point: Scalar,
    pub v: BigUint,
}

/// `{S_A, W_R, m, {v_i}}` with the threshold stated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdVerifySignature {
    pub s: Scalar,
    pub w: Element,
    pub threshold: usize,
    pub shadows: Vec<MaskedShadow>,
    pub message: Vec<u8>,
}

impl ThresholdVerifySignature {
    pub fn shadow_for(&self, point: &Scalar) -> Option<&MaskedShadow> {
        self.shadows.iter().find(|s| s.point == *point)
    }
}

fn masked_shadows(
    params: &GroupParams,
    poly: &Polynomial,
    group: &[Member],
    k2: &Scalar,
) -> Result<(Element, Vec<MaskedShadow>)> {
    let points: Vec<Scalar> = group.iter().map(|m| m.point.clone()).collect();
    check_holder_points(&points)?;
    let mut w = params.exp_neg(&params.generator(), k2);
    let mut shadows = Vec::with_capacity(group.len());
    for m in group {
        let masked = mask_share(params, &poly.eval(params, &m.point), &m.public, k2);
        w = masked.w;
        shadows.push(MaskedShadow {
            point: m.point.clone(),
            v: masked.v,
        });
    }
    Ok((w, shadows))
}

/// Threshold-verifiable signature with a caller-chosen polynomial, `f(0) = K1`.
pub fn tv_sign_with_polynomial(
    params: &GroupParams,
    signer: &KeyPair,
    group: &[Member],
    threshold: usize,
    poly: &Polynomial,
    message: &[u8],
    k2: &Scalar,
    oracle: &HashOracle,
) -> Result<ThresholdVerifySignature> {
    check_threshold(threshold, group.len())?;
    if poly.degree() >= threshold {
        return Err(Error::InvalidThreshold);
    }
    let (w, shadows) = masked_shadows(params, poly, group, k2)?;
    let k1 = poly.constant();
    let s = signature_scalar(params, signer, &params.gexp(k1), message, k1, oracle)?;
    Ok(ThresholdVerifySignature {
        s,
        w,
        threshold,
        shadows,
        message: message.to_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn tv_sign<R: RngCore + ?Sized>(
    params: &GroupParams,
    signer: &KeyPair,
    group: &[Member],
    threshold: usize,
    message: &[u8],
    k1: &Scalar,
    k2: &Scalar,
    rng: &mut R,
    oracle: &HashOracle,
) -> Result<ThresholdVerifySignature> {
    check_threshold(threshold, group.len())?;
    let poly = Polynomial::random(params, k1.clone(), threshold - 1, rng);
    tv_sign_with_polynomial(params, signer, group, threshold, &poly, message, k2, oracle)
}

/// `R_i = g^MS_i` for a member of the verifying subset.
pub fn tv_member_partial(
    params: &GroupParams,
    member: &KeyPair,
    shadow: &MaskedShadow,
    w: &Element,
    subset: &[Scalar],
) -> Result<Element> {
    let value = unmask_share(params, &shadow.v, w, &member.secret)?;
    let share = Share {
        point: shadow.point.clone(),
        value,
    };
    Ok(params.gexp(&modified_shadow(params, &share, subset)?))
}

fn combine_partials(params: &GroupParams, threshold: usize, partials: &[Element]) -> Result<Element> {
    if partials.len() < threshold {
        return Err(Error::ThresholdMismatch {
            expected: threshold,
            got: partials.len(),
        });
    }
    Ok(params.product(partials))
}

/// `R = ∏ R_i`, then the usual check against the signer's key.
pub fn tv_combine_verify(
    params: &GroupParams,
    sig: &ThresholdVerifySignature,
    partials: &[Element],
    signer_public: &Element,
    oracle: &HashOracle,
) -> Result<bool> {
    let r = combine_partials(params, sig.threshold, partials)?;
    check_commitment(params, &sig.s, &r, signer_public, &sig.message, oracle)
}

/// `{S_A, W_R, c, {v_i}}` plus a MAC tag over the plaintext.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdCiphertext {
    pub s: Scalar,
    pub w: Element,
    pub threshold: usize,
    pub shadows: Vec<MaskedShadow>,
    pub ciphertext: Vec<u8>,
    pub mac: [u8; 32],
}

impl ThresholdCiphertext {
    pub fn shadow_for(&self, point: &Scalar) -> Option<&MaskedShadow> {
        self.shadows.iter().find(|s| s.point == *point)
    }
}

fn session_key(params: &GroupParams, r: &Element, oracle: &HashOracle) -> Result<Scalar> {
    oracle.hash_to_scalar(params, TC_KEY_TAG, &[HashItem::Element(r)])
}

/// XOR with SHA-256 blocks of `("tc-stream", K, i)`.
pub fn keystream_xor(key: &Scalar, data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len());
    for (i, chunk) in data.chunks(32).enumerate() {
        let block = digest(TC_STREAM_TAG, &[HashItem::Scalar(key), HashItem::Counter(i as u64)]);
        out.extend(chunk.iter().zip(block.iter()).map(|(a, b)| a ^ b));
    }
    out
}

pub fn mac(key: &Scalar, message: &[u8]) -> [u8; 32] {
    digest(TC_MAC_TAG, &[HashItem::Scalar(key), HashItem::Bytes(message)])
}

#[allow(clippy::too_many_arguments)]
pub fn tc_encrypt<R: RngCore + ?Sized>(
    params: &GroupParams,
    signer: &KeyPair,
    group: &[Member],
    threshold: usize,
    message: &[u8],
    k1: &Scalar,
    k2: &Scalar,
    rng: &mut R,
    oracle: &HashOracle,
) -> Result<ThresholdCiphertext> {
    let sig = tv_sign(params, signer, group, threshold, message, k1, k2, rng, oracle)?;
    let key = session_key(params, &params.gexp(k1), oracle)?;
    Ok(ThresholdCiphertext {
        s: sig.s,
        w: sig.w,
        threshold: sig.threshold,
        shadows: sig.shadows,
        ciphertext: keystream_xor(&key, message),
        mac: mac(&key, message),
    })
}

/// Rebuild `R` from `k` partials, derive `K = h(R)`, decrypt, and check both
/// the MAC and the signature on the recovered plaintext.
pub fn tc_decrypt(
    params: &GroupParams,
    ct: &ThresholdCiphertext,
    partials: &[Element],
    signer_public: &Element,
    oracle: &HashOracle,
) -> Result<Vec<u8>> {
    let r = combine_partials(params, ct.threshold, partials)?;
    let key = session_key(params, &r, oracle)?;
    let plain = keystream_xor(&key, &ct.ciphertext);
    if mac(&key, &plain) != ct.mac {
        return Err(Error::DecryptionMismatch);
    }
    if !check_commitment(params, &ct.s, &r, signer_public, &plain, oracle)? {
        return Err(Error::DecryptionMismatch);
    }
    Ok(plain)
}
