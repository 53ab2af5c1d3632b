//! Threshold signing by an organization.
//!
//! In the first form a dealer hands each member `f(u_i)` over a secret
//! channel and any `t` members sign for a designated receiver B: they
//! publish `w_i = g^(K2-K1)`, pool `z_i = y_B^K2` among themselves, and
//! contribute `s_i = K1 - MS_i · R` with `R = h(Z, W, m)`. B checks with
//! `μ = g^S · y_G^R · W` and `Z = μ^x_B`.
//!
//! In the second form both the signing and the verifying side are
//! organizations served by one dealer with masked shares. Signing uses the
//! shared [`envelope`](super::envelope) round; any `k` members of the
//! receiving organization rebuild `R_R = W_S · U_S^ΣMS` and check
//! `g^S_S = R_R · y_S^R_S`.

use alloc::vec::Vec;

use super::envelope::{self, EnvelopeSignature, Verdict};
use super::{check_threshold, points_of, Member, Organization, Verification};
use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, KeyPair, Scalar};
use crate::hash::{HashItem, HashOracle};
use crate::sharing::{check_holder_points, modified_shadow, share_eval, Polynomial, Share};
use crate::zk::Statement;

pub const CH3_TAG: &str = "ch3";
pub const CH4_TAG: &str = "ch4";

/// Public side of a dealer-based group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch3Group {
    pub threshold: usize,
    pub group_public: Element,
    pub points: Vec<Scalar>,
}

/// Deal `f(u_i)` to every point; the shares go out over the secret channel.
pub fn ch3_setup(
    params: &GroupParams,
    poly: &Polynomial,
    threshold: usize,
    points: &[Scalar],
) -> Result<(Ch3Group, Vec<Share>)> {
    check_threshold(threshold, points.len())?;
    if poly.degree() >= threshold {
        return Err(Error::InvalidThreshold);
    }
    check_holder_points(points)?;
    let shares = points
        .iter()
        .map(|u| share_eval(params, poly, u))
        .collect::<Result<Vec<_>>>()?;
    let group = Ch3Group {
        threshold,
        group_public: params.gexp(poly.constant()),
        points: points.to_vec(),
    };
    Ok((group, shares))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch3Commitment {
    /// Published.
    pub w: Element,
    /// Shared only inside the signing subset.
    pub z: Element,
}

pub fn ch3_partial_commit(params: &GroupParams, receiver_public: &Element, k1: &Scalar, k2: &Scalar) -> Ch3Commitment {
    Ch3Commitment {
        w: params.gexp(&params.sub(k2, k1)),
        z: params.exp(receiver_public, k2),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch3Aggregate {
    pub w: Element,
    pub z: Element,
    pub r: Scalar,
}

fn ch3_challenge(
    params: &GroupParams,
    z: &Element,
    w: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<Scalar> {
    oracle.hash_to_scalar(
        params,
        CH3_TAG,
        &[HashItem::Element(z), HashItem::Element(w), HashItem::Bytes(message)],
    )
}

pub fn ch3_aggregate(
    params: &GroupParams,
    commitments: &[Ch3Commitment],
    message: &[u8],
    oracle: &HashOracle,
) -> Result<Ch3Aggregate> {
    let w = params.product(commitments.iter().map(|c| &c.w));
    let z = params.product(commitments.iter().map(|c| &c.z));
    let r = ch3_challenge(params, &z, &w, message, oracle)?;
    Ok(Ch3Aggregate { w, z, r })
}

/// `s_i = K1 - MS_i · R mod q`.
pub fn ch3_partial_sign(
    params: &GroupParams,
    share: &Share,
    subset: &[Scalar],
    k1: &Scalar,
    r: &Scalar,
) -> Result<Scalar> {
    let ms = modified_shadow(params, share, subset)?;
    Ok(params.sub(k1, &params.mul(&ms, r)))
}

pub fn ch3_combine(params: &GroupParams, partials: &[Scalar]) -> Scalar {
    params.sum(partials)
}

/// `{S, W, R, m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch3Signature {
    pub s: Scalar,
    pub w: Element,
    pub r: Scalar,
    pub message: Vec<u8>,
}

pub fn ch3_verify(
    params: &GroupParams,
    sig: &Ch3Signature,
    receiver: &KeyPair,
    group_public: &Element,
    oracle: &HashOracle,
) -> Result<Verification> {
    let mu = params.product([&params.gexp(&sig.s), &params.exp(group_public, &sig.r), &sig.w]);
    let z = params.exp(&mu, &receiver.secret);
    let accepted = ch3_challenge(params, &z, &sig.w, &sig.message, oracle)? == sig.r;
    Ok(Verification { accepted, mu, z })
}

pub fn ch3_validity_statement(params: &GroupParams, v: &Verification, receiver_public: &Element) -> Statement {
    Statement::new(params, v.mu.clone(), v.z.clone(), receiver_public.clone())
}

/// One signer's inputs: its recovered share and its two nonces.
#[derive(Clone, Debug)]
pub struct SignerInput {
    pub share: Share,
    pub k1: Scalar,
    pub k2: Scalar,
}

/// Everything one signing round produced, for inspection and transcripts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch3Run {
    pub commitments: Vec<Ch3Commitment>,
    pub aggregate: Ch3Aggregate,
    pub partials: Vec<Scalar>,
    pub signature: Ch3Signature,
}

/// The whole round, driven by a combiner over `t` signers.
pub fn ch3_sign(
    params: &GroupParams,
    group: &Ch3Group,
    signers: &[SignerInput],
    receiver_public: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<Ch3Run> {
    if signers.len() < group.threshold {
        return Err(Error::ThresholdMismatch {
            expected: group.threshold,
            got: signers.len(),
        });
    }
    let subset: Vec<Scalar> = signers.iter().map(|s| s.share.point.clone()).collect();
    let commitments: Vec<Ch3Commitment> = signers
        .iter()
        .map(|s| ch3_partial_commit(params, receiver_public, &s.k1, &s.k2))
        .collect();
    let aggregate = ch3_aggregate(params, &commitments, message, oracle)?;
    let partials = signers
        .iter()
        .map(|s| ch3_partial_sign(params, &s.share, &subset, &s.k1, &aggregate.r))
        .collect::<Result<Vec<_>>>()?;
    let signature = Ch3Signature {
        s: ch3_combine(params, &partials),
        w: aggregate.w.clone(),
        r: aggregate.r.clone(),
        message: message.to_vec(),
    };
    Ok(Ch3Run {
        commitments,
        aggregate,
        partials,
        signature,
    })
}

/// The two organizations served by one dealer with a common `K`.
pub fn ch4_setup(
    params: &GroupParams,
    signing: (&Polynomial, usize, &[Member]),
    verifying: (&Polynomial, usize, &[Member]),
    k: &Scalar,
) -> Result<(Organization, Organization)> {
    let s = Organization::deal(params, signing.0, signing.1, signing.2, k)?;
    let r = Organization::deal(params, verifying.0, verifying.1, verifying.2, k)?;
    Ok((s, r))
}

/// `s_i = K1 + MS_i · R_S mod q`.
pub fn ch4_partial_sign(
    params: &GroupParams,
    share: &Share,
    subset: &[Scalar],
    k1: &Scalar,
    r: &Scalar,
) -> Result<Scalar> {
    Ok(envelope::partial_sign(
        params,
        k1,
        &modified_shadow(params, share, subset)?,
        r,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeRun {
    pub commitments: Vec<envelope::Commitment>,
    pub aggregate: envelope::Aggregate,
    pub partials: Vec<Scalar>,
    pub signature: EnvelopeSignature,
}

/// Signing by `t` members of the signing organization for the verifying
/// organization's group key.
pub fn ch4_sign(
    params: &GroupParams,
    org: &Organization,
    signers: &[SignerInput],
    receiver_group_public: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<EnvelopeRun> {
    if signers.len() < org.threshold {
        return Err(Error::ThresholdMismatch {
            expected: org.threshold,
            got: signers.len(),
        });
    }
    let subset: Vec<Scalar> = signers.iter().map(|s| s.share.point.clone()).collect();
    let commitments: Vec<_> = signers
        .iter()
        .map(|s| envelope::commit(params, receiver_group_public, &s.k1, &s.k2))
        .collect();
    let aggregate = envelope::aggregate(params, &commitments, message, CH4_TAG, oracle)?;
    let partials = signers
        .iter()
        .map(|s| ch4_partial_sign(params, &s.share, &subset, &s.k1, &aggregate.r))
        .collect::<Result<Vec<_>>>()?;
    let signature = EnvelopeSignature::new(&aggregate, &partials, params, message);
    Ok(EnvelopeRun {
        commitments,
        aggregate,
        partials,
        signature,
    })
}

/// A verifier's modified shadow over the verifying subset.
pub fn ch4_verifier_shadow(
    params: &GroupParams,
    org: &Organization,
    index: usize,
    key: &KeyPair,
    subset: &[usize],
) -> Result<Scalar> {
    let points = org.check_subset(subset)?;
    let share = org.unmask(params, index, key)?;
    modified_shadow(params, &share, &points)
}

/// Check from the pooled shadows of the verifying subset.
pub fn ch4_verify_shadows(
    params: &GroupParams,
    sig: &EnvelopeSignature,
    shadows: &[Scalar],
    signer_group_public: &Element,
    oracle: &HashOracle,
) -> Result<Verdict> {
    envelope::verify_with(
        params,
        sig,
        &params.sum(shadows),
        signer_group_public,
        &params.identity(),
        CH4_TAG,
        oracle,
    )
}

/// `k` members of the verifying organization, each with its own key.
pub fn ch4_verify(
    params: &GroupParams,
    sig: &EnvelopeSignature,
    org: &Organization,
    verifiers: &[(usize, &KeyPair)],
    signer_group_public: &Element,
    oracle: &HashOracle,
) -> Result<Verdict> {
    let subset: Vec<usize> = verifiers.iter().map(|(i, _)| *i).collect();
    let shadows = verifiers
        .iter()
        .map(|(i, key)| ch4_verifier_shadow(params, org, *i, key, &subset))
        .collect::<Result<Vec<_>>>()?;
    ch4_verify_shadows(params, sig, &shadows, signer_group_public, oracle)
}

/// Members for a roster given as `(x_i, u_i)` pairs.
pub fn roster(params: &GroupParams, entries: &[(Scalar, Scalar)]) -> Result<(Vec<Member>, Vec<KeyPair>)> {
    let keys = entries
        .iter()
        .map(|(x, _)| KeyPair::from_secret(params, x.clone()))
        .collect::<Result<Vec<_>>>()?;
    let members = entries
        .iter()
        .zip(&keys)
        .map(|((_, u), k)| Member {
            point: u.clone(),
            public: k.public.clone(),
        })
        .collect::<Vec<_>>();
    check_holder_points(&points_of(&members))?;
    Ok((members, keys))
}
