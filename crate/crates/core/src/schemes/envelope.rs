//! The commit/aggregate round shared by the organization-to-receiver schemes.
//!
//! Each signer publishes `u_i = g^-K2`, keeps `v_i = g^K1` inside the
//! signing subset, and publishes `w_i = g^K1 · y_R^K2`. The products give
//! `U_S`, `V_S`, `W_S`; the challenge is `R_S = h(V_S, m)`. A receiver
//! holding `x_R` recovers `V_S` as `W_S · U_S^x_R`.

use alloc::vec::Vec;

use crate::error::Result;
use crate::group::{Element, GroupParams, KeyPair, Scalar};
use crate::hash::{HashItem, HashOracle};
use crate::zk::Statement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commitment {
    pub u: Element,
    pub v: Element,
    pub w: Element,
}

pub fn commit(params: &GroupParams, receiver_public: &Element, k1: &Scalar, k2: &Scalar) -> Commitment {
    let v = params.gexp(k1);
    Commitment {
        u: params.exp_neg(&params.generator(), k2),
        w: params.mul_el(&v, &params.exp(receiver_public, k2)),
        v,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aggregate {
    pub u: Element,
    pub v: Element,
    pub w: Element,
    pub r: Scalar,
}

pub fn aggregate(
    params: &GroupParams,
    commitments: &[Commitment],
    message: &[u8],
    tag: &str,
    oracle: &HashOracle,
) -> Result<Aggregate> {
    let u = params.product(commitments.iter().map(|c| &c.u));
    let v = params.product(commitments.iter().map(|c| &c.v));
    let w = params.product(commitments.iter().map(|c| &c.w));
    let r = challenge(params, &v, message, tag, oracle)?;
    Ok(Aggregate { u, v, w, r })
}

/// `h(V, m)` under the scheme's domain tag.
pub fn challenge(params: &GroupParams, v: &Element, message: &[u8], tag: &str, oracle: &HashOracle) -> Result<Scalar> {
    oracle.hash_to_scalar(params, tag, &[HashItem::Element(v), HashItem::Bytes(message)])
}

/// `s_i = K1 + MS_i · R_S mod q`.
pub fn partial_sign(params: &GroupParams, k1: &Scalar, shadow: &Scalar, r: &Scalar) -> Scalar {
    params.add(k1, &params.mul(shadow, r))
}

/// `{S_S, U_S, W_S, m}` as sent to the receiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeSignature {
    pub s: Scalar,
    pub u: Element,
    pub w: Element,
    pub message: Vec<u8>,
}

impl EnvelopeSignature {
    pub fn new(agg: &Aggregate, partials: &[Scalar], params: &GroupParams, message: &[u8]) -> Self {
        EnvelopeSignature {
            s: params.sum(partials),
            u: agg.u.clone(),
            w: agg.w.clone(),
            message: message.to_vec(),
        }
    }
}

/// `R_R = W_S · U_S^x`.
pub fn receiver_commitment(params: &GroupParams, sig: &EnvelopeSignature, secret: &Scalar) -> Element {
    params.mul_el(&sig.w, &params.exp(&sig.u, secret))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub r_r: Element,
}

/// `g^S_S · C^R_S == R_R · y_S^R_S` with `R_R = W_S · U_S^x`, where the
/// correction `C` is `1` except for per-subset verification keys.
pub fn verify_with(
    params: &GroupParams,
    sig: &EnvelopeSignature,
    secret: &Scalar,
    group_public: &Element,
    correction: &Element,
    tag: &str,
    oracle: &HashOracle,
) -> Result<Verdict> {
    let r_r = receiver_commitment(params, sig, secret);
    let r_s = challenge(params, &r_r, &sig.message, tag, oracle)?;
    let lhs = params.mul_el(&params.gexp(&sig.s), &params.exp(correction, &r_s));
    let rhs = params.mul_el(&r_r, &params.exp(group_public, &r_s));
    Ok(Verdict {
        accepted: lhs == rhs,
        r_r,
    })
}

/// `log_{U_S} μ = log_g y_R` with `μ = U_S^x_R`.
pub fn validity_statement(params: &GroupParams, sig: &EnvelopeSignature, receiver: &KeyPair) -> Statement {
    let mu = params.exp(&sig.u, &receiver.secret);
    Statement::new(params, sig.u.clone(), mu, receiver.public.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::FixtureTable;

    #[test]
    fn commitment_examples() {
        let p25 = GroupParams::from_u64(47, 23, 25).unwrap();
        let c = commit(
            &p25,
            &p25.element(2u32).unwrap(),
            &p25.scalar(18u32),
            &p25.scalar(17u32),
        );
        assert_eq!(
            (c.u, c.v, c.w),
            (
                p25.element(18u32).unwrap(),
                p25.element(4u32).unwrap(),
                p25.element(3u32).unwrap()
            )
        );

        let p3 = GroupParams::from_u64(47, 23, 3).unwrap();
        let c = commit(&p3, &p3.element(25u32).unwrap(), &p3.scalar(11u32), &p3.scalar(13u32));
        assert_eq!(c.v, 4);
        assert_eq!(c.w, 17);
        // the printed u_2 = 1 cannot be g^-13; the correct value is 17
        assert_eq!(c.u, 17);
    }

    #[test]
    fn zero_second_nonce() {
        let p = GroupParams::from_u64(47, 23, 2).unwrap();
        let c = commit(&p, &p.element(34u32).unwrap(), &p.scalar(5u32), &p.scalar(0u32));
        assert!(c.u.is_one());
        assert_eq!(c.w, c.v);
    }

    #[test]
    fn aggregate_uses_fixture_on_v() {
        let p = GroupParams::from_u64(47, 23, 2).unwrap();
        let y_r = p.element(34u32).unwrap();
        let nonces = [(5u64, 7u64), (4, 3), (12, 18), (21, 11)];
        let commits: Vec<_> = nonces
            .iter()
            .map(|(a, b)| commit(&p, &y_r, &p.scalar(*a), &p.scalar(*b)))
            .collect();
        let mut table = FixtureTable::new();
        table.insert(
            "ch4",
            &[HashItem::Element(&p.element(3u32).unwrap()), HashItem::Bytes(b"m")],
            8u32.into(),
        );
        let agg = aggregate(&p, &commits, b"m", "ch4", &HashOracle::Fixture(table)).unwrap();
        assert_eq!(
            (agg.u.clone(), agg.v.clone(), agg.w.clone()),
            (
                p.element(34u32).unwrap(),
                p.element(3u32).unwrap(),
                p.element(18u32).unwrap()
            )
        );
        assert_eq!(agg.r, 8);
    }
}
