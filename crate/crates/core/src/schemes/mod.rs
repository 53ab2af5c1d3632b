//! The signature schemes built on the primitives.
//!
//! Every signing operation takes its nonces explicitly; callers that want
//! fresh randomness draw them from the group with
//! [`GroupParams::random_scalar`](crate::GroupParams::random_scalar).

pub mod delegated;
pub mod directed;
pub mod envelope;
pub mod multisig;
pub mod threshold;

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, KeyPair, Scalar};
use crate::sharing::{check_holder_points, mask_share, unmask_share, Polynomial, Share};

/// Public identity of a group member: share point and long-term public key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub point: Scalar,
    pub public: Element,
}

/// Outcome of a receiver-side check that also yields the values a receiver
/// needs for a later confirmation proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub accepted: bool,
    pub mu: Element,
    pub z: Element,
}

pub(crate) fn check_threshold(threshold: usize, n: usize) -> Result<()> {
    if threshold == 0 || threshold > n {
        Err(Error::InvalidThreshold)
    } else {
        Ok(())
    }
}

pub(crate) fn points_of(members: &[Member]) -> Vec<Scalar> {
    members.iter().map(|m| m.point.clone()).collect()
}

/// A member entry on the public channel: identity plus masked share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedMember {
    pub point: Scalar,
    pub public: Element,
    pub v: BigUint,
}

/// An organization whose shares of `f(0)` are published masked under a
/// common `K`, so that member `i` alone recovers `f(u_i)` from `(v_i, W)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Organization {
    pub threshold: usize,
    pub group_public: Element,
    pub w: Element,
    pub members: Vec<MaskedMember>,
}

impl Organization {
    /// Dealer side: `y = g^f(0)` and `v_i = f(u_i) · y_i^K`.
    pub fn deal(
        params: &GroupParams,
        poly: &Polynomial,
        threshold: usize,
        members: &[Member],
        k: &Scalar,
    ) -> Result<Self> {
        check_threshold(threshold, members.len())?;
        if poly.degree() >= threshold {
            return Err(Error::InvalidThreshold);
        }
        check_holder_points(&points_of(members))?;
        let masked: Vec<MaskedMember> = members
            .iter()
            .map(|m| MaskedMember {
                point: m.point.clone(),
                public: m.public.clone(),
                v: mask_share(params, &poly.eval(params, &m.point), &m.public, k).v,
            })
            .collect();
        Ok(Organization {
            threshold,
            group_public: params.gexp(poly.constant()),
            w: params.exp_neg(&params.generator(), k),
            members: masked,
        })
    }

    pub fn member(&self, index: usize) -> Result<&MaskedMember> {
        self.members.get(index).ok_or(Error::UnknownMember(index))
    }

    pub fn points(&self, indices: &[usize]) -> Result<Vec<Scalar>> {
        indices.iter().map(|i| Ok(self.member(*i)?.point.clone())).collect()
    }

    /// Member side: recover `f(u_i)` with the member's own key.
    pub fn unmask(&self, params: &GroupParams, index: usize, key: &KeyPair) -> Result<Share> {
        let m = self.member(index)?;
        Ok(Share {
            point: m.point.clone(),
            value: unmask_share(params, &m.v, &self.w, &key.secret)?,
        })
    }

    pub(crate) fn check_subset(&self, indices: &[usize]) -> Result<Vec<Scalar>> {
        if indices.len() < self.threshold {
            return Err(Error::ThresholdMismatch {
                expected: self.threshold,
                got: indices.len(),
            });
        }
        self.points(indices)
    }
}
