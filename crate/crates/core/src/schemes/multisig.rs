//! Directed threshold multi-signatures.
//!
//! All three variants sign with the shared [`envelope`](super::envelope)
//! round and let the combiner check each partial `s_i` against public
//! per-member values before adding it, so a bad contribution is traced to
//! its signer. The receiver recovers `R_R = W_S · U_S^x_R`.
//!
//! * With a dealer: member `i` holds `l_i = K_i + f(u_i)` and the public
//!   `m_i = g^l_i`, `n_i = g^K_i`. The receiver corrects the group key with
//!   `E = ∏ n_i^λ_i` over the signing subset.
//! * Without a dealer: every member deals a polynomial `f_i` to the others,
//!   blinded pairwise by `h_ij`. Signers fold in the shares received from
//!   non-signers; the correction is `E = ∏_i (∏_j n_ji)^C_i`.
//! * With authorized subsets: each subset gets its own degree-`t`
//!   polynomial through `(0, x_s)` and the members' `(u_i, k_i)`, plus one
//!   extra point `u_H` absorbed into the verification key
//!   `V_K = g^(f(u_H) · Λ_H)`.

use alloc::vec::Vec;

use num_bigint::BigUint;

use super::envelope::{self, Aggregate, Commitment, EnvelopeSignature, Verdict};
use super::threshold::SignerInput;
use super::{check_threshold, points_of, Member};
use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, KeyPair, Scalar};
use crate::hash::HashOracle;
use crate::sharing::{
    check_holder_points, lagrange_weight, mask_share, modified_shadow, unmask_share, Polynomial, Share,
};

pub const CH5_TAG: &str = "ch5";
pub const CH6_TAG: &str = "ch6";
pub const CH7_TAG: &str = "ch7";

/// One signing round before combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub subset: Vec<usize>,
    pub commitments: Vec<Commitment>,
    pub aggregate: Aggregate,
    pub partials: Vec<Scalar>,
}

fn zero(params: &GroupParams) -> Scalar {
    params.scalar(0u32)
}

fn weight_at_zero(params: &GroupParams, point: &Scalar, subset: &[Scalar]) -> Result<Scalar> {
    lagrange_weight(params, &zero(params), point, subset)
}

fn get<T>(items: &[T], index: usize) -> Result<&T> {
    items.get(index).ok_or(Error::UnknownMember(index))
}

fn commit_round(
    params: &GroupParams,
    subset: Vec<usize>,
    nonces: &[(&Scalar, &Scalar)],
    receiver_public: &Element,
    message: &[u8],
    tag: &str,
    oracle: &HashOracle,
) -> Result<(Vec<usize>, Vec<Commitment>, Aggregate)> {
    let commitments: Vec<Commitment> = nonces
        .iter()
        .map(|(k1, k2)| envelope::commit(params, receiver_public, k1, k2))
        .collect();
    let aggregate = envelope::aggregate(params, &commitments, message, tag, oracle)?;
    Ok((subset, commitments, aggregate))
}

/// `g^s_i == v_i · (m_i^λ_i)^R_S`, naming the signer on failure.
pub fn share_check(
    params: &GroupParams,
    index: usize,
    s_i: &Scalar,
    v_i: &Element,
    m_i: &Element,
    lambda: &Scalar,
    r: &Scalar,
) -> Result<()> {
    let rhs = params.mul_el(v_i, &params.exp(&params.exp(m_i, lambda), r));
    if params.gexp(s_i) == rhs {
        Ok(())
    } else {
        Err(Error::PartialRejected(index))
    }
}

fn combine_checked<F>(params: &GroupParams, round: &Round, message: &[u8], mut check: F) -> Result<EnvelopeSignature>
where
    F: FnMut(usize, &Scalar, &Element) -> Result<()>,
{
    if round.partials.len() != round.subset.len() || round.commitments.len() != round.subset.len() {
        return Err(Error::ThresholdMismatch {
            expected: round.subset.len(),
            got: round.partials.len(),
        });
    }
    for ((index, s_i), c) in round.subset.iter().zip(&round.partials).zip(&round.commitments) {
        check(*index, s_i, &c.v)?;
    }
    Ok(EnvelopeSignature::new(
        &round.aggregate,
        &round.partials,
        params,
        message,
    ))
}

fn check_subset_size(threshold: usize, subset: &[usize]) -> Result<()> {
    if subset.len() < threshold {
        return Err(Error::ThresholdMismatch {
            expected: threshold,
            got: subset.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch5Member {
    pub point: Scalar,
    pub public: Element,
    pub m: Element,
    pub n: Element,
    pub v: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch5Setup {
    pub threshold: usize,
    pub group_public: Element,
    pub w: Element,
    pub members: Vec<Ch5Member>,
}

/// Dealer: `l_i = K_i + f(u_i)`, `m_i = g^l_i`, `n_i = g^K_i`, masked `v_i`.
pub fn ms5_setup(
    params: &GroupParams,
    poly: &Polynomial,
    threshold: usize,
    members: &[Member],
    member_secrets: &[Scalar],
    k: &Scalar,
) -> Result<Ch5Setup> {
    check_threshold(threshold, members.len())?;
    if poly.degree() >= threshold || member_secrets.len() != members.len() {
        return Err(Error::InvalidThreshold);
    }
    check_holder_points(&points_of(members))?;
    let rows = members
        .iter()
        .zip(member_secrets)
        .map(|(m, k_i)| {
            let l = params.add(k_i, &poly.eval(params, &m.point));
            Ch5Member {
                point: m.point.clone(),
                public: m.public.clone(),
                m: params.gexp(&l),
                n: params.gexp(k_i),
                v: mask_share(params, &l, &m.public, k).v,
            }
        })
        .collect();
    Ok(Ch5Setup {
        threshold,
        group_public: params.gexp(poly.constant()),
        w: params.exp_neg(&params.generator(), k),
        members: rows,
    })
}

impl Ch5Setup {
    pub fn unmask(&self, params: &GroupParams, index: usize, key: &KeyPair) -> Result<Share> {
        let m = get(&self.members, index)?;
        Ok(Share {
            point: m.point.clone(),
            value: unmask_share(params, &m.v, &self.w, &key.secret)?,
        })
    }

    pub fn points(&self, subset: &[usize]) -> Result<Vec<Scalar>> {
        subset
            .iter()
            .map(|i| Ok(get(&self.members, *i)?.point.clone()))
            .collect()
    }
}

/// `s_i = K1 + l_i λ_i R_S`.
pub fn ms5_partial_sign(
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

pub fn ms5_dc_check(
    params: &GroupParams,
    setup: &Ch5Setup,
    subset: &[usize],
    index: usize,
    s_i: &Scalar,
    v_i: &Element,
    r: &Scalar,
) -> Result<()> {
    let points = setup.points(subset)?;
    let member = get(&setup.members, index)?;
    let lambda = weight_at_zero(params, &member.point, &points)?;
    share_check(params, index, s_i, v_i, &member.m, &lambda, r)
}

/// Commit, aggregate and sign for the members in `signers` (member index, inputs).
pub fn ms5_round(
    params: &GroupParams,
    setup: &Ch5Setup,
    signers: &[(usize, SignerInput)],
    receiver_public: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<Round> {
    let subset: Vec<usize> = signers.iter().map(|(i, _)| *i).collect();
    check_subset_size(setup.threshold, &subset)?;
    let points = setup.points(&subset)?;
    let nonces: Vec<_> = signers.iter().map(|(_, s)| (&s.k1, &s.k2)).collect();
    let (subset, commitments, aggregate) =
        commit_round(params, subset, &nonces, receiver_public, message, CH5_TAG, oracle)?;
    let partials = signers
        .iter()
        .map(|(_, s)| ms5_partial_sign(params, &s.share, &points, &s.k1, &aggregate.r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Round {
        subset,
        commitments,
        aggregate,
        partials,
    })
}

/// Combiner: check every partial, then sum.
pub fn ms5_combine(params: &GroupParams, setup: &Ch5Setup, round: &Round, message: &[u8]) -> Result<EnvelopeSignature> {
    combine_checked(params, round, message, |i, s_i, v_i| {
        ms5_dc_check(params, setup, &round.subset, i, s_i, v_i, &round.aggregate.r)
    })
}

/// `E = ∏ n_i^λ_i` over the signing subset.
pub fn ms5_correction(params: &GroupParams, setup: &Ch5Setup, subset: &[usize]) -> Result<Element> {
    let points = setup.points(subset)?;
    let mut e = params.identity();
    for i in subset {
        let m = get(&setup.members, *i)?;
        e = params.mul_el(&e, &params.exp(&m.n, &weight_at_zero(params, &m.point, &points)?));
    }
    Ok(e)
}

/// `g^S_S == R_R · (E · y_S)^R_S`.
pub fn ms5_verify(
    params: &GroupParams,
    sig: &EnvelopeSignature,
    receiver: &KeyPair,
    group_public: &Element,
    correction: &Element,
    oracle: &HashOracle,
) -> Result<Verdict> {
    let key = params.mul_el(correction, group_public);
    envelope::verify_with(params, sig, &receiver.secret, &key, &params.identity(), CH5_TAG, oracle)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch6Member {
    pub point: Scalar,
    pub public: Element,
    /// `y_i = g^f_i(0)`.
    pub partial_public: Element,
}

/// What dealer `i` publishes for member `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dealt {
    pub m: Element,
    pub n: Element,
    pub v: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch6Setup {
    pub threshold: usize,
    pub group_public: Element,
    pub w: Element,
    pub members: Vec<Ch6Member>,
    /// `dealt[i][j]`, empty on the diagonal.
    pub dealt: Vec<Vec<Option<Dealt>>>,
}

/// Every member deals `l_ij = h_ij + f_i(u_j)` to every other member;
/// `pairwise[i][j]` is `h_ij` (the diagonal is ignored).
pub fn ms6_setup(
    params: &GroupParams,
    polys: &[Polynomial],
    threshold: usize,
    members: &[Member],
    pairwise: &[Vec<Scalar>],
    k: &Scalar,
) -> Result<Ch6Setup> {
    let n = members.len();
    check_threshold(threshold, n)?;
    if polys.len() != n || pairwise.len() != n || pairwise.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidThreshold);
    }
    if polys.iter().any(|f| f.degree() >= threshold) {
        return Err(Error::InvalidThreshold);
    }
    check_holder_points(&points_of(members))?;
    let mut dealt = Vec::with_capacity(n);
    for (i, f) in polys.iter().enumerate() {
        let row = members
            .iter()
            .enumerate()
            .map(|(j, mj)| {
                (i != j).then(|| {
                    let h = &pairwise[i][j];
                    let l = params.add(h, &f.eval(params, &mj.point));
                    Dealt {
                        m: params.gexp(&l),
                        n: params.gexp(h),
                        v: mask_share(params, &l, &mj.public, k).v,
                    }
                })
            })
            .collect();
        dealt.push(row);
    }
    let rows: Vec<Ch6Member> = members
        .iter()
        .zip(polys)
        .map(|(m, f)| Ch6Member {
            point: m.point.clone(),
            public: m.public.clone(),
            partial_public: params.gexp(f.constant()),
        })
        .collect();
    Ok(Ch6Setup {
        threshold,
        group_public: params.product(rows.iter().map(|r| &r.partial_public)),
        w: params.exp_neg(&params.generator(), k),
        members: rows,
        dealt,
    })
}

/// A member's private state after dealing: its own `f_i(0)` and the
/// unmasked `l_ji` from every other dealer.
#[derive(Clone, PartialEq, Eq)]
pub struct Ch6Holder {
    pub index: usize,
    pub constant: Scalar,
    pub received: Vec<Option<Scalar>>,
}

impl core::fmt::Debug for Ch6Holder {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Ch6Holder")
            .field("index", &self.index)
            .finish_non_exhaustive()
    }
}

impl Ch6Setup {
    pub fn points(&self, subset: &[usize]) -> Result<Vec<Scalar>> {
        subset
            .iter()
            .map(|i| Ok(get(&self.members, *i)?.point.clone()))
            .collect()
    }

    fn dealt(&self, dealer: usize, holder: usize) -> Result<&Dealt> {
        get(&self.dealt, dealer)?
            .get(holder)
            .and_then(Option::as_ref)
            .ok_or(Error::UnknownMember(holder))
    }

    pub fn holder(
        &self,
        params: &GroupParams,
        index: usize,
        key: &KeyPair,
        own_poly: &Polynomial,
    ) -> Result<Ch6Holder> {
        get(&self.members, index)?;
        let received = (0..self.members.len())
            .map(|j| {
                if j == index {
                    Ok(None)
                } else {
                    unmask_share(params, &self.dealt(j, index)?.v, &self.w, &key.secret).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ch6Holder {
            index,
            constant: own_poly.constant().clone(),
            received,
        })
    }

    fn outsiders(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.members.len()).filter(|j| !subset.contains(j)).collect()
    }

    /// `C_i`, the weight of member `i` at zero over the signing subset.
    pub fn weight(&self, params: &GroupParams, index: usize, subset: &[usize]) -> Result<Scalar> {
        weight_at_zero(params, &get(&self.members, index)?.point, &self.points(subset)?)
    }
}

/// `MS_i = C_i · Σ_{j∉H} l_ji`.
pub fn ms6_shadow(params: &GroupParams, setup: &Ch6Setup, holder: &Ch6Holder, subset: &[usize]) -> Result<Scalar> {
    let c = setup.weight(params, holder.index, subset)?;
    let mut acc = zero(params);
    for j in setup.outsiders(subset) {
        let l = holder
            .received
            .get(j)
            .and_then(Option::as_ref)
            .ok_or(Error::UnknownMember(j))?;
        acc = params.add(&acc, l);
    }
    Ok(params.mul(&acc, &c))
}

/// `s_i = K1 + (f_i(0) + MS_i) · R_S`.
pub fn ms6_partial_sign(
    params: &GroupParams,
    setup: &Ch6Setup,
    holder: &Ch6Holder,
    subset: &[usize],
    k1: &Scalar,
    r: &Scalar,
) -> Result<Scalar> {
    let ms = ms6_shadow(params, setup, holder, subset)?;
    Ok(envelope::partial_sign(
        params,
        k1,
        &params.add(&holder.constant, &ms),
        r,
    ))
}

/// `g^s_i == v_i · (y_i · ∏_{j∉H} m_ji^C_i)^R_S`.
pub fn ms6_dc_check(
    params: &GroupParams,
    setup: &Ch6Setup,
    subset: &[usize],
    index: usize,
    s_i: &Scalar,
    v_i: &Element,
    r: &Scalar,
) -> Result<()> {
    let c = setup.weight(params, index, subset)?;
    let mut base = get(&setup.members, index)?.partial_public.clone();
    for j in setup.outsiders(subset) {
        base = params.mul_el(&base, &params.exp(&setup.dealt(j, index)?.m, &c));
    }
    share_check(params, index, s_i, v_i, &base, &params.scalar(1u32), r)
}

pub fn ms6_round(
    params: &GroupParams,
    setup: &Ch6Setup,
    signers: &[(&Ch6Holder, Scalar, Scalar)],
    receiver_public: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<Round> {
    let subset: Vec<usize> = signers.iter().map(|(h, _, _)| h.index).collect();
    check_subset_size(setup.threshold, &subset)?;
    setup.points(&subset)?;
    let nonces: Vec<_> = signers.iter().map(|(_, k1, k2)| (k1, k2)).collect();
    let (subset, commitments, aggregate) =
        commit_round(params, subset, &nonces, receiver_public, message, CH6_TAG, oracle)?;
    let partials = signers
        .iter()
        .map(|(h, k1, _)| ms6_partial_sign(params, setup, h, &subset, k1, &aggregate.r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Round {
        subset,
        commitments,
        aggregate,
        partials,
    })
}

pub fn ms6_combine(params: &GroupParams, setup: &Ch6Setup, round: &Round, message: &[u8]) -> Result<EnvelopeSignature> {
    combine_checked(params, round, message, |i, s_i, v_i| {
        ms6_dc_check(params, setup, &round.subset, i, s_i, v_i, &round.aggregate.r)
    })
}

/// `E = ∏_{i∈H} (∏_{j∉H} n_ji)^C_i`.
pub fn ms6_correction(params: &GroupParams, setup: &Ch6Setup, subset: &[usize]) -> Result<Element> {
    let mut e = params.identity();
    for i in subset {
        let c = setup.weight(params, *i, subset)?;
        let mut prod = params.identity();
        for j in setup.outsiders(subset) {
            prod = params.mul_el(&prod, &setup.dealt(j, *i)?.n);
        }
        e = params.mul_el(&e, &params.exp(&prod, &c));
    }
    Ok(e)
}

pub fn ms6_verify(
    params: &GroupParams,
    sig: &EnvelopeSignature,
    receiver: &KeyPair,
    group_public: &Element,
    correction: &Element,
    oracle: &HashOracle,
) -> Result<Verdict> {
    let key = params.mul_el(correction, group_public);
    envelope::verify_with(params, sig, &receiver.secret, &key, &params.identity(), CH6_TAG, oracle)
}

/// Public values for one member of an authorized subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch7Share {
    pub member: usize,
    pub m: Element,
    pub v: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthorizedSubset {
    pub members: Vec<usize>,
    pub point: Scalar,
    pub verification_key: Element,
    pub shares: Vec<Ch7Share>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ch7Setup {
    pub group_public: Element,
    pub w: Element,
    pub members: Vec<Member>,
    pub subsets: Vec<AuthorizedSubset>,
}

/// `l_i = k_i · (0 - u_H) / (u_i - u_H)`.
pub fn ms7_share(params: &GroupParams, k_i: &Scalar, u_i: &Scalar, u_h: &Scalar) -> Result<Scalar> {
    let den = params
        .inv(&params.sub(u_i, u_h))
        .map_err(|_| Error::SubsetPointCollision)?;
    Ok(params.mul(&params.mul(k_i, &params.neg(u_h)), &den))
}

/// Dealer: one polynomial per authorized subset. Returns the public setup and
/// the polynomials, which stay with the dealer.
pub fn ms7_setup(
    params: &GroupParams,
    secret: &Scalar,
    members: &[Member],
    member_values: &[Scalar],
    subsets: &[(Vec<usize>, Scalar)],
    k: &Scalar,
) -> Result<(Ch7Setup, Vec<Polynomial>)> {
    if member_values.len() != members.len() {
        return Err(Error::InvalidThreshold);
    }
    let all_points = points_of(members);
    check_holder_points(&all_points)?;
    let mut out = Vec::with_capacity(subsets.len());
    let mut polys = Vec::with_capacity(subsets.len());
    for (indices, u_h) in subsets {
        check_threshold(indices.len(), members.len())?;
        if u_h.is_zero() || all_points.contains(u_h) {
            return Err(Error::SubsetPointCollision);
        }
        let mut pts = alloc::vec![(zero(params), secret.clone())];
        for i in indices {
            pts.push((get(members, *i)?.point.clone(), get(member_values, *i)?.clone()));
        }
        let f = Polynomial::interpolate(params, &pts)?;
        if pts.iter().any(|(x, y)| f.eval(params, x) != *y) {
            return Err(Error::InterpolationCheckFailed);
        }
        let mut extended: Vec<Scalar> = pts[1..].iter().map(|(x, _)| x.clone()).collect();
        extended.push(u_h.clone());
        let big_lambda = weight_at_zero(params, u_h, &extended)?;
        let shares = indices
            .iter()
            .map(|i| {
                let l = ms7_share(params, &member_values[*i], &members[*i].point, u_h)?;
                Ok(Ch7Share {
                    member: *i,
                    m: params.gexp(&l),
                    v: mask_share(params, &l, &members[*i].public, k).v,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(AuthorizedSubset {
            members: indices.clone(),
            point: u_h.clone(),
            verification_key: params.gexp(&params.mul(&f.eval(params, u_h), &big_lambda)),
            shares,
        });
        polys.push(f);
    }
    Ok((
        Ch7Setup {
            group_public: params.gexp(secret),
            w: params.exp_neg(&params.generator(), k),
            members: members.to_vec(),
            subsets: out,
        },
        polys,
    ))
}

impl Ch7Setup {
    pub fn subset(&self, id: usize) -> Result<&AuthorizedSubset> {
        self.subsets.get(id).ok_or(Error::NotInSubset)
    }

    fn share(&self, id: usize, member: usize) -> Result<&Ch7Share> {
        self.subset(id)?
            .shares
            .iter()
            .find(|s| s.member == member)
            .ok_or(Error::NotInSubset)
    }

    pub fn points(&self, id: usize) -> Result<Vec<Scalar>> {
        let sub = self.subset(id)?;
        sub.members
            .iter()
            .map(|i| Ok(get(&self.members, *i)?.point.clone()))
            .collect()
    }

    /// The member's `l_i` for the given subset.
    pub fn unmask(&self, params: &GroupParams, id: usize, member: usize, key: &KeyPair) -> Result<Share> {
        let share = self.share(id, member)?;
        Ok(Share {
            point: get(&self.members, member)?.point.clone(),
            value: unmask_share(params, &share.v, &self.w, &key.secret)?,
        })
    }
}

pub fn ms7_dc_check(
    params: &GroupParams,
    setup: &Ch7Setup,
    id: usize,
    index: usize,
    s_i: &Scalar,
    v_i: &Element,
    r: &Scalar,
) -> Result<()> {
    let points = setup.points(id)?;
    let lambda = weight_at_zero(params, &get(&setup.members, index)?.point, &points)?;
    share_check(params, index, s_i, v_i, &setup.share(id, index)?.m, &lambda, r)
}

/// Signing by all members of authorized subset `id`, in its listed order.
pub fn ms7_round(
    params: &GroupParams,
    setup: &Ch7Setup,
    id: usize,
    signers: &[SignerInput],
    receiver_public: &Element,
    message: &[u8],
    oracle: &HashOracle,
) -> Result<Round> {
    let sub = setup.subset(id)?;
    if signers.len() != sub.members.len() {
        return Err(Error::ThresholdMismatch {
            expected: sub.members.len(),
            got: signers.len(),
        });
    }
    let points = setup.points(id)?;
    let nonces: Vec<_> = signers.iter().map(|s| (&s.k1, &s.k2)).collect();
    let (subset, commitments, aggregate) = commit_round(
        params,
        sub.members.clone(),
        &nonces,
        receiver_public,
        message,
        CH7_TAG,
        oracle,
    )?;
    let partials = signers
        .iter()
        .map(|s| ms5_partial_sign(params, &s.share, &points, &s.k1, &aggregate.r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Round {
        subset,
        commitments,
        aggregate,
        partials,
    })
}

pub fn ms7_combine(
    params: &GroupParams,
    setup: &Ch7Setup,
    id: usize,
    round: &Round,
    message: &[u8],
) -> Result<EnvelopeSignature> {
    combine_checked(params, round, message, |i, s_i, v_i| {
        ms7_dc_check(params, setup, id, i, s_i, v_i, &round.aggregate.r)
    })
}

/// `V_K^R_S · g^S_S == R_R · y_S^R_S`.
pub fn ms7_verify(
    params: &GroupParams,
    sig: &EnvelopeSignature,
    receiver: &KeyPair,
    group_public: &Element,
    verification_key: &Element,
    oracle: &HashOracle,
) -> Result<Verdict> {
    envelope::verify_with(
        params,
        sig,
        &receiver.secret,
        group_public,
        verification_key,
        CH7_TAG,
        oracle,
    )
}
