//! Shamir sharing over `Z_q`: polynomials, Lagrange weights, modified
//! shadows, and the masked form shares take on a public channel.
//!
//! A masked share is `v = l · y^K mod p` published next to `W = g^-K`; only
//! the holder of `x` (with `y = g^x`) can compute `v · W^x = l`. The value
//! travels as an integer mod `p` but encodes a scalar, so unmasking insists
//! the result is below `q`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, Scalar};

/// `coeffs[0] + coeffs[1]·x + … mod q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    /// An empty coefficient list is the zero polynomial.
    pub fn new(params: &GroupParams, mut coeffs: Vec<Scalar>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(params.scalar(0u32));
        }
        Polynomial { coeffs }
    }

    /// `secret` as the constant term, `degree` uniformly random coefficients above it.
    pub fn random<R: RngCore + ?Sized>(params: &GroupParams, secret: Scalar, degree: usize, rng: &mut R) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        coeffs.push(secret);
        for _ in 0..degree {
            coeffs.push(params.random_scalar(rng));
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Number of stored coefficients minus one; a zero leading coefficient still counts.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant(&self) -> &Scalar {
        &self.coeffs[0]
    }

    pub fn eval(&self, params: &GroupParams, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(params.scalar(0u32), |acc, c| params.add(&params.mul(&acc, x), c))
    }

    /// The unique polynomial of degree `< points.len()` through the given points.
    pub fn interpolate(params: &GroupParams, points: &[(Scalar, Scalar)]) -> Result<Self> {
        let xs: Vec<Scalar> = points.iter().map(|(x, _)| x.clone()).collect();
        ensure_distinct(&xs)?;
        let n = points.len();
        let mut acc = alloc::vec![params.scalar(0u32); n.max(1)];
        for (i, (xi, yi)) in points.iter().enumerate() {
            // basis numerator ∏_{j≠i} (x - x_j), built up coefficient by coefficient
            let mut basis = alloc::vec![params.scalar(1u32)];
            let mut denom = params.scalar(1u32);
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = alloc::vec![params.scalar(0u32); basis.len() + 1];
                for (k, c) in basis.iter().enumerate() {
                    next[k + 1] = params.add(&next[k + 1], c);
                    next[k] = params.sub(&next[k], &params.mul(c, xj));
                }
                basis = next;
                denom = params.mul(&denom, &params.sub(xi, xj));
            }
            let scale = params.mul(yi, &params.inv(&denom).map_err(|_| Error::DuplicatePoints)?);
            for (k, c) in basis.iter().enumerate() {
                acc[k] = params.add(&acc[k], &params.mul(c, &scale));
            }
        }
        Ok(Polynomial { coeffs: acc })
    }
}

/// A holder's public point and secret value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    pub point: Scalar,
    pub value: Scalar,
}

/// `f(u)` for a nonzero holder point `u`.
pub fn share_eval(params: &GroupParams, f: &Polynomial, point: &Scalar) -> Result<Share> {
    if point.is_zero() {
        return Err(Error::ZeroPoint);
    }
    Ok(Share {
        point: point.clone(),
        value: f.eval(params, point),
    })
}

fn ensure_distinct(points: &[Scalar]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].contains(a) {
            return Err(Error::DuplicatePoints);
        }
    }
    Ok(())
}

/// Holder points must be nonzero and pairwise distinct mod `q`.
pub fn check_holder_points(points: &[Scalar]) -> Result<()> {
    if points.iter().any(Scalar::is_zero) {
        return Err(Error::ZeroPoint);
    }
    ensure_distinct(points)
}

/// `∏_{j≠i} (target - u_j) / (u_i - u_j) mod q`.
pub fn lagrange_weight(params: &GroupParams, target: &Scalar, point: &Scalar, subset: &[Scalar]) -> Result<Scalar> {
    if !subset.contains(point) {
        return Err(Error::NotInSubset);
    }
    ensure_distinct(subset)?;
    let mut num = params.scalar(1u32);
    let mut den = params.scalar(1u32);
    for other in subset.iter().filter(|u| *u != point) {
        num = params.mul(&num, &params.sub(target, other));
        den = params.mul(&den, &params.sub(point, other));
    }
    let den_inv = params.inv(&den).map_err(|_| Error::DuplicatePoints)?;
    Ok(params.mul(&num, &den_inv))
}

/// Share value times its Lagrange weight at zero, so that shadows sum to `f(0)`.
pub fn modified_shadow(params: &GroupParams, share: &Share, subset: &[Scalar]) -> Result<Scalar> {
    let zero = params.scalar(0u32);
    let w = lagrange_weight(params, &zero, &share.point, subset)?;
    Ok(params.mul(&share.value, &w))
}

pub fn interpolate_at(params: &GroupParams, target: &Scalar, shares: &[Share]) -> Result<Scalar> {
    let points: Vec<Scalar> = shares.iter().map(|s| s.point.clone()).collect();
    let mut acc = params.scalar(0u32);
    for s in shares {
        let w = lagrange_weight(params, target, &s.point, &points)?;
        acc = params.add(&acc, &params.mul(&s.value, &w));
    }
    Ok(acc)
}

pub fn reconstruct_at_zero(params: &GroupParams, shares: &[Share]) -> Result<Scalar> {
    interpolate_at(params, &params.scalar(0u32), shares)
}

/// A share as published: `v = l · y^K mod p` plus `W = g^-K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedShare {
    pub v: BigUint,
    pub w: Element,
}

pub fn mask_share(params: &GroupParams, l: &Scalar, holder_public: &Element, k: &Scalar) -> MaskedShare {
    let mask = params.exp(holder_public, k);
    MaskedShare {
        v: (l.value() * mask.value()) % params.p(),
        w: params.exp_neg(&params.generator(), k),
    }
}

/// `v · W^x mod p`, which must come out below `q`.
pub fn unmask_share(params: &GroupParams, v: &BigUint, w: &Element, holder_secret: &Scalar) -> Result<Scalar> {
    let unmask = params.exp(w, holder_secret);
    let l = (v * unmask.value()) % params.p();
    params.scalar_checked(l).map_err(|_| Error::ShareOutOfRange)
}
