//! Directed, delegated and threshold signature schemes over a prime-order
//! subgroup of `Z_p^*`.
//!
//! Every scheme in this crate works in the same setting: public parameters
//! `(p, q, g)` where `q | p - 1` and `g` generates the order-`q` subgroup.
//! Exponents live in [`Scalar`] (integers mod `q`), group values in
//! [`Element`] (integers mod `p`).
//!
//! A *directed* signature can only be checked by the receiver it was made
//! for, who uses their own secret key to recover the commitment. The
//! receiver may later convince a third party, either by re-designating the
//! signature or through the interactive proof in [`zk`].
//!
//! Modules:
//!
//! - [`group`]: parameters, scalar/element arithmetic, keys
//! - [`hash`]: the hash oracle (SHA-256 or an injected fixture table)
//! - [`sharing`]: Shamir polynomials, Lagrange weights, masked shares
//! - [`zk`]: the four-move confirmation protocol for `log_μ Z = log_g y`
//! - [`schemes`]: the signature schemes themselves
//!
//! The crate is `no_std` and only needs `alloc`. All randomness comes from a
//! caller-supplied [`rand_core::RngCore`], and every protocol step also has a
//! form taking explicit nonces so runs can be replayed exactly.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod group;
pub mod hash;
mod prime;
pub mod schemes;
pub mod sharing;
pub mod zk;

pub use error::{Error, Result};
pub use group::{Element, GroupParams, KeyPair, Scalar};
pub use hash::{HashItem, HashOracle};
pub use prime::is_probable_prime;
