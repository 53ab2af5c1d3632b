//! Signing and checking signature files outside a session.
//!
//! The single-receiver schemes can be checked by the receiver alone, given
//! the publics in the file's attachments: `signer_public` for `ch1` and
//! `ch2`, `group_public` for `ch3`, `group_public` and `correction` (the
//! subset's `E`) for `ch5` and `ch6`, `group_public` and
//! `verification_key` for `ch7`. The organization-level schemes (`ch4`,
//! `ch1-tv`, `ch1-tc`) need several verifiers and run as scenarios.

use dirsig_core::schemes::delegated::{pd_verify, ProxyDirectedSignature};
use dirsig_core::schemes::directed::{self, DirectedSignature};
use dirsig_core::schemes::envelope::{self, EnvelopeSignature};
use dirsig_core::schemes::multisig::{CH5_TAG, CH6_TAG, CH7_TAG};
use dirsig_core::schemes::threshold::{ch3_verify, Ch3Signature};
use dirsig_core::zk::Statement;
use dirsig_core::{Element, GroupParams, HashOracle, KeyPair, Scalar};

use crate::codec::{b64, hex_element, hex_scalar, SignatureFile};
use crate::HarnessError;

/// The receiver's decision and, when the scheme has one, the statement it
/// can prove to a third party.
#[derive(Clone, Debug)]
pub struct Checked {
    pub accepted: bool,
    pub statement: Option<Statement>,
}

fn scalar(params: &GroupParams, sig: &SignatureFile, name: &str) -> Result<Scalar, HarnessError> {
    Ok(params.scalar_checked(sig.field(name)?)?)
}

fn element(params: &GroupParams, sig: &SignatureFile, name: &str) -> Result<Element, HarnessError> {
    Ok(params.subgroup_element(sig.field(name)?)?)
}

fn attached(params: &GroupParams, sig: &SignatureFile, name: &str) -> Result<Element, HarnessError> {
    Ok(params.subgroup_element(sig.attachment(name)?)?)
}

pub fn directed_signature(params: &GroupParams, sig: &SignatureFile) -> Result<DirectedSignature, HarnessError> {
    Ok(DirectedSignature {
        s: scalar(params, sig, "s")?,
        w: element(params, sig, "w")?,
        v: element(params, sig, "v")?,
        message: sig.message_bytes()?,
    })
}

pub fn sign_ch1(
    params: &GroupParams,
    signer: &KeyPair,
    receiver_public: &Element,
    message: &[u8],
    k1: &Scalar,
    k2: &Scalar,
    oracle: &HashOracle,
) -> Result<SignatureFile, HarnessError> {
    let sig = directed::sign(params, signer, receiver_public, message, k1, k2, oracle)?;
    Ok(ch1_file(&sig, &signer.public))
}

fn ch1_file(sig: &DirectedSignature, signer_public: &Element) -> SignatureFile {
    SignatureFile {
        scheme: "ch1".into(),
        fields: [
            ("s", hex_scalar(&sig.s)),
            ("w", hex_element(&sig.w)),
            ("v", hex_element(&sig.v)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
        message: b64(&sig.message),
        attachments: [(
            "signer_public".to_string(),
            serde_json::Value::String(hex_element(signer_public)),
        )]
        .into_iter()
        .collect(),
    }
}

/// Re-address a `ch1` signature the receiver has accepted to `third_public`.
pub fn redirect_ch1(
    params: &GroupParams,
    sig: &SignatureFile,
    receiver: &KeyPair,
    third_public: &Element,
    k: &Scalar,
    oracle: &HashOracle,
) -> Result<Option<SignatureFile>, HarnessError> {
    let signer = attached(params, sig, "signer_public")?;
    let d = directed_signature(params, sig)?;
    if !directed::verify(params, &d, receiver, &signer, oracle)? {
        return Ok(None);
    }
    let r = directed::recover_commitment(params, &d, receiver);
    let (w, v) = directed::redesignate(params, &r, third_public, k);
    Ok(Some(ch1_file(&d.redirected(w, v), &signer)))
}

fn envelope_signature(params: &GroupParams, sig: &SignatureFile) -> Result<EnvelopeSignature, HarnessError> {
    Ok(EnvelopeSignature {
        s: scalar(params, sig, "s")?,
        u: element(params, sig, "u")?,
        w: element(params, sig, "w")?,
        message: sig.message_bytes()?,
    })
}

/// Check `sig` as its receiver. `message`, when given, replaces the
/// message stored in the file.
pub fn verify_signature(
    params: &GroupParams,
    sig: &SignatureFile,
    receiver: &KeyPair,
    message: Option<&[u8]>,
    oracle: &HashOracle,
) -> Result<Checked, HarnessError> {
    let mut sig = sig.clone();
    if let Some(m) = message {
        sig.message = b64(m);
    }
    let p = params;
    match sig.scheme.as_str() {
        "ch1" => {
            let d = directed_signature(p, &sig)?;
            let accepted = directed::verify(p, &d, receiver, &attached(p, &sig, "signer_public")?, oracle)?;
            Ok(Checked {
                accepted,
                statement: None,
            })
        }
        "ch2" => {
            let d = ProxyDirectedSignature {
                s: scalar(p, &sig, "s")?,
                w: element(p, &sig, "w")?,
                r_b: scalar(p, &sig, "r_b")?,
                r: element(p, &sig, "r")?,
                message: sig.message_bytes()?,
            };
            let v = pd_verify(p, &d, receiver, &attached(p, &sig, "signer_public")?, oracle)?;
            Ok(Checked {
                accepted: v.accepted,
                statement: Some(Statement::new(p, v.mu, v.z, receiver.public.clone())),
            })
        }
        "ch3" => {
            let d = Ch3Signature {
                s: scalar(p, &sig, "s")?,
                w: element(p, &sig, "w")?,
                r: scalar(p, &sig, "r")?,
                message: sig.message_bytes()?,
            };
            let v = ch3_verify(p, &d, receiver, &attached(p, &sig, "group_public")?, oracle)?;
            Ok(Checked {
                accepted: v.accepted,
                statement: Some(Statement::new(p, v.mu, v.z, receiver.public.clone())),
            })
        }
        "ch5" | "ch6" | "ch7" => {
            let d = envelope_signature(p, &sig)?;
            let y = attached(p, &sig, "group_public")?;
            let (key, correction, tag) = match sig.scheme.as_str() {
                "ch5" => (p.mul_el(&attached(p, &sig, "correction")?, &y), p.identity(), CH5_TAG),
                "ch6" => (p.mul_el(&attached(p, &sig, "correction")?, &y), p.identity(), CH6_TAG),
                _ => (y, attached(p, &sig, "verification_key")?, CH7_TAG),
            };
            let v = envelope::verify_with(p, &d, &receiver.secret, &key, &correction, tag, oracle)?;
            Ok(Checked {
                accepted: v.accepted,
                statement: Some(envelope::validity_statement(p, &d, receiver)),
            })
        }
        other => Err(HarnessError::Parse(format!(
            "scheme {other:?} cannot be checked by one receiver; run it as a scenario"
        ))),
    }
}
