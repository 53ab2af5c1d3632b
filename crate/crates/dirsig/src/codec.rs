//! File formats. Integers are big-endian hex strings (an optional `0x`
//! prefix is accepted on input); byte strings are base64.

use std::collections::BTreeMap;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use dirsig_core::group::parse_hex;
use dirsig_core::hash::FixtureTable;
use dirsig_core::{Element, GroupParams, KeyPair, Scalar};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

const BYTES_PREFIX: &str = "b64:";

pub fn hex(v: &BigUint) -> String {
    v.to_str_radix(16)
}

pub fn hex_scalar(s: &Scalar) -> String {
    hex(s.value())
}

pub fn hex_element(e: &Element) -> String {
    hex(e.value())
}

pub fn parse_int(s: &str) -> Result<BigUint, HarnessError> {
    parse_hex(s).map_err(|_| HarnessError::Parse(format!("not a hex integer: {s:?}")))
}

pub fn b64(bytes: &[u8]) -> String {
    B64.encode(bytes)
}

pub fn parse_b64(s: &str) -> Result<Vec<u8>, HarnessError> {
    B64.decode(s.trim())
        .map_err(|e| HarnessError::Parse(format!("bad base64: {e}")))
}

/// `b64:`-tagged bytes, the form used for byte items inside payloads.
pub fn tagged_bytes(bytes: &[u8]) -> String {
    format!("{BYTES_PREFIX}{}", b64(bytes))
}

pub fn parse_tagged_bytes(s: &str) -> Result<Vec<u8>, HarnessError> {
    match s.strip_prefix(BYTES_PREFIX) {
        Some(rest) => parse_b64(rest),
        None => Err(HarnessError::Parse(format!("expected b64: bytes, got {s:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub p: String,
    pub q: String,
    pub g: String,
}

impl ParamsFile {
    pub fn from_params(params: &GroupParams) -> Self {
        ParamsFile {
            p: hex(params.p()),
            q: hex(params.q()),
            g: hex(params.generator().value()),
        }
    }

    pub fn to_params(&self) -> Result<GroupParams, HarnessError> {
        Ok(GroupParams::new(
            parse_int(&self.p)?,
            parse_int(&self.q)?,
            parse_int(&self.g)?,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub p: String,
    pub q: String,
    pub g: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    pub y: String,
}

impl KeyFile {
    pub fn from_keypair(params: &GroupParams, key: &KeyPair, include_secret: bool) -> Self {
        let pf = ParamsFile::from_params(params);
        KeyFile {
            p: pf.p,
            q: pf.q,
            g: pf.g,
            x: include_secret.then(|| hex_scalar(&key.secret)),
            y: hex_element(&key.public),
        }
    }

    pub fn params(&self) -> Result<GroupParams, HarnessError> {
        ParamsFile {
            p: self.p.clone(),
            q: self.q.clone(),
            g: self.g.clone(),
        }
        .to_params()
    }

    pub fn public(&self, params: &GroupParams) -> Result<Element, HarnessError> {
        Ok(params.subgroup_element(parse_int(&self.y)?)?)
    }

    /// The key pair, checking that `y = g^x`.
    pub fn keypair(&self, params: &GroupParams) -> Result<KeyPair, HarnessError> {
        let x = self
            .x
            .as_deref()
            .ok_or_else(|| HarnessError::Parse("key file has no secret x".into()))?;
        let key = KeyPair::from_secret(params, params.scalar_checked(parse_int(x)?)?)?;
        if key.public != self.public(params)? {
            return Err(HarnessError::Parse("key file: y does not match g^x".into()));
        }
        Ok(key)
    }
}

/// A signature as exchanged between tools.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureFile {
    pub scheme: String,
    pub fields: BTreeMap<String, String>,
    pub message: String,
    #[serde(default)]
    pub attachments: BTreeMap<String, serde_json::Value>,
}

impl SignatureFile {
    pub fn field(&self, name: &str) -> Result<BigUint, HarnessError> {
        let v = self
            .fields
            .get(name)
            .ok_or_else(|| HarnessError::Parse(format!("signature has no field {name:?}")))?;
        parse_int(v)
    }

    pub fn attachment(&self, name: &str) -> Result<BigUint, HarnessError> {
        match self.attachments.get(name) {
            Some(serde_json::Value::String(s)) => parse_int(s),
            _ => Err(HarnessError::Parse(format!("signature has no attachment {name:?}"))),
        }
    }

    pub fn message_bytes(&self) -> Result<Vec<u8>, HarnessError> {
        parse_b64(&self.message)
    }
}

/// One fixture-hash entry. Items are hex integers or `b64:` bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub tag: String,
    pub items: Vec<String>,
    pub out: String,
}

pub fn item_bytes(item: &str) -> Result<Vec<u8>, HarnessError> {
    if item.starts_with(BYTES_PREFIX) {
        parse_tagged_bytes(item)
    } else {
        let v = parse_int(item)?;
        Ok(if v == BigUint::default() {
            Vec::new()
        } else {
            v.to_bytes_be()
        })
    }
}

pub fn fixture_table(entries: &[FixtureEntry]) -> Result<FixtureTable, HarnessError> {
    let mut table = FixtureTable::new();
    for e in entries {
        let items = e.items.iter().map(|i| item_bytes(i)).collect::<Result<Vec<_>, _>>()?;
        table.insert_raw(&e.tag, &items, parse_int(&e.out)?);
    }
    Ok(table)
}
