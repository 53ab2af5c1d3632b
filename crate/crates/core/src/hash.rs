//! The hash oracle `h`.
//!
//! Inputs are encoded canonically as the ASCII domain tag followed, for each
//! item, by a 4-byte big-endian length and the item's bytes. Integers
//! (scalars and elements) contribute their minimal big-endian magnitude,
//! with zero as the empty string; messages contribute their raw bytes.
//!
//! [`HashOracle::Standard`] reads the SHA-256 digest of that encoding as a
//! big-endian integer and reduces it mod `q`. [`HashOracle::Fixture`] looks
//! the encoding up in an injected table instead and fails loudly on a miss.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{magnitude_bytes, Element, GroupParams, Scalar};

#[derive(Clone, Copy, Debug)]
pub enum HashItem<'a> {
    Element(&'a Element),
    Scalar(&'a Scalar),
    Bytes(&'a [u8]),
    Counter(u64),
}

impl HashItem<'_> {
    fn bytes(&self) -> Vec<u8> {
        match self {
            HashItem::Element(e) => e.to_bytes(),
            HashItem::Scalar(s) => s.to_bytes(),
            HashItem::Bytes(b) => b.to_vec(),
            HashItem::Counter(c) => magnitude_bytes(&BigUint::from(*c)),
        }
    }
}

impl<'a> From<&'a Element> for HashItem<'a> {
    fn from(e: &'a Element) -> Self {
        HashItem::Element(e)
    }
}

impl<'a> From<&'a Scalar> for HashItem<'a> {
    fn from(s: &'a Scalar) -> Self {
        HashItem::Scalar(s)
    }
}

impl<'a> From<&'a [u8]> for HashItem<'a> {
    fn from(b: &'a [u8]) -> Self {
        HashItem::Bytes(b)
    }
}

/// `tag ‖ Σ (len₄ ‖ bytes)` over already-encoded items.
pub fn canonical_encoding<B: AsRef<[u8]>>(tag: &str, items: &[B]) -> Vec<u8> {
    let mut out = Vec::with_capacity(tag.len() + items.iter().map(|i| 4 + i.as_ref().len()).sum::<usize>());
    out.extend_from_slice(tag.as_bytes());
    for item in items {
        let item = item.as_ref();
        out.extend_from_slice(&(item.len() as u32).to_be_bytes());
        out.extend_from_slice(item);
    }
    out
}

fn encode_items(tag: &str, items: &[HashItem<'_>]) -> (Vec<u8>, Vec<Vec<u8>>) {
    let raw: Vec<Vec<u8>> = items.iter().map(HashItem::bytes).collect();
    (canonical_encoding(tag, &raw), raw)
}

/// Raw SHA-256 of the canonical encoding.
pub fn digest(tag: &str, items: &[HashItem<'_>]) -> [u8; 32] {
    let (encoded, _) = encode_items(tag, items);
    Sha256::digest(&encoded).into()
}

/// Injected hash outputs keyed by canonical encoding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixtureTable {
    entries: BTreeMap<Vec<u8>, BigUint>,
}

impl FixtureTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register `h(tag, items) = out` where each item is already in its byte form.
    pub fn insert_raw<B: AsRef<[u8]>>(&mut self, tag: &str, items: &[B], out: BigUint) {
        self.entries.insert(canonical_encoding(tag, items), out);
    }

    pub fn insert(&mut self, tag: &str, items: &[HashItem<'_>], out: BigUint) {
        let (encoded, _) = encode_items(tag, items);
        self.entries.insert(encoded, out);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum HashOracle {
    #[default]
    Standard,
    Fixture(FixtureTable),
}

impl HashOracle {
    pub fn hash_to_scalar(&self, params: &GroupParams, tag: &str, items: &[HashItem<'_>]) -> Result<Scalar> {
        let (encoded, raw) = encode_items(tag, items);
        match self {
            HashOracle::Standard => {
                let d = Sha256::digest(&encoded);
                Ok(params.scalar(BigUint::from_bytes_be(&d)))
            }
            HashOracle::Fixture(table) => match table.entries.get(&encoded) {
                Some(out) => Ok(params.scalar(out.clone())),
                None => Err(Error::FixtureMiss {
                    tag: tag.to_string(),
                    items: describe(&raw),
                }),
            },
        }
    }
}

fn describe(raw: &[Vec<u8>]) -> String {
    let mut s = String::new();
    for (i, item) in raw.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        if item.is_empty() {
            s.push('0');
        }
        for b in item {
            s.push_str(&alloc::format!("{b:02x}"));
        }
    }
    s
}
