//! In-memory message bus and the session transcript it records.
//!
//! Delivery is synchronous and strictly ordered by sequence number. Open
//! messages (addressed or broadcast) make up the broadcast log; secret
//! messages are point-to-point and never appear in it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub type Payload = BTreeMap<String, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Open,
    Secret,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    pub from: String,
    /// `None` is a broadcast.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    pub channel: Channel,
    pub kind: String,
    pub payload: Payload,
}

impl Envelope {
    pub fn visible_to(&self, actor: &str) -> bool {
        self.to.as_deref().map_or(true, |to| to == actor)
    }

    pub fn get(&self, key: &str) -> Result<&str, HarnessError> {
        self.payload
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| HarnessError::Transcript(format!("{} message #{} has no {key:?}", self.kind, self.seq)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub envelopes: Vec<Envelope>,
}

impl SessionTranscript {
    /// Open-channel messages only.
    pub fn broadcast_log(&self) -> impl Iterator<Item = &Envelope> {
        self.envelopes.iter().filter(|e| e.channel == Channel::Open)
    }

    /// The latest message of `kind` from `from` that `reader` can see.
    pub fn latest(&self, reader: &str, from: &str, kind: &str) -> Result<&Envelope, HarnessError> {
        self.envelopes
            .iter()
            .rev()
            .find(|e| e.kind == kind && e.from == from && e.visible_to(reader))
            .ok_or_else(|| HarnessError::Transcript(format!("{reader} has no {kind:?} message from {from}")))
    }

    /// All messages of `kind` visible to `reader`, in delivery order.
    pub fn all<'a>(&'a self, reader: &'a str, kind: &'a str) -> impl Iterator<Item = &'a Envelope> + 'a {
        self.envelopes
            .iter()
            .filter(move |e| e.kind == kind && e.visible_to(reader))
    }

    pub fn is_well_ordered(&self) -> bool {
        self.envelopes.windows(2).all(|w| w[0].seq < w[1].seq)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

#[derive(Debug, Default)]
pub struct Bus {
    transcript: SessionTranscript,
}

impl Bus {
    pub fn new() -> Self {
        Bus::default()
    }

    fn push(&mut self, from: &str, to: Option<&str>, channel: Channel, kind: &str, payload: Payload) {
        let seq = self.transcript.envelopes.len() as u64 + 1;
        self.transcript.envelopes.push(Envelope {
            seq,
            from: from.to_string(),
            to: to.map(str::to_string),
            channel,
            kind: kind.to_string(),
            payload,
        });
    }

    pub fn send(&mut self, from: &str, to: &str, kind: &str, payload: Payload) {
        self.push(from, Some(to), Channel::Open, kind, payload);
    }

    pub fn send_secret(&mut self, from: &str, to: &str, kind: &str, payload: Payload) {
        self.push(from, Some(to), Channel::Secret, kind, payload);
    }

    pub fn broadcast(&mut self, from: &str, kind: &str, payload: Payload) {
        self.push(from, None, Channel::Open, kind, payload);
    }

    pub fn transcript(&self) -> &SessionTranscript {
        &self.transcript
    }

    pub fn into_transcript(self) -> SessionTranscript {
        self.transcript
    }
}

/// Build a payload from `(key, value)` pairs.
pub fn payload<const N: usize>(items: [(&str, String); N]) -> Payload {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_and_log() {
        let mut bus = Bus::new();
        bus.broadcast("A", "hello", payload([("x", "1".into())]));
        bus.send_secret("A", "B", "share", payload([("l", "5".into())]));
        bus.send("A", "C", "note", Payload::new());
        let t = bus.into_transcript();
        assert!(t.is_well_ordered());
        assert_eq!(t.broadcast_log().count(), 2);
        assert!(t.latest("B", "A", "share").is_ok());
        assert!(t.latest("C", "A", "share").is_err());
        assert!(t.latest("C", "A", "hello").is_ok());
        assert_eq!(t.all("B", "note").count(), 0);
    }
}
