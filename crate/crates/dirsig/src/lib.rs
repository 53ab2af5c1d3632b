//! Session harness for `dirsig-core`.
//!
//! Protocol runs are scripted as [`scenario::Scenario`] files. Each run puts
//! every party's messages on an in-memory [`bus::Bus`], so the resulting
//! [`bus::SessionTranscript`] records who said what on which channel. The
//! final decision (receiver check, combiner check, third-party proof) is
//! computed from the transcript and the deciding parties' own keys only.
//! That makes [`scenario::replay`] possible.
//!
//! [`vectors`] holds the worked examples as scenario files with expected
//! values and the errata found while checking them.

pub mod bus;
pub mod codec;
pub mod scenario;
pub mod sigfile;
pub mod vectors;

pub use scenario::{replay, run_scenario, Outcome, Scenario, Verdict};
pub use vectors::{run_vectors, VectorReport};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),
    #[error("fixture miss: no entry for tag {tag:?} with items [{items}]")]
    FixtureMiss { tag: String, items: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("transcript: {0}")]
    Transcript(String),
    #[error("vector {file}: {reason}")]
    VectorParse { file: String, reason: String },
    #[error("{0}")]
    Core(dirsig_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<dirsig_core::Error> for HarnessError {
    fn from(e: dirsig_core::Error) -> Self {
        match e {
            dirsig_core::Error::FixtureMiss { tag, items } => HarnessError::FixtureMiss { tag, items },
            other => HarnessError::Core(other),
        }
    }
}
