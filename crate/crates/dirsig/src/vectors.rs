//! Worked-example vectors.
//!
//! A vector file wraps a [`Scenario`] (whose `expected` map holds the
//! printed values) with the errata found while checking the example and
//! notes on rows the run cannot confirm. A vector passes when its scenario
//! is accepted and every expected value matches.

use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::codec::parse_int;
use crate::scenario::{run_scenario, Scenario, Verdict};
use crate::HarnessError;

/// The built-in vectors, one per scheme.
pub const BUILTIN: &[(&str, &str)] = &[
    ("ch1.json", include_str!("../vectors/ch1.json")),
    ("ch2.json", include_str!("../vectors/ch2.json")),
    ("ch3.json", include_str!("../vectors/ch3.json")),
    ("ch4.json", include_str!("../vectors/ch4.json")),
    ("ch5.json", include_str!("../vectors/ch5.json")),
    ("ch6.json", include_str!("../vectors/ch6.json")),
    ("ch7.json", include_str!("../vectors/ch7.json")),
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub scenario: Scenario,
    #[serde(default)]
    pub errata: Vec<Erratum>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

/// A printed value that disagrees with the recomputed one. Numbers are
/// decimal, as printed. When `value` names a run value, the run must
/// reproduce `computed`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Erratum {
    pub item: String,
    pub printed: String,
    pub computed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default)]
    pub note: String,
}

/// A row reported without being checked, or a remark on notation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotation {
    pub item: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub name: String,
    pub expected: String,
    pub computed: Option<String>,
}

#[derive(Clone, Debug)]
pub struct VectorResult {
    pub file: String,
    pub name: String,
    pub verdict: Option<Verdict>,
    /// Set when the run itself failed (fixture miss, invalid scenario).
    pub error: Option<String>,
    pub mismatches: Vec<Mismatch>,
    pub errata: Vec<Erratum>,
    pub annotations: Vec<Annotation>,
}

impl VectorResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.mismatches.is_empty() && self.verdict.as_ref().is_some_and(Verdict::is_accepted)
    }
}

#[derive(Clone, Debug, Default)]
pub struct VectorReport {
    pub results: Vec<VectorResult>,
}

impl VectorReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.results.len()
    }

    pub fn get(&self, name: &str) -> Option<&VectorResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for VectorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed() { "pass" } else { "FAIL" };
            write!(f, "{status} {}", r.name)?;
            match (&r.error, &r.verdict) {
                (Some(e), _) => writeln!(f, ": {e}")?,
                (None, Some(v)) if !v.is_accepted() => writeln!(f, ": {v}")?,
                _ => writeln!(f)?,
            }
            for m in &r.mismatches {
                let got = m.computed.as_deref().unwrap_or("(not computed)");
                writeln!(f, "    {}: expected {}, computed {got}", m.name, m.expected)?;
            }
            for e in &r.errata {
                write!(
                    f,
                    "    erratum {}: printed {}, computed {}",
                    e.item, e.printed, e.computed
                )?;
                if e.note.is_empty() {
                    writeln!(f)?;
                } else {
                    writeln!(f, " ({})", e.note)?;
                }
            }
            for a in &r.annotations {
                writeln!(f, "    note {}: {}", a.item, a.note)?;
            }
        }
        write!(f, "{}/{} vectors pass", self.passed(), self.results.len())
    }
}

pub fn parse_vector(file: &str, text: &str) -> Result<VectorFile, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::VectorParse {
        file: file.to_string(),
        reason: e.to_string(),
    })
}

pub fn check_vector(file: &str, v: &VectorFile) -> VectorResult {
    let mut result = VectorResult {
        file: file.to_string(),
        name: v.name.clone(),
        verdict: None,
        error: None,
        mismatches: Vec::new(),
        errata: v.errata.clone(),
        annotations: v.annotations.clone(),
    };
    let outcome = match run_scenario(&v.scenario) {
        Ok(o) => o,
        Err(e) => {
            result.error = Some(e.to_string());
            return result;
        }
    };
    result.mismatches = outcome
        .mismatches(&v.scenario.expected)
        .into_iter()
        .map(|(name, expected, computed)| Mismatch {
            name,
            expected,
            computed,
        })
        .collect();
    for e in &v.errata {
        let Some(key) = &e.value else { continue };
        let got = outcome.values.get(key);
        let matches = match (e.computed.parse::<BigUint>(), got.map(|g| parse_int(g))) {
            (Ok(want), Some(Ok(have))) => want == have,
            _ => false,
        };
        if !matches {
            result.mismatches.push(Mismatch {
                name: format!("erratum {}", e.item),
                expected: e.computed.clone(),
                computed: got.cloned(),
            });
        }
    }
    result.verdict = Some(outcome.verdict);
    result
}

/// Check the built-in vectors, a single vector file, or every `.json`
/// file in a directory.
pub fn run_vectors(path: Option<&Path>) -> Result<VectorReport, HarnessError> {
    let mut files: Vec<(String, String)> = Vec::new();
    match path {
        None => files.extend(BUILTIN.iter().map(|(n, t)| (n.to_string(), t.to_string()))),
        Some(p) if p.is_dir() => {
            let mut entries: Vec<_> = std::fs::read_dir(p)
                .map_err(|e| vector_io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            for e in entries {
                let text = std::fs::read_to_string(&e).map_err(|err| vector_io(&e, err))?;
                files.push((e.display().to_string(), text));
            }
        }
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| vector_io(p, e))?;
            files.push((p.display().to_string(), text));
        }
    }
    let mut report = VectorReport::default();
    for (file, text) in &files {
        let v = parse_vector(file, text)?;
        report.results.push(check_vector(file, &v));
    }
    Ok(report)
}

fn vector_io(p: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::VectorParse {
        file: p.display().to_string(),
        reason: e.to_string(),
    }
}
