//! Scenario files and the session driver.
//!
//! A scenario names a scheme, the group parameters (explicit or generated
//! from the seed), an optional fixture table and a per-scheme `config`
//! object. Any key, nonce or polynomial left out of the config is drawn
//! from a ChaCha20 stream seeded with `seed`, so a scenario always runs the
//! same way.
//!
//! A run has two phases. During *interaction* every party acts on what it
//! can read from the bus and posts its own messages. The *judgement* is
//! then computed by the deciding parties alone (receiver, third party,
//! verifying combiner) from the transcript and their own keys. [`replay`]
//! repeats only the judgement on a stored transcript.
//!
//! Member numbers in configs and payloads are 1-based (`S1`, `S2`, ...).

mod delegated;
mod directed;
mod envelope;
mod threshold;

use std::collections::BTreeMap;
use std::fmt;

use dirsig_core::zk::{Prover, Statement, Verifier};
use dirsig_core::{Element, GroupParams, HashOracle, KeyPair, Scalar};
use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bus::{payload, Bus, Envelope, Payload, SessionTranscript};
use crate::codec::{
    fixture_table, hex, parse_b64, parse_int, parse_tagged_bytes, tagged_bytes, FixtureEntry, ParamsFile, SignatureFile,
};
use crate::HarnessError;

pub type Values = BTreeMap<String, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    #[serde(rename = "ch1")]
    Ch1,
    #[serde(rename = "ch1-tv")]
    Ch1Tv,
    #[serde(rename = "ch1-tc")]
    Ch1Tc,
    #[serde(rename = "ch2")]
    Ch2,
    #[serde(rename = "ch3")]
    Ch3,
    #[serde(rename = "ch4")]
    Ch4,
    #[serde(rename = "ch5")]
    Ch5,
    #[serde(rename = "ch6")]
    Ch6,
    #[serde(rename = "ch7")]
    Ch7,
}

impl SchemeId {
    pub const ALL: [SchemeId; 9] = [
        SchemeId::Ch1,
        SchemeId::Ch1Tv,
        SchemeId::Ch1Tc,
        SchemeId::Ch2,
        SchemeId::Ch3,
        SchemeId::Ch4,
        SchemeId::Ch5,
        SchemeId::Ch6,
        SchemeId::Ch7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Ch1 => "ch1",
            SchemeId::Ch1Tv => "ch1-tv",
            SchemeId::Ch1Tc => "ch1-tc",
            SchemeId::Ch2 => "ch2",
            SchemeId::Ch3 => "ch3",
            SchemeId::Ch4 => "ch4",
            SchemeId::Ch5 => "ch5",
            SchemeId::Ch6 => "ch6",
            SchemeId::Ch7 => "ch7",
        }
    }

    pub fn parse(s: &str) -> Option<SchemeId> {
        SchemeId::ALL.into_iter().find(|id| id.as_str() == s)
    }

    /// Payload keys of the message a tamper fault can target.
    pub fn signature_fields(self) -> &'static [&'static str] {
        match self {
            SchemeId::Ch1 => directed::CH1_FIELDS,
            SchemeId::Ch1Tv => directed::TV_FIELDS,
            SchemeId::Ch1Tc => directed::TC_FIELDS,
            SchemeId::Ch2 => delegated::FIELDS,
            SchemeId::Ch3 => threshold::CH3_FIELDS,
            SchemeId::Ch4 | SchemeId::Ch5 | SchemeId::Ch6 | SchemeId::Ch7 => envelope::FIELDS,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateSpec {
    pub q_bits: usize,
    pub p_bits: usize,
}

/// Deliberate misbehaviour injected into a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fault {
    /// Perturb one field of the signature message in transit.
    Tamper { field: String },
    /// A verifying member contributes a zero modified shadow.
    ZeroShadow { member: usize },
    /// A signing member sends `s_i + 1`.
    CorruptPartial { member: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scheme: SchemeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerateSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Base64.
    #[serde(default)]
    pub message: String,
    /// Present means every hash goes through this table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Vec<FixtureEntry>>,
    #[serde(default)]
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faults: Vec<Fault>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: Values,
}

impl Scenario {
    pub fn new(scheme: SchemeId, params: &GroupParams) -> Self {
        Scenario {
            scheme,
            params: Some(ParamsFile::from_params(params)),
            generate: None,
            seed: 0,
            message: String::new(),
            fixture: None,
            config: serde_json::Value::Object(Default::default()),
            faults: Vec::new(),
            expected: Values::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::ScenarioInvalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected { reason: String },
    Aborted { actor: String, cause: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected { reason } => write!(f, "rejected ({reason})"),
            Verdict::Aborted { actor, cause } => write!(f, "aborted by {actor} ({cause})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub transcript: SessionTranscript,
    pub verdict: Verdict,
    /// Named intermediate and final values, hex.
    pub values: Values,
    /// Values that must never reach the broadcast log.
    pub secrets: Values,
    pub signature: Option<SignatureFile>,
}

impl Outcome {
    /// `(name, expected, computed)` for every expected value that differs.
    pub fn mismatches(&self, expected: &Values) -> Vec<(String, String, Option<String>)> {
        expected
            .iter()
            .filter(|(k, v)| !same_value(v, self.values.get(*k)))
            .map(|(k, v)| (k.clone(), v.clone(), self.values.get(k).cloned()))
            .collect()
    }
}

/// Integers compare numerically, anything else as text.
pub(crate) fn same_value(expected: &str, computed: Option<&String>) -> bool {
    let Some(computed) = computed else { return false };
    match (parse_int(expected), parse_int(computed)) {
        (Ok(a), Ok(b)) => a == b,
        _ => expected == computed,
    }
}

pub fn run_scenario(s: &Scenario) -> Result<Outcome, HarnessError> {
    let mut ctx = Ctx::new(s)?;
    let proto = prepare(&mut ctx, s)?;
    let mut bus = Bus::new();
    let verdict = match proto.interact(&mut ctx, &mut bus) {
        Ok(()) => decide(proto.as_ref(), &mut ctx, bus.transcript())?,
        Err(Flow::Halt { actor, cause }) => {
            bus.broadcast(&actor, ABORT, payload([("cause", cause.clone())]));
            Verdict::Aborted { actor, cause }
        }
        Err(Flow::Fail(e)) => return Err(e),
    };
    let transcript = bus.into_transcript();
    let signature = proto.signature(&ctx, &transcript);
    Ok(Outcome {
        transcript,
        verdict,
        values: ctx.values,
        secrets: ctx.secrets,
        signature,
    })
}

/// The verdict the deciding parties reach from `transcript` alone.
pub fn replay(s: &Scenario, transcript: &SessionTranscript) -> Result<Verdict, HarnessError> {
    if !transcript.is_well_ordered() {
        return Err(HarnessError::Transcript(
            "sequence numbers are not strictly increasing".into(),
        ));
    }
    let mut ctx = Ctx::new(s)?;
    let proto = prepare(&mut ctx, s)?;
    decide(proto.as_ref(), &mut ctx, transcript)
}

const ABORT: &str = "abort";

fn decide(proto: &dyn Protocol, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
    if let Some(e) = t.envelopes.iter().find(|e| e.kind == ABORT) {
        return Ok(Verdict::Aborted {
            actor: e.from.clone(),
            cause: e.get("cause")?.to_string(),
        });
    }
    match proto.judge(ctx, t) {
        Ok(v) => Ok(v),
        Err(HarnessError::Parse(r) | HarnessError::Transcript(r)) => Ok(Verdict::Rejected { reason: r }),
        Err(HarnessError::Core(e)) => Ok(Verdict::Rejected { reason: e.to_string() }),
        Err(HarnessError::FixtureMiss { tag, items }) => Ok(Verdict::Rejected {
            reason: format!("no fixture entry for {tag} [{items}]: the checked value was never signed"),
        }),
        Err(e) => Err(e),
    }
}

fn prepare(ctx: &mut Ctx, s: &Scenario) -> Result<Box<dyn Protocol>, HarnessError> {
    let cfg = &s.config;
    Ok(match s.scheme {
        SchemeId::Ch1 => Box::new(directed::Ch1::prepare(ctx, config(cfg)?)?),
        SchemeId::Ch1Tv => Box::new(directed::Tv::prepare(ctx, config(cfg)?, false)?),
        SchemeId::Ch1Tc => Box::new(directed::Tv::prepare(ctx, config(cfg)?, true)?),
        SchemeId::Ch2 => Box::new(delegated::Ch2::prepare(ctx, config(cfg)?)?),
        SchemeId::Ch3 => Box::new(threshold::Ch3::prepare(ctx, config(cfg)?)?),
        SchemeId::Ch4 => Box::new(threshold::Ch4::prepare(ctx, config(cfg)?)?),
        SchemeId::Ch5 => Box::new(envelope::Ch5::prepare(ctx, config(cfg)?)?),
        SchemeId::Ch6 => Box::new(envelope::Ch6::prepare(ctx, config(cfg)?)?),
        SchemeId::Ch7 => Box::new(envelope::Ch7::prepare(ctx, config(cfg)?)?),
    })
}

fn config<T: DeserializeOwned + Default>(v: &serde_json::Value) -> Result<T, HarnessError> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| HarnessError::ScenarioInvalid(format!("config: {e}")))
}

pub(crate) trait Protocol {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow>;
    /// Decide from the transcript using only the deciding parties' keys.
    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError>;
    fn signature(&self, _ctx: &Ctx, _t: &SessionTranscript) -> Option<SignatureFile> {
        None
    }
}

pub(crate) enum Flow {
    Halt { actor: String, cause: String },
    Fail(HarnessError),
}

impl From<HarnessError> for Flow {
    fn from(e: HarnessError) -> Self {
        Flow::Fail(e)
    }
}

pub(crate) trait CoreResultExt<T> {
    /// A protocol failure on `actor`'s side ends the session.
    fn at(self, actor: &str) -> Result<T, Flow>;
    /// A failure while setting up means the scenario itself is wrong.
    fn setup(self) -> Result<T, HarnessError>;
    /// A checking party's result. A fixture miss gives `None`: the table
    /// covers every signed value, so the input was not signed.
    fn check(self, actor: &str) -> Result<Option<T>, Flow>;
}

impl<T> CoreResultExt<T> for dirsig_core::Result<T> {
    fn at(self, actor: &str) -> Result<T, Flow> {
        self.map_err(|e| match e {
            dirsig_core::Error::FixtureMiss { .. } => Flow::Fail(e.into()),
            other => Flow::Halt {
                actor: actor.to_string(),
                cause: other.to_string(),
            },
        })
    }

    fn setup(self) -> Result<T, HarnessError> {
        self.map_err(|e| match e {
            dirsig_core::Error::FixtureMiss { .. } => e.into(),
            other => HarnessError::ScenarioInvalid(other.to_string()),
        })
    }

    fn check(self, actor: &str) -> Result<Option<T>, Flow> {
        match self {
            Ok(v) => Ok(Some(v)),
            Err(dirsig_core::Error::FixtureMiss { .. }) => Ok(None),
            Err(e) => Err(e).at(actor),
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::ScenarioInvalid(msg.into())
}

/// How a payload field is perturbed by a tamper fault.
#[derive(Clone, Copy)]
pub(crate) enum Kind {
    Scalar,
    Element,
    Bytes,
}

pub(crate) struct Ctx {
    pub params: GroupParams,
    pub oracle: HashOracle,
    pub rng: ChaCha20Rng,
    pub message: Vec<u8>,
    pub faults: Vec<Fault>,
    pub values: Values,
    pub secrets: Values,
}

impl Ctx {
    fn new(s: &Scenario) -> Result<Self, HarnessError> {
        let mut rng = ChaCha20Rng::seed_from_u64(s.seed);
        let params = match (&s.params, &s.generate) {
            (Some(p), None) => p.to_params().map_err(|e| invalid(format!("params: {e}")))?,
            (None, Some(g)) => GroupParams::generate(g.q_bits, g.p_bits, &mut rng).setup()?,
            _ => return Err(invalid("give exactly one of params and generate")),
        };
        let oracle = match &s.fixture {
            Some(entries) => HashOracle::Fixture(fixture_table(entries).map_err(|e| invalid(format!("fixture: {e}")))?),
            None => HashOracle::Standard,
        };
        let message = parse_b64(&s.message).map_err(|e| invalid(format!("message: {e}")))?;
        Ok(Ctx {
            params,
            oracle,
            rng,
            message,
            faults: s.faults.clone(),
            values: Values::new(),
            secrets: Values::new(),
        })
    }

    pub fn scalar(&self, v: &str) -> Result<Scalar, HarnessError> {
        Ok(self.params.scalar(parse_int(v).map_err(|e| invalid(e.to_string()))?))
    }

    /// The configured value, or a fresh random one.
    pub fn pick(&mut self, v: &Option<String>) -> Result<Scalar, HarnessError> {
        match v {
            Some(s) => self.scalar(s),
            None => Ok(self.params.random_scalar(&mut self.rng)),
        }
    }

    pub fn pick_nonzero(&mut self, v: &Option<String>) -> Result<Scalar, HarnessError> {
        match v {
            Some(s) => self.scalar(s),
            None => Ok(self.params.random_nonzero_scalar(&mut self.rng)),
        }
    }

    pub fn key(&mut self, x: &Option<String>) -> Result<KeyPair, HarnessError> {
        let x = self.pick_nonzero(x)?;
        KeyPair::from_secret(&self.params, x).setup()
    }

    pub fn record(&mut self, name: impl Into<String>, value: &BigUint) {
        self.values.insert(name.into(), hex(value));
    }

    pub fn record_secret(&mut self, name: impl Into<String>, value: &BigUint) {
        let name = name.into();
        self.secrets.insert(name.clone(), hex(value));
        self.values.insert(name, hex(value));
    }

    pub fn zero_shadow(&self, member: usize) -> bool {
        self.faults
            .iter()
            .any(|f| *f == Fault::ZeroShadow { member: member + 1 })
    }

    pub fn corrupt_partial(&self, member: usize) -> bool {
        self.faults
            .iter()
            .any(|f| *f == Fault::CorruptPartial { member: member + 1 })
    }

    /// Apply tamper faults to an outgoing signature message.
    pub fn tamper(&self, p: &mut Payload, schema: &[(&str, Kind)]) -> Result<(), HarnessError> {
        for f in &self.faults {
            let Fault::Tamper { field } = f else { continue };
            let (_, kind) = schema
                .iter()
                .find(|(name, _)| name == field)
                .ok_or_else(|| invalid(format!("cannot tamper with unknown field {field:?}")))?;
            let old = p
                .get(field)
                .cloned()
                .ok_or_else(|| invalid(format!("field {field:?} not sent")))?;
            let new = match kind {
                Kind::Scalar => hex(&((parse_int(&old)? + 1u32) % self.params.q())),
                Kind::Element => hex(&((parse_int(&old)? * self.params.generator().value()) % self.params.p())),
                Kind::Bytes => {
                    let mut b = parse_tagged_bytes(&old)?;
                    match b.first_mut() {
                        Some(x) => *x ^= 1,
                        None => b.push(0),
                    }
                    tagged_bytes(&b)
                }
            };
            p.insert(field.clone(), new);
        }
        Ok(())
    }
}

pub(crate) fn sc(s: &Scalar) -> String {
    hex(s.value())
}

pub(crate) fn el(e: &Element) -> String {
    hex(e.value())
}

pub(crate) fn name(prefix: &str, index: usize) -> String {
    format!("{prefix}{}", index + 1)
}

pub(crate) fn get_scalar(params: &GroupParams, env: &Envelope, key: &str) -> Result<Scalar, HarnessError> {
    Ok(params.scalar_checked(parse_int(env.get(key)?)?)?)
}

pub(crate) fn get_element(params: &GroupParams, env: &Envelope, key: &str) -> Result<Element, HarnessError> {
    Ok(params.subgroup_element(parse_int(env.get(key)?)?)?)
}

pub(crate) fn get_bytes(env: &Envelope, key: &str) -> Result<Vec<u8>, HarnessError> {
    parse_tagged_bytes(env.get(key)?)
}

pub(crate) fn get_usize(env: &Envelope, key: &str) -> Result<usize, HarnessError> {
    env.get(key)?
        .parse()
        .map_err(|_| HarnessError::Parse(format!("{key} is not a count")))
}

/// 1-based member list, `"2,4,6"`.
pub(crate) fn member_list(members: &[usize]) -> String {
    members
        .iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Back to 0-based indices.
pub(crate) fn parse_member_list(env: &Envelope, key: &str) -> Result<Vec<usize>, HarnessError> {
    let text = env.get(key)?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|x| match x.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n - 1),
            _ => Err(HarnessError::Parse(format!("bad member number {x:?}"))),
        })
        .collect()
}

/// Config member numbers (1-based) to indices, checked against `n`.
pub(crate) fn indices(list: &[usize], n: usize, what: &str) -> Result<Vec<usize>, HarnessError> {
    let mut out = Vec::with_capacity(list.len());
    for &m in list {
        if m == 0 || m > n {
            return Err(invalid(format!("{what}: no member {m}")));
        }
        if out.contains(&(m - 1)) {
            return Err(invalid(format!("{what}: member {m} listed twice")));
        }
        out.push(m - 1);
    }
    Ok(out)
}

/// Nonce pairs for `count` signers; missing pairs or entries are random.
pub(crate) fn nonces(
    ctx: &mut Ctx,
    cfg: &[(Option<String>, Option<String>)],
    count: usize,
) -> Result<Vec<(Scalar, Scalar)>, HarnessError> {
    if cfg.len() > count {
        return Err(invalid(format!("{} nonce pairs for {count} signers", cfg.len())));
    }
    (0..count)
        .map(|i| {
            let (a, b) = cfg.get(i).cloned().unwrap_or((None, None));
            Ok((ctx.pick(&a)?, ctx.pick(&b)?))
        })
        .collect()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct ZkConfig {
    pub u: Option<String>,
    pub v: Option<String>,
    pub alpha: Option<String>,
}

/// Randomness for one confirmation run: the third party's `(u, v)` and the
/// prover's `α`.
pub(crate) struct ZkSecrets {
    pub u: Scalar,
    pub v: Scalar,
    pub alpha: Scalar,
}

impl ZkSecrets {
    pub fn resolve(ctx: &mut Ctx, cfg: &ZkConfig) -> Result<Self, HarnessError> {
        Ok(ZkSecrets {
            u: ctx.pick(&cfg.u)?,
            v: ctx.pick(&cfg.v)?,
            alpha: ctx.pick(&cfg.alpha)?,
        })
    }
}

pub(crate) const ZK_COMMIT: &str = "zk-commit";
pub(crate) const ZK_RESPONSE: &str = "zk-response";
pub(crate) const ZK_OPEN: &str = "zk-open";
pub(crate) const ZK_REVEAL: &str = "zk-reveal";

/// The four moves between `prover` and `verifier`, over the open channel.
pub(crate) fn zk_interact(
    ctx: &mut Ctx,
    bus: &mut Bus,
    prover: &str,
    verifier: &str,
    st: &Statement,
    witness: &Scalar,
    z: &ZkSecrets,
) -> Result<(), Flow> {
    let params = ctx.params.clone();
    let mut v = Verifier::new(&params, st.clone(), z.u.clone(), z.v.clone());
    let mut p = Prover::new(&params, st.clone(), witness.clone(), z.alpha.clone());
    let w = v.commit().at(verifier)?;
    bus.send(verifier, prover, ZK_COMMIT, payload([("w", el(&w))]));
    let w = get_element(&params, bus.transcript().latest(prover, verifier, ZK_COMMIT)?, "w")?;
    let (beta, gamma) = p.respond(w).at(prover)?;
    bus.send(
        prover,
        verifier,
        ZK_RESPONSE,
        payload([("beta", el(&beta)), ("gamma", el(&gamma))]),
    );
    let r = bus.transcript().latest(verifier, prover, ZK_RESPONSE)?;
    v.receive_response(get_element(&params, r, "beta")?, get_element(&params, r, "gamma")?)
        .at(verifier)?;
    let (u, vv) = v.open().at(verifier)?;
    bus.send(verifier, prover, ZK_OPEN, payload([("u", sc(&u)), ("v", sc(&vv))]));
    let o = bus.transcript().latest(prover, verifier, ZK_OPEN)?;
    p.check_opening(&get_scalar(&params, o, "u")?, &get_scalar(&params, o, "v")?)
        .at(prover)?;
    let alpha = p.reveal().at(prover)?;
    bus.send(prover, verifier, ZK_REVEAL, payload([("alpha", sc(&alpha))]));
    Ok(())
}

/// The verifier's final check, from the transcript and its own `(u, v)`.
pub(crate) fn zk_judge(
    ctx: &mut Ctx,
    t: &SessionTranscript,
    prover: &str,
    verifier: &str,
    st: &Statement,
    z: &ZkSecrets,
) -> Result<bool, HarnessError> {
    let params = ctx.params.clone();
    let mut v = Verifier::new(&params, st.clone(), z.u.clone(), z.v.clone());
    let w = v.commit()?;
    let r = t.latest(verifier, prover, ZK_RESPONSE)?;
    let (beta, gamma) = (get_element(&params, r, "beta")?, get_element(&params, r, "gamma")?);
    ctx.record("zk.w", w.value());
    ctx.record("zk.beta", beta.value());
    ctx.record("zk.gamma", gamma.value());
    v.receive_response(beta, gamma)?;
    v.open()?;
    let alpha = get_scalar(&params, t.latest(verifier, prover, ZK_REVEAL)?, "alpha")?;
    Ok(v.check(&alpha)?)
}

pub(crate) fn rejected(reason: impl Into<String>) -> Verdict {
    Verdict::Rejected { reason: reason.into() }
}

/// Signature message payload as a signature file.
pub(crate) fn signature_file(
    scheme: SchemeId,
    env: &Envelope,
    attachments: &[(&str, String)],
) -> Option<SignatureFile> {
    let mut fields = env.payload.clone();
    let message = fields.remove("m")?;
    let message = parse_tagged_bytes(&message).ok()?;
    Some(SignatureFile {
        scheme: scheme.as_str().to_string(),
        fields,
        message: crate::codec::b64(&message),
        attachments: attachments
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
            .collect(),
    })
}

/// One roster entry. Which fields a scheme reads depends on the scheme.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct MemberConfig {
    /// Long-term secret key.
    pub x: Option<String>,
    /// Share point; defaults to the member number.
    pub u: Option<String>,
    /// Per-member value (`ch5` `K_i`, `ch7` `k_i`).
    pub k: Option<String>,
    /// Own polynomial coefficients (`ch6`), constant first.
    pub poly: Option<Vec<String>>,
}

pub(crate) struct Roster {
    pub keys: Vec<KeyPair>,
    pub members: Vec<dirsig_core::schemes::Member>,
}

/// Roster size when a config lists no members.
pub(crate) const DEFAULT_MEMBERS: usize = 5;

/// The configured roster, or `DEFAULT_MEMBERS` blank entries.
pub(crate) fn roster_config(cfg: &[MemberConfig]) -> Vec<MemberConfig> {
    if cfg.is_empty() {
        vec![MemberConfig::default(); DEFAULT_MEMBERS]
    } else {
        cfg.to_vec()
    }
}

impl Roster {
    pub fn resolve(ctx: &mut Ctx, cfg: &[MemberConfig]) -> Result<Self, HarnessError> {
        let cfg = &roster_config(cfg)[..];
        let mut keys = Vec::with_capacity(cfg.len());
        let mut members = Vec::with_capacity(cfg.len());
        for (i, m) in cfg.iter().enumerate() {
            let key = ctx.key(&m.x)?;
            let point = match &m.u {
                Some(u) => ctx.scalar(u)?,
                None => ctx.params.scalar(i as u64 + 1),
            };
            members.push(dirsig_core::schemes::Member {
                point,
                public: key.public.clone(),
            });
            keys.push(key);
        }
        let points: Vec<Scalar> = members.iter().map(|m| m.point.clone()).collect();
        dirsig_core::sharing::check_holder_points(&points).setup()?;
        Ok(Roster { keys, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Polynomial from configured coefficients, or random of degree `t - 1`
/// with the given constant.
pub(crate) fn polynomial(
    ctx: &mut Ctx,
    coeffs: &Option<Vec<String>>,
    constant: &Option<String>,
    threshold: usize,
) -> Result<dirsig_core::sharing::Polynomial, HarnessError> {
    use dirsig_core::sharing::Polynomial;
    match coeffs {
        Some(c) => {
            if constant.is_some() {
                return Err(invalid("give either a polynomial or its constant, not both"));
            }
            let c = c.iter().map(|v| ctx.scalar(v)).collect::<Result<Vec<_>, _>>()?;
            Ok(Polynomial::new(&ctx.params, c))
        }
        None => {
            let secret = ctx.pick(constant)?;
            Ok(Polynomial::random(
                &ctx.params,
                secret,
                threshold.saturating_sub(1),
                &mut ctx.rng,
            ))
        }
    }
}

pub(crate) const PUBLIC_KEY: &str = "public-key";
pub(crate) const SIGNATURE: &str = "signature";
pub(crate) const SUBSET: &str = "subset";
pub(crate) const PARTIAL: &str = "partial";

pub(crate) fn announce_key(bus: &mut Bus, actor: &str, key: &KeyPair) {
    bus.broadcast(actor, PUBLIC_KEY, payload([("y", el(&key.public))]));
}

pub(crate) fn read_key(
    params: &GroupParams,
    t: &SessionTranscript,
    reader: &str,
    owner: &str,
) -> Result<Element, HarnessError> {
    get_element(params, t.latest(reader, owner, PUBLIC_KEY)?, "y")
}
