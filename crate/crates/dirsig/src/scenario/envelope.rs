//! Organization-to-receiver schemes (`ch5`, `ch6`, `ch7`) and the commit
//! round they share with `ch4`.
//!
//! Parties: dealer `SDC` (`ch5`, `ch7`), members `S1..Sn`, combiner `DC`,
//! receiver `B`, third party `Y`. In `ch6` the members deal to each other.

use dirsig_core::schemes::envelope::{self as env_core, validity_statement, Aggregate, Commitment, EnvelopeSignature};
use dirsig_core::schemes::multisig::{
    ms5_combine, ms5_correction, ms5_partial_sign, ms5_setup, ms6_combine, ms6_correction, ms6_partial_sign, ms6_setup,
    ms6_shadow, ms7_combine, ms7_setup, AuthorizedSubset, Ch5Member, Ch5Setup, Ch6Member, Ch6Setup, Ch7Setup, Ch7Share,
    Dealt, Round, CH5_TAG, CH6_TAG, CH7_TAG,
};
use dirsig_core::schemes::Member;
use dirsig_core::sharing::{modified_shadow, Polynomial, Share};
use dirsig_core::zk::Statement;
use dirsig_core::{Element, Error, KeyPair, Scalar};
use serde::Deserialize;

use super::*;

pub(crate) const FIELDS: &[&str] = &["s", "u", "w", "m"];

const SCHEMA: &[(&str, Kind)] = &[
    ("s", Kind::Scalar),
    ("u", Kind::Element),
    ("w", Kind::Element),
    ("m", Kind::Bytes),
];

const COMMIT: &str = "commit";
const V_SHARE: &str = "v-share";
const CLAIM: &str = "claim";

/// Each signer publishes `(u_i, w_i)` and hands `v_i` to the rest of the
/// subset, and to the combiner when it checks partials.
pub(crate) fn commit_phase(
    ctx: &mut Ctx,
    bus: &mut Bus,
    signers: &[usize],
    nonces: &[(Scalar, Scalar)],
    receiver_public: &Element,
    v_to_dc: bool,
) {
    for (&i, (k1, k2)) in signers.iter().zip(nonces) {
        let me = name("S", i);
        let c = env_core::commit(&ctx.params, receiver_public, k1, k2);
        bus.broadcast(&me, COMMIT, payload([("u", el(&c.u)), ("w", el(&c.w))]));
        ctx.record(format!("{me}.u"), c.u.value());
        ctx.record(format!("{me}.w"), c.w.value());
        ctx.record_secret(format!("{me}.v"), c.v.value());
        for &j in signers.iter().filter(|j| **j != i) {
            bus.send_secret(&me, &name("S", j), V_SHARE, payload([("v", el(&c.v))]));
        }
        if v_to_dc {
            bus.send_secret(&me, "DC", V_SHARE, payload([("v", el(&c.v))]));
        }
    }
}

/// The round aggregate as `reader` sees it; `own` supplies the reader's own
/// `v_i` when it is a signer.
pub(crate) fn aggregate_view(
    ctx: &Ctx,
    t: &SessionTranscript,
    reader: &str,
    own: Option<(usize, &Element)>,
    signers: &[usize],
    tag: &str,
) -> Result<(Vec<Commitment>, Aggregate), HarnessError> {
    let p = &ctx.params;
    let commits = signers
        .iter()
        .map(|&j| {
            let who = name("S", j);
            let c = t.latest(reader, &who, COMMIT)?;
            let v = match own {
                Some((i, v)) if i == j => v.clone(),
                _ => get_element(p, t.latest(reader, &who, V_SHARE)?, "v")?,
            };
            Ok(Commitment {
                u: get_element(p, c, "u")?,
                v,
                w: get_element(p, c, "w")?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let agg = env_core::aggregate(p, &commits, &ctx.message, tag, &ctx.oracle)?;
    Ok((commits, agg))
}

/// The combiner's view of the round: commitments, aggregate and partials.
pub(crate) fn dc_round(
    ctx: &mut Ctx,
    t: &SessionTranscript,
    signers: &[usize],
    tag: &str,
) -> Result<Round, HarnessError> {
    let (commitments, aggregate) = aggregate_view(ctx, t, "DC", None, signers, tag)?;
    let partials = signers
        .iter()
        .map(|&i| get_scalar(&ctx.params, t.latest("DC", &name("S", i), PARTIAL)?, "s"))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.record("U_S", aggregate.u.value());
    ctx.record("V_S", aggregate.v.value());
    ctx.record("W_S", aggregate.w.value());
    ctx.record("R_S", aggregate.r.value());
    Ok(Round {
        subset: signers.to_vec(),
        commitments,
        aggregate,
        partials,
    })
}

/// A combiner failure, naming the signer when the check can trace it.
pub(crate) fn traced(r: dirsig_core::Result<EnvelopeSignature>) -> Result<EnvelopeSignature, Flow> {
    match r {
        Err(Error::PartialRejected(i)) => Err(Flow::Halt {
            actor: "DC".into(),
            cause: format!("partial signature from {} rejected", name("S", i)),
        }),
        other => other.at("DC"),
    }
}

/// Send `{S, U, W, m}` from DC to `to`, after any tamper faults.
pub(crate) fn emit_signature(ctx: &mut Ctx, bus: &mut Bus, sig: &EnvelopeSignature, to: &str) -> Result<(), Flow> {
    ctx.record("S_S", sig.s.value());
    let mut out = payload([
        ("s", sc(&sig.s)),
        ("u", el(&sig.u)),
        ("w", el(&sig.w)),
        ("m", tagged_bytes(&sig.message)),
    ]);
    ctx.tamper(&mut out, SCHEMA)?;
    bus.send("DC", to, SIGNATURE, out);
    Ok(())
}

pub(crate) fn read_signature(ctx: &Ctx, env: &Envelope) -> Result<EnvelopeSignature, HarnessError> {
    let p = &ctx.params;
    Ok(EnvelopeSignature {
        s: get_scalar(p, env, "s")?,
        u: get_element(p, env, "u")?,
        w: get_element(p, env, "w")?,
        message: get_bytes(env, "m")?,
    })
}

/// Signer `i`'s partial after it has seen the whole commit round.
fn signer_partial<F>(
    ctx: &mut Ctx,
    bus: &mut Bus,
    i: usize,
    k1: &Scalar,
    signers: &[usize],
    tag: &str,
    sign: F,
) -> Result<(), Flow>
where
    F: FnOnce(&Scalar) -> dirsig_core::Result<(Scalar, Scalar)>,
{
    let me = name("S", i);
    let own_v = ctx.params.gexp(k1);
    let (_, agg) = aggregate_view(ctx, bus.transcript(), &me, Some((i, &own_v)), signers, tag)?;
    let (ms, mut s) = sign(&agg.r).at(&me)?;
    ctx.record_secret(format!("{me}.MS"), ms.value());
    if ctx.corrupt_partial(i) {
        s = ctx.params.add(&s, &ctx.params.scalar(1u32));
    }
    ctx.record(format!("{me}.s"), s.value());
    bus.send_secret(&me, "DC", PARTIAL, payload([("s", sc(&s))]));
    Ok(())
}

/// How the receiver's check is keyed: `g^S C^R = R_R key^R`.
struct ReceiverKey {
    key: Element,
    correction: Element,
}

fn receiver_interact(
    ctx: &mut Ctx,
    bus: &mut Bus,
    b: &KeyPair,
    rk: &ReceiverKey,
    tag: &str,
    zk: &ZkSecrets,
) -> Result<(), Flow> {
    let p = ctx.params.clone();
    let sig = read_signature(ctx, bus.transcript().latest("B", "DC", SIGNATURE)?)?;
    let accepted = env_core::verify_with(&p, &sig, &b.secret, &rk.key, &rk.correction, tag, &ctx.oracle)
        .check("B")?
        .is_some_and(|v| v.accepted);
    if !accepted {
        return Ok(());
    }
    let st = validity_statement(&p, &sig, b);
    let mut claim = bus.transcript().latest("B", "DC", SIGNATURE)?.payload.clone();
    claim.insert("mu".into(), el(&st.z));
    bus.send("B", "Y", CLAIM, claim);
    zk_interact(ctx, bus, "B", "Y", &st, &b.secret, zk)
}

fn receiver_judge(
    ctx: &mut Ctx,
    t: &SessionTranscript,
    b: &KeyPair,
    rk: &ReceiverKey,
    tag: &str,
    zk: &ZkSecrets,
) -> Result<Verdict, HarnessError> {
    let p = ctx.params.clone();
    let sig = read_signature(ctx, t.latest("B", "DC", SIGNATURE)?)?;
    let verdict = env_core::verify_with(&p, &sig, &b.secret, &rk.key, &rk.correction, tag, &ctx.oracle)?;
    ctx.record("R_R", verdict.r_r.value());
    if !verdict.accepted {
        return Ok(rejected("B: g^S_S does not match R_R * key^R_S"));
    }

    // Y rebuilds R_R from the claimed U_S^x_B and then needs the proof
    // that the claim used B's key.
    let env = t.latest("Y", "B", CLAIM)?;
    let claim = read_signature(ctx, env)?;
    let mu = get_element(&p, env, "mu")?;
    let r_r = p.mul_el(&claim.w, &mu);
    let r_s = env_core::challenge(&p, &r_r, &claim.message, tag, &ctx.oracle)?;
    let lhs = p.mul_el(&p.gexp(&claim.s), &p.exp(&rk.correction, &r_s));
    if lhs != p.mul_el(&r_r, &p.exp(&rk.key, &r_s)) {
        return Ok(rejected("Y: claimed U_S^x_B does not satisfy the signature check"));
    }
    let y_b = read_key(&p, t, "Y", "B")?;
    let st = Statement::new(&p, claim.u.clone(), mu, y_b);
    if !zk_judge(ctx, t, "B", "Y", &st, zk)? {
        return Ok(rejected("Y: confirmation proof failed"));
    }
    Ok(Verdict::Accepted)
}

fn envelope_signature_file(
    scheme: SchemeId,
    t: &SessionTranscript,
    attachments: &[(&str, String)],
) -> Option<SignatureFile> {
    signature_file(scheme, t.latest("B", "DC", SIGNATURE).ok()?, attachments)
}

fn default_threshold(poly: &Option<Vec<String>>, threshold: Option<usize>, n: usize) -> Result<usize, HarnessError> {
    let t = threshold.or(poly.as_ref().map(|c| c.len())).unwrap_or(n);
    if t == 0 || t > n {
        return Err(invalid(format!("threshold {t} for {n} members")));
    }
    Ok(t)
}

fn signer_list(cfg: &Option<Vec<usize>>, n: usize, t: usize) -> Result<Vec<usize>, HarnessError> {
    match cfg {
        Some(v) => indices(v, n, "signers"),
        None => Ok((0..t).collect()),
    }
}

fn subset_of(ctx: &Ctx, t: &SessionTranscript, reader: &str) -> Result<Vec<usize>, HarnessError> {
    let _ = ctx;
    parse_member_list(t.latest(reader, "DC", SUBSET)?, "members")
}

fn scalar_key(i: usize, what: &str) -> String {
    format!("{what}_{}", i + 1)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch5Config {
    poly: Option<Vec<String>>,
    secret: Option<String>,
    threshold: Option<usize>,
    /// `x`, `u` and `k` (the member's `K_i`).
    members: Vec<MemberConfig>,
    /// The dealer's masking exponent `K`.
    k: Option<String>,
    x_b: Option<String>,
    signers: Option<Vec<usize>>,
    nonces: Vec<(Option<String>, Option<String>)>,
    zk: ZkConfig,
}

pub(crate) struct Ch5 {
    roster: Roster,
    setup: Ch5Setup,
    b: KeyPair,
    signers: Vec<usize>,
    nonces: Vec<(Scalar, Scalar)>,
    zk: ZkSecrets,
}

impl Ch5 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch5Config) -> Result<Self, HarnessError> {
        let roster = Roster::resolve(ctx, &cfg.members)?;
        let k_i = roster_config(&cfg.members)
            .iter()
            .map(|m| ctx.pick(&m.k))
            .collect::<Result<Vec<_>, _>>()?;
        let t = default_threshold(&cfg.poly, cfg.threshold, roster.len())?;
        let poly = polynomial(ctx, &cfg.poly, &cfg.secret, t)?;
        let k = ctx.pick_nonzero(&cfg.k)?;
        let setup = ms5_setup(&ctx.params, &poly, t, &roster.members, &k_i, &k).setup()?;
        let b = ctx.key(&cfg.x_b)?;
        let signers = signer_list(&cfg.signers, roster.len(), t)?;
        let nonces = nonces(ctx, &cfg.nonces, signers.len())?;
        Ok(Ch5 {
            roster,
            setup,
            b,
            signers,
            nonces,
            zk: ZkSecrets::resolve(ctx, &cfg.zk)?,
        })
    }
}

fn read_ch5(ctx: &Ctx, t: &SessionTranscript, reader: &str) -> Result<Ch5Setup, HarnessError> {
    let p = &ctx.params;
    let env = t.latest(reader, "SDC", "table")?;
    let n = get_usize(env, "n")?;
    let members = (0..n)
        .map(|i| {
            Ok(Ch5Member {
                point: get_scalar(p, env, &scalar_key(i, "u"))?,
                public: get_element(p, env, &scalar_key(i, "key"))?,
                m: get_element(p, env, &scalar_key(i, "m"))?,
                n: get_element(p, env, &scalar_key(i, "n"))?,
                v: parse_int(env.get(&scalar_key(i, "v"))?)?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(Ch5Setup {
        threshold: get_usize(env, "t")?,
        group_public: get_element(p, env, "y")?,
        w: get_element(p, env, "w")?,
        members,
    })
}

fn ch5_key(ctx: &mut Ctx, t: &SessionTranscript, reader: &str) -> Result<ReceiverKey, HarnessError> {
    let table = read_ch5(ctx, t, reader)?;
    let subset = subset_of(ctx, t, reader)?;
    let e = ms5_correction(&ctx.params, &table, &subset)?;
    ctx.record("E", e.value());
    Ok(ReceiverKey {
        key: ctx.params.mul_el(&e, &table.group_public),
        correction: ctx.params.identity(),
    })
}

impl Protocol for Ch5 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        announce_key(bus, "B", &self.b);
        let s = &self.setup;
        let mut table = payload([
            ("y", el(&s.group_public)),
            ("w", el(&s.w)),
            ("t", s.threshold.to_string()),
            ("n", s.members.len().to_string()),
        ]);
        ctx.record("y_S", s.group_public.value());
        ctx.record("W", s.w.value());
        for (i, m) in s.members.iter().enumerate() {
            let who = name("S", i);
            table.insert(scalar_key(i, "u"), sc(&m.point));
            table.insert(scalar_key(i, "key"), el(&m.public));
            table.insert(scalar_key(i, "m"), el(&m.m));
            table.insert(scalar_key(i, "n"), el(&m.n));
            table.insert(scalar_key(i, "v"), hex(&m.v));
            ctx.record(format!("{who}.key"), m.public.value());
            ctx.record(format!("{who}.m"), m.m.value());
            ctx.record(format!("{who}.n"), m.n.value());
            ctx.record(format!("{who}.masked"), &m.v);
        }
        bus.broadcast("SDC", "table", table);
        bus.broadcast("DC", SUBSET, payload([("members", member_list(&self.signers))]));

        let y_b = read_key(&p, bus.transcript(), "S1", "B")?;
        let mut shares = Vec::with_capacity(self.signers.len());
        for &i in &self.signers {
            let me = name("S", i);
            let view = read_ch5(ctx, bus.transcript(), &me)?;
            let share = view.unmask(&p, i, &self.roster.keys[i]).at(&me)?;
            ctx.record_secret(format!("{me}.l"), share.value.value());
            shares.push(share);
        }
        commit_phase(ctx, bus, &self.signers, &self.nonces, &y_b, true);
        for ((&i, (k1, _)), share) in self.signers.iter().zip(&self.nonces).zip(&shares) {
            let me = name("S", i);
            let view = read_ch5(ctx, bus.transcript(), &me)?;
            let subset = subset_of(ctx, bus.transcript(), &me)?;
            let points = view.points(&subset).at(&me)?;
            signer_partial(ctx, bus, i, k1, &self.signers, CH5_TAG, |r| {
                let ms = modified_shadow(&p, share, &points)?;
                Ok((ms, ms5_partial_sign(&p, share, &points, k1, r)?))
            })?;
        }

        let view = read_ch5(ctx, bus.transcript(), "DC")?;
        let round = dc_round(ctx, bus.transcript(), &self.signers, CH5_TAG)?;
        let sig = traced(ms5_combine(&p, &view, &round, &ctx.message))?;
        emit_signature(ctx, bus, &sig, "B")?;

        let rk = ch5_key(ctx, bus.transcript(), "B")?;
        receiver_interact(ctx, bus, &self.b, &rk, CH5_TAG, &self.zk)
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let rk = ch5_key(ctx, t, "B")?;
        receiver_judge(ctx, t, &self.b, &rk, CH5_TAG, &self.zk)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let table = read_ch5(ctx, t, "B").ok()?;
        let subset = subset_of(ctx, t, "B").ok()?;
        let e = ms5_correction(&ctx.params, &table, &subset).ok()?;
        envelope_signature_file(
            SchemeId::Ch5,
            t,
            &[("group_public", el(&table.group_public)), ("correction", el(&e))],
        )
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch6Config {
    threshold: Option<usize>,
    /// `x`, `u` and `poly` (the member's own `f_i`).
    members: Vec<MemberConfig>,
    /// `pairwise[i][j]` is `h_ij`; the diagonal is ignored.
    pairwise: Option<Vec<Vec<String>>>,
    k: Option<String>,
    x_b: Option<String>,
    signers: Option<Vec<usize>>,
    nonces: Vec<(Option<String>, Option<String>)>,
    zk: ZkConfig,
}

pub(crate) struct Ch6 {
    roster: Roster,
    polys: Vec<Polynomial>,
    setup: Ch6Setup,
    b: KeyPair,
    signers: Vec<usize>,
    nonces: Vec<(Scalar, Scalar)>,
    zk: ZkSecrets,
}

impl Ch6 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch6Config) -> Result<Self, HarnessError> {
        let roster = Roster::resolve(ctx, &cfg.members)?;
        let n = roster.len();
        let members = roster_config(&cfg.members);
        let first_poly = members.iter().find_map(|m| m.poly.clone());
        let t = default_threshold(&first_poly, cfg.threshold, n)?;
        let polys = members
            .iter()
            .map(|m| polynomial(ctx, &m.poly, &None, t))
            .collect::<Result<Vec<_>, _>>()?;
        let pairwise = match &cfg.pairwise {
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(invalid(format!("pairwise must be {n} x {n}")));
                }
                rows.iter()
                    .map(|r| r.iter().map(|v| ctx.scalar(v)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => (0..n)
                .map(|_| (0..n).map(|_| ctx.params.random_scalar(&mut ctx.rng)).collect())
                .collect(),
        };
        let k = ctx.pick_nonzero(&cfg.k)?;
        let setup = ms6_setup(&ctx.params, &polys, t, &roster.members, &pairwise, &k).setup()?;
        let b = ctx.key(&cfg.x_b)?;
        let signers = signer_list(&cfg.signers, n, t)?;
        let nonces = nonces(ctx, &cfg.nonces, signers.len())?;
        Ok(Ch6 {
            roster,
            polys,
            setup,
            b,
            signers,
            nonces,
            zk: ZkSecrets::resolve(ctx, &cfg.zk)?,
        })
    }
}

/// Rebuild the public dealing from every member's `deal` broadcast.
fn read_ch6(ctx: &Ctx, t: &SessionTranscript, reader: &str, n: usize) -> Result<Ch6Setup, HarnessError> {
    let p = &ctx.params;
    let deals = (0..n)
        .map(|i| t.latest(reader, &name("S", i), "deal"))
        .collect::<Result<Vec<_>, _>>()?;
    let members = deals
        .iter()
        .map(|d| {
            Ok(Ch6Member {
                point: get_scalar(p, d, "u")?,
                public: get_element(p, d, "key")?,
                partial_public: get_element(p, d, "y")?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let dealt = deals
        .iter()
        .enumerate()
        .map(|(i, d)| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return Ok(None);
                    }
                    Ok(Some(Dealt {
                        m: get_element(p, d, &scalar_key(j, "m"))?,
                        n: get_element(p, d, &scalar_key(j, "n"))?,
                        v: parse_int(d.get(&scalar_key(j, "v"))?)?,
                    }))
                })
                .collect::<Result<Vec<_>, HarnessError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let w = get_element(p, deals[0], "w")?;
    if deals.iter().any(|d| d.get("w").ok() != Some(el(&w).as_str())) {
        return Err(HarnessError::Transcript("members disagree on W".into()));
    }
    Ok(Ch6Setup {
        threshold: get_usize(deals[0], "t")?,
        group_public: p.product(members.iter().map(|m| &m.partial_public)),
        w,
        members,
        dealt,
    })
}

fn ch6_key(ctx: &mut Ctx, t: &SessionTranscript, reader: &str, n: usize) -> Result<ReceiverKey, HarnessError> {
    let setup = read_ch6(ctx, t, reader, n)?;
    let subset = subset_of(ctx, t, reader)?;
    let e = ms6_correction(&ctx.params, &setup, &subset)?;
    ctx.record("E", e.value());
    Ok(ReceiverKey {
        key: ctx.params.mul_el(&e, &setup.group_public),
        correction: ctx.params.identity(),
    })
}

impl Protocol for Ch6 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        let n = self.roster.len();
        announce_key(bus, "B", &self.b);
        let s = &self.setup;
        ctx.record("y_S", s.group_public.value());
        ctx.record("W", s.w.value());
        for (i, m) in s.members.iter().enumerate() {
            let who = name("S", i);
            let mut deal = payload([
                ("y", el(&m.partial_public)),
                ("u", sc(&m.point)),
                ("key", el(&m.public)),
                ("w", el(&s.w)),
                ("t", s.threshold.to_string()),
            ]);
            ctx.record(format!("{who}.y"), m.partial_public.value());
            ctx.record(format!("{who}.key"), m.public.value());
            ctx.record_secret(format!("{who}.f0"), self.polys[i].constant().value());
            for (j, d) in s.dealt[i].iter().enumerate() {
                let Some(d) = d else { continue };
                deal.insert(scalar_key(j, "m"), el(&d.m));
                deal.insert(scalar_key(j, "n"), el(&d.n));
                deal.insert(scalar_key(j, "v"), hex(&d.v));
                let pair = format!("{who}>{}", name("S", j));
                ctx.record(format!("{pair}.m"), d.m.value());
                ctx.record(format!("{pair}.n"), d.n.value());
                ctx.record(format!("{pair}.masked"), &d.v);
            }
            bus.broadcast(&who, "deal", deal);
        }
        bus.broadcast("DC", SUBSET, payload([("members", member_list(&self.signers))]));

        let y_b = read_key(&p, bus.transcript(), "S1", "B")?;
        let mut holders = Vec::with_capacity(self.signers.len());
        for &i in &self.signers {
            let me = name("S", i);
            let view = read_ch6(ctx, bus.transcript(), &me, n)?;
            let holder = view.holder(&p, i, &self.roster.keys[i], &self.polys[i]).at(&me)?;
            for (j, l) in holder.received.iter().enumerate() {
                if let Some(l) = l {
                    ctx.record_secret(format!("{}>{me}.l", name("S", j)), l.value());
                }
            }
            holders.push(holder);
        }
        commit_phase(ctx, bus, &self.signers, &self.nonces, &y_b, true);
        for ((&i, (k1, _)), holder) in self.signers.iter().zip(&self.nonces).zip(&holders) {
            let me = name("S", i);
            let view = read_ch6(ctx, bus.transcript(), &me, n)?;
            let subset = subset_of(ctx, bus.transcript(), &me)?;
            ctx.record(format!("{me}.C"), view.weight(&p, i, &subset).at(&me)?.value());
            signer_partial(ctx, bus, i, k1, &self.signers, CH6_TAG, |r| {
                let ms = ms6_shadow(&p, &view, holder, &subset)?;
                Ok((ms, ms6_partial_sign(&p, &view, holder, &subset, k1, r)?))
            })?;
        }

        let view = read_ch6(ctx, bus.transcript(), "DC", n)?;
        let round = dc_round(ctx, bus.transcript(), &self.signers, CH6_TAG)?;
        let sig = traced(ms6_combine(&p, &view, &round, &ctx.message))?;
        emit_signature(ctx, bus, &sig, "B")?;

        let rk = ch6_key(ctx, bus.transcript(), "B", n)?;
        receiver_interact(ctx, bus, &self.b, &rk, CH6_TAG, &self.zk)
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let rk = ch6_key(ctx, t, "B", self.roster.len())?;
        receiver_judge(ctx, t, &self.b, &rk, CH6_TAG, &self.zk)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let setup = read_ch6(ctx, t, "B", self.roster.len()).ok()?;
        let subset = subset_of(ctx, t, "B").ok()?;
        let e = ms6_correction(&ctx.params, &setup, &subset).ok()?;
        envelope_signature_file(
            SchemeId::Ch6,
            t,
            &[("group_public", el(&setup.group_public)), ("correction", el(&e))],
        )
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct SubsetConfig {
    /// 1-based member numbers.
    members: Vec<usize>,
    /// The subset's extra interpolation point `u_H`.
    point: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch7Config {
    secret: Option<String>,
    /// `x`, `u` and `k` (the member's `k_i`).
    members: Vec<MemberConfig>,
    subsets: Vec<SubsetConfig>,
    k: Option<String>,
    x_b: Option<String>,
    /// 1-based id of the signing subset.
    subset: Option<usize>,
    nonces: Vec<(Option<String>, Option<String>)>,
    zk: ZkConfig,
}

pub(crate) struct Ch7 {
    roster: Roster,
    setup: Ch7Setup,
    id: usize,
    b: KeyPair,
    nonces: Vec<(Scalar, Scalar)>,
    zk: ZkSecrets,
}

impl Ch7 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch7Config) -> Result<Self, HarnessError> {
        let roster = Roster::resolve(ctx, &cfg.members)?;
        let n = roster.len();
        let values = roster_config(&cfg.members)
            .iter()
            .map(|m| ctx.pick(&m.k))
            .collect::<Result<Vec<_>, _>>()?;
        let secret = ctx.pick_nonzero(&cfg.secret)?;
        let subsets_cfg = if cfg.subsets.is_empty() {
            vec![SubsetConfig {
                members: (1..=n).collect(),
                point: None,
            }]
        } else {
            cfg.subsets
        };
        let mut subsets = Vec::with_capacity(subsets_cfg.len());
        for s in &subsets_cfg {
            let members = indices(&s.members, n, "subset")?;
            let point = match &s.point {
                Some(u) => ctx.scalar(u)?,
                None => loop {
                    let u = ctx.params.random_nonzero_scalar(&mut ctx.rng);
                    if roster.members.iter().all(|m| m.point != u) {
                        break u;
                    }
                },
            };
            subsets.push((members, point));
        }
        let k = ctx.pick_nonzero(&cfg.k)?;
        let (setup, polys) = ms7_setup(&ctx.params, &secret, &roster.members, &values, &subsets, &k).setup()?;
        let id = cfg.subset.unwrap_or(1);
        if id == 0 || id > subsets.len() {
            return Err(invalid(format!("no subset {id}")));
        }
        let id = id - 1;
        for (d, c) in polys[id].coeffs().iter().enumerate() {
            ctx.record_secret(format!("f.{d}"), c.value());
        }
        let b = ctx.key(&cfg.x_b)?;
        let size = setup.subsets[id].members.len();
        let nonces = nonces(ctx, &cfg.nonces, size)?;
        Ok(Ch7 {
            roster,
            setup,
            id,
            b,
            nonces,
            zk: ZkSecrets::resolve(ctx, &cfg.zk)?,
        })
    }
}

fn read_ch7(ctx: &Ctx, t: &SessionTranscript, reader: &str) -> Result<Ch7Setup, HarnessError> {
    let p = &ctx.params;
    let env = t.latest(reader, "SDC", "table")?;
    let n = get_usize(env, "n")?;
    let members = (0..n)
        .map(|i| {
            Ok(Member {
                point: get_scalar(p, env, &scalar_key(i, "u"))?,
                public: get_element(p, env, &scalar_key(i, "key"))?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut subsets: Vec<AuthorizedSubset> = Vec::new();
    for e in t.all(reader, "subset-table").filter(|e| e.from == "SDC") {
        let id = get_usize(e, "id")?;
        if id != subsets.len() + 1 {
            return Err(HarnessError::Transcript("subset tables out of order".into()));
        }
        let list = parse_member_list(e, "members")?;
        let shares = list
            .iter()
            .map(|&i| {
                Ok(Ch7Share {
                    member: i,
                    m: get_element(p, e, &scalar_key(i, "m"))?,
                    v: parse_int(e.get(&scalar_key(i, "v"))?)?,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        subsets.push(AuthorizedSubset {
            members: list,
            point: get_scalar(p, e, "point")?,
            verification_key: get_element(p, e, "vk")?,
            shares,
        });
    }
    Ok(Ch7Setup {
        group_public: get_element(p, env, "y")?,
        w: get_element(p, env, "w")?,
        members,
        subsets,
    })
}

fn chosen_subset(t: &SessionTranscript, reader: &str) -> Result<usize, HarnessError> {
    let id = get_usize(t.latest(reader, "DC", SUBSET)?, "id")?;
    id.checked_sub(1)
        .ok_or_else(|| HarnessError::Parse("subset id is 1-based".into()))
}

fn ch7_key(ctx: &mut Ctx, t: &SessionTranscript, reader: &str) -> Result<ReceiverKey, HarnessError> {
    let setup = read_ch7(ctx, t, reader)?;
    let id = chosen_subset(t, reader)?;
    let vk = setup.subset(id)?.verification_key.clone();
    Ok(ReceiverKey {
        key: setup.group_public,
        correction: vk,
    })
}

impl Protocol for Ch7 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        announce_key(bus, "B", &self.b);
        let s = &self.setup;
        let mut table = payload([
            ("y", el(&s.group_public)),
            ("w", el(&s.w)),
            ("n", s.members.len().to_string()),
        ]);
        ctx.record("y_S", s.group_public.value());
        ctx.record("W", s.w.value());
        for (i, m) in s.members.iter().enumerate() {
            table.insert(scalar_key(i, "u"), sc(&m.point));
            table.insert(scalar_key(i, "key"), el(&m.public));
            ctx.record(format!("{}.key", name("S", i)), m.public.value());
        }
        bus.broadcast("SDC", "table", table);
        for (id, sub) in s.subsets.iter().enumerate() {
            let mut out = payload([
                ("id", (id + 1).to_string()),
                ("point", sc(&sub.point)),
                ("vk", el(&sub.verification_key)),
                ("members", member_list(&sub.members)),
            ]);
            for share in &sub.shares {
                out.insert(scalar_key(share.member, "m"), el(&share.m));
                out.insert(scalar_key(share.member, "v"), hex(&share.v));
                if id == self.id {
                    let who = name("S", share.member);
                    ctx.record(format!("{who}.m"), share.m.value());
                    ctx.record(format!("{who}.masked"), &share.v);
                }
            }
            if id == self.id {
                ctx.record("V_K", sub.verification_key.value());
            }
            bus.broadcast("SDC", "subset-table", out);
        }
        let signers = s.subsets[self.id].members.clone();
        bus.broadcast(
            "DC",
            SUBSET,
            payload([("id", (self.id + 1).to_string()), ("members", member_list(&signers))]),
        );

        let y_b = read_key(&p, bus.transcript(), "S1", "B")?;
        let mut shares: Vec<Share> = Vec::with_capacity(signers.len());
        for &i in &signers {
            let me = name("S", i);
            let view = read_ch7(ctx, bus.transcript(), &me)?;
            let id = chosen_subset(bus.transcript(), &me)?;
            let share = view.unmask(&p, id, i, &self.roster.keys[i]).at(&me)?;
            ctx.record_secret(format!("{me}.l"), share.value.value());
            shares.push(share);
        }
        commit_phase(ctx, bus, &signers, &self.nonces, &y_b, true);
        for ((&i, (k1, _)), share) in signers.iter().zip(&self.nonces).zip(&shares) {
            let me = name("S", i);
            let view = read_ch7(ctx, bus.transcript(), &me)?;
            let id = chosen_subset(bus.transcript(), &me)?;
            let points = view.points(id).at(&me)?;
            signer_partial(ctx, bus, i, k1, &signers, CH7_TAG, |r| {
                let ms = modified_shadow(&p, share, &points)?;
                Ok((ms, ms5_partial_sign(&p, share, &points, k1, r)?))
            })?;
        }

        let view = read_ch7(ctx, bus.transcript(), "DC")?;
        let id = chosen_subset(bus.transcript(), "DC")?;
        let round = dc_round(ctx, bus.transcript(), &signers, CH7_TAG)?;
        let sig = traced(ms7_combine(&p, &view, id, &round, &ctx.message))?;
        emit_signature(ctx, bus, &sig, "B")?;

        let rk = ch7_key(ctx, bus.transcript(), "B")?;
        receiver_interact(ctx, bus, &self.b, &rk, CH7_TAG, &self.zk)
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let rk = ch7_key(ctx, t, "B")?;
        receiver_judge(ctx, t, &self.b, &rk, CH7_TAG, &self.zk)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let setup = read_ch7(ctx, t, "B").ok()?;
        let id = chosen_subset(t, "B").ok()?;
        let vk = setup.subset(id).ok()?.verification_key.clone();
        envelope_signature_file(
            SchemeId::Ch7,
            t,
            &[("group_public", el(&setup.group_public)), ("verification_key", el(&vk))],
        )
    }
}
