//! Threshold signing for one receiver (`ch3`) and organization to
//! organization (`ch4`).
//!
//! `ch3` parties: dealer `SDC`, members `S1..Sn`, combiner `DC`, receiver
//! `B`, third party `Y`. `ch4` parties: dealer `CTC`, signing members
//! `S1..Sn`, combiner `DC`, verifying members `R1..Rm` and their
//! combiner `VC`.

use dirsig_core::schemes::threshold::{
    ch3_aggregate, ch3_partial_commit, ch3_partial_sign, ch3_setup, ch3_verify, ch4_partial_sign, ch4_setup,
    ch4_verifier_shadow, ch4_verify_shadows, Ch3Commitment, Ch3Group, Ch3Signature, CH3_TAG, CH4_TAG,
};
use dirsig_core::schemes::{MaskedMember, Organization};
use dirsig_core::sharing::{modified_shadow, Share};
use dirsig_core::zk::Statement;
use dirsig_core::{HashItem, KeyPair, Scalar};
use serde::Deserialize;

use super::envelope::{aggregate_view, commit_phase, emit_signature, read_signature};
use super::*;

pub(crate) const CH3_FIELDS: &[&str] = &["s", "w", "r", "m"];

const CH3_SCHEMA: &[(&str, Kind)] = &[
    ("s", Kind::Scalar),
    ("w", Kind::Element),
    ("r", Kind::Scalar),
    ("m", Kind::Bytes),
];

const COMMIT: &str = "commit";
const Z_SHARE: &str = "z-share";
const CLAIM: &str = "claim";

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch3Config {
    poly: Option<Vec<String>>,
    secret: Option<String>,
    threshold: Option<usize>,
    /// Share points `u_i`; defaults to `1..=n`.
    points: Option<Vec<String>>,
    n: Option<usize>,
    x_b: Option<String>,
    signers: Option<Vec<usize>>,
    nonces: Vec<(Option<String>, Option<String>)>,
    zk: ZkConfig,
}

pub(crate) struct Ch3 {
    group: Ch3Group,
    shares: Vec<Share>,
    b: KeyPair,
    signers: Vec<usize>,
    nonces: Vec<(Scalar, Scalar)>,
    zk: ZkSecrets,
}

impl Ch3 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch3Config) -> Result<Self, HarnessError> {
        let t = cfg.threshold.or(cfg.poly.as_ref().map(|c| c.len())).unwrap_or(2);
        let points = match &cfg.points {
            Some(u) => u.iter().map(|v| ctx.scalar(v)).collect::<Result<Vec<_>, _>>()?,
            None => (1..=cfg.n.unwrap_or(t + 1))
                .map(|i| ctx.params.scalar(i as u64))
                .collect(),
        };
        if t == 0 || t > points.len() {
            return Err(invalid(format!("threshold {t} for {} members", points.len())));
        }
        let poly = polynomial(ctx, &cfg.poly, &cfg.secret, t)?;
        let (group, shares) = ch3_setup(&ctx.params, &poly, t, &points).setup()?;
        let b = ctx.key(&cfg.x_b)?;
        let signers = match &cfg.signers {
            Some(v) => indices(v, points.len(), "signers")?,
            None => (0..t).collect(),
        };
        let nonces = nonces(ctx, &cfg.nonces, signers.len())?;
        Ok(Ch3 {
            group,
            shares,
            b,
            signers,
            nonces,
            zk: ZkSecrets::resolve(ctx, &cfg.zk)?,
        })
    }
}

fn read_group_key(ctx: &Ctx, t: &SessionTranscript, reader: &str) -> Result<dirsig_core::Element, HarnessError> {
    get_element(&ctx.params, t.latest(reader, "SDC", "group")?, "y")
}

fn read_ch3_signature(ctx: &Ctx, env: &Envelope) -> Result<Ch3Signature, HarnessError> {
    let p = &ctx.params;
    Ok(Ch3Signature {
        s: get_scalar(p, env, "s")?,
        w: get_element(p, env, "w")?,
        r: get_scalar(p, env, "r")?,
        message: get_bytes(env, "m")?,
    })
}

impl Protocol for Ch3 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        announce_key(bus, "B", &self.b);
        let g = &self.group;
        let mut table = payload([
            ("y", el(&g.group_public)),
            ("t", g.threshold.to_string()),
            ("n", g.points.len().to_string()),
        ]);
        for (i, u) in g.points.iter().enumerate() {
            table.insert(format!("u_{}", i + 1), sc(u));
        }
        ctx.record("y_G", g.group_public.value());
        bus.broadcast("SDC", "group", table);
        for (i, share) in self.shares.iter().enumerate() {
            bus.send_secret("SDC", &name("S", i), "share", payload([("l", sc(&share.value))]));
        }
        bus.broadcast("DC", SUBSET, payload([("members", member_list(&self.signers))]));

        let y_b = read_key(&p, bus.transcript(), "S1", "B")?;
        for (&i, (k1, k2)) in self.signers.iter().zip(&self.nonces) {
            let me = name("S", i);
            let c = ch3_partial_commit(&p, &y_b, k1, k2);
            bus.broadcast(&me, COMMIT, payload([("w", el(&c.w))]));
            ctx.record(format!("{me}.w"), c.w.value());
            ctx.record_secret(format!("{me}.z"), c.z.value());
            for &j in self.signers.iter().filter(|j| **j != i) {
                bus.send_secret(&me, &name("S", j), Z_SHARE, payload([("z", el(&c.z))]));
            }
        }

        let mut agreed = None;
        for (&i, (k1, k2)) in self.signers.iter().zip(&self.nonces) {
            let me = name("S", i);
            let t = bus.transcript();
            let own = ch3_partial_commit(&p, &y_b, k1, k2);
            let commits = self
                .signers
                .iter()
                .map(|&j| {
                    if j == i {
                        return Ok(own.clone());
                    }
                    let who = name("S", j);
                    Ok(Ch3Commitment {
                        w: get_element(&p, t.latest(&me, &who, COMMIT)?, "w")?,
                        z: get_element(&p, t.latest(&me, &who, Z_SHARE)?, "z")?,
                    })
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let agg = ch3_aggregate(&p, &commits, &ctx.message, &ctx.oracle).at(&me)?;
            let l = get_scalar(&p, t.latest(&me, "SDC", "share")?, "l")?;
            let group = t.latest(&me, "SDC", "group")?;
            let subset = parse_member_list(t.latest(&me, "DC", SUBSET)?, "members")?;
            let points = subset
                .iter()
                .map(|j| get_scalar(&p, group, &format!("u_{}", j + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            let share = Share {
                point: get_scalar(&p, group, &format!("u_{}", i + 1))?,
                value: l,
            };
            ctx.record_secret(format!("{me}.l"), share.value.value());
            ctx.record_secret(
                format!("{me}.MS"),
                modified_shadow(&p, &share, &points).at(&me)?.value(),
            );
            let mut s = ch3_partial_sign(&p, &share, &points, k1, &agg.r).at(&me)?;
            if ctx.corrupt_partial(i) {
                s = p.add(&s, &p.scalar(1u32));
            }
            ctx.record(format!("{me}.s"), s.value());
            if agreed.is_none() {
                ctx.record("W", agg.w.value());
                ctx.record("Z", agg.z.value());
                ctx.record("R", agg.r.value());
                agreed = Some(agg.r.clone());
            }
            bus.send_secret(&me, "DC", PARTIAL, payload([("s", sc(&s)), ("r", sc(&agg.r))]));
        }

        // The combiner sums partials; it cannot check them individually.
        let t = bus.transcript();
        let mut partials = Vec::with_capacity(self.signers.len());
        let mut r = None;
        let mut w = p.identity();
        for &i in &self.signers {
            let who = name("S", i);
            let env = t.latest("DC", &who, PARTIAL)?;
            let r_i = get_scalar(&p, env, "r")?;
            if r.get_or_insert_with(|| r_i.clone()) != &r_i {
                return Err(Flow::Halt {
                    actor: "DC".into(),
                    cause: "signers disagree on R".into(),
                });
            }
            partials.push(get_scalar(&p, env, "s")?);
            w = p.mul_el(&w, &get_element(&p, t.latest("DC", &who, COMMIT)?, "w")?);
        }
        let sig = Ch3Signature {
            s: p.sum(&partials),
            w,
            r: r.ok_or_else(|| invalid("no signers"))?,
            message: ctx.message.clone(),
        };
        ctx.record("S", sig.s.value());
        let mut out = payload([
            ("s", sc(&sig.s)),
            ("w", el(&sig.w)),
            ("r", sc(&sig.r)),
            ("m", tagged_bytes(&sig.message)),
        ]);
        ctx.tamper(&mut out, CH3_SCHEMA)?;
        bus.send("DC", "B", SIGNATURE, out);

        let t = bus.transcript();
        let sig = read_ch3_signature(ctx, t.latest("B", "DC", SIGNATURE)?)?;
        let y_g = read_group_key(ctx, t, "B")?;
        let Some(v) = ch3_verify(&p, &sig, &self.b, &y_g, &ctx.oracle)
            .check("B")?
            .filter(|v| v.accepted)
        else {
            return Ok(());
        };
        let mut claim = t.latest("B", "DC", SIGNATURE)?.payload.clone();
        claim.insert("z".into(), el(&v.z));
        bus.send("B", "Y", CLAIM, claim);
        let st = Statement::new(&p, v.mu, v.z, self.b.public.clone());
        zk_interact(ctx, bus, "B", "Y", &st, &self.b.secret, &self.zk)
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let p = ctx.params.clone();
        let sig = read_ch3_signature(ctx, t.latest("B", "DC", SIGNATURE)?)?;
        let y_g = read_group_key(ctx, t, "B")?;
        let v = ch3_verify(&p, &sig, &self.b, &y_g, &ctx.oracle)?;
        ctx.record("mu", v.mu.value());
        ctx.record("Z_B", v.z.value());
        if !v.accepted {
            return Ok(rejected("B: R does not match h(Z, W, m)"));
        }

        let env = t.latest("Y", "B", CLAIM)?;
        let claim = read_ch3_signature(ctx, env)?;
        let z = get_element(&p, env, "z")?;
        let y_g = read_group_key(ctx, t, "Y")?;
        let mu = p.product([&p.gexp(&claim.s), &p.exp(&y_g, &claim.r), &claim.w]);
        let r = ctx.oracle.hash_to_scalar(
            &p,
            CH3_TAG,
            &[
                HashItem::Element(&z),
                HashItem::Element(&claim.w),
                HashItem::Bytes(&claim.message),
            ],
        )?;
        if r != claim.r {
            return Ok(rejected("Y: claimed Z does not reproduce R"));
        }
        let y_b = read_key(&p, t, "Y", "B")?;
        let st = Statement::new(&p, mu, z, y_b);
        if !zk_judge(ctx, t, "B", "Y", &st, &self.zk)? {
            return Ok(rejected("Y: confirmation proof failed"));
        }
        Ok(Verdict::Accepted)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let y_g = read_group_key(ctx, t, "B").ok()?;
        signature_file(
            SchemeId::Ch3,
            t.latest("B", "DC", SIGNATURE).ok()?,
            &[("group_public", el(&y_g))],
        )
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct OrgConfig {
    poly: Option<Vec<String>>,
    secret: Option<String>,
    threshold: Option<usize>,
    /// `x` and `u`.
    members: Vec<MemberConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch4Config {
    signing: OrgConfig,
    verifying: OrgConfig,
    k: Option<String>,
    signers: Option<Vec<usize>>,
    nonces: Vec<(Option<String>, Option<String>)>,
    verifiers: Option<Vec<usize>>,
}

pub(crate) struct Ch4 {
    s_keys: Vec<KeyPair>,
    r_keys: Vec<KeyPair>,
    s_org: Organization,
    r_org: Organization,
    signers: Vec<usize>,
    nonces: Vec<(Scalar, Scalar)>,
    verifiers: Vec<usize>,
}

fn org_parts(
    ctx: &mut Ctx,
    cfg: &OrgConfig,
) -> Result<(Roster, dirsig_core::sharing::Polynomial, usize), HarnessError> {
    let roster = Roster::resolve(ctx, &cfg.members)?;
    let t = cfg
        .threshold
        .or(cfg.poly.as_ref().map(|c| c.len()))
        .unwrap_or(roster.len());
    if t == 0 || t > roster.len() {
        return Err(invalid(format!("threshold {t} for {} members", roster.len())));
    }
    let poly = polynomial(ctx, &cfg.poly, &cfg.secret, t)?;
    Ok((roster, poly, t))
}

impl Ch4 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch4Config) -> Result<Self, HarnessError> {
        let (s_roster, s_poly, s_t) = org_parts(ctx, &cfg.signing)?;
        let (r_roster, r_poly, r_t) = org_parts(ctx, &cfg.verifying)?;
        let k = ctx.pick_nonzero(&cfg.k)?;
        let (s_org, r_org) = ch4_setup(
            &ctx.params,
            (&s_poly, s_t, &s_roster.members),
            (&r_poly, r_t, &r_roster.members),
            &k,
        )
        .setup()?;
        let signers = match &cfg.signers {
            Some(v) => indices(v, s_roster.len(), "signers")?,
            None => (0..s_t).collect(),
        };
        let verifiers = match &cfg.verifiers {
            Some(v) => indices(v, r_roster.len(), "verifiers")?,
            None => (0..r_t).collect(),
        };
        let nonces = nonces(ctx, &cfg.nonces, signers.len())?;
        Ok(Ch4 {
            s_keys: s_roster.keys,
            r_keys: r_roster.keys,
            s_org,
            r_org,
            signers,
            nonces,
            verifiers,
        })
    }
}

fn org_payload(org: &Organization, side: &str) -> Payload {
    let mut out = payload([
        ("side", side.to_string()),
        ("y", el(&org.group_public)),
        ("w", el(&org.w)),
        ("t", org.threshold.to_string()),
        ("n", org.members.len().to_string()),
    ]);
    for (i, m) in org.members.iter().enumerate() {
        out.insert(format!("u_{}", i + 1), sc(&m.point));
        out.insert(format!("key_{}", i + 1), el(&m.public));
        out.insert(format!("v_{}", i + 1), hex(&m.v));
    }
    out
}

fn read_org(ctx: &Ctx, t: &SessionTranscript, reader: &str, side: &str) -> Result<Organization, HarnessError> {
    let p = &ctx.params;
    let env = t
        .all(reader, "organization")
        .filter(|e| e.from == "CTC" && e.payload.get("side").map(String::as_str) == Some(side))
        .last()
        .ok_or_else(|| HarnessError::Transcript(format!("{reader} has no table for organization {side}")))?;
    let n = get_usize(env, "n")?;
    let members = (1..=n)
        .map(|i| {
            Ok(MaskedMember {
                point: get_scalar(p, env, &format!("u_{i}"))?,
                public: get_element(p, env, &format!("key_{i}"))?,
                v: parse_int(env.get(&format!("v_{i}"))?)?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(Organization {
        threshold: get_usize(env, "t")?,
        group_public: get_element(p, env, "y")?,
        w: get_element(p, env, "w")?,
        members,
    })
}

impl Protocol for Ch4 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        for (org, side) in [(&self.s_org, "S"), (&self.r_org, "R")] {
            bus.broadcast("CTC", "organization", org_payload(org, side));
            for (i, m) in org.members.iter().enumerate() {
                ctx.record(format!("{}.key", name(side, i)), m.public.value());
                ctx.record(format!("{}.masked", name(side, i)), &m.v);
            }
        }
        ctx.record("W", self.s_org.w.value());
        ctx.record("y_S", self.s_org.group_public.value());
        ctx.record("y_R", self.r_org.group_public.value());
        bus.broadcast("DC", SUBSET, payload([("members", member_list(&self.signers))]));

        let mut shares = Vec::with_capacity(self.signers.len());
        for &i in &self.signers {
            let me = name("S", i);
            let org = read_org(ctx, bus.transcript(), &me, "S")?;
            let share = org.unmask(&p, i, &self.s_keys[i]).at(&me)?;
            ctx.record_secret(format!("{me}.l"), share.value.value());
            shares.push(share);
        }
        let y_r = read_org(ctx, bus.transcript(), "S1", "R")?.group_public;
        commit_phase(ctx, bus, &self.signers, &self.nonces, &y_r, false);

        for ((&i, (k1, _)), share) in self.signers.iter().zip(&self.nonces).zip(&shares) {
            let me = name("S", i);
            let t = bus.transcript();
            let own_v = p.gexp(k1);
            let (_, agg) = aggregate_view(ctx, t, &me, Some((i, &own_v)), &self.signers, CH4_TAG)?;
            let org = read_org(ctx, t, &me, "S")?;
            let subset = parse_member_list(t.latest(&me, "DC", SUBSET)?, "members")?;
            let points = org.points(&subset).at(&me)?;
            ctx.record_secret(format!("{me}.MS"), modified_shadow(&p, share, &points).at(&me)?.value());
            let mut s = ch4_partial_sign(&p, share, &points, k1, &agg.r).at(&me)?;
            if ctx.corrupt_partial(i) {
                s = p.add(&s, &p.scalar(1u32));
            }
            ctx.record(format!("{me}.s"), s.value());
            if !ctx.values.contains_key("R_S") {
                ctx.record("V_S", agg.v.value());
                ctx.record("R_S", agg.r.value());
            }
            bus.send_secret(&me, "DC", PARTIAL, payload([("s", sc(&s))]));
        }

        // The combiner has no v_i here, so it rebuilds V_S from the
        // signers' v-shares; it cannot tell which partial is bad.
        let t = bus.transcript();
        let commitments = self
            .signers
            .iter()
            .map(|&j| {
                let who = name("S", j);
                let c = t.latest("DC", &who, "commit")?;
                Ok((get_element(&p, c, "u")?, get_element(&p, c, "w")?))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let partials = self
            .signers
            .iter()
            .map(|&j| get_scalar(&p, t.latest("DC", &name("S", j), PARTIAL)?, "s"))
            .collect::<Result<Vec<_>, _>>()?;
        let sig = dirsig_core::schemes::envelope::EnvelopeSignature {
            s: p.sum(&partials),
            u: p.product(commitments.iter().map(|c| &c.0)),
            w: p.product(commitments.iter().map(|c| &c.1)),
            message: ctx.message.clone(),
        };
        ctx.record("U_S", sig.u.value());
        ctx.record("W_S", sig.w.value());
        emit_signature(ctx, bus, &sig, "VC")?;

        bus.broadcast("VC", SUBSET, payload([("members", member_list(&self.verifiers))]));
        for &j in &self.verifiers {
            let me = name("R", j);
            let t = bus.transcript();
            let org = read_org(ctx, t, &me, "R")?;
            let subset = parse_member_list(t.latest(&me, "VC", SUBSET)?, "members")?;
            let ms = if ctx.zero_shadow(j) {
                p.scalar(0u32)
            } else {
                ch4_verifier_shadow(&p, &org, j, &self.r_keys[j], &subset).at(&me)?
            };
            ctx.record_secret(format!("{me}.MS"), ms.value());
            bus.send_secret(&me, "VC", "shadow", payload([("ms", sc(&ms))]));
        }
        Ok(())
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let p = ctx.params.clone();
        let sig = read_signature(ctx, t.latest("VC", "DC", SIGNATURE)?)?;
        let y_s = read_org(ctx, t, "VC", "S")?.group_public;
        let subset = parse_member_list(t.latest("VC", "VC", SUBSET)?, "members")?;
        let shadows = subset
            .iter()
            .map(|&j| get_scalar(&p, t.latest("VC", &name("R", j), "shadow")?, "ms"))
            .collect::<Result<Vec<_>, _>>()?;
        let sum = p.sum(&shadows);
        ctx.record("sum_MS", sum.value());
        let v = ch4_verify_shadows(&p, &sig, &shadows, &y_s, &ctx.oracle)?;
        ctx.record("R_R", v.r_r.value());
        if !v.accepted {
            return Ok(rejected("VC: g^S_S does not match R_R * y_S^R_S"));
        }
        Ok(Verdict::Accepted)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let y_s = read_org(ctx, t, "VC", "S").ok()?;
        signature_file(
            SchemeId::Ch4,
            t.latest("VC", "DC", SIGNATURE).ok()?,
            &[("group_public", el(&y_s.group_public))],
        )
    }
}
