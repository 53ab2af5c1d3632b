//! Directed signature, threshold verification and the threshold cryptosystem.
//!
//! Parties: signer `A`, receiver `B` and third party `C` for the base
//! scheme; signer `A`, group members `R1..Rn` and combiner `DC` for the
//! threshold forms.

use dirsig_core::schemes::directed::{
    recover_commitment, redesignate, sign, tc_decrypt, tc_encrypt, tv_combine_verify, tv_member_partial, tv_sign,
    tv_sign_with_polynomial, DirectedSignature, MaskedShadow, ThresholdCiphertext, ThresholdVerifySignature,
};
use dirsig_core::schemes::Member;
use dirsig_core::sharing::Polynomial;
use dirsig_core::{Error, KeyPair, Scalar};
use serde::Deserialize;

use super::*;
use crate::codec::parse_int;

pub(crate) const CH1_FIELDS: &[&str] = &["s", "w", "v", "m"];
pub(crate) const TV_FIELDS: &[&str] = &["s", "w", "m", "v_1"];
pub(crate) const TC_FIELDS: &[&str] = &["s", "w", "c", "mac", "v_1"];

const CH1_SCHEMA: &[(&str, Kind)] = &[
    ("s", Kind::Scalar),
    ("w", Kind::Element),
    ("v", Kind::Element),
    ("m", Kind::Bytes),
];

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch1Config {
    x_a: Option<String>,
    x_b: Option<String>,
    x_c: Option<String>,
    k1: Option<String>,
    k2: Option<String>,
    /// Redesignation nonce.
    k: Option<String>,
}

pub(crate) struct Ch1 {
    a: KeyPair,
    b: KeyPair,
    c: KeyPair,
    k1: Scalar,
    k2: Scalar,
    k: Scalar,
}

impl Ch1 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch1Config) -> Result<Self, HarnessError> {
        Ok(Ch1 {
            a: ctx.key(&cfg.x_a)?,
            b: ctx.key(&cfg.x_b)?,
            c: ctx.key(&cfg.x_c)?,
            k1: ctx.pick(&cfg.k1)?,
            k2: ctx.pick(&cfg.k2)?,
            k: ctx.pick(&cfg.k)?,
        })
    }
}

fn read_signature(ctx: &Ctx, env: &Envelope) -> Result<DirectedSignature, HarnessError> {
    let p = &ctx.params;
    Ok(DirectedSignature {
        s: get_scalar(p, env, "s")?,
        w: get_element(p, env, "w")?,
        v: get_element(p, env, "v")?,
        message: get_bytes(env, "m")?,
    })
}

fn signature_payload(sig: &DirectedSignature) -> Payload {
    payload([
        ("s", sc(&sig.s)),
        ("w", el(&sig.w)),
        ("v", el(&sig.v)),
        ("m", tagged_bytes(&sig.message)),
    ])
}

impl Protocol for Ch1 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        announce_key(bus, "A", &self.a);
        announce_key(bus, "B", &self.b);
        announce_key(bus, "C", &self.c);
        ctx.record_secret("x_A", self.a.secret.value());

        let y_b = read_key(&p, bus.transcript(), "A", "B")?;
        let sig = sign(&p, &self.a, &y_b, &ctx.message, &self.k1, &self.k2, &ctx.oracle).at("A")?;
        ctx.record("S_A", sig.s.value());
        ctx.record("W_B", sig.w.value());
        ctx.record("V_B", sig.v.value());
        let mut out = signature_payload(&sig);
        ctx.tamper(&mut out, CH1_SCHEMA)?;
        bus.send("A", "B", SIGNATURE, out);

        // B checks, then passes the signature on to C re-addressed.
        let got = read_signature(ctx, bus.transcript().latest("B", "A", SIGNATURE)?)?;
        let y_a = read_key(&p, bus.transcript(), "B", "A")?;
        if dirsig_core::schemes::directed::verify(&p, &got, &self.b, &y_a, &ctx.oracle).check("B")? != Some(true) {
            return Ok(());
        }
        let r = recover_commitment(&p, &got, &self.b);
        let y_c = read_key(&p, bus.transcript(), "B", "C")?;
        let (w_c, v_c) = redesignate(&p, &r, &y_c, &self.k);
        bus.send("B", "C", SIGNATURE, signature_payload(&got.redirected(w_c, v_c)));
        Ok(())
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let p = ctx.params.clone();
        let sig = read_signature(ctx, t.latest("B", "A", SIGNATURE)?)?;
        let y_a = read_key(&p, t, "B", "A")?;
        ctx.record("R", recover_commitment(&p, &sig, &self.b).value());
        if !dirsig_core::schemes::directed::verify(&p, &sig, &self.b, &y_a, &ctx.oracle)? {
            return Ok(rejected("B: g^S_A does not match R * y_A^r_A"));
        }
        let fwd = read_signature(ctx, t.latest("C", "B", SIGNATURE)?)?;
        ctx.record("W_C", fwd.w.value());
        ctx.record("V_C", fwd.v.value());
        ctx.record("R_C", recover_commitment(&p, &fwd, &self.c).value());
        let y_a = read_key(&p, t, "C", "A")?;
        if !dirsig_core::schemes::directed::verify(&p, &fwd, &self.c, &y_a, &ctx.oracle)? {
            return Ok(rejected("C: redesignated signature does not verify"));
        }
        Ok(Verdict::Accepted)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let env = t.latest("B", "A", SIGNATURE).ok()?;
        let y_a = read_key(&ctx.params, t, "B", "A").ok()?;
        signature_file(SchemeId::Ch1, env, &[("signer_public", el(&y_a))])
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct TvConfig {
    x_a: Option<String>,
    members: Vec<MemberConfig>,
    /// Defaults to the group size.
    threshold: Option<usize>,
    k1: Option<String>,
    k2: Option<String>,
    /// Signer's sharing polynomial; its constant is `K1`.
    poly: Option<Vec<String>>,
    /// Defaults to the first `threshold` members.
    verifiers: Option<Vec<usize>>,
}

pub(crate) struct Tv {
    encrypt: bool,
    a: KeyPair,
    roster: Roster,
    threshold: usize,
    k1: Scalar,
    k2: Scalar,
    poly: Option<Polynomial>,
    verifiers: Vec<usize>,
}

impl Tv {
    pub fn prepare(ctx: &mut Ctx, cfg: TvConfig, encrypt: bool) -> Result<Self, HarnessError> {
        let a = ctx.key(&cfg.x_a)?;
        let roster = Roster::resolve(ctx, &cfg.members)?;
        let threshold = cfg.threshold.unwrap_or(roster.len());
        if threshold == 0 || threshold > roster.len() {
            return Err(invalid(format!("threshold {threshold} for {} members", roster.len())));
        }
        if encrypt && cfg.poly.is_some() {
            return Err(invalid("ch1-tc draws its own sharing polynomial"));
        }
        if cfg.poly.is_some() && cfg.k1.is_some() {
            return Err(invalid("give either poly or k1"));
        }
        let poly = match &cfg.poly {
            Some(_) => Some(polynomial(ctx, &cfg.poly, &None, threshold)?),
            None => None,
        };
        let k1 = match &poly {
            Some(f) => f.constant().clone(),
            None => ctx.pick(&cfg.k1)?,
        };
        let k2 = ctx.pick(&cfg.k2)?;
        let verifiers = match &cfg.verifiers {
            Some(v) => indices(v, roster.len(), "verifiers")?,
            None => (0..threshold).collect(),
        };
        Ok(Tv {
            encrypt,
            a,
            roster,
            threshold,
            k1,
            k2,
            poly,
            verifiers,
        })
    }

    fn bundle_kind(&self) -> &'static str {
        if self.encrypt {
            "ciphertext"
        } else {
            SIGNATURE
        }
    }
}

fn read_group(ctx: &Ctx, t: &SessionTranscript, reader: &str, n: usize) -> Result<Vec<Member>, HarnessError> {
    (0..n)
        .map(|i| {
            let env = t.latest(reader, &name("R", i), PUBLIC_KEY)?;
            Ok(Member {
                point: get_scalar(&ctx.params, env, "u")?,
                public: get_element(&ctx.params, env, "y")?,
            })
        })
        .collect()
}

fn read_shadows(env: &Envelope, group: &[Member]) -> Result<Vec<MaskedShadow>, HarnessError> {
    group
        .iter()
        .enumerate()
        .map(|(i, m)| {
            Ok(MaskedShadow {
                point: m.point.clone(),
                v: parse_int(env.get(&format!("v_{}", i + 1))?)?,
            })
        })
        .collect()
}

impl Protocol for Tv {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        announce_key(bus, "A", &self.a);
        for (i, (m, key)) in self.roster.members.iter().zip(&self.roster.keys).enumerate() {
            bus.broadcast(
                &name("R", i),
                PUBLIC_KEY,
                payload([("y", el(&key.public)), ("u", sc(&m.point))]),
            );
        }
        let group = read_group(ctx, bus.transcript(), "A", self.roster.len())?;
        ctx.record_secret("K1", self.k1.value());

        let (mut out, w, shadows) = if self.encrypt {
            let ct = tc_encrypt(
                &p,
                &self.a,
                &group,
                self.threshold,
                &ctx.message,
                &self.k1,
                &self.k2,
                &mut ctx.rng,
                &ctx.oracle,
            )
            .at("A")?;
            let out = payload([
                ("s", sc(&ct.s)),
                ("w", el(&ct.w)),
                ("k", self.threshold.to_string()),
                ("c", tagged_bytes(&ct.ciphertext)),
                ("mac", tagged_bytes(&ct.mac)),
            ]);
            (out, ct.w, ct.shadows)
        } else {
            let sig = match &self.poly {
                Some(f) => tv_sign_with_polynomial(
                    &p,
                    &self.a,
                    &group,
                    self.threshold,
                    f,
                    &ctx.message,
                    &self.k2,
                    &ctx.oracle,
                ),
                None => tv_sign(
                    &p,
                    &self.a,
                    &group,
                    self.threshold,
                    &ctx.message,
                    &self.k1,
                    &self.k2,
                    &mut ctx.rng,
                    &ctx.oracle,
                ),
            }
            .at("A")?;
            let out = payload([
                ("s", sc(&sig.s)),
                ("w", el(&sig.w)),
                ("k", self.threshold.to_string()),
                ("m", tagged_bytes(&sig.message)),
            ]);
            ctx.record("S_A", sig.s.value());
            (out, sig.w, sig.shadows)
        };
        ctx.record("W_R", w.value());
        for (i, s) in shadows.iter().enumerate() {
            out.insert(format!("v_{}", i + 1), hex(&s.v));
            ctx.record(format!("{}.v", name("R", i)), &s.v);
        }
        let schema: &[(&str, Kind)] = if self.encrypt {
            &[
                ("s", Kind::Scalar),
                ("w", Kind::Element),
                ("c", Kind::Bytes),
                ("mac", Kind::Bytes),
                ("v_1", Kind::Element),
            ]
        } else {
            &[
                ("s", Kind::Scalar),
                ("w", Kind::Element),
                ("m", Kind::Bytes),
                ("v_1", Kind::Element),
            ]
        };
        ctx.tamper(&mut out, schema)?;
        bus.broadcast("A", self.bundle_kind(), out);
        bus.broadcast("DC", SUBSET, payload([("members", member_list(&self.verifiers))]));

        for &j in &self.verifiers {
            let me = name("R", j);
            let t = bus.transcript();
            let bundle = t.latest(&me, "A", self.bundle_kind())?;
            let group = read_group(ctx, t, &me, self.roster.len())?;
            let shadows = read_shadows(bundle, &group)?;
            let w = get_element(&p, bundle, "w")?;
            let subset = parse_member_list(t.latest(&me, "DC", SUBSET)?, "members")?;
            let points: Vec<Scalar> = subset.iter().map(|i| group[*i].point.clone()).collect();
            let partial = if ctx.zero_shadow(j) {
                p.identity()
            } else {
                tv_member_partial(&p, &self.roster.keys[j], &shadows[j], &w, &points).at(&me)?
            };
            bus.send_secret(&me, "DC", PARTIAL, payload([("r", el(&partial))]));
        }
        Ok(())
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let p = ctx.params.clone();
        let bundle = t.latest("DC", "A", self.bundle_kind())?;
        let group = read_group(ctx, t, "DC", self.roster.len())?;
        let y_a = read_key(&p, t, "DC", "A")?;
        let subset = parse_member_list(t.latest("DC", "DC", SUBSET)?, "members")?;
        let partials = subset
            .iter()
            .map(|j| get_element(&p, t.latest("DC", &name("R", *j), PARTIAL)?, "r"))
            .collect::<Result<Vec<_>, _>>()?;
        ctx.record("R", p.product(&partials).value());
        let threshold = get_usize(bundle, "k")?;
        let shadows = read_shadows(bundle, &group)?;
        if self.encrypt {
            let ct = ThresholdCiphertext {
                s: get_scalar(&p, bundle, "s")?,
                w: get_element(&p, bundle, "w")?,
                threshold,
                shadows,
                ciphertext: get_bytes(bundle, "c")?,
                mac: get_bytes(bundle, "mac")?
                    .try_into()
                    .map_err(|_| HarnessError::Parse("mac must be 32 bytes".into()))?,
            };
            match tc_decrypt(&p, &ct, &partials, &y_a, &ctx.oracle) {
                Ok(plain) => {
                    ctx.values.insert("plaintext".into(), tagged_bytes(&plain));
                    Ok(Verdict::Accepted)
                }
                Err(Error::DecryptionMismatch) => Ok(rejected("DC: decryption failed integrity check")),
                Err(e) => Err(e.into()),
            }
        } else {
            let sig = ThresholdVerifySignature {
                s: get_scalar(&p, bundle, "s")?,
                w: get_element(&p, bundle, "w")?,
                threshold,
                shadows,
                message: get_bytes(bundle, "m")?,
            };
            if tv_combine_verify(&p, &sig, &partials, &y_a, &ctx.oracle)? {
                Ok(Verdict::Accepted)
            } else {
                Ok(rejected("DC: g^S_A does not match R * y_A^r_A"))
            }
        }
    }
}
