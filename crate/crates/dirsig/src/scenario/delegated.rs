//! Proxy-directed signatures.
//!
//! Original signer `A` delegates to proxy `B`, who signs for receiver `C`;
//! `C` then convinces third party `Y` with the confirmation proof.

use dirsig_core::hash::HashItem;
use dirsig_core::schemes::delegated::{
    del_blind_random, pd_sign, pd_verify, proxy_public, Delegate, Delegator, ProxyDirectedSignature, TAG,
};
use dirsig_core::zk::Statement;
use dirsig_core::{KeyPair, Scalar};
use serde::Deserialize;

use super::*;

pub(crate) const FIELDS: &[&str] = &["s", "w", "r_b", "r", "m"];

const SCHEMA: &[(&str, Kind)] = &[
    ("s", Kind::Scalar),
    ("w", Kind::Element),
    ("r_b", Kind::Scalar),
    ("r", Kind::Element),
    ("m", Kind::Bytes),
];

const CLAIM: &str = "claim";

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Ch2Config {
    x_a: Option<String>,
    x_c: Option<String>,
    k_a: Option<String>,
    /// Proxy's blinding exponent; drawn until usable when absent.
    alpha: Option<String>,
    k1: Option<String>,
    k2: Option<String>,
    zk: ZkConfig,
}

pub(crate) struct Ch2 {
    a: KeyPair,
    c: KeyPair,
    k_a: Scalar,
    alpha: Option<Scalar>,
    k1: Scalar,
    k2: Scalar,
    zk: ZkSecrets,
}

impl Ch2 {
    pub fn prepare(ctx: &mut Ctx, cfg: Ch2Config) -> Result<Self, HarnessError> {
        Ok(Ch2 {
            a: ctx.key(&cfg.x_a)?,
            c: ctx.key(&cfg.x_c)?,
            k_a: ctx.pick(&cfg.k_a)?,
            alpha: cfg.alpha.as_deref().map(|v| ctx.scalar(v)).transpose()?,
            k1: ctx.pick(&cfg.k1)?,
            k2: ctx.pick(&cfg.k2)?,
            zk: ZkSecrets::resolve(ctx, &cfg.zk)?,
        })
    }
}

fn read_signature(ctx: &Ctx, env: &Envelope) -> Result<ProxyDirectedSignature, HarnessError> {
    let p = &ctx.params;
    Ok(ProxyDirectedSignature {
        s: get_scalar(p, env, "s")?,
        w: get_element(p, env, "w")?,
        r_b: get_scalar(p, env, "r_b")?,
        r: get_element(p, env, "r")?,
        message: get_bytes(env, "m")?,
    })
}

fn signature_payload(sig: &ProxyDirectedSignature) -> Payload {
    payload([
        ("s", sc(&sig.s)),
        ("w", el(&sig.w)),
        ("r_b", sc(&sig.r_b)),
        ("r", el(&sig.r)),
        ("m", tagged_bytes(&sig.message)),
    ])
}

impl Protocol for Ch2 {
    fn interact(&self, ctx: &mut Ctx, bus: &mut Bus) -> Result<(), Flow> {
        let p = ctx.params.clone();
        announce_key(bus, "A", &self.a);
        announce_key(bus, "C", &self.c);
        ctx.record_secret("x_A", self.a.secret.value());
        ctx.record_secret("x_C", self.c.secret.value());

        let mut delegator = Delegator::new(&p, self.a.clone(), self.k_a.clone());
        let r_a = delegator.commit().at("A")?;
        ctx.record("r_A", r_a.value());
        bus.send_secret("A", "B", "delegation-commit", payload([("r_a", el(&r_a))]));

        let y_a = read_key(&p, bus.transcript(), "B", "A")?;
        let r_a = get_element(&p, bus.transcript().latest("B", "A", "delegation-commit")?, "r_a")?;
        let alpha = match &self.alpha {
            Some(a) => a.clone(),
            None => del_blind_random(&p, &r_a, &mut ctx.rng).at("B")?.0,
        };
        let mut delegate = Delegate::new(&p, y_a, alpha.clone());
        let r = delegate.blind(&r_a).at("B")?.ok_or_else(|| Flow::Halt {
            actor: "B".into(),
            cause: "blinded token is 0 mod q".into(),
        })?;
        ctx.record_secret("alpha", alpha.value());
        ctx.record("r", r.value());
        bus.send_secret("B", "A", "delegation-token", payload([("r", el(&r))]));

        let r = get_element(&p, bus.transcript().latest("A", "B", "delegation-token")?, "r")?;
        let s_a = delegator.sign(&r).at("A")?;
        ctx.record_secret("s_A", s_a.value());
        bus.send_secret("A", "B", "delegation-response", payload([("s_a", sc(&s_a))]));

        let s_a = get_scalar(&p, bus.transcript().latest("B", "A", "delegation-response")?, "s_a")?;
        let proxy = delegate.accept(&s_a).at("B")?;
        ctx.record_secret("S", proxy.s.value());
        ctx.record("g^S", p.gexp(&proxy.s).value());

        let y_c = read_key(&p, bus.transcript(), "B", "C")?;
        let sig = pd_sign(&p, &proxy, &y_c, &ctx.message, &self.k1, &self.k2, &ctx.oracle).at("B")?;
        ctx.record("W_B", sig.w.value());
        ctx.record("r_B", sig.r_b.value());
        ctx.record("S_B", sig.s.value());
        let mut out = signature_payload(&sig);
        ctx.tamper(&mut out, SCHEMA)?;
        bus.send("B", "C", SIGNATURE, out);

        let got = read_signature(ctx, bus.transcript().latest("C", "B", SIGNATURE)?)?;
        let y_a = read_key(&p, bus.transcript(), "C", "A")?;
        let Some(v) = pd_verify(&p, &got, &self.c, &y_a, &ctx.oracle)
            .check("C")?
            .filter(|v| v.accepted)
        else {
            return Ok(());
        };
        let mut claim = signature_payload(&got);
        claim.insert("z".into(), el(&v.z));
        bus.send("C", "Y", CLAIM, claim);
        let st = Statement::new(&p, v.mu, v.z, self.c.public.clone());
        zk_interact(ctx, bus, "C", "Y", &st, &self.c.secret, &self.zk)
    }

    fn judge(&self, ctx: &mut Ctx, t: &SessionTranscript) -> Result<Verdict, HarnessError> {
        let p = ctx.params.clone();
        let sig = read_signature(ctx, t.latest("C", "B", SIGNATURE)?)?;
        let y_a = read_key(&p, t, "C", "A")?;
        let v = pd_verify(&p, &sig, &self.c, &y_a, &ctx.oracle)?;
        ctx.record("mu", v.mu.value());
        ctx.record("Z", v.z.value());
        if !v.accepted {
            return Ok(rejected("C: r_B does not match h(Z, W_B, m)"));
        }

        // Y recomputes mu itself and checks the hash on the claimed Z.
        let env = t.latest("Y", "C", CLAIM)?;
        let claim = read_signature(ctx, env)?;
        let z = get_element(&p, env, "z")?;
        let y_a = read_key(&p, t, "Y", "A")?;
        let y_c = read_key(&p, t, "Y", "C")?;
        let mu = p.product([
            &p.gexp(&claim.s),
            &p.exp(&proxy_public(&p, &y_a, &claim.r), &claim.r_b),
            &claim.w,
        ]);
        let h = ctx.oracle.hash_to_scalar(
            &p,
            TAG,
            &[
                HashItem::Element(&z),
                HashItem::Element(&claim.w),
                HashItem::Bytes(&claim.message),
            ],
        )?;
        if h != claim.r_b {
            return Ok(rejected("Y: claimed Z does not hash to r_B"));
        }
        let st = Statement::new(&p, mu, z, y_c);
        if !zk_judge(ctx, t, "C", "Y", &st, &self.zk)? {
            return Ok(rejected("Y: confirmation proof failed"));
        }
        Ok(Verdict::Accepted)
    }

    fn signature(&self, ctx: &Ctx, t: &SessionTranscript) -> Option<SignatureFile> {
        let env = t.latest("C", "B", SIGNATURE).ok()?;
        let y_a = read_key(&ctx.params, t, "C", "A").ok()?;
        signature_file(SchemeId::Ch2, env, &[("signer_public", el(&y_a))])
    }
}
