//! Interactive confirmation that `log_μ Z = log_g y`.
//!
//! The verifier commits to `w = μ^u g^v`, the prover answers with
//! `β = w g^α` and `γ = β^x`, the verifier opens `(u, v)` so the prover can
//! check `w`, and finally the prover reveals `α`. The verifier accepts iff
//! `β = μ^u g^(v+α)` and `γ = Z^u y^(v+α)`.
//!
//! Both sides are explicit state machines; a message that arrives in the
//! wrong phase is rejected with [`Error::OutOfOrder`].

use crate::error::{Error, Result};
use crate::group::{Element, GroupParams, Scalar};

/// Claim: there is an `x` with `Z = μ^x` and `y = g^x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub mu: Element,
    pub z: Element,
    pub g: Element,
    pub y: Element,
}

impl Statement {
    /// Statement over the group generator.
    pub fn new(params: &GroupParams, mu: Element, z: Element, y: Element) -> Self {
        Statement {
            mu,
            z,
            g: params.generator(),
            y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZkMessage {
    Commitment(Element),
    Response { beta: Element, gamma: Element },
    Opening { u: Scalar, v: Scalar },
    Reveal(Scalar),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VerifierPhase {
    Fresh,
    Committed,
    Responded,
    Opened,
    Done,
}

#[derive(Clone, Debug)]
pub struct Verifier {
    params: GroupParams,
    statement: Statement,
    u: Scalar,
    v: Scalar,
    w: Option<Element>,
    response: Option<(Element, Element)>,
    phase: VerifierPhase,
}

impl Verifier {
    pub fn new(params: &GroupParams, statement: Statement, u: Scalar, v: Scalar) -> Self {
        Verifier {
            params: params.clone(),
            statement,
            u,
            v,
            w: None,
            response: None,
            phase: VerifierPhase::Fresh,
        }
    }

    pub fn commit(&mut self) -> Result<Element> {
        self.expect(VerifierPhase::Fresh)?;
        let p = &self.params;
        let w = p.mul_el(&p.exp(&self.statement.mu, &self.u), &p.exp(&self.statement.g, &self.v));
        self.w = Some(w.clone());
        self.phase = VerifierPhase::Committed;
        Ok(w)
    }

    pub fn receive_response(&mut self, beta: Element, gamma: Element) -> Result<()> {
        self.expect(VerifierPhase::Committed)?;
        self.response = Some((beta, gamma));
        self.phase = VerifierPhase::Responded;
        Ok(())
    }

    pub fn open(&mut self) -> Result<(Scalar, Scalar)> {
        self.expect(VerifierPhase::Responded)?;
        self.phase = VerifierPhase::Opened;
        Ok((self.u.clone(), self.v.clone()))
    }

    /// Final check once `α` is revealed.
    pub fn check(&mut self, alpha: &Scalar) -> Result<bool> {
        self.expect(VerifierPhase::Opened)?;
        self.phase = VerifierPhase::Done;
        let p = &self.params;
        let st = &self.statement;
        let (beta, gamma) = self.response.as_ref().ok_or(Error::OutOfOrder)?;
        let e = p.add(&self.v, alpha);
        let beta_expected = p.mul_el(&p.exp(&st.mu, &self.u), &p.exp(&st.g, &e));
        let gamma_expected = p.mul_el(&p.exp(&st.z, &self.u), &p.exp(&st.y, &e));
        Ok(*beta == beta_expected && *gamma == gamma_expected)
    }

    pub fn commitment(&self) -> Option<&Element> {
        self.w.as_ref()
    }

    /// Message-driven form: feed the prover's message, get the next one to send.
    pub fn handle(&mut self, msg: Option<ZkMessage>) -> Result<VerifierStep> {
        match (self.phase, msg) {
            (VerifierPhase::Fresh, None) => Ok(VerifierStep::Send(ZkMessage::Commitment(self.commit()?))),
            (VerifierPhase::Committed, Some(ZkMessage::Response { beta, gamma })) => {
                self.receive_response(beta, gamma)?;
                let (u, v) = self.open()?;
                Ok(VerifierStep::Send(ZkMessage::Opening { u, v }))
            }
            (VerifierPhase::Opened, Some(ZkMessage::Reveal(alpha))) => Ok(VerifierStep::Verdict(self.check(&alpha)?)),
            _ => Err(Error::OutOfOrder),
        }
    }

    fn expect(&self, phase: VerifierPhase) -> Result<()> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(Error::OutOfOrder)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifierStep {
    Send(ZkMessage),
    Verdict(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ProverPhase {
    Waiting,
    Responded,
    Checked,
    Done,
    Aborted,
}

#[derive(Clone, Debug)]
pub struct Prover {
    params: GroupParams,
    statement: Statement,
    witness: Scalar,
    alpha: Scalar,
    w: Option<Element>,
    phase: ProverPhase,
}

impl Prover {
    pub fn new(params: &GroupParams, statement: Statement, witness: Scalar, alpha: Scalar) -> Self {
        Prover {
            params: params.clone(),
            statement,
            witness,
            alpha,
            w: None,
            phase: ProverPhase::Waiting,
        }
    }

    /// `β = w g^α`, `γ = β^x`.
    pub fn respond(&mut self, w: Element) -> Result<(Element, Element)> {
        self.expect(ProverPhase::Waiting)?;
        let p = &self.params;
        let beta = p.mul_el(&w, &p.exp(&self.statement.g, &self.alpha));
        let gamma = p.exp(&beta, &self.witness);
        self.w = Some(w);
        self.phase = ProverPhase::Responded;
        Ok((beta, gamma))
    }

    /// Recompute `w` from the verifier's opening; abort on mismatch.
    pub fn check_opening(&mut self, u: &Scalar, v: &Scalar) -> Result<()> {
        self.expect(ProverPhase::Responded)?;
        let p = &self.params;
        let w = p.mul_el(&p.exp(&self.statement.mu, u), &p.exp(&self.statement.g, v));
        if Some(&w) == self.w.as_ref() {
            self.phase = ProverPhase::Checked;
            Ok(())
        } else {
            self.phase = ProverPhase::Aborted;
            Err(Error::OpeningMismatch)
        }
    }

    pub fn reveal(&mut self) -> Result<Scalar> {
        self.expect(ProverPhase::Checked)?;
        self.phase = ProverPhase::Done;
        Ok(self.alpha.clone())
    }

    pub fn handle(&mut self, msg: ZkMessage) -> Result<ZkMessage> {
        match (self.phase, msg) {
            (ProverPhase::Waiting, ZkMessage::Commitment(w)) => {
                let (beta, gamma) = self.respond(w)?;
                Ok(ZkMessage::Response { beta, gamma })
            }
            (ProverPhase::Responded, ZkMessage::Opening { u, v }) => {
                self.check_opening(&u, &v)?;
                Ok(ZkMessage::Reveal(self.reveal()?))
            }
            _ => Err(Error::OutOfOrder),
        }
    }

    fn expect(&self, phase: ProverPhase) -> Result<()> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(Error::OutOfOrder)
        }
    }
}

/// Values exchanged in one complete run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Confirmation {
    pub w: Element,
    pub beta: Element,
    pub gamma: Element,
    pub accepted: bool,
}

/// Run all four moves locally with the given randomness.
pub fn confirm(
    params: &GroupParams,
    statement: &Statement,
    witness: &Scalar,
    u: &Scalar,
    v: &Scalar,
    alpha: &Scalar,
) -> Result<Confirmation> {
    let mut verifier = Verifier::new(params, statement.clone(), u.clone(), v.clone());
    let mut prover = Prover::new(params, statement.clone(), witness.clone(), alpha.clone());
    let w = verifier.commit()?;
    let (beta, gamma) = prover.respond(w.clone())?;
    verifier.receive_response(beta.clone(), gamma.clone())?;
    let (u, v) = verifier.open()?;
    prover.check_opening(&u, &v)?;
    let alpha = prover.reveal()?;
    let accepted = verifier.check(&alpha)?;
    Ok(Confirmation {
        w,
        beta,
        gamma,
        accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::KeyPair;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn el(p: &GroupParams, v: u64) -> Element {
        p.element(v).unwrap()
    }

    fn delegated_statement() -> (GroupParams, Statement) {
        let params = GroupParams::from_u64(23, 11, 6).unwrap();
        let st = Statement::new(&params, el(&params, 3), el(&params, 16), el(&params, 12));
        (params, st)
    }

    #[test]
    fn delegated_worked_example_run() {
        let (params, st) = delegated_statement();
        let s = |v: u64| params.scalar(v);
        let run = confirm(&params, &st, &s(6), &s(13), &s(15), &s(8)).unwrap();
        assert_eq!(run.w, 3);
        assert_eq!(run.beta, 8);
        assert_eq!(run.gamma, 13);
        assert!(run.accepted);
    }

    #[test]
    fn commitment_examples() {
        let (params, st) = delegated_statement();
        let mut v = Verifier::new(&params, st.clone(), params.scalar(0u32), params.scalar(0u32));
        assert_eq!(v.commit().unwrap(), 1);

        let p25 = GroupParams::from_u64(47, 23, 25).unwrap();
        let st5 = Statement::new(&p25, el(&p25, 8), el(&p25, 16), el(&p25, 2));
        let mut v5 = Verifier::new(&p25, st5, p25.scalar(9u32), p25.scalar(11u32));
        assert_eq!(v5.commit().unwrap(), 25);
    }

    #[test]
    fn response_examples() {
        let (params, st) = delegated_statement();
        let mut pr = Prover::new(&params, st, params.scalar(6u32), params.scalar(0u32));
        let (beta, _) = pr.respond(el(&params, 3)).unwrap();
        assert_eq!(beta, 3);

        let p6 = GroupParams::from_u64(47, 23, 6).unwrap();
        let st7 = Statement::new(&p6, el(&p6, 7), el(&p6, 32), el(&p6, 18));
        let run = confirm(
            &p6,
            &st7,
            &p6.scalar(10u32),
            &p6.scalar(22u32),
            &p6.scalar(25u32),
            &p6.scalar(27u32),
        )
        .unwrap();
        assert_eq!(
            (run.w.clone(), run.beta.clone(), run.gamma.clone()),
            (el(&p6, 32), el(&p6, 18), el(&p6, 24))
        );
        assert!(run.accepted);
    }

    #[test]
    fn cheating_verifier_is_caught() {
        let (params, st) = delegated_statement();
        let s = |v: u64| params.scalar(v);
        let mut verifier = Verifier::new(&params, st.clone(), s(13), s(15));
        let mut prover = Prover::new(&params, st, s(6), s(8));
        let w = verifier.commit().unwrap();
        prover.respond(w).unwrap();
        assert_eq!(prover.check_opening(&s(14), &s(15)), Err(Error::OpeningMismatch));
        assert_eq!(prover.reveal(), Err(Error::OutOfOrder));
    }

    #[test]
    fn degenerate_statement_accepts() {
        let (params, _) = delegated_statement();
        let one = params.identity();
        let st = Statement::new(&params, el(&params, 3), one.clone(), one);
        let s = |v: u64| params.scalar(v);
        assert!(confirm(&params, &st, &s(0), &s(4), &s(5), &s(6)).unwrap().accepted);
    }

    #[test]
    fn random_gamma_is_rejected_at_rate_one_minus_one_over_q() {
        let (params, st) = delegated_statement();
        let s = |v: u64| params.scalar(v);
        // every γ' in the subgroup except the honest one
        let mut rejected = 0;
        let mut total = 0;
        for e in 0..11u64 {
            let gamma = params.gexp(&s(e));
            let mut verifier = Verifier::new(&params, st.clone(), s(13), s(15));
            let mut prover = Prover::new(&params, st.clone(), s(6), s(8));
            let w = verifier.commit().unwrap();
            let (beta, _) = prover.respond(w).unwrap();
            verifier.receive_response(beta, gamma).unwrap();
            let (u, v) = verifier.open().unwrap();
            prover.check_opening(&u, &v).unwrap();
            total += 1;
            if !verifier.check(&prover.reveal().unwrap()).unwrap() {
                rejected += 1;
            }
        }
        assert_eq!((rejected, total), (10, 11));
    }

    #[test]
    fn completeness_over_random_groups() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let groups: alloc::vec::Vec<GroupParams> = (0..10)
            .map(|_| GroupParams::generate(12, 20, &mut rng).unwrap())
            .collect();
        for i in 0..1000 {
            let params = &groups[i % groups.len()];
            let kp = KeyPair::generate(params, &mut rng);
            let mu = params.gexp(&params.random_nonzero_scalar(&mut rng));
            let st = Statement::new(params, mu.clone(), params.exp(&mu, &kp.secret), kp.public.clone());
            let (u, v, a) = (
                params.random_scalar(&mut rng),
                params.random_scalar(&mut rng),
                params.random_scalar(&mut rng),
            );
            assert!(confirm(params, &st, &kp.secret, &u, &v, &a).unwrap().accepted);
        }
    }

    #[test]
    fn wrong_witness_exhaustive_at_q11() {
        let (params, st) = delegated_statement();
        let s = |v: u64| params.scalar(v);
        for x in 0..11u64 {
            if x == 6 {
                continue;
            }
            for u in 1..11u64 {
                for v in 0..11u64 {
                    let run = confirm(&params, &st, &s(x), &s(u), &s(v), &s(8)).unwrap();
                    // β = 1 makes every γ = β^x agree; outside that the proof must fail
                    if run.beta.is_one() {
                        assert!(run.accepted);
                    } else {
                        assert!(!run.accepted, "x'={x} u={u} v={v}");
                    }
                }
            }
        }
    }

    #[test]
    fn out_of_order_delivery_is_rejected() {
        let (params, st) = delegated_statement();
        let s = |v: u64| params.scalar(v);
        let fresh = || {
            (
                Verifier::new(&params, st.clone(), s(13), s(15)),
                Prover::new(&params, st.clone(), s(6), s(8)),
            )
        };
        // honest transcript for reference
        let (mut v0, mut p0) = fresh();
        let VerifierStep::Send(m1) = v0.handle(None).unwrap() else {
            panic!()
        };
        let m2 = p0.handle(m1.clone()).unwrap();
        let VerifierStep::Send(m3) = v0.handle(Some(m2.clone())).unwrap() else {
            panic!()
        };
        let m4 = p0.handle(m3.clone()).unwrap();
        assert_eq!(v0.handle(Some(m4.clone())).unwrap(), VerifierStep::Verdict(true));

        // response before the commitment exists
        let (mut v, _) = fresh();
        assert_eq!(v.handle(Some(m2.clone())), Err(Error::OutOfOrder));
        // opening before the commitment
        let (_, mut p) = fresh();
        assert_eq!(p.handle(m3.clone()), Err(Error::OutOfOrder));
        // reveal before the response
        let (mut v, _) = fresh();
        v.handle(None).unwrap();
        assert_eq!(v.handle(Some(m4.clone())), Err(Error::OutOfOrder));
        // a second commitment after responding
        let (_, mut p) = fresh();
        p.handle(m1.clone()).unwrap();
        assert_eq!(p.handle(m1), Err(Error::OutOfOrder));
    }
}
