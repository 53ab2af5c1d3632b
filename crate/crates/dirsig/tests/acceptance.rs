//! Acceptance run: one line per criterion.
//!
//! Group arithmetic in the checks below is plain `u64` math, kept apart
//! from the library so that the two can disagree.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dirsig::scenario::{Fault, SchemeId};
use dirsig::vectors::{check_vector, parse_vector, VectorFile, BUILTIN};
use dirsig::{run_scenario, Outcome, Scenario, Verdict};
use dirsig_core::sharing::{mask_share, reconstruct_at_zero, unmask_share, Share};
use dirsig_core::zk::{confirm, Statement};
use dirsig_core::{GroupParams, KeyPair};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

struct Zp {
    p: u64,
    q: u64,
    g: u64,
}

impl Zp {
    fn pow(&self, b: u64, e: u64) -> u64 {
        modpow(b, e, self.p)
    }

    fn gexp(&self, e: u64) -> u64 {
        self.pow(self.g, e % self.q)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn inv_q(&self, a: u64) -> u64 {
        modpow(a % self.q, self.q - 2, self.q)
    }

    /// Weight of `points[i]` when interpolating at `at`.
    fn lagrange(&self, points: &[u64], i: usize, at: u64) -> u64 {
        let q = self.q;
        let mut w = 1;
        for (j, &u) in points.iter().enumerate() {
            if j != i {
                let num = (at + q - u % q) % q;
                let den = (points[i] + q - u % q) % q;
                w = w * num % q * self.inv_q(den) % q;
            }
        }
        w
    }

    fn poly(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, c| (acc * x + c) % self.q)
    }
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn vector(name: &str) -> VectorFile {
    let (file, text) = BUILTIN.iter().find(|(f, _)| f.starts_with(name)).expect("vector");
    parse_vector(file, text).expect("vector parses")
}

/// Check the vector and hand back its run, enforcing the time limit.
fn golden(name: &str) -> (Zp, Outcome) {
    let v = vector(name);
    let start = Instant::now();
    let r = check_vector(name, &v);
    let out = run_scenario(&v.scenario).expect("vector runs");
    let elapsed = start.elapsed();
    assert!(
        r.passed(),
        "{name} vector fails: {:?} {:?} {:?}",
        r.error,
        r.verdict,
        r.mismatches
    );
    assert!(elapsed < Duration::from_secs(1), "{name} took {elapsed:?}");
    let params = v.scenario.params.as_ref().expect("fixed params");
    let h = |s: &str| u64::from_str_radix(s, 16).unwrap();
    (
        Zp {
            p: h(&params.p),
            q: h(&params.q),
            g: h(&params.g),
        },
        out,
    )
}

fn val(out: &Outcome, name: &str) -> u64 {
    let s = out.values.get(name).unwrap_or_else(|| panic!("{name} not recorded"));
    u64::from_str_radix(s, 16).unwrap()
}

fn expect(out: &Outcome, pairs: &[(&str, u64)]) {
    for &(name, want) in pairs {
        assert_eq!(val(out, name), want, "{name}");
    }
}

/// `w = μ^u g^v`, `β = w g^α`, `γ = β^x`, then both verifier checks.
fn zk_oracle(z: &Zp, mu: u64, big_z: u64, y: u64, x: u64, u: u64, v: u64, alpha: u64) -> (u64, u64, u64) {
    let w = z.mul(z.pow(mu, u), z.gexp(v));
    let beta = z.mul(w, z.gexp(alpha));
    let gamma = z.pow(beta, x);
    let e = (v + alpha) % z.q;
    assert_eq!(beta, z.mul(z.pow(mu, u), z.gexp(e)), "beta check");
    assert_eq!(gamma, z.mul(z.pow(big_z, u), z.pow(y, e)), "gamma check");
    (w, beta, gamma)
}

fn criterion_1() {
    let (z, out) = golden("ch1");
    let (x_a, x_b, x_c, k1, k2, h, k) = (4, 7, 6, 9, 5, 10, 8);
    let r = z.gexp(k1);
    let s_a = (k1 + x_a * h) % z.q;
    let w_b = z.gexp(z.q - k2);
    let v_b = z.mul(r, z.pow(z.gexp(x_b), k2));
    assert_eq!((s_a, w_b, v_b, r), (5, 16, 1, 18));
    assert_eq!(z.mul(v_b, z.pow(w_b, x_b)), r);
    assert_eq!(z.gexp(s_a), z.mul(r, z.pow(z.gexp(x_a), h)));
    let w_c = z.gexp(z.q - k);
    let v_c = z.mul(r, z.pow(z.gexp(x_c), k));
    assert_eq!((w_c, v_c), (4, 9));
    assert_eq!(z.mul(v_c, z.pow(w_c, x_c)), r);
    expect(
        &out,
        &[
            ("S_A", s_a),
            ("W_B", w_b),
            ("V_B", v_b),
            ("R", r),
            ("W_C", w_c),
            ("V_C", v_c),
            ("R_C", r),
        ],
    );
}

fn criterion_2() {
    let (z, out) = golden("ch2");
    let (x_a, x_c, k_a, alpha, k1, k2, r_b) = (3, 6, 7, 5, 7, 2, 2);
    let r_a = z.gexp(k_a);
    let r = z.mul(z.gexp(alpha), r_a);
    let s_a = (x_a * (r % z.q) + k_a) % z.q;
    let s = (s_a + alpha) % z.q;
    assert_eq!((r_a, r, s_a, s), (3, 6, 3, 8));
    let proxy_public = z.mul(z.pow(z.gexp(x_a), r % z.q), r);
    assert_eq!(z.gexp(s), proxy_public);
    let w_b = z.gexp(k1 + z.q - k2);
    let s_b = (k2 + z.q * z.q - s * r_b) % z.q;
    assert_eq!((w_b, s_b), (2, 8));
    let mu = z.mul(z.mul(z.gexp(s_b), z.pow(proxy_public, r_b)), w_b);
    let z_c = z.pow(mu, x_c);
    assert_eq!((mu, z_c), (3, 16));
    assert_eq!(z_c, z.pow(z.gexp(x_c), k1));
    let zk = zk_oracle(&z, mu, z_c, z.gexp(x_c), x_c, 13, 15, 8);
    assert_eq!(zk, (3, 8, 13));
    expect(
        &out,
        &[
            ("r_A", r_a),
            ("r", r),
            ("s_A", s_a),
            ("S", s),
            ("W_B", w_b),
            ("r_B", r_b),
            ("S_B", s_b),
            ("mu", mu),
            ("Z", z_c),
            ("zk.w", zk.0),
            ("zk.beta", zk.1),
            ("zk.gamma", zk.2),
        ],
    );
    let v = vector("ch2");
    let items: Vec<&str> = v.errata.iter().filter_map(|e| e.value.as_deref()).collect();
    assert_eq!(items, ["zk.beta", "zk.gamma"]);
    assert!(v.errata.iter().any(|e| e.printed == "16") && v.errata.iter().any(|e| e.printed == "4"));
}

fn criterion_3() {
    let (z, out) = golden("ch3");
    let f = [3, 5];
    let (x_b, r) = (6, 5);
    let points = [9, 16];
    let nonces = [(2, 7), (5, 9)];
    let y_b = z.gexp(x_b);
    let l: Vec<u64> = points.iter().map(|&u| z.poly(&f, u)).collect();
    let ms: Vec<u64> = (0..2).map(|i| l[i] * z.lagrange(&points, i, 0) % z.q).collect();
    assert_eq!(ms, [6, 8]);
    assert_eq!((ms[0] + ms[1]) % z.q, f[0]);
    let s: Vec<u64> = (0..2).map(|i| (nonces[i].0 + z.q * z.q - ms[i] * r) % z.q).collect();
    assert_eq!(s, [5, 9]);
    let big_s = (s[0] + s[1]) % z.q;
    let w = nonces
        .iter()
        .fold(1, |acc, &(k1, k2)| z.mul(acc, z.gexp(k2 + z.q - k1)));
    let big_z = nonces.iter().fold(1, |acc, &(_, k2)| z.mul(acc, z.pow(y_b, k2)));
    assert_eq!((w, big_z, big_s), (12, 16, 3));
    let mu = z.mul(z.mul(z.gexp(big_s), z.pow(z.gexp(f[0]), r)), w);
    assert_eq!(mu, 3);
    assert_eq!(z.pow(mu, x_b), big_z);
    let zk = zk_oracle(&z, mu, big_z, y_b, x_b, 11, 13, 17);
    expect(
        &out,
        &[
            ("W", w),
            ("Z", big_z),
            ("S1.MS", ms[0]),
            ("S4.MS", ms[1]),
            ("S1.s", s[0]),
            ("S4.s", s[1]),
            ("S", big_s),
            ("mu", mu),
            ("Z_B", big_z),
            ("zk.w", zk.0),
            ("zk.beta", zk.1),
            ("zk.gamma", zk.2),
        ],
    );
}

fn criterion_4() {
    let (z, out) = golden("ch4");
    expect(
        &out,
        &[
            ("W", 9),
            ("U_S", 34),
            ("V_S", 3),
            ("W_S", 18),
            ("S_S", 15),
            ("R_S", 8),
            ("sum_MS", 7),
            ("R_R", 3),
        ],
    );
    assert_eq!(z.gexp(z.q - 8), 9);
    let signers = ["S2", "S4", "S6", "S7"];
    for (field, total) in [("u", "U_S"), ("v", "V_S"), ("w", "W_S")] {
        let prod = signers
            .iter()
            .fold(1, |acc, s| z.mul(acc, val(&out, &format!("{s}.{field}"))));
        assert_eq!(prod, val(&out, total), "{total}");
    }
    let sum: u64 = signers.iter().map(|s| val(&out, &format!("{s}.s"))).sum::<u64>() % z.q;
    assert_eq!(sum, val(&out, "S_S"));
    // Verifying organization: f_R = 7 + 2x + 4x^2 + 3x^3, R1,R3,R4,R5,R6 at u = 11,8,3,6,4.
    let f_r = [7, 2, 4, 3];
    let points = [11, 8, 3, 6, 4];
    let names = ["R1", "R3", "R4", "R5", "R6"];
    let mut total = 0;
    for (i, name) in names.iter().enumerate() {
        let ms = z.poly(&f_r, points[i]) * z.lagrange(&points, i, 0) % z.q;
        assert_eq!(val(&out, &format!("{name}.MS")), ms, "{name}.MS");
        total = (total + ms) % z.q;
    }
    assert_eq!(total, 7);
    assert_eq!(z.gexp(15), z.mul(3, z.pow(27, 8)));
    assert_eq!(val(&out, "y_S"), 27);
}

fn criterion_5() {
    let (z, out) = golden("ch5");
    let r_s = val(&out, "R_S");
    assert_eq!(r_s, 9);
    let signers = ["S2", "S4", "S5", "S6", "S7"];
    let points = [4, 8, 16, 7, 3];
    for (i, s) in signers.iter().enumerate() {
        let lambda = z.lagrange(&points, i, 0);
        let lhs = z.gexp(val(&out, &format!("{s}.s")));
        let rhs = z.mul(
            val(&out, &format!("{s}.v")),
            z.pow(z.pow(val(&out, &format!("{s}.m")), lambda), r_s),
        );
        assert_eq!(lhs, rhs, "DC check for {s}");
    }
    assert_eq!(z.lagrange(&points, 0, 0), 12);
    assert_eq!(z.pow(25, 16), z.mul(4, z.pow(z.pow(9, 12), 9)));
    expect(&out, &[("S_S", 2), ("E", 18), ("R_R", 36), ("y_S", 16)]);
    assert_eq!(z.pow(25, 2), z.mul(36, z.pow(z.mul(18, 16), 9)));
    let x_b = 9;
    let mu = z.pow(val(&out, "U_S"), x_b);
    assert_eq!(z.mul(val(&out, "W_S"), mu), 36);
    let zk = zk_oracle(&z, val(&out, "U_S"), mu, z.gexp(x_b), x_b, 9, 11, 37);
    assert_eq!((val(&out, "zk.w"), val(&out, "zk.beta"), val(&out, "zk.gamma")), zk);
    assert_eq!(out.verdict, Verdict::Accepted);
}

fn criterion_6() {
    let (z, out) = golden("ch6");
    expect(&out, &[("S_S", 2), ("E", 12), ("R_R", 25), ("R_S", 7), ("y_S", 25)]);
    assert_eq!(z.gexp(2), z.mul(25, z.pow(z.mul(12, 25), 7)));
    let sum: u64 = ["S2", "S4", "S6", "S7"]
        .iter()
        .map(|s| val(&out, &format!("{s}.s")))
        .sum::<u64>()
        % z.q;
    assert_eq!(sum, 2);
    let v = vector("ch6");
    assert!(v.annotations.len() >= 6, "unconfirmable rows are annotated");
    assert!(check_vector("ch6", &v).passed());
}

fn criterion_7() {
    let (z, out) = golden("ch7");
    let f = [18, 17, 5, 22];
    let members = [(11, 8), (14, 10), (17, 13)];
    let u_h = 10;
    for (u, k) in members {
        assert_eq!(z.poly(&f, u), k, "f_s({u})");
    }
    expect(&out, &[("f.0", 18), ("f.1", 17), ("f.2", 5), ("f.3", 22)]);
    let mut pts: Vec<u64> = members.iter().map(|m| m.0).collect();
    pts.push(u_h);
    let v_k = z.gexp(z.poly(&f, u_h) * z.lagrange(&pts, 3, 0));
    assert_eq!(v_k, 2);
    let l: Vec<u64> = members
        .iter()
        .map(|&(u, k)| k * (z.q - u_h) % z.q * z.inv_q(u + z.q - u_h) % z.q)
        .collect();
    assert_eq!(l, [12, 21, 11]);
    let ms: Vec<u64> = (0..3).map(|i| members[i].1 * z.lagrange(&pts, i, 0) % z.q).collect();
    let total = (ms.iter().sum::<u64>() + z.poly(&f, u_h) * z.lagrange(&pts, 3, 0)) % z.q;
    assert_eq!(total, 18, "shadows plus the extra point give x_s");
    expect(
        &out,
        &[
            ("V_K", v_k),
            ("S1.l", l[0]),
            ("S3.l", l[1]),
            ("S5.l", l[2]),
            ("R_S", 8),
            ("S_S", 22),
            ("R_R", 17),
        ],
    );
    expect(&out, &[("S1.MS", ms[0]), ("S3.MS", ms[1]), ("S5.MS", ms[2])]);
    assert_eq!(z.mul(z.pow(2, 8), z.gexp(22)), z.mul(17, z.pow(9, 8)));
}

fn generated(scheme: SchemeId, seed: u64, q_bits: usize, p_bits: usize) -> Scenario {
    Scenario::from_json(&format!(
        r#"{{"scheme":"{}","generate":{{"q_bits":{q_bits},"p_bits":{p_bits}}},"seed":{seed},"message":"cHJvcGVydHk="}}"#,
        scheme.as_str()
    ))
    .unwrap()
}

fn without_fixture(name: &str) -> Scenario {
    let mut s = vector(name).scenario;
    s.fixture = None;
    s.expected.clear();
    if let Some(obj) = s.config.as_object_mut() {
        obj.remove("nonces");
    }
    s
}

fn subsets(n: usize, min: usize) -> Vec<Vec<usize>> {
    sized(n, |k| k >= min)
}

fn sized(n: usize, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| *m != 0 && keep(m.count_ones() as usize))
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| i + 1).collect())
        .collect()
}

fn accepts(s: &Scenario) -> bool {
    run_scenario(s).is_ok_and(|o| o.verdict.is_accepted())
}

fn criterion_8() {
    let start = Instant::now();

    for scheme in SchemeId::ALL {
        for seed in 0..200 {
            let out = run_scenario(&generated(scheme, seed, 16, 32)).unwrap();
            assert_eq!(out.verdict, Verdict::Accepted, "completeness {scheme} seed {seed}");
        }
    }

    for scheme in SchemeId::ALL {
        for field in scheme.signature_fields() {
            for seed in 0..8 {
                let mut s = generated(scheme, seed, 32 + 2 * seed as usize, 64 + 4 * seed as usize);
                s.faults.push(Fault::Tamper {
                    field: field.to_string(),
                });
                let out = run_scenario(&s).unwrap();
                assert!(
                    !out.verdict.is_accepted(),
                    "tampered {scheme}.{field} seed {seed} accepted"
                );
            }
        }
    }

    let base = without_fixture("ch3");
    for subset in subsets(4, 2) {
        let mut s = base.clone();
        s.config["signers"] = serde_json::json!(subset);
        assert_eq!(
            run_scenario(&s).unwrap().verdict,
            Verdict::Accepted,
            "ch3 signers {subset:?}"
        );
    }
    for subset in sized(4, |k| k < 2) {
        let mut s = base.clone();
        s.config["signers"] = serde_json::json!(subset);
        assert!(!accepts(&s), "ch3 signers {subset:?} below threshold");
    }
    let base = without_fixture("ch4");
    for subset in subsets(7, 4) {
        let mut s = base.clone();
        s.config["signers"] = serde_json::json!(subset);
        assert_eq!(
            run_scenario(&s).unwrap().verdict,
            Verdict::Accepted,
            "ch4 signers {subset:?}"
        );
    }
    for subset in subsets(6, 5) {
        let mut s = base.clone();
        s.config["verifiers"] = serde_json::json!(subset);
        assert_eq!(
            run_scenario(&s).unwrap().verdict,
            Verdict::Accepted,
            "ch4 verifiers {subset:?}"
        );
    }
    for subset in sized(7, |k| k == 3) {
        let mut s = base.clone();
        s.config["signers"] = serde_json::json!(subset);
        assert!(!accepts(&s), "ch4 signers {subset:?} below threshold");
    }
    for subset in sized(6, |k| k == 4) {
        let mut s = base.clone();
        s.config["verifiers"] = serde_json::json!(subset);
        assert!(!accepts(&s), "ch4 verifiers {subset:?} below threshold");
    }

    // t = 3 over Z_11, every polynomial: two true shares plus every guess
    // for the third.
    let params = GroupParams::from_u64(23, 11, 3).unwrap();
    let q = 11u64;
    let (mut hits, mut trials, mut direct) = (0u64, 0u64, 0u64);
    for s in 0..q {
        for a1 in 0..q {
            for a2 in 0..q {
                let f = |x: u64| (s + a1 * x + a2 * x * x) % q;
                let share = |x: u64, y: u64| Share {
                    point: params.scalar(x),
                    value: params.scalar(y),
                };
                let known = [share(1, f(1)), share(2, f(2))];
                if reconstruct_at_zero(&params, &known).unwrap().value() == &s.into() {
                    direct += 1;
                }
                for guess in 0..q {
                    let mut shares = known.to_vec();
                    shares.push(share(3, guess));
                    trials += 1;
                    if reconstruct_at_zero(&params, &shares).unwrap().value() == &s.into() {
                        hits += 1;
                    }
                }
            }
        }
    }
    assert!(hits * q <= trials, "forged guesses hit {hits}/{trials}");
    assert!(direct * q <= q * q * q, "t-1 shares hit {direct}");

    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let groups: Vec<GroupParams> = (0..8)
        .map(|_| GroupParams::generate(16, 32, &mut rng).unwrap())
        .collect();
    for i in 0..1000 {
        let p = &groups[i % groups.len()];
        let kp = KeyPair::generate(p, &mut rng);
        let mu = p.gexp(&p.random_nonzero_scalar(&mut rng));
        let st = Statement::new(p, mu.clone(), p.exp(&mu, &kp.secret), kp.public.clone());
        let (u, v, a) = (
            p.random_scalar(&mut rng),
            p.random_scalar(&mut rng),
            p.random_scalar(&mut rng),
        );
        assert!(
            confirm(p, &st, &kp.secret, &u, &v, &a).unwrap().accepted,
            "zk completeness trial {i}"
        );
    }
    let z = Zp { p: 23, q: 11, g: 3 };
    let x = 6;
    let mu = z.gexp(4);
    let st = Statement::new(
        &params,
        params.element(mu).unwrap(),
        params.element(z.pow(mu, x)).unwrap(),
        params.element(z.gexp(x)).unwrap(),
    );
    for wrong in (0..q).filter(|&w| w != x) {
        for u in 0..q {
            for v in 0..q {
                for alpha in 0..q {
                    let sc = |n: u64| params.scalar(n);
                    let run = confirm(&params, &st, &sc(wrong), &sc(u), &sc(v), &sc(alpha)).unwrap();
                    let degenerate = z.mul(z.pow(mu, u), z.gexp(v + alpha)) == 1;
                    assert_eq!(run.accepted, degenerate, "x'={wrong} u={u} v={v} alpha={alpha}");
                }
            }
        }
    }

    for i in 0..500 {
        let p = &groups[i % groups.len()];
        let holder = KeyPair::generate(p, &mut rng);
        let l = p.random_scalar(&mut rng);
        let k = p.random_nonzero_scalar(&mut rng);
        let m = mask_share(p, &l, &holder.public, &k);
        assert_eq!(
            unmask_share(p, &m.v, &m.w, &holder.secret).unwrap(),
            l,
            "mask round trip {i}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "property suite took {elapsed:?}");
}

fn criterion_9() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1024);
    let params = GroupParams::generate(160, 1024, &mut rng).unwrap();
    assert_eq!(params.p().bits(), 1024);
    assert_eq!(params.q().bits(), 160);
    for scheme in SchemeId::ALL {
        let mut s = Scenario::new(scheme, &params);
        s.seed = 9;
        s.message = "c21va2U=".into();
        assert_eq!(run_scenario(&s).unwrap().verdict, Verdict::Accepted, "{scheme}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "smoke run took {elapsed:?}");
}

fn main() -> ExitCode {
    let criteria: [fn(); 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c));
        let ms = start.elapsed().as_millis();
        match result {
            Ok(()) => println!("criterion {}: pass ({ms} ms)", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {}: FAIL ({ms} ms): {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
