use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use dirsig::codec::SignatureFile;
use dirsig::vectors::{parse_vector, BUILTIN};
use tempfile::TempDir;

fn dirsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirsig")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work {
            dir: TempDir::new().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    }

    fn p(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}

const CH1_FIXTURE: &str = r#"[{"tag":"ch1","items":["12","b64:bQ=="],"out":"a"}]"#;

fn keygen(w: &Work, params: &str, secret: &str, name: &str) -> String {
    let out = dirsig(&["keygen", "--params", params, "--secret", secret, "--out", &w.p(name)]);
    assert_eq!(code(&out), 0, "{out:?}");
    w.p(name)
}

fn read_sig(p: &Path) -> SignatureFile {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn params_check_exit_codes() {
    assert_eq!(code(&dirsig(&["params-check", "23", "11", "3"])), 0);
    assert_eq!(code(&dirsig(&["params-check", "0x17", "0xb", "0x3"])), 0);
    assert_eq!(code(&dirsig(&["params-check", "23", "11", "1"])), 1);
    assert_eq!(code(&dirsig(&["params-check", "25", "11", "3"])), 1);
    let bad = dirsig(&["params-check", "23", "eleven", "3"]);
    assert_eq!(code(&bad), 2);
    assert_eq!(String::from_utf8_lossy(&bad.stderr).lines().count(), 1);
    assert_eq!(code(&dirsig(&["params-check", "23"])), 2);
    assert_eq!(code(&dirsig(&["no-such-command"])), 2);
}

#[test]
fn generated_params_pass_the_check() {
    let w = Work::new();
    let out = dirsig(&[
        "params-gen",
        "--q-bits",
        "40",
        "--p-bits",
        "80",
        "--seed",
        "3",
        "--out",
        &w.p("p.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&dirsig(&["params-check", "--params", &w.p("p.json")])), 0);
}

#[test]
fn ch1_vector_sign_verify_and_redirect() {
    let w = Work::new();
    let params = w.write("params.json", r#"{"p":"17","q":"b","g":"3"}"#);
    let fixture = w.write("fixture.json", CH1_FIXTURE);
    let message = w.write("m.txt", "m");
    let a = keygen(&w, &params, "4", "a.json");
    let b = keygen(&w, &params, "7", "b.json");
    let c = keygen(&w, &params, "6", "c.json");
    let sig = w.p("sig.json");
    let out = dirsig(&[
        "sign",
        "--key",
        &a,
        "--to",
        &b,
        "--message",
        &message,
        "--k1",
        "9",
        "--k2",
        "5",
        "--fixture",
        &fixture,
        "--out",
        &sig,
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let s = read_sig(Path::new(&sig));
    assert_eq!(s.fields["s"], "5");
    assert_eq!(s.fields["w"], "10");
    assert_eq!(s.fields["v"], "1");

    let ok = dirsig(&["verify", &sig, "--key", &b, "--fixture", &fixture]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout(&ok).trim(), "accept");

    let mut t = s.clone();
    t.fields.insert("s".into(), "6".into());
    let tampered = w.write("tampered.json", &serde_json::to_string(&t).unwrap());
    assert_eq!(
        code(&dirsig(&["verify", &tampered, "--key", &b, "--fixture", &fixture])),
        1
    );

    // Only B can check it.
    assert_eq!(code(&dirsig(&["verify", &sig, "--key", &c, "--fixture", &fixture])), 1);

    let fwd = w.p("fwd.json");
    let out = dirsig(&[
        "prove",
        &sig,
        "--key",
        &b,
        "--to",
        &c,
        "--k",
        "8",
        "--fixture",
        &fixture,
        "--out",
        &fwd,
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let f = read_sig(Path::new(&fwd));
    assert_eq!(f.fields["w"], "4");
    assert_eq!(f.fields["v"], "9");
    assert_eq!(code(&dirsig(&["verify", &fwd, "--key", &c, "--fixture", &fixture])), 0);
}

#[test]
fn standard_hash_sign_and_verify_with_stdin_message() {
    let w = Work::new();
    let params = w.p("params.json");
    assert_eq!(
        code(&dirsig(&[
            "params-gen",
            "--q-bits",
            "64",
            "--p-bits",
            "128",
            "--out",
            &params
        ])),
        0
    );
    let a = w.p("a.json");
    let b = w.p("b.json");
    assert_eq!(
        code(&dirsig(&["keygen", "--params", &params, "--seed", "1", "--out", &a])),
        0
    );
    let pub_b = w.p("b.pub.json");
    assert_eq!(
        code(&dirsig(&[
            "keygen",
            "--params",
            &params,
            "--seed",
            "2",
            "--out",
            &b,
            "--public-out",
            &pub_b
        ])),
        0
    );
    assert!(!std::fs::read_to_string(&pub_b).unwrap().contains("\"x\""));

    let sig = w.p("sig.json");
    let mut child = Command::new(env!("CARGO_BIN_EXE_dirsig"))
        .args([
            "sign",
            "--key",
            &a,
            "--to",
            &pub_b,
            "--message",
            "-",
            "--seed",
            "5",
            "--out",
            &sig,
        ])
        .stdin(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"pay 10 to C").unwrap();
    assert!(child.wait().unwrap().success());

    assert_eq!(code(&dirsig(&["verify", &sig, "--key", &b])), 0);
    let other = w.write("other.txt", "pay 99 to C");
    assert_eq!(code(&dirsig(&["verify", &sig, "--key", &b, "--message", &other])), 1);
    // The public half cannot verify.
    assert_eq!(code(&dirsig(&["verify", &sig, "--key", &pub_b])), 2);
}

fn vector_files(w: &Work, name: &str) -> (String, String) {
    let (file, text) = BUILTIN.iter().find(|(f, _)| f.starts_with(name)).unwrap();
    let v = parse_vector(file, text).unwrap();
    let scenario = w.write("scenario.json", &v.scenario.to_json());
    let fixture = w.write("fixture.json", &serde_json::to_string(&v.scenario.fixture).unwrap());
    (scenario, fixture)
}

#[test]
fn scenario_run_replay_and_receiver_tools() {
    for (name, receiver_secret) in [("ch2", "6"), ("ch3", "6"), ("ch5", "9"), ("ch6", "7"), ("ch7", "10")] {
        let w = Work::new();
        let (scenario, fixture) = vector_files(&w, name);
        let (t, sig) = (w.p("t.json"), w.p("sig.json"));
        let out = dirsig(&["scenario", "run", &scenario, "--out", &t, "--signature-out", &sig]);
        assert_eq!(code(&out), 0, "{name}: {out:?}");
        assert_eq!(stdout(&out).trim(), "accepted");
        assert_eq!(code(&dirsig(&["scenario", "replay", &scenario, &t])), 0, "{name}");

        let s = read_sig(Path::new(&sig));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&scenario).unwrap()).unwrap();
        let params = w.write("params.json", &v["params"].to_string());
        let key = keygen(&w, &params, receiver_secret, "r.json");
        let ok = dirsig(&["verify", &sig, "--key", &key, "--fixture", &fixture]);
        assert_eq!(code(&ok), 0, "{name}: {ok:?}");

        let proof = dirsig(&["prove", &sig, "--key", &key, "--fixture", &fixture, "--seed", "4"]);
        assert_eq!(code(&proof), 0, "{name}: {proof:?}");
        let report: serde_json::Value = serde_json::from_slice(&proof.stdout).unwrap();
        assert_eq!(report["accepted"], true);

        let mut t = s.clone();
        t.fields.insert("s".into(), "1".into());
        let bad = w.write("bad.json", &serde_json::to_string(&t).unwrap());
        assert_eq!(
            code(&dirsig(&["verify", &bad, "--key", &key, "--fixture", &fixture])),
            1,
            "{name}"
        );
    }
}

#[test]
fn organization_schemes_are_not_single_receiver() {
    let w = Work::new();
    let (scenario, _) = vector_files(&w, "ch4");
    let sig = w.p("sig.json");
    assert_eq!(
        code(&dirsig(&["scenario", "run", &scenario, "--signature-out", &sig])),
        0
    );
    let params = w.write("params.json", r#"{"p":"2f","q":"17","g":"2"}"#);
    let key = keygen(&w, &params, "5", "r.json");
    assert_eq!(code(&dirsig(&["verify", &sig, "--key", &key])), 2);
}

#[test]
fn scenario_with_mismatch_or_fault_exits_one() {
    let w = Work::new();
    let (scenario, _) = vector_files(&w, "ch1");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&scenario).unwrap()).unwrap();
    v["expected"]["S_A"] = "6".into();
    let wrong = w.write("wrong.json", &v.to_string());
    let out = dirsig(&["scenario", "run", &wrong]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("S_A: expected 6, computed 5"), "{}", stdout(&out));

    let faulty = w.write(
        "faulty.json",
        r#"{"scheme":"ch4","generate":{"q_bits":24,"p_bits":48},"seed":1,"message":"","faults":[{"kind":"zero-shadow","member":1}]}"#,
    );
    let out = dirsig(&["scenario", "run", &faulty]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("rejected"));

    let broken = w.write("broken.json", "{ not json");
    assert_eq!(code(&dirsig(&["scenario", "run", &broken])), 2);
}

#[test]
fn vectors_check_exit_codes() {
    let out = dirsig(&["vectors", "check"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("7/7 vectors pass"));
    assert!(stdout(&out).contains("worked example prints 18^{-3}; normative value 18^{3}"));

    let w = Work::new();
    let (file, text) = BUILTIN[0];
    let mut v = parse_vector(file, text).unwrap();
    v.scenario.expected.insert("S_A".into(), "6".into());
    let wrong = w.write("wrong.json", &serde_json::to_string(&v).unwrap());
    let out = dirsig(&["vectors", "check", &wrong]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("S_A: expected 6, computed 5"));

    let garbage = w.write("garbage.json", "[1, 2");
    assert_eq!(code(&dirsig(&["vectors", "check", &garbage])), 2);
    assert_eq!(code(&dirsig(&["vectors", "check", &w.p("missing.json")])), 2);

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("vectors");
    assert_eq!(code(&dirsig(&["vectors", "check", dir.to_str().unwrap()])), 0);
}
