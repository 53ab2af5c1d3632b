use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use dirsig::codec::{fixture_table, parse_int, FixtureEntry, KeyFile, ParamsFile, SignatureFile};
use dirsig::sigfile::{redirect_ch1, sign_ch1, verify_signature};
use dirsig::{replay, run_scenario, run_vectors, HarnessError, Scenario};
use dirsig_core::{GroupParams, HashOracle, KeyPair, Scalar};
use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

/// Directed, threshold and multi-signature tool.
///
/// Exit status: 0 accept or success, 1 reject, 2 usage or parse error.
#[derive(Parser)]
#[command(name = "dirsig", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate group parameters (p, q, g).
    ParamsGen {
        #[arg(long, default_value_t = 160)]
        q_bits: usize,
        #[arg(long, default_value_t = 1024)]
        p_bits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate group parameters given as P Q G (decimal, or hex with 0x)
    /// or as a params file.
    ParamsCheck {
        values: Vec<String>,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Generate a key pair.
    Keygen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use this secret (decimal, or hex with 0x) instead of drawing one.
        #[arg(long)]
        secret: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the public half here.
        #[arg(long)]
        public_out: Option<PathBuf>,
    },
    /// Sign a message for one receiver (ch1).
    Sign {
        /// Signer's key file (with secret).
        #[arg(long)]
        key: PathBuf,
        /// Receiver's key file.
        #[arg(long)]
        to: PathBuf,
        #[command(flatten)]
        input: MessageArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Nonces (decimal, or hex with 0x); drawn from the seed when absent.
        #[arg(long)]
        k1: Option<String>,
        #[arg(long)]
        k2: Option<String>,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a signature file as its receiver.
    Verify {
        signature: PathBuf,
        /// Receiver's key file (with secret).
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        input: OptionalMessage,
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Convince a third party that an accepted signature is valid.
    ///
    /// For ch2, ch3 and ch5-ch7 this runs the confirmation protocol with a
    /// simulated third party and prints its messages. For ch1 it
    /// re-addresses the signature to the key given with --to.
    Prove {
        signature: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        to: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run or replay a scenario file.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Check vector files.
    #[command(subcommand)]
    Vectors(VectorsCmd),
}

#[derive(Args)]
struct MessageArgs {
    /// Message file, or - for stdin.
    #[arg(long)]
    message: String,
}

#[derive(Args)]
struct OptionalMessage {
    /// Check against this message (file, or - for stdin) instead of the
    /// one stored in the signature.
    #[arg(long)]
    message: Option<String>,
}

#[derive(Subcommand)]
enum ScenarioCmd {
    Run {
        file: PathBuf,
        /// Write the transcript here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        signature_out: Option<PathBuf>,
        /// Write the computed values here.
        #[arg(long)]
        values_out: Option<PathBuf>,
    },
    Replay {
        file: PathBuf,
        transcript: PathBuf,
    },
}

#[derive(Subcommand)]
enum VectorsCmd {
    /// Check the built-in vectors, a vector file, or a directory of them.
    Check { path: Option<PathBuf> },
}

enum Status {
    Ok,
    Reject,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Reject) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dirsig: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_message(arg: &str) -> anyhow::Result<Vec<u8>> {
    if arg == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        return Ok(buf);
    }
    std::fs::read(arg).with_context(|| format!("reading {arg}"))
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn oracle(fixture: Option<&Path>) -> anyhow::Result<HashOracle> {
    match fixture {
        None => Ok(HashOracle::Standard),
        Some(p) => {
            let entries: Vec<FixtureEntry> = read_json(p)?;
            Ok(HashOracle::Fixture(fixture_table(&entries)?))
        }
    }
}

/// Command-line integers are decimal unless prefixed with 0x.
fn cli_int(s: &str) -> anyhow::Result<BigUint> {
    if s.starts_with("0x") || s.starts_with("0X") {
        return Ok(parse_int(s)?);
    }
    s.parse::<BigUint>().map_err(|_| anyhow!("not an integer: {s:?}"))
}

fn nonce(params: &GroupParams, given: &Option<String>, rng: &mut ChaCha20Rng) -> anyhow::Result<Scalar> {
    match given {
        Some(h) => Ok(params.scalar(parse_int(h)?)),
        None => Ok(params.random_scalar(rng)),
    }
}

fn key_pair(path: &Path) -> anyhow::Result<(GroupParams, KeyPair)> {
    let file: KeyFile = read_json(path)?;
    let params = file.params()?;
    let key = file.keypair(&params)?;
    Ok((params, key))
}

fn run(cmd: Cmd) -> anyhow::Result<Status> {
    match cmd {
        Cmd::ParamsGen {
            q_bits,
            p_bits,
            seed,
            out,
        } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let params = GroupParams::generate(q_bits, p_bits, &mut rng)?;
            write_out(
                out.as_deref(),
                &serde_json::to_string_pretty(&ParamsFile::from_params(&params))?,
            )?;
            Ok(Status::Ok)
        }
        Cmd::ParamsCheck { values, params } => {
            let (p, q, g) = match (values.as_slice(), params) {
                ([p, q, g], None) => (cli_int(p)?, cli_int(q)?, cli_int(g)?),
                ([], Some(file)) => {
                    let f: ParamsFile = read_json(&file)?;
                    (parse_int(&f.p)?, parse_int(&f.q)?, parse_int(&f.g)?)
                }
                _ => bail!("give P Q G or --params FILE"),
            };
            match GroupParams::new(p, q, g) {
                Ok(_) => {
                    println!("ok");
                    Ok(Status::Ok)
                }
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(Status::Reject)
                }
            }
        }
        Cmd::Keygen {
            params,
            seed,
            secret,
            out,
            public_out,
        } => {
            let params = read_json::<ParamsFile>(&params)?.to_params()?;
            let key = match secret {
                Some(x) => KeyPair::from_secret(&params, params.scalar(cli_int(&x)?))?,
                None => KeyPair::generate(&params, &mut ChaCha20Rng::seed_from_u64(seed)),
            };
            write_out(
                out.as_deref(),
                &serde_json::to_string_pretty(&KeyFile::from_keypair(&params, &key, true))?,
            )?;
            if let Some(p) = public_out {
                write_out(
                    Some(&p),
                    &serde_json::to_string_pretty(&KeyFile::from_keypair(&params, &key, false))?,
                )?;
            }
            Ok(Status::Ok)
        }
        Cmd::Sign {
            key,
            to,
            input,
            seed,
            k1,
            k2,
            fixture,
            out,
        } => {
            let (params, signer) = key_pair(&key)?;
            let receiver: KeyFile = read_json(&to)?;
            if receiver.params()? != params {
                bail!("signer and receiver keys use different parameters");
            }
            let y_b = receiver.public(&params)?;
            let message = read_message(&input.message)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let k1 = nonce(&params, &k1, &mut rng)?;
            let k2 = nonce(&params, &k2, &mut rng)?;
            let sig = sign_ch1(&params, &signer, &y_b, &message, &k1, &k2, &oracle(fixture.as_deref())?)?;
            write_out(out.as_deref(), &serde_json::to_string_pretty(&sig)?)?;
            Ok(Status::Ok)
        }
        Cmd::Verify {
            signature,
            key,
            input,
            fixture,
        } => {
            let (params, receiver) = key_pair(&key)?;
            let sig: SignatureFile = read_json(&signature)?;
            let message = input.message.as_deref().map(read_message).transpose()?;
            match verify_signature(
                &params,
                &sig,
                &receiver,
                message.as_deref(),
                &oracle(fixture.as_deref())?,
            ) {
                Ok(c) if c.accepted => {
                    println!("accept");
                    Ok(Status::Ok)
                }
                Ok(_) => {
                    println!("reject");
                    Ok(Status::Reject)
                }
                // The fixture table only covers the signed values, so an
                // input outside it is not the signed one.
                Err(HarnessError::FixtureMiss { tag, items }) => {
                    println!("reject: no fixture entry for {tag} [{items}]");
                    Ok(Status::Reject)
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Prove {
            signature,
            key,
            to,
            seed,
            k,
            fixture,
            out,
        } => {
            let (params, receiver) = key_pair(&key)?;
            let sig: SignatureFile = read_json(&signature)?;
            let oracle = oracle(fixture.as_deref())?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            if sig.scheme == "ch1" {
                let Some(to) = to else { bail!("ch1 needs --to FILE") };
                let third = read_json::<KeyFile>(&to)?.public(&params)?;
                let k = nonce(&params, &k, &mut rng)?;
                return match redirect_ch1(&params, &sig, &receiver, &third, &k, &oracle)? {
                    Some(s) => {
                        write_out(out.as_deref(), &serde_json::to_string_pretty(&s)?)?;
                        Ok(Status::Ok)
                    }
                    None => {
                        println!("reject");
                        Ok(Status::Reject)
                    }
                };
            }
            let checked = verify_signature(&params, &sig, &receiver, None, &oracle)?;
            let Some(st) = checked.statement.filter(|_| checked.accepted) else {
                println!("reject");
                return Ok(Status::Reject);
            };
            let u = params.random_scalar(&mut rng);
            let v = params.random_scalar(&mut rng);
            let alpha = params.random_scalar(&mut rng);
            let c = dirsig_core::zk::confirm(&params, &st, &receiver.secret, &u, &v, &alpha)?;
            let report = serde_json::json!({
                "mu": st.mu.to_hex(),
                "z": st.z.to_hex(),
                "w": c.w.to_hex(),
                "u": u.to_hex(),
                "v": v.to_hex(),
                "beta": c.beta.to_hex(),
                "gamma": c.gamma.to_hex(),
                "alpha": alpha.to_hex(),
                "accepted": c.accepted,
            });
            write_out(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            Ok(if c.accepted { Status::Ok } else { Status::Reject })
        }
        Cmd::Scenario(ScenarioCmd::Run {
            file,
            out,
            signature_out,
            values_out,
        }) => {
            let s = Scenario::from_json(&read(&file)?)?;
            let outcome = run_scenario(&s)?;
            if let Some(p) = out {
                write_out(Some(&p), &outcome.transcript.to_json())?;
            }
            if let Some(p) = signature_out {
                let sig = outcome
                    .signature
                    .as_ref()
                    .ok_or_else(|| anyhow!("the run produced no signature"))?;
                write_out(Some(&p), &serde_json::to_string_pretty(sig)?)?;
            }
            if let Some(p) = values_out {
                write_out(Some(&p), &serde_json::to_string_pretty(&outcome.values)?)?;
            }
            println!("{}", outcome.verdict);
            let mismatches = outcome.mismatches(&s.expected);
            for (name, expected, computed) in &mismatches {
                println!(
                    "  {name}: expected {expected}, computed {}",
                    computed.as_deref().unwrap_or("(not computed)")
                );
            }
            Ok(if outcome.verdict.is_accepted() && mismatches.is_empty() {
                Status::Ok
            } else {
                Status::Reject
            })
        }
        Cmd::Scenario(ScenarioCmd::Replay { file, transcript }) => {
            let s = Scenario::from_json(&read(&file)?)?;
            let t = read_json(&transcript)?;
            let verdict = replay(&s, &t)?;
            println!("{verdict}");
            Ok(if verdict.is_accepted() {
                Status::Ok
            } else {
                Status::Reject
            })
        }
        Cmd::Vectors(VectorsCmd::Check { path }) => {
            let report = run_vectors(path.as_deref())?;
            println!("{report}");
            Ok(if report.all_passed() {
                Status::Ok
            } else {
                Status::Reject
            })
        }
    }
}
