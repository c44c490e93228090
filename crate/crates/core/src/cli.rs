//! The `secnc` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 parameter set rejected
//! by the rate or packet-length bound, 3 audit or decoding failure, 4 budget refusal.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::audit::{self, AuditMode, ReliabilityOptions, SecrecyOptions, DEFAULT_AUDIT_BUDGET};
use crate::error::{check_budget, Error, Result};
use crate::formats::{self, SchemeConfig};
use crate::gf::Elem;
use crate::linalg::{expand, MatrixFq};
use crate::network_sim::{self, AdversaryMode};
use crate::rankmetric::DecodeOutcome;
use crate::secure_scheme::SchemeInstance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "secnc", version, about = "Secure error-correcting network coding with Gabidulin coset codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a scheme config and print its parameters.
    Params(ConfigArg),
    /// Encode a k-line message file into an n-line payload file.
    Encode(EncodeArgs),
    /// Decode a payload column or a received matrix.
    Decode(DecodeArgs),
    /// Run transmit + decode trials against an adversary.
    Simulate(SimulateArgs),
    /// Run the secrecy or reliability audit.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Scheme parameter file (TOML).
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    pub config: PathBuf,
    /// Message file: k element lines.
    #[arg(long)]
    pub message: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// UNSAFE, tests only: fix the randomness to `zero` or a comma-separated element list.
    #[arg(long, value_name = "zero|E1,E2,..")]
    pub force_v: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    pub config: PathBuf,
    /// Payload file: n element lines, possibly corrupted by an error of rank <= t.
    #[arg(long, conflicts_with_all = ["received", "transfer", "noncoherent"])]
    pub payload: Option<PathBuf>,
    /// Received matrix file over GF(q).
    #[arg(long, required_unless_present = "payload")]
    pub received: Option<PathBuf>,
    /// Transfer matrix file; identity when omitted.
    #[arg(long, conflicts_with = "noncoherent")]
    pub transfer: Option<PathBuf>,
    /// The received matrix is `A [I | X] + E` with unknown `A`.
    #[arg(long)]
    pub noncoherent: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Adversary {
    Random,
    Exhaustive,
    Fixed,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Destination rows N; defaults to n + t.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long, value_enum, default_value_t = Adversary::Random)]
    pub adversary: Adversary,
    /// Realization file (A, D, Z, B) for `--adversary fixed`.
    #[arg(long, required_if_eq("adversary", "fixed"))]
    pub realization: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noncoherent: bool,
    #[arg(long, default_value_t = DEFAULT_AUDIT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditKind {
    Secrecy,
    Reliability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub kind: AuditKind,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Draws for sampled mode.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_AUDIT_BUDGET)]
    pub budget: u64,
    /// UNSAFE, negative control only: swap in a non-MRD randomness generator.
    #[arg(long)]
    pub break_mrd: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the report here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Random rectangular transfer matrices (reliability).
    #[arg(long, default_value_t = 20)]
    pub random_transfers: usize,
    /// Rows of the random transfer matrices (reliability); defaults to n + 1.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Largest injected error rank (reliability); defaults to t.
    #[arg(long)]
    pub max_error_rank: Option<usize>,
    /// Rows of the eavesdropper matrix (secrecy); defaults to mu.
    #[arg(long)]
    pub observations: Option<usize>,
    /// Eavesdrop on lifted transmissions, headers included (secrecy).
    #[arg(long)]
    pub lifted: bool,
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else if matches!(e, Error::Budget { .. }) {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Params(a) => cmd_params(&a.config, out),
        Command::Encode(a) => cmd_encode(a, out, err),
        Command::Decode(a) => cmd_decode(a, out),
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::Audit(a) => cmd_audit(a, out, err),
    }
}

fn load(path: &Path) -> Result<(SchemeConfig, SchemeInstance)> {
    let config = SchemeConfig::load(path)?;
    let inst = SchemeInstance::build(config.params()?)?;
    Ok((config, inst))
}

fn rng_for(flag: Option<u64>, config: &SchemeConfig, err: &mut dyn Write) -> ChaCha8Rng {
    let seed = flag.or(config.seed).unwrap_or_else(rand::random);
    let _ = writeln!(err, "seed = {seed}");
    ChaCha8Rng::seed_from_u64(seed)
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_params(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let (_, inst) = load(path)?;
    let p = inst.params();
    writeln!(out, "n = {}", p.n)?;
    writeln!(out, "m = {}", p.field.m())?;
    writeln!(out, "q = {}", p.field.q())?;
    writeln!(out, "t = {}", p.t)?;
    writeln!(out, "mu = {}", p.mu)?;
    writeln!(out, "k = {}", p.k)?;
    writeln!(out, "modulus = {}", p.field.modulus().iter().map(u32::to_string).collect::<String>())?;
    writeln!(out, "d_R = {}", p.outer_distance())?;
    writeln!(out, "max_k = {}", p.max_rate())?;
    writeln!(out, "rate_packets = {}", p.k)?;
    writeln!(out, "rate_bits = {}", p.rate_bits())?;
    writeln!(out, "lifted_rate_bits_per_symbol = {:.6}", network_sim::lifted_rate(p))?;
    Ok(EXIT_OK)
}

fn parse_force_v(inst: &SchemeInstance, list: &str) -> Result<Vec<Elem>> {
    let mu = inst.params().mu;
    if list.trim() == "zero" {
        return Ok(vec![Elem::ZERO; mu]);
    }
    let v = list
        .split(',')
        .map(|s| inst.field().parse_element(s))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != mu {
        return Err(Error::Parse(format!("--force-v needs {mu} elements, got {}", v.len())));
    }
    Ok(v)
}

fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (config, inst) = load(&a.config)?;
    let field = inst.field();
    let s = formats::parse_packet(field, &std::fs::read_to_string(&a.message)?, inst.params().k)?;
    let x = match &a.force_v {
        Some(list) => inst.encode_with_randomness(&s, &parse_force_v(&inst, list)?)?,
        None => inst.encode(&s, &mut rng_for(a.seed, &config, err))?,
    };
    emit(a.output.as_deref(), &formats::format_elements(field, &x), out)?;
    Ok(EXIT_OK)
}

fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, inst) = load(&a.config)?;
    let field = inst.field();
    let base = field.base();
    let p = inst.params();
    let outcome = if let Some(path) = &a.payload {
        let x_hat = formats::parse_packet(field, &std::fs::read_to_string(path)?, p.n)?;
        inst.decode_payload(&x_hat)?
    } else {
        let path = a.received.as_ref().ok_or_else(|| Error::param("either --payload or --received is required"))?;
        let y = formats::parse_matrix(base, &std::fs::read_to_string(path)?)?;
        if a.noncoherent {
            network_sim::noncoherent_decode(&inst, &y)?
        } else {
            let transfer = match &a.transfer {
                Some(t) => formats::parse_matrix(base, &std::fs::read_to_string(t)?)?,
                None => MatrixFq::identity(base, p.n),
            };
            inst.coherent_decode(&y, &transfer)?
        }
    };
    match outcome {
        DecodeOutcome::Recovered { message, .. } => {
            emit(a.output.as_deref(), &formats::format_elements(field, &message), out)?;
            Ok(EXIT_OK)
        }
        DecodeOutcome::Failed => {
            writeln!(out, "decoding failed")?;
            Ok(EXIT_FAILURE)
        }
    }
}

#[derive(Default)]
struct SimStats {
    cases: u64,
    failures: u64,
    ranks: BTreeMap<usize, u64>,
}

impl SimStats {
    fn record(&mut self, inst: &SchemeInstance, y: &MatrixFq, a: &MatrixFq, e: &MatrixFq, s: &[Elem], noncoherent: bool) -> Result<()> {
        let outcome = if noncoherent {
            network_sim::noncoherent_decode(inst, y)?
        } else {
            inst.coherent_decode(y, a)?
        };
        self.cases += 1;
        if outcome.message() != Some(s) {
            self.failures += 1;
        }
        *self.ranks.entry(e.rank()).or_default() += 1;
        Ok(())
    }
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (config, inst) = load(&a.config)?;
    let mut rng = rng_for(a.seed, &config, err);
    let p = inst.params();
    let field = inst.field();
    let base = field.base();
    let m = p.field.m();
    let width = if a.noncoherent { p.n + m } else { m };
    let payload = |x: &[Elem]| if a.noncoherent { network_sim::lift(field, x) } else { expand(field, x) };
    let started = Instant::now();
    let mut stats = SimStats::default();
    let mut rows = a.rows.unwrap_or(p.n + p.t);

    match a.adversary {
        Adversary::Random | Adversary::Fixed => {
            let mode = match &a.realization {
                Some(path) if a.adversary == Adversary::Fixed => {
                    let real = formats::parse_realization(base, &std::fs::read_to_string(path)?)?;
                    rows = real.rows();
                    AdversaryMode::Fixed(Box::new(real))
                }
                _ => AdversaryMode::Random,
            };
            for _ in 0..a.trials {
                let real = network_sim::sample_realization(p, rows, width, &mode, &mut rng)?;
                let s = inst.random_message(&mut rng);
                let x = inst.encode(&s, &mut rng)?;
                let sent = network_sim::transmit_matrix(&payload(&x), &real)?;
                stats.record(&inst, &sent.y, &real.a, &real.error(width)?, &s, a.noncoherent)?;
            }
        }
        Adversary::Exhaustive => {
            let adv = network_sim::exhaustive_adversary(p, rows, width, a.budget)?;
            check_budget(a.trials as u128 * adv.errors.len() as u128, a.budget)?;
            for _ in 0..a.trials {
                let s = inst.random_message(&mut rng);
                let x = payload(&inst.encode(&s, &mut rng)?);
                let transfer = MatrixFq::random_full_rank(base, rows, p.n, &mut rng);
                let clean = transfer.mul(&x)?;
                for e in &adv.errors {
                    stats.record(&inst, &clean.add(e)?, &transfer, e, &s, a.noncoherent)?;
                }
            }
        }
    }

    let adversary = match a.adversary {
        Adversary::Random => "random",
        Adversary::Exhaustive => "exhaustive",
        Adversary::Fixed => "fixed",
    };
    writeln!(out, "adversary = {adversary}")?;
    writeln!(out, "noncoherent = {}", a.noncoherent)?;
    writeln!(out, "rows = {rows}")?;
    writeln!(out, "trials = {}", a.trials)?;
    writeln!(out, "cases = {}", stats.cases)?;
    writeln!(out, "failures = {}", stats.failures)?;
    for (r, c) in &stats.ranks {
        writeln!(out, "error_rank.{r} = {c}")?;
    }
    writeln!(err, "elapsed_ms = {}", started.elapsed().as_millis())?;
    Ok(if stats.failures == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_audit(a: &AuditArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let config = SchemeConfig::load(&a.config)?;
    let params = config.params()?;
    let inst = if a.break_mrd {
        SchemeInstance::build_non_mrd(params)?
    } else {
        SchemeInstance::build(params)?
    };
    let mut rng = rng_for(a.seed, &config, err);
    let mode = match a.mode {
        ModeArg::Exhaustive => AuditMode::Exhaustive,
        ModeArg::Sampled => AuditMode::Sampled { samples: a.samples },
    };
    let (text, ok) = match a.kind {
        AuditKind::Secrecy => {
            let opts = SecrecyOptions {
                mode,
                observations: a.observations,
                lifted: a.lifted,
                budget: a.budget,
                ..Default::default()
            };
            let report = audit::secrecy_audit(&inst, &opts, &mut rng)?;
            (report.render(), report.holds().unwrap_or(true))
        }
        AuditKind::Reliability => {
            let opts = ReliabilityOptions {
                mode,
                random_transfers: a.random_transfers,
                rows: a.rows,
                max_error_rank: a.max_error_rank,
                budget: a.budget,
            };
            let report = audit::reliability_audit(&inst, &opts, &mut rng)?;
            (report.render(), report.holds())
        }
    };
    out.write_all(text.as_bytes())?;
    if let Some(path) = &a.output {
        std::fs::write(path, &text)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

