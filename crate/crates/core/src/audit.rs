//! Exhaustive checks of zero-error decoding and zero leakage, plus brute-force
//! decoders that serve as independent oracles.
//!
//! Leakage is `I(S;W)` in bits under a uniform message. Joint counts are exact
//! integers, and the zero case is decided by comparing the conditional count
//! vectors of every message before any logarithm is taken.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_budget, Error, Result};
use crate::gf::{Elem, Gf, PrimeField};
use crate::linalg::{contract, enumerate, expand, MatrixFq};
use crate::network_sim::lift;
use crate::rankmetric::{all_messages, DecodeOutcome, GabidulinCode};
use crate::secure_scheme::{enumerate_inputs, SchemeInstance};

pub const DEFAULT_AUDIT_BUDGET: u64 = 1 << 22;

/// Shannon entropy of an empirical distribution, in bits.
pub fn entropy_bits(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::domain("entropy of an all-zero count vector"));
    }
    let total = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum())
}

/// `I(S;W) = H(S) + H(W) - H(S,W)` from a joint count table indexed `[s][w]`.
pub fn mutual_information_bits(joint: &[Vec<u64>]) -> Result<f64> {
    let width = joint.first().map_or(0, Vec::len);
    if joint.iter().any(|r| r.len() != width) {
        return Err(Error::param("ragged joint count table"));
    }
    let rows: Vec<u64> = joint.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..width).map(|w| joint.iter().map(|r| r[w]).sum()).collect();
    let flat: Vec<u64> = joint.iter().flatten().copied().collect();
    let mi = entropy_bits(&rows)? + entropy_bits(&cols)? - entropy_bits(&flat)?;
    Ok(mi.max(0.0))
}

/// True when every row of the joint table is the same vector, i.e. `S` and `W`
/// are independent under a uniform `S` with equally many draws per message.
pub fn rows_identical(joint: &[Vec<u64>]) -> bool {
    joint.windows(2).all(|w| w[0] == w[1])
}

/// Row-major digits of `b` read as one base-q number, in lowercase hex.
pub fn matrix_hex(b: &MatrixFq) -> String {
    let q = BigUint::from(b.field().q());
    let mut acc = BigUint::from(0u32);
    for &d in b.data() {
        acc = acc * &q + BigUint::from(d);
    }
    acc.to_str_radix(16)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    Exhaustive,
    /// `samples` random draws; estimates only.
    Sampled { samples: u64 },
}

impl AuditMode {
    pub fn is_exhaustive(self) -> bool {
        matches!(self, AuditMode::Exhaustive)
    }
}

#[derive(Clone, Debug)]
pub struct SecrecyOptions {
    pub mode: AuditMode,
    /// Rows of `B`; defaults to `mu`.
    pub observations: Option<usize>,
    /// Observe lifted transmissions `[I | X]` instead of bare payloads.
    pub lifted: bool,
    pub budget: u64,
    /// Random eavesdroppers drawn in sampled mode.
    pub sampled_eavesdroppers: usize,
}

impl Default for SecrecyOptions {
    fn default() -> Self {
        Self {
            mode: AuditMode::Exhaustive,
            observations: None,
            lifted: false,
            budget: DEFAULT_AUDIT_BUDGET,
            sampled_eavesdroppers: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EavesdropperRecord {
    pub b: MatrixFq,
    pub leakage_bits: f64,
    /// Leakage was decided to be zero by exact count comparison.
    pub exact_zero: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecrecyReport {
    pub exhaustive: bool,
    pub mrd: bool,
    pub observations: usize,
    pub lifted: bool,
    /// `(S, V)` draws per eavesdropper.
    pub draws_per_b: u64,
    pub records: Vec<EavesdropperRecord>,
    pub bits_per_packet: f64,
    scheme: String,
}

impl SecrecyReport {
    pub fn max_leakage(&self) -> f64 {
        self.records.iter().map(|r| r.leakage_bits).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<&EavesdropperRecord> {
        self.records
            .iter()
            .reduce(|a, b| if b.leakage_bits > a.leakage_bits { b } else { a })
    }

    /// `Some(true)` when every eavesdropper was shown to learn exactly nothing.
    /// Sampled runs cannot establish this and return `None`.
    pub fn holds(&self) -> Option<bool> {
        self.exhaustive.then(|| self.records.iter().all(|r| r.exact_zero))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let worst = self.worst();
        let verdict = match self.holds() {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "estimate-only",
        };
        let _ = writeln!(out, "audit = secrecy");
        let _ = writeln!(out, "mode = {}", if self.exhaustive { "exhaustive" } else { "sampled" });
        let _ = writeln!(out, "scheme = {}", self.scheme);
        let _ = writeln!(out, "mrd = {}", self.mrd);
        let _ = writeln!(out, "observations = {}", self.observations);
        let _ = writeln!(out, "lifted = {}", self.lifted);
        let _ = writeln!(out, "eavesdroppers = {}", self.records.len());
        let _ = writeln!(out, "draws_per_b = {}", self.draws_per_b);
        let _ = writeln!(out, "unit = bits (1 packet = {} bits)", self.bits_per_packet);
        let _ = writeln!(out, "max_leakage_bits = {}", fmt_bits(self.max_leakage()));
        let _ = writeln!(out, "worst_b = {}", worst.map_or("-".into(), |r| matrix_hex(&r.b)));
        let _ = writeln!(out, "verdict = {verdict}");
        for r in &self.records {
            let _ = writeln!(out, "B={} leakage_bits={}", matrix_hex(&r.b), fmt_bits(r.leakage_bits));
        }
        out
    }
}

fn fmt_bits(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.12}")
    }
}

fn scheme_label(inst: &SchemeInstance) -> String {
    let p = inst.params();
    format!("q={} m={} n={} t={} mu={} k={}", p.field.q(), p.field.m(), p.n, p.t, p.mu, p.k)
}

/// Index of a message among `all_messages`: base-`q^m` digits, first entry least significant.
fn message_index(field: &Gf, s: &[Elem]) -> usize {
    let order = field.order() as usize;
    s.iter().rev().fold(0, |acc, e| acc * order + e.index() as usize)
}

fn observe(inst: &SchemeInstance, b: &MatrixFq, x: &[Elem], lifted: bool) -> Vec<u32> {
    let payload = if lifted { lift(inst.field(), x) } else { expand(inst.field(), x) };
    b.mul(&payload).expect("B has n columns").data().to_vec()
}

fn leakage_record(b: MatrixFq, joint: Vec<Vec<u64>>, exact: bool) -> Result<EavesdropperRecord> {
    if exact && rows_identical(&joint) {
        return Ok(EavesdropperRecord { b, leakage_bits: 0.0, exact_zero: true });
    }
    let leakage_bits = mutual_information_bits(&joint)?;
    Ok(EavesdropperRecord { b, leakage_bits, exact_zero: false })
}

fn joint_table(rows: usize, observations: impl Iterator<Item = (usize, Vec<u32>)>) -> Vec<Vec<u64>> {
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut table: Vec<Vec<u64>> = vec![Vec::new(); rows];
    for (s, w) in observations {
        let next = ids.len();
        let id = *ids.entry(w).or_insert(next);
        for row in table.iter_mut() {
            if row.len() <= id {
                row.resize(id + 1, 0);
            }
        }
        table[s][id] += 1;
    }
    table.retain(|r| r.iter().any(|&c| c > 0));
    table
}

/// Leakage about `S` for every eavesdropper matrix (exhaustive) or a random
/// sample of them (sampled). The RNG is only used in sampled mode.
pub fn secrecy_audit<R: Rng + ?Sized>(
    inst: &SchemeInstance,
    options: &SecrecyOptions,
    rng: &mut R,
) -> Result<SecrecyReport> {
    let p = inst.params();
    let field = inst.field();
    let base = field.base();
    let observations = options.observations.unwrap_or(p.mu);
    if observations > p.mu {
        return Err(Error::param(format!("{observations} observations exceed mu = {}", p.mu)));
    }
    let bits_per_packet = p.field.m() as f64 * (p.field.q() as f64).log2();
    let mut report = SecrecyReport {
        exhaustive: options.mode.is_exhaustive(),
        mrd: inst.is_mrd(),
        observations,
        lifted: options.lifted,
        draws_per_b: 0,
        records: Vec::new(),
        bits_per_packet,
        scheme: scheme_label(inst),
    };

    match options.mode {
        AuditMode::Exhaustive => {
            let order = field.order() as u128;
            let inputs = order.pow((p.k + p.mu) as u32);
            check_budget(inputs, options.budget)?;
            let eavesdroppers = enumerate::full_rank_rref(base, observations, p.n, options.budget)?;
            check_budget(inputs * eavesdroppers.len() as u128, options.budget)?;
            let (messages, randomness) = enumerate_inputs(inst, options.budget)?;
            let mut codewords = Vec::with_capacity(inputs as usize);
            for (si, s) in messages.iter().enumerate() {
                for v in &randomness {
                    codewords.push((si, inst.encode_with_randomness(s, v)?));
                }
            }
            report.draws_per_b = (inputs / messages.len() as u128) as u64;
            report.records = eavesdroppers
                .into_par_iter()
                .map(|b| {
                    let joint = joint_table(
                        messages.len(),
                        codewords.iter().map(|(si, x)| (*si, observe(inst, &b, x, options.lifted))),
                    );
                    leakage_record(b, joint, true)
                })
                .collect::<Result<Vec<_>>>()?;
        }
        AuditMode::Sampled { samples } => {
            check_budget(samples as u128 * options.sampled_eavesdroppers as u128, options.budget)?;
            let seeds: Vec<u64> = (0..options.sampled_eavesdroppers).map(|_| rng.gen()).collect();
            let n_messages = (field.order() as usize)
                .checked_pow(p.k as u32)
                .ok_or_else(|| Error::param("message space too large to tabulate"))?;
            report.draws_per_b = samples;
            report.records = seeds
                .into_par_iter()
                .map(|seed| {
                    let mut local = ChaCha8Rng::seed_from_u64(seed);
                    let b = if observations == 0 {
                        MatrixFq::zeros(base, 0, p.n)
                    } else {
                        MatrixFq::random_full_rank(base, observations, p.n, &mut local)
                    };
                    let mut draws = Vec::with_capacity(samples as usize);
                    for _ in 0..samples {
                        let s = inst.random_message(&mut local);
                        let x = inst.encode(&s, &mut local)?;
                        draws.push((message_index(field, &s), observe(inst, &b, &x, options.lifted)));
                    }
                    leakage_record(b, joint_table(n_messages, draws.into_iter()), false)
                })
                .collect::<Result<Vec<_>>>()?;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ReliabilityOptions {
    pub mode: AuditMode,
    /// Random rectangular transfer matrices tried after the identity.
    pub random_transfers: usize,
    /// Rows of the random transfer matrices; defaults to `n + 1`.
    pub rows: Option<usize>,
    /// Largest injected error rank; defaults to `t`. Larger ranks are outside the promise.
    pub max_error_rank: Option<usize>,
    pub budget: u64,
}

impl Default for ReliabilityOptions {
    fn default() -> Self {
        Self {
            mode: AuditMode::Exhaustive,
            random_transfers: 20,
            rows: None,
            max_error_rank: None,
            budget: DEFAULT_AUDIT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReliabilityReport {
    pub exhaustive: bool,
    pub transfers: usize,
    /// Cases with error rank at most `t`.
    pub cases: u64,
    /// In-promise cases where the message was not recovered.
    pub failures: u64,
    /// Cases with error rank above `t`.
    pub outside_cases: u64,
    /// Outside cases where the decoder returned a failure flag.
    pub outside_flagged: u64,
    /// Outside cases where the decoder returned a wrong message.
    pub outside_miscorrected: u64,
    /// Wrong answers whose codeword is not within radius `t` of the observation.
    /// The brute-force decoder would never return these.
    pub unexplained: u64,
    pub exemplars: Vec<String>,
    scheme: String,
}

const MAX_EXEMPLARS: usize = 8;

impl ReliabilityReport {
    pub fn holds(&self) -> bool {
        self.failures == 0 && self.unexplained == 0
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        self.outside_cases += other.outside_cases;
        self.outside_flagged += other.outside_flagged;
        self.outside_miscorrected += other.outside_miscorrected;
        self.unexplained += other.unexplained;
        for e in other.exemplars {
            if self.exemplars.len() < MAX_EXEMPLARS {
                self.exemplars.push(e);
            }
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "audit = reliability");
        let _ = writeln!(out, "mode = {}", if self.exhaustive { "exhaustive" } else { "sampled" });
        let _ = writeln!(out, "scheme = {}", self.scheme);
        let _ = writeln!(out, "transfers = {}", self.transfers);
        let _ = writeln!(out, "cases = {}", self.cases);
        let _ = writeln!(out, "failures = {}", self.failures);
        let _ = writeln!(out, "outside_cases = {}", self.outside_cases);
        let _ = writeln!(out, "outside_flagged = {}", self.outside_flagged);
        let _ = writeln!(out, "outside_miscorrected = {}", self.outside_miscorrected);
        let _ = writeln!(out, "unexplained = {}", self.unexplained);
        let _ = writeln!(out, "verdict = {}", if self.holds() { "pass" } else { "fail" });
        for e in &self.exemplars {
            let _ = writeln!(out, "exemplar = {e}");
        }
        out
    }
}

type Tally = ReliabilityReport;

fn digits_label(field: &Gf, v: &[Elem]) -> String {
    v.iter().map(|&e| field.format_element(e)).collect::<Vec<_>>().join(",")
}

struct Case<'a> {
    transfer: usize,
    a: &'a MatrixFq,
    left: &'a MatrixFq,
    s: &'a [Elem],
    v: &'a [Elem],
    x: &'a [Elem],
    e: &'a MatrixFq,
    error_rank: usize,
}

fn run_case(inst: &SchemeInstance, case: &Case, tally: &mut Tally) -> Result<()> {
    let field = inst.field();
    let t = inst.params().t;
    let y = case.a.mul(&expand(field, case.x))?.add(case.e)?;
    // same reduction as coherent_decode, with the left inverse cached per transfer matrix
    let x_hat = contract(field, &case.left.mul(&y)?)?;
    let outcome = inst.decode_payload(&x_hat)?;
    let correct = outcome.message() == Some(case.s);
    let label = || {
        format!(
            "transfer={} S={} V={} error_rank={} outcome={}",
            case.transfer,
            digits_label(field, case.s),
            digits_label(field, case.v),
            case.error_rank,
            match &outcome {
                DecodeOutcome::Failed => "failed".to_string(),
                DecodeOutcome::Recovered { message, .. } => format!("wrong:{}", digits_label(field, message)),
            }
        )
    };
    if case.error_rank <= t {
        tally.cases += 1;
        if !correct {
            tally.failures += 1;
            if tally.exemplars.len() < MAX_EXEMPLARS {
                tally.exemplars.push(label());
            }
        }
        return Ok(());
    }
    tally.outside_cases += 1;
    match &outcome {
        DecodeOutcome::Failed => tally.outside_flagged += 1,
        DecodeOutcome::Recovered { .. } if correct => {}
        DecodeOutcome::Recovered { .. } => {
            tally.outside_miscorrected += 1;
            // the decoder can only return a codeword the brute-force decoder would also list
            let full = inst.code().decode(&x_hat, t)?;
            let within = match full.message() {
                Some(u) => {
                    let c = inst.code().encode(u)?;
                    crate::linalg::rank_distance(&expand(field, &c), &expand(field, &x_hat))? <= t
                }
                None => false,
            };
            if !within {
                tally.unexplained += 1;
                if tally.exemplars.len() < MAX_EXEMPLARS {
                    tally.exemplars.push(label());
                }
            }
        }
    }
    Ok(())
}

/// Decodes `Y = A X + E` for the identity and `random_transfers` random
/// rectangular transfer matrices. Exhaustive mode covers every `(S, V)` and
/// every error of rank up to `max_error_rank`.
pub fn reliability_audit<R: Rng + ?Sized>(
    inst: &SchemeInstance,
    options: &ReliabilityOptions,
    rng: &mut R,
) -> Result<ReliabilityReport> {
    let p = inst.params();
    let field = inst.field();
    let base = field.base();
    let m = p.field.m();
    let rows = options.rows.unwrap_or(p.n + 1);
    if rows < p.n {
        return Err(Error::param(format!("transfer matrices need at least n = {} rows", p.n)));
    }
    let max_rank = options.max_error_rank.unwrap_or(p.t);
    let mut report = ReliabilityReport {
        exhaustive: options.mode.is_exhaustive(),
        scheme: scheme_label(inst),
        ..Default::default()
    };

    match options.mode {
        AuditMode::Exhaustive => {
            let (messages, randomness) = enumerate_inputs(inst, options.budget)?;
            let inputs = (messages.len() * randomness.len()) as u128;
            let mut transfers = vec![MatrixFq::identity(base, p.n)];
            for _ in 0..options.random_transfers {
                transfers.push(MatrixFq::random_full_rank(base, rows, p.n, rng));
            }
            let square = enumerate::rank_bounded(base, p.n, m, max_rank, options.budget)?;
            let rect = if options.random_transfers > 0 {
                enumerate::rank_bounded(base, rows, m, max_rank, options.budget)?
            } else {
                Vec::new()
            };
            let total = inputs * (square.len() as u128 + options.random_transfers as u128 * rect.len() as u128);
            check_budget(total, options.budget)?;

            let mut inputs_list = Vec::with_capacity(inputs as usize);
            for s in &messages {
                for v in &randomness {
                    inputs_list.push((s, v, inst.encode_with_randomness(s, v)?));
                }
            }
            report.transfers = transfers.len();
            for (ti, a) in transfers.iter().enumerate() {
                let left = a.left_inverse()?;
                let errors = if ti == 0 { &square } else { &rect };
                let tallies = errors
                    .par_iter()
                    .map(|e| {
                        let mut tally = Tally::default();
                        let error_rank = e.rank();
                        for (s, v, x) in &inputs_list {
                            let case = Case { transfer: ti, a, left: &left, s, v, x, e, error_rank };
                            run_case(inst, &case, &mut tally)?;
                        }
                        Ok(tally)
                    })
                    .collect::<Result<Vec<_>>>()?;
                for t in tallies {
                    report.merge(t);
                }
            }
        }
        AuditMode::Sampled { samples } => {
            check_budget(samples as u128, options.budget)?;
            report.transfers = samples as usize;
            let seeds: Vec<u64> = (0..samples).map(|_| rng.gen()).collect();
            let tallies = seeds
                .into_par_iter()
                .enumerate()
                .map(|(i, seed)| {
                    let mut local = ChaCha8Rng::seed_from_u64(seed);
                    let a = MatrixFq::random_full_rank(base, rows, p.n, &mut local);
                    let left = a.left_inverse()?;
                    let d = MatrixFq::random(base, rows, max_rank, &mut local);
                    let z = MatrixFq::random(base, max_rank, m, &mut local);
                    let e = if max_rank == 0 { MatrixFq::zeros(base, rows, m) } else { d.mul(&z)? };
                    let s = inst.random_message(&mut local);
                    let v = inst.random_randomness(&mut local);
                    let x = inst.encode_with_randomness(&s, &v)?;
                    let mut tally = Tally::default();
                    let case = Case { transfer: i, a: &a, left: &left, s: &s, v: &v, x: &x, e: &e, error_rank: e.rank() };
                    run_case(inst, &case, &mut tally)?;
                    Ok(tally)
                })
                .collect::<Result<Vec<_>>>()?;
            for t in tallies {
                report.merge(t);
            }
        }
    }
    Ok(report)
}

/// Every message whose codeword lies within rank distance `t` of `y`, by full enumeration.
pub fn brute_force_decode(code: &GabidulinCode, y: &[Elem], t: usize, budget: u64) -> Result<Vec<Vec<Elem>>> {
    let field = code.field();
    if y.len() != code.n() {
        return Err(Error::param(format!("received word has {} entries, code length is {}", y.len(), code.n())));
    }
    let target = expand(field, y);
    let mut out = Vec::new();
    for u in all_messages(field, code.k(), budget)? {
        let c = expand(field, &code.encode(&u)?);
        if c.sub(&target)?.rank() <= t {
            out.push(u);
        }
    }
    Ok(out)
}

/// Every message `S` consistent with the lifted observation `Y = A [I | X] + E`
/// for some rank-`n` transfer `A`, some `(S, V)`, and some `E` of rank at most `t`.
pub fn brute_force_noncoherent(inst: &SchemeInstance, y: &MatrixFq, budget: u64) -> Result<Vec<Vec<Elem>>> {
    let p = inst.params();
    let field = inst.field();
    let base: PrimeField = field.base();
    let n = p.n;
    if y.cols() != n + p.field.m() {
        return Err(Error::param("lifted observation has the wrong width"));
    }
    let (messages, randomness) = enumerate_inputs(inst, budget)?;
    let headers = enumerate::rank_bounded(base, y.rows(), n, p.t, budget)?;
    check_budget((messages.len() * randomness.len()) as u128 * headers.len() as u128, budget)?;
    let y_head = y.col_range(0, n);
    let y_pay = y.col_range(n, y.cols());
    let mut xs = Vec::new();
    for (si, s) in messages.iter().enumerate() {
        for v in &randomness {
            xs.push((si, expand(field, &inst.encode_with_randomness(s, v)?)));
        }
    }
    let found: BTreeSet<usize> = headers
        .par_iter()
        .map(|eh| -> Result<BTreeSet<usize>> {
            let mut hits = BTreeSet::new();
            let a = y_head.sub(eh)?;
            if a.rank() != n {
                return Ok(hits);
            }
            for (si, x) in &xs {
                if hits.contains(si) {
                    continue;
                }
                let ep = y_pay.sub(&a.mul(x)?)?;
                if eh.hstack(&ep)?.rank() <= p.t {
                    hits.insert(*si);
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(found.into_iter().map(|i| messages[i].clone()).collect())
}
