//! Coset coding for secrecy, and the combined scheme that is both
//! `t`-error-correcting and secret against `mu` observations.
//!
//! The combined encoder draws `V` uniformly from GF(q^m)^mu and sends
//! `X = G0^T [S; V]`, where `G0` generates an `[n, k + mu]` Gabidulin code.
//! Its last `mu` rows generate an `[n, mu]` Gabidulin subcode, which is what
//! makes the eavesdropper's view independent of `S`. Equivalently
//! `X = T [0; S; V]` for an invertible `T` whose transpose ends in `G0`, the
//! plain coset-coding form with message `[0; S]`.
//!
//! Secrecy holds only when `V` is uniform and fresh for every transmission.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldParams, Gf};
use crate::linalg::{self, contract, MatrixFq, MatrixFqm};
use crate::rankmetric::{self, DecodeOutcome, GabidulinCode};

/// `(q, m, n, t, mu, k)` plus an optional override of the evaluation points.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub field: FieldParams,
    /// Packets per generation.
    pub n: usize,
    /// Maximum number of injected error packets.
    pub t: usize,
    /// Maximum number of observed links.
    pub mu: usize,
    /// Message size in packets.
    pub k: usize,
    pub points: Option<Vec<Elem>>,
}

impl SchemeParams {
    pub fn new(field: FieldParams, n: usize, t: usize, mu: usize, k: usize) -> Self {
        Self { field, n, t, mu, k, points: None }
    }

    /// Binary field with the shipped modulus.
    pub fn binary(m: usize, n: usize, t: usize, mu: usize, k: usize) -> Result<Self> {
        Ok(Self::new(FieldParams::with_default_modulus(2, m)?, n, t, mu, k))
    }

    pub fn max_rate(&self) -> i64 {
        self.n as i64 - 2 * self.t as i64 - self.mu as i64
    }

    /// Rejects parameter sets outside `0 < k <= n - 2t - mu`, `m >= n`.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::EmptyMessage);
        }
        if self.k as i64 > self.max_rate() {
            return Err(Error::RateBound { k: self.k, bound: self.max_rate() });
        }
        if self.field.m() < self.n {
            return Err(Error::PacketLength { m: self.field.m(), n: self.n });
        }
        Ok(())
    }

    /// Minimum rank distance of the outer code, `n - k - mu + 1`.
    pub fn outer_distance(&self) -> usize {
        self.n + 1 - self.k - self.mu
    }

    /// Bits carried per transmission, `k m log2 q`.
    pub fn rate_bits(&self) -> f64 {
        (self.k * self.field.m()) as f64 * (self.field.q() as f64).log2()
    }
}

/// A built scheme. Immutable; encoding takes the caller's RNG.
#[derive(Clone, Debug)]
pub struct SchemeInstance {
    params: SchemeParams,
    field: Gf,
    code: GabidulinCode,
    g0: MatrixFqm,
    transform: MatrixFqm,
    mrd: bool,
}

impl SchemeInstance {
    pub fn build(params: SchemeParams) -> Result<Self> {
        params.validate()?;
        let field = Gf::new(params.field.clone());
        let dim = params.k + params.mu;
        let code = match &params.points {
            Some(p) => {
                if p.len() != params.n {
                    return Err(Error::param(format!(
                        "{} evaluation points given for n = {}",
                        p.len(),
                        params.n
                    )));
                }
                GabidulinCode::new(field.clone(), p.clone(), dim)?
            }
            None => GabidulinCode::with_default_points(field.clone(), params.n, dim)?,
        };
        let g0 = code.generator_matrix();
        Self::assemble(params, field, code, g0, true)
    }

    /// A deliberately insecure variant for negative controls: the first row of
    /// the randomness generator `G` is replaced by the all-ones row, so the code
    /// generated by `G` contains a rank-one codeword and is not MRD.
    pub fn build_non_mrd(params: SchemeParams) -> Result<Self> {
        let good = Self::build(params)?;
        if good.params.mu == 0 {
            return Err(Error::param("a non-MRD variant needs mu >= 1"));
        }
        let mut g0 = good.g0.clone();
        for j in 0..good.params.n {
            g0.set(good.params.k, j, Elem::ONE);
        }
        if g0.rank() != g0.rows() {
            return Err(Error::domain("non-MRD generator is rank deficient"));
        }
        Self::assemble(good.params, good.field, good.code, g0, false)
    }

    fn assemble(params: SchemeParams, field: Gf, code: GabidulinCode, g0: MatrixFqm, mrd: bool) -> Result<Self> {
        // T^T = [completion; G0]
        let completion = g0.complete_rows();
        let transform = completion.vstack(&g0)?.transpose();
        if transform.rank() != params.n {
            return Err(Error::domain("could not complete G0 to an invertible matrix"));
        }
        Ok(Self { params, field, code, g0, transform, mrd })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    /// The outer `[n, k + mu]` Gabidulin code.
    pub fn code(&self) -> &GabidulinCode {
        &self.code
    }

    pub fn g0(&self) -> &MatrixFqm {
        &self.g0
    }

    /// Last `mu` rows of `G0`.
    pub fn randomness_generator(&self) -> MatrixFqm {
        let p = &self.params;
        self.g0.row_range(p.k, p.k + p.mu)
    }

    pub fn transform(&self) -> &MatrixFqm {
        &self.transform
    }

    pub fn is_mrd(&self) -> bool {
        self.mrd
    }

    pub fn random_randomness<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Elem> {
        random_column(&self.field, self.params.mu, rng)
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Elem> {
        random_column(&self.field, self.params.k, rng)
    }

    /// `X = G0^T [S; V]` with fresh uniform `V`.
    pub fn encode<R: Rng + ?Sized>(&self, s: &[Elem], rng: &mut R) -> Result<Vec<Elem>> {
        let v = self.random_randomness(rng);
        self.encode_with_randomness(s, &v)
    }

    /// Deterministic encoding with caller-supplied `V`. Intended for tests and audits:
    /// reusing `V` across transmissions voids secrecy.
    pub fn encode_with_randomness(&self, s: &[Elem], v: &[Elem]) -> Result<Vec<Elem>> {
        let p = &self.params;
        if s.len() != p.k {
            return Err(Error::param(format!("message has {} packets, expected {}", s.len(), p.k)));
        }
        if v.len() != p.mu {
            return Err(Error::param(format!("randomness has {} packets, expected {}", v.len(), p.mu)));
        }
        let mut u = s.to_vec();
        u.extend_from_slice(v);
        Ok(self.g0.transpose().mul(&MatrixFqm::column(self.field.clone(), &u))?.col(0))
    }

    /// The same encoding written as `T [0; S; V]`.
    pub fn encode_via_transform(&self, s: &[Elem], v: &[Elem]) -> Result<Vec<Elem>> {
        let p = &self.params;
        if s.len() != p.k || v.len() != p.mu {
            return Err(Error::param("message or randomness has the wrong length"));
        }
        let mut padded = vec![Elem::ZERO; p.n - p.k - p.mu];
        padded.extend_from_slice(s);
        padded.extend_from_slice(v);
        Ok(self.transform.mul(&MatrixFqm::column(self.field.clone(), &padded))?.col(0))
    }

    fn require_mrd(&self) -> Result<()> {
        if self.mrd {
            Ok(())
        } else {
            Err(Error::domain("decoding is undefined for the non-MRD negative control"))
        }
    }

    fn truncate(&self, outcome: DecodeOutcome) -> DecodeOutcome {
        match outcome {
            DecodeOutcome::Recovered { mut message, error_rank } => {
                message.truncate(self.params.k);
                DecodeOutcome::Recovered { message, error_rank }
            }
            DecodeOutcome::Failed => DecodeOutcome::Failed,
        }
    }

    /// Decodes a square-reduced observation `expand(X) + E` with `rank E <= t`.
    pub fn decode_payload(&self, x_hat: &[Elem]) -> Result<DecodeOutcome> {
        self.require_mrd()?;
        Ok(self.truncate(self.code.decode(x_hat, self.params.t)?))
    }

    /// Recovers `S` from `Y = A expand(X) + D Z` given the `N x n` transfer matrix `A` of rank `n`.
    ///
    /// `Y` is reduced to `A^+ Y = expand(X) + A^+ D Z` with a left inverse `A^+`;
    /// left multiplication cannot raise the error rank.
    pub fn coherent_decode(&self, y: &MatrixFq, a: &MatrixFq) -> Result<DecodeOutcome> {
        let p = &self.params;
        if a.cols() != p.n || a.rows() != y.rows() {
            return Err(Error::param(format!(
                "transfer matrix {:?} does not match observation {:?}",
                a.shape(),
                y.shape()
            )));
        }
        let reduced = a.left_inverse()?.mul(y)?;
        self.decode_payload(&contract(&self.field, &reduced)?)
    }

    /// Recovers `S` from the erasure channel `Y' = A' expand(X)` with `A'` full rank `(n - 2t) x n`.
    pub fn erasure_decode(&self, y_prime: &MatrixFq, a_prime: &MatrixFq) -> Result<DecodeOutcome> {
        self.require_mrd()?;
        let y = contract(&self.field, y_prime)?;
        Ok(self.truncate(self.code.erasure_decode(a_prime, &y, 2 * self.params.t)?))
    }
}

fn random_column<R: Rng + ?Sized>(field: &Gf, len: usize, rng: &mut R) -> Vec<Elem> {
    (0..len)
        .map(|_| field.element(rng.gen_range(0..field.order())).expect("in range"))
        .collect()
}

/// Plain coset coding: the message is a syndrome `S = H X` and `X` is uniform over its coset.
#[derive(Clone, Debug)]
pub struct CosetCoder {
    field: Gf,
    parity_check: MatrixFqm,
    transform: MatrixFqm,
}

impl CosetCoder {
    /// `h` is a full-rank `k x n` parity-check matrix.
    pub fn new(h: MatrixFqm) -> Result<Self> {
        if h.rank() != h.rows() {
            return Err(Error::domain("parity-check matrix must have full row rank"));
        }
        // T^-1 = [H; completion]
        let t_inv = h.vstack(&h.complete_rows())?;
        let transform = t_inv.inverse()?;
        Ok(Self { field: h.field().clone(), parity_check: h, transform })
    }

    /// Coset coding over the `[n, n - k]` Gabidulin code, message length `k`.
    pub fn gabidulin(field: Gf, n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::param("message length must be below n"));
        }
        let code = GabidulinCode::with_default_points(field, n, n - k)?;
        Self::new(code.parity_check_matrix())
    }

    pub fn parity_check(&self) -> &MatrixFqm {
        &self.parity_check
    }

    pub fn transform(&self) -> &MatrixFqm {
        &self.transform
    }

    pub fn message_len(&self) -> usize {
        self.parity_check.rows()
    }

    pub fn n(&self) -> usize {
        self.parity_check.cols()
    }

    pub fn encode<R: Rng + ?Sized>(&self, s: &[Elem], rng: &mut R) -> Result<Vec<Elem>> {
        let v = random_column(&self.field, self.n() - self.message_len(), rng);
        self.encode_with_randomness(s, &v)
    }

    /// `X = T [S; V]`.
    pub fn encode_with_randomness(&self, s: &[Elem], v: &[Elem]) -> Result<Vec<Elem>> {
        if s.len() != self.message_len() || s.len() + v.len() != self.n() {
            return Err(Error::param("message or randomness has the wrong length"));
        }
        let mut u = s.to_vec();
        u.extend_from_slice(v);
        Ok(self.transform.mul(&MatrixFqm::column(self.field.clone(), &u))?.col(0))
    }

    /// The syndrome `H X`.
    pub fn decode(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        Ok(self.parity_check.mul(&MatrixFqm::column(self.field.clone(), x))?.col(0))
    }
}

/// Outcome of the MRD test on the randomness rows of `T^T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofOfSecrecy {
    pub holds: bool,
    /// Exhaustive minimum rank distance of the designated rows; `None` when there are none.
    pub distance: Option<usize>,
    pub required: usize,
}

/// Checks whether the last `n - message_len` rows of `T^T` generate an MRD code.
pub fn secrecy_certificate(transform: &MatrixFqm, message_len: usize, budget: u64) -> Result<ProofOfSecrecy> {
    let n = transform.rows();
    if transform.cols() != n {
        return Err(Error::param("T must be square"));
    }
    if message_len > n {
        return Err(Error::param("message length exceeds n"));
    }
    if transform.rank() != n {
        return Err(Error::domain("T is singular"));
    }
    let rows = n - message_len;
    let required = n - rows + 1;
    if rows == 0 {
        return Ok(ProofOfSecrecy { holds: true, distance: None, required });
    }
    let designated = transform.transpose().row_range(message_len, n);
    let distance = rankmetric::linear_min_rank_distance(&designated, budget)?;
    Ok(ProofOfSecrecy { holds: distance == required, distance: Some(distance), required })
}

/// All `q^(mk)` messages paired with all `q^(m mu)` randomness values as index pairs;
/// a convenience for exhaustive sweeps.
pub fn enumerate_inputs(inst: &SchemeInstance, budget: u64) -> Result<(Vec<Vec<Elem>>, Vec<Vec<Elem>>)> {
    let p = inst.params();
    let msgs = rankmetric::all_messages(inst.field(), p.k, budget)?;
    let vs = rankmetric::all_messages(inst.field(), p.mu, budget)?;
    crate::error::check_budget(msgs.len() as u128 * vs.len() as u128, budget)?;
    Ok((msgs, vs))
}

/// `A expand(X)` as an `N x m` matrix.
pub fn transmit_clean(inst: &SchemeInstance, a: &MatrixFq, x: &[Elem]) -> Result<MatrixFq> {
    a.mul(&linalg::expand(inst.field(), x))
}
