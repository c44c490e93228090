//! The adversarial channel `Y = A X + D Z`, `W = B X`, and its noncoherent
//! variant where the source prepends identity headers.
//!
//! Noncoherent decoding puts the received matrix in reduced row-echelon form
//! and splits it into a header-aligned part, erasure directions (missing
//! header pivots) and deviation rows (pivots in the payload). Erasures are
//! removed by projecting onto the left kernel of their column block, which
//! keeps the Gabidulin structure with projected evaluation points. Deviations
//! are removed by applying the subspace polynomial of their row space, which
//! raises the code dimension by their count. What remains is a plain
//! rank-error decoding problem.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Elem, Gf};
use crate::linalg::{self, contract, enumerate, expand, MatrixFq};
use crate::rankmetric::{solve_key_equation, DecodeOutcome, LinPoly};
use crate::secure_scheme::{SchemeInstance, SchemeParams};

/// One use of the channel. `z` rows are the injected packets; `d` routes them to the destination.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub a: MatrixFq,
    pub d: MatrixFq,
    pub z: MatrixFq,
    pub b: MatrixFq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionResult {
    pub y: MatrixFq,
    pub w: MatrixFq,
}

impl ChannelRealization {
    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    /// Checks shapes and the adversary limits. `width` is the packet length in symbols.
    pub fn validate(&self, params: &SchemeParams, width: usize) -> Result<()> {
        let n = params.n;
        let rows = self.a.rows();
        if self.a.cols() != n {
            return Err(Error::param(format!("transfer matrix must have {n} columns")));
        }
        if self.a.rank() != n {
            return Err(Error::domain("transfer matrix does not have rank n"));
        }
        if self.d.rows() != rows || self.d.cols() != self.z.rows() {
            return Err(Error::param(format!(
                "error transfer {:?} does not match {rows} rows and {} error packets",
                self.d.shape(),
                self.z.rows()
            )));
        }
        if self.z.rows() > params.t {
            return Err(Error::param(format!("{} error packets exceed t = {}", self.z.rows(), params.t)));
        }
        if self.z.rows() > 0 && self.z.cols() != width {
            return Err(Error::param(format!("error packets must have {width} symbols")));
        }
        if self.b.cols() != n || self.b.rows() > params.mu {
            return Err(Error::param(format!(
                "eavesdropper matrix {:?} must have n = {n} columns and at most mu = {} rows",
                self.b.shape(),
                params.mu
            )));
        }
        Ok(())
    }

    /// `D Z`, the error as seen at the destination.
    pub fn error(&self, width: usize) -> Result<MatrixFq> {
        if self.z.rows() == 0 {
            return Ok(MatrixFq::zeros(*self.a.field(), self.a.rows(), width));
        }
        self.d.mul(&self.z)
    }
}

/// Sends the packet matrix `x` (`n` rows) through the realization.
pub fn transmit_matrix(x: &MatrixFq, real: &ChannelRealization) -> Result<TransmissionResult> {
    let y = real.a.mul(x)?.add(&real.error(x.cols())?)?;
    let w = real.b.mul(x)?;
    Ok(TransmissionResult { y, w })
}

/// Sends the payload column `x` over GF(q^m) through the realization.
pub fn transmit(field: &Gf, x: &[Elem], real: &ChannelRealization) -> Result<TransmissionResult> {
    transmit_matrix(&expand(field, x), real)
}

/// How the simulator picks a realization.
#[derive(Clone, Debug)]
pub enum AdversaryMode {
    /// Uniform `D`, `Z` with `t` error packets, full-rank `B` with `mu` rows.
    Random,
    /// A realization read from a file.
    Fixed(Box<ChannelRealization>),
}

/// Draws a realization with `rows >= n` destination rows and packets of `width` symbols.
pub fn sample_realization<R: Rng + ?Sized>(
    params: &SchemeParams,
    rows: usize,
    width: usize,
    mode: &AdversaryMode,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if rows < params.n {
        return Err(Error::param(format!("need at least n = {} destination rows", params.n)));
    }
    let base = crate::gf::PrimeField::new(params.field.q())?;
    let real = match mode {
        AdversaryMode::Random => ChannelRealization {
            a: MatrixFq::random_full_rank(base, rows, params.n, rng),
            d: MatrixFq::random(base, rows, params.t, rng),
            z: MatrixFq::random(base, params.t, width, rng),
            b: if params.mu == 0 {
                MatrixFq::zeros(base, 0, params.n)
            } else {
                MatrixFq::random_full_rank(base, params.mu, params.n, rng)
            },
        },
        AdversaryMode::Fixed(real) => (**real).clone(),
    };
    real.validate(params, width)?;
    Ok(real)
}

/// Every effective error of rank at most `t` and one eavesdropper matrix per
/// `mu`-dimensional row space.
#[derive(Clone, Debug)]
pub struct ExhaustiveAdversary {
    pub errors: Vec<MatrixFq>,
    pub eavesdroppers: Vec<MatrixFq>,
}

pub fn exhaustive_adversary(params: &SchemeParams, rows: usize, width: usize, budget: u64) -> Result<ExhaustiveAdversary> {
    let base = crate::gf::PrimeField::new(params.field.q())?;
    let errors = enumerate::rank_bounded(base, rows, width, params.t, budget)?;
    let eavesdroppers = if params.mu == 0 {
        vec![MatrixFq::zeros(base, 0, params.n)]
    } else {
        enumerate::full_rank_rref(base, params.mu, params.n, budget)?
    };
    Ok(ExhaustiveAdversary { errors, eavesdroppers })
}

/// `[I_n | expand(x)]`.
pub fn lift(field: &Gf, x: &[Elem]) -> MatrixFq {
    let payload = expand(field, x);
    MatrixFq::identity(field.base(), x.len()).hstack(&payload).expect("same row count")
}

/// Recovers `S` from `Y = A [I | X] + E` without knowing `A`, provided `A` has
/// rank `n` and `E` has rank at most `t`.
pub fn noncoherent_decode(inst: &SchemeInstance, y: &MatrixFq) -> Result<DecodeOutcome> {
    if !inst.is_mrd() {
        return Err(Error::domain("decoding is undefined for the non-MRD negative control"));
    }
    let params = inst.params();
    let field = inst.field();
    let (n, m) = (params.n, field.m());
    if y.cols() != n + m {
        return Err(Error::param(format!(
            "lifted observation must have {} columns, got {}",
            n + m,
            y.cols()
        )));
    }
    let base = field.base();
    let rref = y.rref();

    let mut header = MatrixFq::zeros(base, n, n);
    let mut payload = MatrixFq::zeros(base, n, m);
    let mut deviations = Vec::new();
    let mut has_pivot = vec![false; n];
    for (row, &pc) in rref.pivots.iter().enumerate() {
        let r = rref.matrix.row(row);
        if pc < n {
            has_pivot[pc] = true;
            for c in 0..n {
                header.set(pc, c, r[c]);
            }
            for c in 0..m {
                payload.set(pc, c, r[n + c]);
            }
        } else {
            deviations.push(field.from_digits(&r[n..])?);
        }
    }
    let erased: Vec<usize> = (0..n).filter(|&c| !has_pivot[c]).collect();

    // header = I + L I_U^T, with L supported on the erased columns
    let identity = MatrixFq::identity(base, n);
    let l = header.sub(&identity)?.select_cols(&erased);
    let projection = if erased.is_empty() { identity } else { l.left_null_space() };

    let points = linalg::apply(field, &projection, inst.code().points())?;
    let projected = contract(field, &projection.mul(&payload)?)?;
    let sigma = LinPoly::subspace(field, &deviations);
    let received: Vec<Elem> = projected.iter().map(|&r| sigma.eval(field, r)).collect();

    let length = points.len();
    let dim = inst.code().k() + deviations.len();
    if dim > length {
        return Ok(DecodeOutcome::Failed);
    }
    let tau = (length - dim) / 2;
    let Some(composed) = solve_key_equation(field, &points, &received, dim, tau) else {
        return Ok(DecodeOutcome::Failed);
    };
    let Some(message_poly) = sigma.left_divide(field, &composed) else {
        return Ok(DecodeOutcome::Failed);
    };
    if message_poly.q_degree() >= inst.code().k() {
        return Ok(DecodeOutcome::Failed);
    }
    let fitted: Vec<Elem> = points.iter().map(|&g| composed.eval(field, g)).collect();
    let error_rank = expand(field, &received).sub(&expand(field, &fitted))?.rank();
    if error_rank > tau {
        return Ok(DecodeOutcome::Failed);
    }
    let mut message = message_poly.coeffs().to_vec();
    message.resize(params.k, Elem::ZERO);
    message.truncate(params.k);
    Ok(DecodeOutcome::Recovered { message, error_rank })
}

/// Achieved noncoherent rate: `k` packets per `n + m`-symbol-wide transmission, in bits per symbol slot.
pub fn lifted_rate(params: &SchemeParams) -> f64 {
    let m = params.field.m();
    (params.k * m) as f64 / (params.n * (params.n + m)) as f64
}
