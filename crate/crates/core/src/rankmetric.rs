//! Rank-metric codes: the rank Singleton bound, exhaustive minimum rank
//! distance, and Gabidulin codes with error and erasure decoding.
//!
//! Codewords are columns over GF(q^m). A message `u` of length `k` is the
//! coefficient list of the linearized polynomial `f(z) = sum_i u_i z^(q^i)`,
//! and its codeword is `(f(g_0), ..., f(g_{n-1}))`, which is `G^T u` for the
//! generator `G[i][j] = g_j^(q^i)`.
//!
//! Decoding solves the key equation `V(y_j) = N(g_j)` for a nonzero pair of
//! linearized polynomials with `deg_q V <= tau` and `deg_q N < k + tau`, then
//! recovers `f` by left division `N = V o f`. Any nonzero solution works when
//! the error has rank at most `tau` and `k + 2 tau <= n`.

use num_bigint::BigUint;

use crate::error::{check_budget, Error, Result};
use crate::gf::{Elem, Gf};
use crate::linalg::{self, expand, MatrixFq, MatrixFqm};

/// Default cap on the number of codewords enumerated by exhaustive checks.
pub const DEFAULT_CODEWORD_BUDGET: u64 = 1 << 20;

/// A linearized polynomial `sum_i c_i z^(q^i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinPoly {
    coeffs: Vec<Elem>,
}

impl LinPoly {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Elem::ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Elem::ZERO);
        }
        Self { coeffs }
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        Self { coeffs: vec![Elem::ONE] }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == Elem::ZERO)
    }

    /// q-degree; zero for the zero polynomial.
    pub fn q_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, field: &Gf, z: Elem) -> Elem {
        self.coeffs.iter().enumerate().fold(Elem::ZERO, |acc, (i, &c)| {
            if c == Elem::ZERO {
                acc
            } else {
                field.add(acc, field.mul(c, field.frobenius(z, i)))
            }
        })
    }

    /// `self o inner`, i.e. `z -> self(inner(z))`.
    pub fn compose(&self, field: &Gf, inner: &LinPoly) -> LinPoly {
        let mut out = vec![Elem::ZERO; self.coeffs.len() + inner.coeffs.len() - 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            if a == Elem::ZERO {
                continue;
            }
            for (i, &b) in inner.coeffs.iter().enumerate() {
                let t = field.mul(a, field.frobenius(b, j));
                out[i + j] = field.add(out[i + j], t);
            }
        }
        LinPoly::new(out)
    }

    /// Finds `f` with `self o f = target`, if one exists.
    pub fn left_divide(&self, field: &Gf, target: &LinPoly) -> Option<LinPoly> {
        if self.is_zero() {
            return None;
        }
        let a = self.q_degree();
        let lead_inv = field.inv(self.coeffs[a]).ok()?;
        if target.is_zero() {
            return Some(LinPoly::new(vec![Elem::ZERO]));
        }
        if target.q_degree() < a {
            return None;
        }
        let len = target.q_degree() - a + 1;
        let mut f = vec![Elem::ZERO; len];
        // coefficient of z^(q^(a+l)) in self o f is sum_j s_j f_{a+l-j}^(q^j)
        for l in (0..len).rev() {
            let mut rhs = target.coeffs[a + l];
            for j in 0..a {
                let idx = a + l - j;
                if idx < len {
                    rhs = field.sub(rhs, field.mul(self.coeffs[j], field.frobenius(f[idx], j)));
                }
            }
            f[l] = field.frobenius_inv(field.mul(rhs, lead_inv), a);
        }
        let f = LinPoly::new(f);
        (self.compose(field, &f) == *target).then_some(f)
    }

    /// The monic linearized polynomial whose roots are exactly the GF(q)-span of `basis`.
    /// `basis` must be linearly independent over GF(q).
    pub fn subspace(field: &Gf, basis: &[Elem]) -> LinPoly {
        let mut s = LinPoly::identity();
        for &b in basis {
            // s'(z) = s(z)^q - s(b)^(q-1) s(z)
            let sb = s.eval(field, b);
            let factor = field.pow(sb, field.q() as u64 - 1);
            let mut next = vec![Elem::ZERO; s.coeffs.len() + 1];
            for (i, &c) in s.coeffs.iter().enumerate() {
                next[i + 1] = field.add(next[i + 1], field.frobenius(c, 1));
                next[i] = field.sub(next[i], field.mul(factor, c));
            }
            s = LinPoly::new(next);
        }
        s
    }
}

/// Result of a decoding attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// The unique message within the decoding radius and the rank of the error that was removed.
    Recovered { message: Vec<Elem>, error_rank: usize },
    /// No codeword within the decoding radius.
    Failed,
}

impl DecodeOutcome {
    pub fn message(&self) -> Option<&[Elem]> {
        match self {
            DecodeOutcome::Recovered { message, .. } => Some(message),
            DecodeOutcome::Failed => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, DecodeOutcome::Failed)
    }
}

/// Solves the key equation for evaluation points `points` and received values `received`.
/// Returns the message polynomial of q-degree `< k` when one is found.
pub(crate) fn solve_key_equation(
    field: &Gf,
    points: &[Elem],
    received: &[Elem],
    k: usize,
    tau: usize,
) -> Option<LinPoly> {
    let n = points.len();
    debug_assert_eq!(received.len(), n);
    debug_assert!(k + 2 * tau <= n);
    let unknowns = (tau + 1) + (k + tau);
    let mut sys = MatrixFqm::zeros(field.clone(), n, unknowns);
    for (i, (&g, &y)) in points.iter().zip(received).enumerate() {
        for j in 0..=tau {
            sys.set(i, j, field.frobenius(y, j));
        }
        for l in 0..k + tau {
            sys.set(i, tau + 1 + l, field.neg(field.frobenius(g, l)));
        }
    }
    let kernel = sys.null_space();
    if kernel.cols() == 0 {
        return None;
    }
    let sol = kernel.col(0);
    let v = LinPoly::new(sol[..=tau].to_vec());
    let num = LinPoly::new(sol[tau + 1..].to_vec());
    let f = v.left_divide(field, &num)?;
    (f.q_degree() < k).then_some(f)
}

/// An `[n, k]` Gabidulin code over GF(q^m).
#[derive(Clone, Debug)]
pub struct GabidulinCode {
    field: Gf,
    k: usize,
    points: Vec<Elem>,
}

impl GabidulinCode {
    /// `points` must be linearly independent over GF(q); requires `m >= n` and `0 < k <= n`.
    pub fn new(field: Gf, points: Vec<Elem>, k: usize) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::param("code length must be positive"));
        }
        if field.m() < n {
            return Err(Error::PacketLength { m: field.m(), n });
        }
        if k == 0 || k > n {
            return Err(Error::param(format!("dimension k = {k} must satisfy 0 < k <= n = {n}")));
        }
        if expand(&field, &points).rank() != n {
            return Err(Error::param("evaluation points are not linearly independent over GF(q)"));
        }
        Ok(Self { field, k, points })
    }

    /// Evaluation points `g_i = x^i`.
    pub fn with_default_points(field: Gf, n: usize, k: usize) -> Result<Self> {
        if field.m() < n {
            return Err(Error::PacketLength { m: field.m(), n });
        }
        let points = default_points(&field, n);
        Self::new(field, points, k)
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    /// Designed minimum rank distance `n - k + 1`.
    pub fn designed_distance(&self) -> usize {
        self.n() - self.k + 1
    }

    /// `G[i][j] = g_j^(q^i)`, shape `k x n`.
    pub fn generator_matrix(&self) -> MatrixFqm {
        let n = self.n();
        let mut g = MatrixFqm::zeros(self.field.clone(), self.k, n);
        for i in 0..self.k {
            for (j, &p) in self.points.iter().enumerate() {
                g.set(i, j, self.field.frobenius(p, i));
            }
        }
        g
    }

    /// A basis of the dual code as rows, shape `(n - k) x n`, so `G H^T = 0`.
    pub fn parity_check_matrix(&self) -> MatrixFqm {
        self.generator_matrix().null_space().transpose()
    }

    /// The Gabidulin subcode generated by rows `start..start + len` of the generator.
    pub fn row_subcode(&self, start: usize, len: usize) -> Result<GabidulinCode> {
        if start + len > self.k {
            return Err(Error::param("row range exceeds the generator"));
        }
        let points = self.points.iter().map(|&p| self.field.frobenius(p, start)).collect();
        GabidulinCode::new(self.field.clone(), points, len)
    }

    /// `G^T u`.
    pub fn encode(&self, u: &[Elem]) -> Result<Vec<Elem>> {
        if u.len() != self.k {
            return Err(Error::param(format!(
                "message has length {}, code dimension is {}",
                u.len(),
                self.k
            )));
        }
        let f = LinPoly::new(u.to_vec());
        Ok(self.points.iter().map(|&g| f.eval(&self.field, g)).collect())
    }

    /// Corrects an error of rank at most `t`; requires `2t <= n - k`.
    pub fn decode(&self, y: &[Elem], t: usize) -> Result<DecodeOutcome> {
        let n = self.n();
        if y.len() != n {
            return Err(Error::param(format!("received word has length {}, expected {n}", y.len())));
        }
        if 2 * t > n - self.k {
            return Err(Error::param(format!(
                "cannot correct rank {t} errors with minimum distance {}",
                self.designed_distance()
            )));
        }
        let Some(f) = solve_key_equation(&self.field, &self.points, y, self.k, t) else {
            return Ok(DecodeOutcome::Failed);
        };
        let mut message = f.coeffs().to_vec();
        message.resize(self.k, Elem::ZERO);
        let c = self.encode(&message)?;
        let error_rank = expand(&self.field, y).sub(&expand(&self.field, &c))?.rank();
        if error_rank > t {
            return Ok(DecodeOutcome::Failed);
        }
        Ok(DecodeOutcome::Recovered { message, error_rank })
    }

    /// Recovers `u` from `A' G^T u` where `A'` is a full-rank `(n - rho) x n` matrix over GF(q).
    pub fn erasure_decode(&self, a_prime: &MatrixFq, y_prime: &[Elem], rho: usize) -> Result<DecodeOutcome> {
        let n = self.n();
        if rho > n - self.k {
            return Err(Error::param(format!(
                "rank deficiency {rho} exceeds n - k = {}",
                n - self.k
            )));
        }
        if a_prime.shape() != (n - rho, n) {
            return Err(Error::param(format!(
                "transfer matrix must be {}x{n}, got {:?}",
                n - rho,
                a_prime.shape()
            )));
        }
        if y_prime.len() != n - rho {
            return Err(Error::param("observation length does not match transfer matrix"));
        }
        if a_prime.field().q() != self.field.q() {
            return Err(Error::param("base field mismatch"));
        }
        if a_prime.rank() != n - rho {
            return Err(Error::domain("transfer matrix is not full rank"));
        }
        let system = linalg::embed(&self.field, a_prime).mul(&self.generator_matrix().transpose())?;
        let rhs = MatrixFqm::column(self.field.clone(), y_prime);
        match system.solve(&rhs) {
            Ok(u) => Ok(DecodeOutcome::Recovered { message: u.col(0), error_rank: 0 }),
            Err(Error::Inconsistent) => Ok(DecodeOutcome::Failed),
            Err(e) => Err(e),
        }
    }

    /// Exact minimum rank distance, by enumerating all nonzero codewords.
    pub fn min_rank_distance(&self, budget: u64) -> Result<usize> {
        linear_min_rank_distance(&self.generator_matrix(), budget)
    }
}

pub fn default_points(field: &Gf, n: usize) -> Vec<Elem> {
    let x = field.generator();
    (0..n).map(|i| field.pow(x, i as u64)).collect()
}

/// All `q^(mk)` messages of length `k`, in index order.
pub fn all_messages(field: &Gf, k: usize, budget: u64) -> Result<Vec<Vec<Elem>>> {
    let order = field.order() as u128;
    let total = order.checked_pow(k as u32).unwrap_or(u128::MAX);
    check_budget(total, budget)?;
    Ok((0..total as u64).map(|i| message_from_index(field, k, i)).collect())
}

pub fn message_from_index(field: &Gf, k: usize, mut idx: u64) -> Vec<Elem> {
    let order = field.order() as u64;
    (0..k)
        .map(|_| {
            let e = field.element((idx % order) as u32).expect("in range");
            idx /= order;
            e
        })
        .collect()
}

/// Minimum rank of `G^T u` over nonzero `u`, for an arbitrary generator `G` (rows over GF(q^m)).
pub fn linear_min_rank_distance(generator: &MatrixFqm, budget: u64) -> Result<usize> {
    let field = generator.field();
    let k = generator.rows();
    let order = field.order() as u128;
    let total = order.checked_pow(k as u32).unwrap_or(u128::MAX);
    check_budget(total, budget)?;
    if total < 2 {
        return Err(Error::param("code has fewer than two codewords"));
    }
    let gt = generator.transpose();
    let mut best = usize::MAX;
    for idx in 1..total as u64 {
        let u = message_from_index(field, k, idx);
        let c = gt.mul(&MatrixFqm::column(field.clone(), &u))?.col(0);
        best = best.min(expand(field, &c).rank());
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// Exact minimum rank distance over distinct pairs of an arbitrary set of matrices.
pub fn min_rank_distance_exhaustive(codewords: &[MatrixFq], budget: u64) -> Result<usize> {
    if codewords.len() < 2 {
        return Err(Error::param("need at least two codewords"));
    }
    let n = codewords.len() as u128;
    check_budget(n * (n - 1) / 2, budget)?;
    let mut best = usize::MAX;
    for (i, a) in codewords.iter().enumerate() {
        for b in &codewords[i + 1..] {
            if a == b {
                continue;
            }
            best = best.min(linalg::rank_distance(a, b)?);
        }
    }
    if best == usize::MAX {
        return Err(Error::param("set has fewer than two distinct codewords"));
    }
    Ok(best)
}

/// `q^(max(n, m) * (min(n, m) - d + 1))`.
pub fn singleton_bound(n: usize, m: usize, d: usize, q: u32) -> Result<BigUint> {
    let lo = n.min(m);
    if d == 0 || d > lo {
        return Err(Error::param(format!("distance {d} must satisfy 1 <= d <= {lo}")));
    }
    let exp = n.max(m) * (lo - d + 1);
    Ok(BigUint::from(q).pow(exp as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldParams;
    use crate::linalg::enumerate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf8() -> Gf {
        Gf::new(FieldParams::new(2, 3, vec![1, 1, 0, 1]).unwrap())
    }

    #[test]
    fn generator_rows_are_frobenius_powers() {
        let f = gf8();
        let code = GabidulinCode::with_default_points(f.clone(), 3, 2).unwrap();
        let g = code.generator_matrix();
        let x = f.parse_element("010").unwrap();
        let x2 = f.parse_element("001").unwrap();
        assert_eq!(g.row(0), &[Elem::ONE, x, x2]);
        // x^4 = x^2 + x mod x^3 + x + 1
        assert_eq!(g.row(1), &[Elem::ONE, x2, f.parse_element("011").unwrap()]);
        assert_eq!(g.rank(), 2);
        let k1 = GabidulinCode::with_default_points(f.clone(), 3, 1).unwrap();
        assert_eq!(k1.encode(&[Elem::ONE]).unwrap(), vec![Elem::ONE, x, x2]);
        assert!(k1.encode(&[Elem::ZERO]).unwrap().iter().all(|&c| c == Elem::ZERO));
        assert!(k1.encode(&[Elem::ONE, Elem::ONE]).is_err());
    }

    #[test]
    fn pairwise_distance_of_small_code() {
        let f = gf8();
        let code = GabidulinCode::with_default_points(f.clone(), 3, 1).unwrap();
        let words: Vec<MatrixFq> = all_messages(&f, 1, 1 << 10)
            .unwrap()
            .iter()
            .map(|u| expand(&f, &code.encode(u).unwrap()))
            .collect();
        assert_eq!(min_rank_distance_exhaustive(&words, 1 << 20).unwrap(), 3);
    }

    #[test]
    fn min_distance_examples() {
        let f = Gf::binary(4).unwrap();
        let c = GabidulinCode::with_default_points(f.clone(), 4, 2).unwrap();
        assert_eq!(c.min_rank_distance(1 << 20).unwrap(), 3);
        let f3 = gf8();
        let full = GabidulinCode::with_default_points(f3, 3, 3).unwrap();
        assert_eq!(full.min_rank_distance(1 << 20).unwrap(), 1);
        let two = vec![MatrixFq::zeros(f.base(), 4, 4), MatrixFq::identity(f.base(), 4)];
        assert_eq!(min_rank_distance_exhaustive(&two, 10).unwrap(), 4);
        assert!(matches!(c.min_rank_distance(10), Err(Error::Budget { .. })));
    }

    #[test]
    fn singleton_examples() {
        assert_eq!(singleton_bound(3, 3, 3, 2).unwrap(), BigUint::from(8u32));
        assert_eq!(singleton_bound(4, 5, 1, 2).unwrap(), BigUint::from(2u32).pow(20));
        // an [4, 2] Gabidulin code over GF(2^4) meets the bound for d = 3
        assert_eq!(singleton_bound(4, 4, 3, 2).unwrap(), BigUint::from(256u32));
        assert!(singleton_bound(4, 4, 0, 2).is_err());
        assert!(singleton_bound(4, 4, 5, 2).is_err());
    }

    #[test]
    fn subspace_polynomial_roots() {
        let f = Gf::binary(5).unwrap();
        let basis = [f.element(3).unwrap(), f.element(12).unwrap()];
        let s = LinPoly::subspace(&f, &basis);
        assert_eq!(s.q_degree(), 2);
        let roots: Vec<Elem> = f.elements().filter(|&z| s.eval(&f, z) == Elem::ZERO).collect();
        assert_eq!(roots.len(), 4);
        assert!(roots.contains(&f.add(basis[0], basis[1])));
    }

    #[test]
    fn left_division_inverts_composition() {
        let f = Gf::binary(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = LinPoly::new((0..3).map(|_| f.element(rng.gen_range(1..64)).unwrap()).collect());
            let b = LinPoly::new((0..3).map(|_| f.element(rng.gen_range(0..64)).unwrap()).collect());
            let c = a.compose(&f, &b);
            for z in f.elements().take(10) {
                assert_eq!(c.eval(&f, z), a.eval(&f, b.eval(&f, z)));
            }
            assert_eq!(a.left_divide(&f, &c).unwrap(), b);
        }
    }

    #[test]
    fn decode_examples() {
        let f = Gf::binary(4).unwrap();
        let code = GabidulinCode::with_default_points(f.clone(), 4, 2).unwrap();
        let u = vec![f.element(5).unwrap(), f.element(9).unwrap()];
        let c = code.encode(&u).unwrap();
        assert_eq!(
            code.decode(&c, 1).unwrap(),
            DecodeOutcome::Recovered { message: u.clone(), error_rank: 0 }
        );
        assert!(code.decode(&c, 2).is_err());
        assert!(code.decode(&c[..3], 1).is_err());
    }

    #[test]
    fn random_rank_errors_larger_code() {
        // [8, 2] over GF(2^8) corrects rank 3
        let f = Gf::binary(8).unwrap();
        let code = GabidulinCode::with_default_points(f.clone(), 8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let u: Vec<Elem> = (0..2).map(|_| f.element(rng.gen_range(0..256)).unwrap()).collect();
            let c = expand(&f, &code.encode(&u).unwrap());
            let r = rng.gen_range(0..=3);
            let e = MatrixFq::random_full_rank(f.base(), 8, r.max(1), &mut rng)
                .mul(&MatrixFq::random_full_rank(f.base(), r.max(1), 8, &mut rng))
                .unwrap();
            let e = if r == 0 { MatrixFq::zeros(f.base(), 8, 8) } else { e };
            let y = crate::linalg::contract(&f, &c.add(&e).unwrap()).unwrap();
            match code.decode(&y, 3).unwrap() {
                DecodeOutcome::Recovered { message, error_rank } => {
                    assert_eq!(message, u);
                    assert_eq!(error_rank, e.rank());
                }
                DecodeOutcome::Failed => panic!("in-radius error not corrected"),
            }
        }
    }

    #[test]
    fn erasure_decoding_small() {
        let f = Gf::binary(4).unwrap();
        let code = GabidulinCode::with_default_points(f.clone(), 4, 2).unwrap();
        let reps = enumerate::full_rank_rref(f.base(), 2, 4, 1 << 10).unwrap();
        let g_t = code.generator_matrix().transpose();
        for a in &reps {
            // A' G^T has full column rank for every full-rank A'
            assert_eq!(linalg::embed(&f, a).mul(&g_t).unwrap().rank(), 2);
        }
        let u = vec![f.element(3).unwrap(), f.element(14).unwrap()];
        let x = code.encode(&u).unwrap();
        for a in &reps {
            let y = linalg::apply(&f, a, &x).unwrap();
            assert_eq!(code.erasure_decode(a, &y, 2).unwrap().message(), Some(&u[..]));
        }
        let a = &reps[0];
        let mut y = linalg::apply(&f, a, &x).unwrap();
        assert!(code.erasure_decode(a, &y, 3).is_err());
        // zero-rho square case
        let id = MatrixFq::identity(f.base(), 4);
        assert_eq!(code.erasure_decode(&id, &x, 0).unwrap().message(), Some(&u[..]));
        y[0] = f.add(y[0], Elem::ONE);
        let _ = code.erasure_decode(a, &y, 2).unwrap();
    }

    #[test]
    fn row_subcode_is_mrd() {
        let f = Gf::binary(4).unwrap();
        let code = GabidulinCode::with_default_points(f.clone(), 4, 3).unwrap();
        let sub = code.row_subcode(2, 1).unwrap();
        assert_eq!(sub.generator_matrix().row(0), code.generator_matrix().row(2));
        assert_eq!(sub.min_rank_distance(1 << 20).unwrap(), 4);
        let sub2 = code.row_subcode(1, 2).unwrap();
        assert_eq!(sub2.min_rank_distance(1 << 20).unwrap(), 3);
    }

    #[test]
    fn construction_errors() {
        let f = Gf::binary(3).unwrap();
        assert!(matches!(
            GabidulinCode::with_default_points(f.clone(), 4, 2),
            Err(Error::PacketLength { .. })
        ));
        assert!(GabidulinCode::with_default_points(f.clone(), 3, 0).is_err());
        assert!(GabidulinCode::new(f.clone(), vec![Elem::ONE, Elem::ONE], 1).is_err());
    }

    #[test]
    fn parity_check_is_dual() {
        let f = Gf::binary(5).unwrap();
        let code = GabidulinCode::with_default_points(f.clone(), 5, 2).unwrap();
        let h = code.parity_check_matrix();
        assert_eq!(h.shape(), (3, 5));
        assert!(code.generator_matrix().mul(&h.transpose()).unwrap().is_zero());
    }
}
