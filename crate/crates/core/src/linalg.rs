//! Dense matrices over GF(q) and GF(q^m).
//!
//! [`Matrix`] is generic over the field; [`MatrixFq`] holds network-side
//! objects (transfer matrices, packets) and [`MatrixFqm`] holds code-side
//! objects (generators, parity checks, messages as columns).

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldOps, Gf, PrimeField};

#[derive(Clone, PartialEq)]
pub struct Matrix<F: FieldOps> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

pub type MatrixFq = Matrix<PrimeField>;
pub type MatrixFqm = Matrix<Gf>;

impl<F: FieldOps> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let idx: Vec<u64> = self.row(r).iter().map(|&e| self.field.index(e)).collect();
            writeln!(f, "  {idx:?}")?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<F: FieldOps> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: FieldOps> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let zero = field.zero();
        Self { field, rows, cols, data: vec![zero; rows * cols] }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = m.field.one();
        }
        m
    }

    pub fn from_vec(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::param(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { field, rows, cols, data })
    }

    pub fn from_rows(field: F, rows: &[Vec<F::Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged rows"));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::from_vec(field, rows.len(), cols, data)
    }

    /// A single column.
    pub fn column(field: F, entries: &[F::Elem]) -> Self {
        Self { field, rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> F::Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| self.field.is_zero(e))
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::param("matrices are over different fields"));
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::param(format!(
                "cannot add {:?} and {:?} matrices",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Ok(Self { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::param(format!(
                "cannot subtract {:?} and {:?} matrices",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Ok(Self { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::param(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f.clone(), self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: F::Elem) -> Self {
        let data = self.data.iter().map(|&a| self.field.mul(a, s)).collect();
        Self { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::param("hstack needs equal row counts"));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Self { field: self.field.clone(), rows: self.rows, cols: self.cols + other.cols, data })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::param("vstack needs equal column counts"));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { field: self.field.clone(), rows: self.rows + other.rows, cols, data })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self { field: self.field.clone(), rows: rows.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(cols.len() * self.rows);
        for r in 0..self.rows {
            for &c in cols {
                data.push(self.get(r, c));
            }
        }
        Self { field: self.field.clone(), rows: self.rows, cols: cols.len(), data }
    }

    pub fn row_range(&self, start: usize, end: usize) -> Self {
        let idx: Vec<usize> = (start..end).collect();
        self.select_rows(&idx)
    }

    pub fn col_range(&self, start: usize, end: usize) -> Self {
        let idx: Vec<usize> = (start..end).collect();
        self.select_cols(&idx)
    }

    /// Gauss-Jordan elimination to reduced row-echelon form.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let Some(p) = (pr..m.rows).find(|&r| !f.is_zero(m.get(r, c))) else {
                continue;
            };
            m.swap_rows(pr, p);
            let inv = f.inv(m.get(pr, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(pr, j), inv);
                m.set(pr, j, v);
            }
            for r in 0..m.rows {
                if r == pr {
                    continue;
                }
                let factor = m.get(r, c);
                if f.is_zero(factor) {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(pr, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Solves `self * X = rhs`. Reports inconsistency and non-uniqueness as distinct errors.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::param(format!(
                "system has {} equations but right-hand side has {} rows",
                self.rows, rhs.rows
            )));
        }
        let n = self.cols;
        let aug = self.hstack(rhs)?.rref();
        if aug.pivots.iter().any(|&p| p >= n) {
            return Err(Error::Inconsistent);
        }
        if aug.pivots.len() < n {
            return Err(Error::Underdetermined { free: n - aug.pivots.len() });
        }
        Ok(aug.matrix.row_range(0, n).col_range(n, n + rhs.cols))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::param("only square matrices can be inverted"));
        }
        match self.solve(&Self::identity(self.field.clone(), self.rows)) {
            Ok(inv) => Ok(inv),
            Err(Error::Inconsistent | Error::Underdetermined { .. }) => {
                Err(Error::domain("matrix is singular"))
            }
            Err(e) => Err(e),
        }
    }

    /// A left inverse `L` with `L * self = I`, for `self` of full column rank.
    pub fn left_inverse(&self) -> Result<Self> {
        // rows of A at the pivots of A^T form an invertible square block
        let piv = self.transpose().rref().pivots;
        if piv.len() < self.cols {
            return Err(Error::domain(format!(
                "matrix has rank {} < {} columns; no left inverse",
                piv.len(),
                self.cols
            )));
        }
        let square = self.select_rows(&piv);
        let inv = square.inverse()?;
        let mut left = Self::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.cols {
            for (j, &p) in piv.iter().enumerate() {
                left.set(r, p, inv.get(r, j));
            }
        }
        Ok(left)
    }

    /// Basis of the right null space, one basis vector per column of the result.
    pub fn null_space(&self) -> Self {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = &self.field;
        let mut basis = Self::zeros(f.clone(), self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            basis.set(fc, j, f.one());
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(pc, j, f.neg(matrix.get(i, fc)));
            }
        }
        basis
    }

    /// Basis of the left null space, as rows: `result * self = 0`.
    pub fn left_null_space(&self) -> Self {
        self.transpose().null_space().transpose()
    }

    /// Extends the row space to the full space by appending standard basis rows,
    /// scanning `e_0, e_1, ...` and keeping each one that raises the rank.
    /// Returns only the appended rows.
    pub fn complete_rows(&self) -> Self {
        let mut acc = self.clone();
        let mut rank = acc.rank();
        let mut added = Self::zeros(self.field.clone(), 0, self.cols);
        for i in 0..self.cols {
            if rank == self.cols {
                break;
            }
            let mut e = Self::zeros(self.field.clone(), 1, self.cols);
            e.set(0, i, self.field.one());
            let trial = acc.vstack(&e).expect("same width");
            let r = trial.rank();
            if r > rank {
                acc = trial;
                rank = r;
                added = added.vstack(&e).expect("same width");
            }
        }
        added
    }

    pub fn random<R: Rng + ?Sized>(field: F, rows: usize, cols: usize, rng: &mut R) -> Self {
        let size = field.size();
        let data = (0..rows * cols).map(|_| field.from_index(rng.gen_range(0..size))).collect();
        Self { field, rows, cols, data }
    }

    /// Uniform over matrices of rank `min(rows, cols)`, by rejection.
    pub fn random_full_rank<R: Rng + ?Sized>(field: F, rows: usize, cols: usize, rng: &mut R) -> Self {
        let target = rows.min(cols);
        loop {
            let m = Self::random(field.clone(), rows, cols, rng);
            if m.rank() == target {
                return m;
            }
        }
    }
}

/// `rank(y - x)`.
pub fn rank_distance(x: &MatrixFq, y: &MatrixFq) -> Result<usize> {
    if x.shape() != y.shape() {
        return Err(Error::param(format!(
            "rank distance needs equal shapes, got {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(y.sub(x)?.rank())
}

/// Row `i` of the result is the coefficient vector of `v[i]`.
pub fn expand(field: &Gf, v: &[Elem]) -> MatrixFq {
    let m = field.m();
    let mut data = Vec::with_capacity(v.len() * m);
    for &e in v {
        data.extend(field.digits(e));
    }
    MatrixFq::from_vec(field.base(), v.len(), m, data).expect("n*m entries")
}

/// Inverse of [`expand`].
pub fn contract(field: &Gf, x: &MatrixFq) -> Result<Vec<Elem>> {
    if x.cols() != field.m() {
        return Err(Error::param(format!(
            "matrix has {} columns but the extension degree is {}",
            x.cols(),
            field.m()
        )));
    }
    if x.field().q() != field.q() {
        return Err(Error::param("base field mismatch"));
    }
    (0..x.rows()).map(|r| field.from_digits(x.row(r))).collect()
}

/// Lifts a GF(q) matrix into GF(q^m) entrywise.
pub fn embed(field: &Gf, a: &MatrixFq) -> MatrixFqm {
    let data = a.data().iter().map(|&d| field.embed(d)).collect();
    MatrixFqm::from_vec(field.clone(), a.rows(), a.cols(), data).expect("same shape")
}

/// `A * v` for a GF(q) matrix acting on a column over GF(q^m).
pub fn apply(field: &Gf, a: &MatrixFq, v: &[Elem]) -> Result<Vec<Elem>> {
    if a.cols() != v.len() {
        return Err(Error::param(format!(
            "cannot apply a {:?} matrix to a length-{} column",
            a.shape(),
            v.len()
        )));
    }
    Ok((0..a.rows())
        .map(|r| {
            a.row(r).iter().zip(v).fold(Elem::ZERO, |acc, (&c, &x)| match c {
                0 => acc,
                1 => field.add(acc, x),
                _ => field.add(acc, field.mul(field.embed(c), x)),
            })
        })
        .collect())
}

pub mod enumerate {
    //! Exhaustive enumerations used by the audits.

    use std::collections::BTreeSet;

    use super::MatrixFq;
    use crate::error::{check_budget, Error, Result};
    use crate::gf::{FieldOps, PrimeField};

    fn pow(q: u32, e: usize) -> u128 {
        (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
    }

    /// Every `rows x cols` matrix over GF(q).
    pub fn all_matrices(field: PrimeField, rows: usize, cols: usize, budget: u64) -> Result<Vec<MatrixFq>> {
        let total = pow(field.q(), rows * cols);
        check_budget(total, budget)?;
        Ok((0..total as u64).map(|i| from_index(field, rows, cols, i)).collect())
    }

    fn from_index(field: PrimeField, rows: usize, cols: usize, mut idx: u64) -> MatrixFq {
        let q = field.q() as u64;
        let mut data = vec![0u32; rows * cols];
        for d in data.iter_mut() {
            *d = (idx % q) as u32;
            idx /= q;
        }
        MatrixFq::from_vec(field, rows, cols, data).expect("shape")
    }

    fn nonzero_vectors(field: PrimeField, len: usize) -> Vec<Vec<u32>> {
        let q = field.q() as u64;
        (1..pow(field.q(), len) as u64)
            .map(|mut i| {
                (0..len)
                    .map(|_| {
                        let d = (i % q) as u32;
                        i /= q;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    /// Every matrix of rank at most `max_rank`, each listed once (including zero).
    ///
    /// Built as sums of `max_rank` outer products `u v^T`, deduplicated. The
    /// budget bounds the number of raw outer-product tuples explored.
    pub fn rank_bounded(
        field: PrimeField,
        rows: usize,
        cols: usize,
        max_rank: usize,
        budget: u64,
    ) -> Result<Vec<MatrixFq>> {
        let zero = MatrixFq::zeros(field, rows, cols);
        if max_rank == 0 || rows == 0 || cols == 0 {
            return Ok(vec![zero]);
        }
        let us = nonzero_vectors(field, rows);
        // v scaled to have a leading one avoids q - 1 duplicate factorizations
        let vs: Vec<Vec<u32>> = nonzero_vectors(field, cols)
            .into_iter()
            .filter(|v| v.iter().find(|&&d| d != 0) == Some(&1))
            .collect();
        let outer_count = us.len() as u128 * vs.len() as u128;
        let required = outer_count.checked_pow(max_rank as u32).unwrap_or(u128::MAX);
        check_budget(required, budget)?;
        let outers: Vec<MatrixFq> = us
            .iter()
            .flat_map(|u| vs.iter().map(move |v| (u, v)))
            .map(|(u, v)| {
                let data = u.iter().flat_map(|&a| v.iter().map(move |&b| field.mul(a, b))).collect();
                MatrixFq::from_vec(field, rows, cols, data).expect("shape")
            })
            .collect();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        seen.insert(zero.data().to_vec());
        let mut frontier = vec![zero];
        for _ in 0..max_rank {
            let mut next = Vec::new();
            for base in &frontier {
                for o in &outers {
                    let s = base.add(o).expect("same shape");
                    if seen.insert(s.data().to_vec()) {
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<MatrixFq> = seen
            .into_iter()
            .map(|d| MatrixFq::from_vec(field, rows, cols, d).expect("shape"))
            .filter(|m| m.rank() <= max_rank)
            .collect();
        out.sort_by_key(|m| m.rank());
        Ok(out)
    }

    /// One full-rank `rows x cols` matrix per `rows`-dimensional subspace of
    /// GF(q)^cols: the reduced row-echelon representatives.
    pub fn full_rank_rref(field: PrimeField, rows: usize, cols: usize, budget: u64) -> Result<Vec<MatrixFq>> {
        if rows > cols {
            return Err(Error::param("a full-row-rank matrix cannot have more rows than columns"));
        }
        let q = field.q();
        let mut out = Vec::new();
        // choose pivot columns, fill the free positions to the right of each pivot
        let mut pivots: Vec<usize> = (0..rows).collect();
        loop {
            let mut free = Vec::new();
            for (r, &p) in pivots.iter().enumerate() {
                for c in p + 1..cols {
                    if !pivots.contains(&c) {
                        free.push((r, c));
                    }
                }
            }
            let count = pow(q, free.len());
            check_budget(out.len() as u128 + count, budget)?;
            for mut idx in 0..count as u64 {
                let mut m = MatrixFq::zeros(field, rows, cols);
                for (r, &p) in pivots.iter().enumerate() {
                    m.set(r, p, 1);
                }
                for &(r, c) in &free {
                    m.set(r, c, (idx % q as u64) as u32);
                    idx /= q as u64;
                }
                out.push(m);
            }
            if !next_combination(&mut pivots, cols) {
                break;
            }
        }
        Ok(out)
    }

    fn next_combination(c: &mut [usize], n: usize) -> bool {
        let k = c.len();
        if k == 0 {
            return false;
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    /// Every full-rank `rows x cols` matrix (rank `min(rows, cols)`).
    pub fn full_rank(field: PrimeField, rows: usize, cols: usize, budget: u64) -> Result<Vec<MatrixFq>> {
        let target = rows.min(cols);
        Ok(all_matrices(field, rows, cols, budget)?
            .into_iter()
            .filter(|m| m.rank() == target)
            .collect())
    }
}
