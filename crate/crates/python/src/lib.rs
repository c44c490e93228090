//! Python bindings. Field elements cross the boundary as integer indices
//! `sum c_i q^i`; matrices as lists of rows.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secnc_core::audit::{self, AuditMode, ReliabilityOptions, SecrecyOptions};
use secnc_core::gf::{FieldParams, Gf, PrimeField};
use secnc_core::linalg::{self, MatrixFq};
use secnc_core::network_sim;
use secnc_core::rankmetric::GabidulinCode;
use secnc_core::secure_scheme::{SchemeInstance, SchemeParams};
use secnc_core::{Elem, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Budget { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_elems(field: &Gf, v: &[u32]) -> PyResult<Vec<Elem>> {
    v.iter().map(|&i| field.element(i).map_err(py_err)).collect()
}

fn from_elems(v: &[Elem]) -> Vec<u32> {
    v.iter().map(|e| e.index()).collect()
}

fn to_matrix(field: PrimeField, rows: &[Vec<u32>]) -> PyResult<MatrixFq> {
    if let Some(bad) = rows.iter().flatten().find(|&&d| d >= field.q()) {
        return Err(PyValueError::new_err(format!("entry {bad} out of range for q = {}", field.q())));
    }
    MatrixFq::from_rows(field, rows).map_err(py_err)
}

fn from_matrix(m: &MatrixFq) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn rng(seed: Option<u64>) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.unwrap_or_else(rand::random))
}

/// A built secure network coding scheme.
#[pyclass(frozen)]
struct Scheme {
    inst: SchemeInstance,
}

#[pymethods]
impl Scheme {
    #[new]
    #[pyo3(signature = (m, n, t, mu, k, q = 2, modulus = None, break_mrd = false))]
    #[allow(clippy::too_many_arguments)]
    fn new(m: usize, n: usize, t: usize, mu: usize, k: usize, q: u32, modulus: Option<Vec<u32>>, break_mrd: bool) -> PyResult<Self> {
        let field = match modulus {
            Some(d) => FieldParams::new(q, m, d),
            None => FieldParams::with_default_modulus(q, m),
        }
        .map_err(py_err)?;
        let params = SchemeParams::new(field, n, t, mu, k);
        let inst = if break_mrd {
            SchemeInstance::build_non_mrd(params)
        } else {
            SchemeInstance::build(params)
        }
        .map_err(py_err)?;
        Ok(Self { inst })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inst.params().field.q()
    }
    #[getter]
    fn m(&self) -> usize {
        self.inst.params().field.m()
    }
    #[getter]
    fn n(&self) -> usize {
        self.inst.params().n
    }
    #[getter]
    fn t(&self) -> usize {
        self.inst.params().t
    }
    #[getter]
    fn mu(&self) -> usize {
        self.inst.params().mu
    }
    #[getter]
    fn k(&self) -> usize {
        self.inst.params().k
    }
    #[getter]
    fn outer_distance(&self) -> usize {
        self.inst.params().outer_distance()
    }
    #[getter]
    fn rate_bits(&self) -> f64 {
        self.inst.params().rate_bits()
    }

    /// Payload column for message `s`; `randomness` fixes V (tests only).
    #[pyo3(signature = (s, seed = None, randomness = None))]
    fn encode(&self, s: Vec<u32>, seed: Option<u64>, randomness: Option<Vec<u32>>) -> PyResult<Vec<u32>> {
        let f = self.inst.field();
        let s = to_elems(f, &s)?;
        let x = match randomness {
            Some(v) => self.inst.encode_with_randomness(&s, &to_elems(f, &v)?),
            None => self.inst.encode(&s, &mut rng(seed)),
        }
        .map_err(py_err)?;
        Ok(from_elems(&x))
    }

    /// The `n x m` matrix of base-field digits of a payload column.
    fn expand(&self, x: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
        let f = self.inst.field();
        Ok(from_matrix(&linalg::expand(f, &to_elems(f, &x)?)))
    }

    /// `[I | expand(x)]`.
    fn lift(&self, x: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
        let f = self.inst.field();
        Ok(from_matrix(&network_sim::lift(f, &to_elems(f, &x)?)))
    }

    /// Message from `Y = A expand(X) + E` with known `A`, or None on failure.
    fn coherent_decode(&self, y: Vec<Vec<u32>>, a: Vec<Vec<u32>>) -> PyResult<Option<Vec<u32>>> {
        let base = self.inst.field().base();
        let out = self
            .inst
            .coherent_decode(&to_matrix(base, &y)?, &to_matrix(base, &a)?)
            .map_err(py_err)?;
        Ok(out.message().map(from_elems))
    }

    /// Message from a lifted observation `Y = A [I | X] + E` with unknown `A`, or None.
    fn noncoherent_decode(&self, y: Vec<Vec<u32>>) -> PyResult<Option<Vec<u32>>> {
        let base = self.inst.field().base();
        let out = network_sim::noncoherent_decode(&self.inst, &to_matrix(base, &y)?).map_err(py_err)?;
        Ok(out.message().map(from_elems))
    }

    /// Exhaustive leakage audit; returns a dict with `holds`, `max_leakage_bits`,
    /// `records` as `(hex, bits)` pairs, and the text `report`.
    #[pyo3(signature = (observations = None, lifted = false, budget = audit::DEFAULT_AUDIT_BUDGET))]
    fn secrecy_audit<'py>(&self, py: Python<'py>, observations: Option<usize>, lifted: bool, budget: u64) -> PyResult<Bound<'py, PyDict>> {
        let opts = SecrecyOptions { mode: AuditMode::Exhaustive, observations, lifted, budget, ..Default::default() };
        let r = audit::secrecy_audit(&self.inst, &opts, &mut rng(Some(0))).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("holds", r.holds())?;
        d.set_item("max_leakage_bits", r.max_leakage())?;
        let records: Vec<(String, f64)> = r.records.iter().map(|x| (audit::matrix_hex(&x.b), x.leakage_bits)).collect();
        d.set_item("records", records)?;
        d.set_item("report", r.render())?;
        Ok(d)
    }

    /// Exhaustive reliability audit over the identity and random transfer matrices.
    #[pyo3(signature = (random_transfers = 20, seed = 0, budget = audit::DEFAULT_AUDIT_BUDGET))]
    fn reliability_audit<'py>(&self, py: Python<'py>, random_transfers: usize, seed: u64, budget: u64) -> PyResult<Bound<'py, PyDict>> {
        let opts = ReliabilityOptions { random_transfers, budget, ..Default::default() };
        let r = audit::reliability_audit(&self.inst, &opts, &mut rng(Some(seed))).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("holds", r.holds())?;
        d.set_item("cases", r.cases)?;
        d.set_item("failures", r.failures)?;
        d.set_item("report", r.render())?;
        Ok(d)
    }
}

/// Rank of a matrix over GF(q).
#[pyfunction]
#[pyo3(signature = (matrix, q = 2))]
fn rank(matrix: Vec<Vec<u32>>, q: u32) -> PyResult<usize> {
    Ok(to_matrix(PrimeField::new(q).map_err(py_err)?, &matrix)?.rank())
}

/// `rank(y - x)` over GF(q).
#[pyfunction]
#[pyo3(signature = (x, y, q = 2))]
fn rank_distance(x: Vec<Vec<u32>>, y: Vec<Vec<u32>>, q: u32) -> PyResult<usize> {
    let f = PrimeField::new(q).map_err(py_err)?;
    linalg::rank_distance(&to_matrix(f, &x)?, &to_matrix(f, &y)?).map_err(py_err)
}

/// Minimum rank distance of the `[n, k]` Gabidulin code over GF(q^m), by enumeration.
#[pyfunction]
#[pyo3(signature = (m, n, k, q = 2, budget = 1 << 20))]
fn gabidulin_min_distance(m: usize, n: usize, k: usize, q: u32, budget: u64) -> PyResult<usize> {
    let field = Gf::new(FieldParams::with_default_modulus(q, m).map_err(py_err)?);
    let code = GabidulinCode::with_default_points(field, n, k).map_err(py_err)?;
    code.min_rank_distance(budget).map_err(py_err)
}

#[pymodule]
fn secnc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scheme>()?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(rank_distance, m)?)?;
    m.add_function(wrap_pyfunction!(gabidulin_min_distance, m)?)?;
    Ok(())
}
