//! Python module `sievelab_py`: families, coefficient series, sieve constants
//! and the detection toolkit.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sievelab::coeffs::{expand_global, SeriesKind};
use sievelab::covers::{psd_check, FamilyView, MatrixKind};
use sievelab::detect::{self, DensityQuery};
use sievelab::error::Error;
use sievelab::ideals::{split_prime, IdealIndex, NumberFieldSpec};
use sievelab::localdata::spec_file::FamilyFile;
use sievelab::localdata::{self as ld, SyntheticModel};
use sievelab::sieve::{self, SieveKind};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Usage(_) | Error::Parse { .. } | Error::DataIntegrity(_) | Error::Unsupported(_) | Error::Pole(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn series_kind(name: &str) -> PyResult<SeriesKind> {
    Ok(match name {
        "lambda" => SeriesKind::Lambda,
        "mu" => SeriesKind::Mu,
        "biglambda" => SeriesKind::BigLambda,
        "logl" | "log" => SeriesKind::LogL,
        other => return Err(PyValueError::new_err(format!("unknown series kind {other:?}"))),
    })
}

fn sieve_kind(name: &str) -> PyResult<SieveKind> {
    Ok(match name {
        "lambda" => SieveKind::Lambda,
        "mu" => SieveKind::Mu,
        "log" | "logl" => SieveKind::Log,
        other => return Err(PyValueError::new_err(format!("unknown sieve kind {other:?}"))),
    })
}

fn field_of(d: Option<i64>) -> PyResult<NumberFieldSpec> {
    match d {
        Some(d) => NumberFieldSpec::quadratic(d).map_err(to_py),
        None => Ok(NumberFieldSpec::rationals()),
    }
}

/// A finite family of representations over a common field.
#[pyclass(name = "Family", frozen)]
pub struct PyFamily {
    inner: ld::Family,
}

#[pymethods]
impl PyFamily {
    /// All primitive Dirichlet characters of modulus at most `qmax`.
    #[staticmethod]
    fn characters(qmax: u64) -> PyResult<Self> {
        Ok(Self {
            inner: ld::dirichlet_character_family(qmax).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, count, seed, planted_p=None, planted_theta=None, field_d=None))]
    fn synthetic(
        n: usize,
        count: usize,
        seed: u64,
        planted_p: Option<u64>,
        planted_theta: Option<f64>,
        field_d: Option<i64>,
    ) -> PyResult<Self> {
        let model = match (planted_p, planted_theta) {
            (Some(p), Some(theta)) => SyntheticModel::Planted { p, theta },
            (None, None) => SyntheticModel::Grc,
            _ => return Err(PyValueError::new_err("planted_p and planted_theta go together")),
        };
        Ok(Self {
            inner: ld::synthetic_family(&field_of(field_d)?, n, count, seed, model).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn trivial() -> PyResult<Self> {
        let q = NumberFieldSpec::rationals();
        Ok(Self {
            inner: ld::Family::new(&q, vec![ld::Representation::trivial(&q)], "trivial").map_err(to_py)?,
        })
    }

    /// Family described by a spec file.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let spec = FamilyFile::load(&path).map_err(to_py)?;
        Ok(Self {
            inner: spec.build().map_err(to_py)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Family({:?}, {} members)", self.inner.description, self.inner.len())
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.members.iter().map(|m| m.label.clone()).collect()
    }

    #[getter]
    fn q_max(&self) -> f64 {
        self.inner.q_max
    }

    #[getter]
    fn planted_member(&self) -> Option<usize> {
        self.inner.planted_member()
    }

    /// Coefficients of L(s, pi_i x pi_j~) (or L(s, pi_i)) as (norm, ideal id, value) up to `bound`.
    #[pyo3(signature = (member, bound, kind="lambda", partner=None))]
    fn coefficients(
        &self,
        member: usize,
        bound: u64,
        kind: &str,
        partner: Option<usize>,
    ) -> PyResult<Vec<(u64, String, Complex64)>> {
        let pick = |i: usize| {
            self.inner
                .members
                .get(i)
                .ok_or_else(|| PyValueError::new_err(format!("member {i} out of range")))
        };
        let b = partner.map(pick).transpose()?;
        let series = expand_global(pick(member)?, b, bound, series_kind(kind)?).map_err(to_py)?;
        Ok(series.iter().map(|(id, v)| (id.norm, id.ideal_id(), v)).collect())
    }

    /// Largest eigenvalue of the Gram matrix of coefficient vectors up to N.
    #[pyo3(signature = (n, kind="lambda"))]
    fn sieve_constant(&self, py: Python<'_>, n: u64, kind: &str) -> PyResult<f64> {
        let kind = sieve_kind(kind)?;
        py.detach(|| sieve::sieve_constant(&self.inner, n, None, kind))
            .map(|c| c.value)
            .map_err(to_py)
    }

    /// (min eigenvalue, spectral norm, verdict) of [lambda_{pi x pi'~}(n)] at the rational ideal (n).
    #[pyo3(signature = (n, tolerance=1e-9, minus_product=false))]
    fn psd(&self, n: u64, tolerance: f64, minus_product: bool) -> PyResult<(f64, f64, bool)> {
        let kind = if minus_product { MatrixKind::LambdaMinusProduct } else { MatrixKind::Lambda };
        let id = IdealIndex::rational(n).map_err(to_py)?;
        let m = FamilyView::new(&self.inner).and_then(|v| v.matrix(&id, kind)).map_err(to_py)?;
        let v = psd_check(&m, tolerance).map_err(to_py)?;
        Ok((v.min_eigenvalue, v.spectral_norm, v.verdict))
    }

    /// Scan for members whose parameters at the prime above `p` reach N(p)^theta.
    #[pyo3(signature = (p, theta, epsilon=0.0, seed=0))]
    fn density_scan<'py>(&self, py: Python<'py>, p: u64, theta: f64, epsilon: f64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let prime = split_prime(&self.inner.field, p).map_err(to_py)?.primes[0];
        let query = DensityQuery {
            prime,
            theta,
            epsilon,
            scale_override: None,
        };
        let r = detect::density_scan(&self.inner, &query, seed).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("count", r.count)?;
        d.set_item("scale", r.scale)?;
        d.set_item("range_ok", r.range_ok)?;
        d.set_item("violators", r.members.iter().filter(|m| m.violator).map(|m| m.index).collect::<Vec<_>>())?;
        d.set_item(
            "certificates_fired",
            r.members.iter().filter(|m| m.violator).all(|m| m.certificate_fired),
        )?;
        Ok(d)
    }
}

/// The detection constants alpha, A, R, V, A0, A1.
#[pyfunction]
fn constants<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let c = detect::solve_constants().map_err(to_py)?;
    let d = PyDict::new(py);
    for (k, v) in [("alpha", c.alpha), ("A", c.a), ("R", c.r), ("V", c.v), ("A0", c.a0), ("A1", c.a1)] {
        d.set_item(k, v)?;
    }
    Ok(d)
}

/// (k_star, achieved, bound) for the power sums of `z` over k in [M+1, M+len(z)].
#[pyfunction]
fn turan_existence(z: Vec<Complex64>, m: u64) -> PyResult<(u64, f64, f64)> {
    let t = detect::turan_existence(&z, m).map_err(to_py)?;
    Ok((t.k_star, t.achieved, t.bound))
}

/// e^{-u} u^k / k!.
#[pyfunction]
fn jk(u: f64, k: u64) -> f64 {
    detect::jk(u, k)
}

/// Selberg weights of the trivial representation (or a primitive character
/// of modulus `q`, index `index`) at level z.
#[pyfunction]
#[pyo3(signature = (z, q=None, index=0))]
fn selberg_weights<'py>(py: Python<'py>, z: f64, q: Option<u64>, index: usize) -> PyResult<Bound<'py, PyDict>> {
    let rep = match q {
        None => ld::Representation::trivial(&NumberFieldSpec::rationals()),
        Some(q) => {
            let chars = ld::DirichletCharacter::primitive_mod(q);
            let chi = chars
                .get(index)
                .ok_or_else(|| PyValueError::new_err(format!("no primitive character {index} mod {q}")))?;
            ld::Representation::from_character(chi.clone())
        }
    };
    let w = sieve::selberg_weights(&rep, z).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("rho", w.rho.iter().map(|(id, r)| (id.norm, *r)).collect::<Vec<_>>())?;
    d.set_item("diagonal", w.diagonal_closed)?;
    d.set_item("diagonal_brute", w.diagonal_brute)?;
    d.set_item("violations", w.clause_violations())?;
    Ok(d)
}

/// Runs the command-line tool with `args` (without the program name); returns its exit code.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("sievelab".to_string()).chain(args).collect();
    py.detach(|| sievelab::cli::run(argv))
}

#[pymodule]
fn sievelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(turan_existence, m)?)?;
    m.add_function(wrap_pyfunction!(jk, m)?)?;
    m.add_function(wrap_pyfunction!(selberg_weights, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
