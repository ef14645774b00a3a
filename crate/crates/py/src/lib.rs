//! Python module `tf_hpm`.
//!
//! Arbitrary-precision values cross the boundary as decimal strings; `x`
//! arguments also accept floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hpm::algebra::{BigFloat, MIN_DIGITS};
use hpm::hankel::{self, HankelSpec};
use hpm::oracle;
use hpm::pade::{self, PadeApproximant};
use hpm::series::{self, EquationKind};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(equation: &str) -> PyResult<EquationKind> {
    equation.parse().map_err(value_error)
}

fn big(s: &str, digits: u32) -> PyResult<BigFloat> {
    BigFloat::parse(s, digits.max(MIN_DIGITS)).map_err(value_error)
}

/// A float goes through its shortest decimal form, so `0.1` means one tenth.
fn big_any(v: &Bound<'_, PyAny>, digits: u32) -> PyResult<BigFloat> {
    if let Ok(s) = v.extract::<String>() {
        return big(&s, digits);
    }
    let x: f64 = v.extract()?;
    big(&format!("{x}"), digits)
}

/// Exact coefficients of `f_0 ..= f_order`, each a list of rationals in `s`
/// from the constant term up.
#[pyfunction]
fn expand(equation: &str, order: usize) -> PyResult<Vec<Vec<String>>> {
    let table = series::expand(kind(equation)?, order).map_err(value_error)?;
    Ok(table
        .coeffs()
        .iter()
        .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
        .collect())
}

/// Exact coefficients of `H_D^d(s)`, constant term first.
#[pyfunction]
#[pyo3(name = "hankel_poly")]
fn hankel_poly_py(equation: &str, d: usize, dim: usize) -> PyResult<Vec<String>> {
    let spec = HankelSpec::new(kind(equation)?, d, dim).map_err(value_error)?;
    let table = series::expand(spec.kind, spec.required_order()).map_err(value_error)?;
    let h = hankel::hankel_poly(&table, &spec).map_err(value_error)?;
    Ok(h.coeffs().iter().map(|c| c.to_string()).collect())
}

#[pyclass(frozen, get_all, module = "tf_hpm")]
struct RootEntry {
    dim: usize,
    s_root: String,
    slope: String,
    log_diff: Option<f64>,
    candidates: usize,
}

#[pymethods]
impl RootEntry {
    fn __repr__(&self) -> String {
        format!("RootEntry(dim={}, slope={})", self.dim, self.slope)
    }
}

/// Root sequence for `D = 2 ..= d_max` at offset `d`.
#[pyfunction]
#[pyo3(signature = (equation, d, d_max, precision = 50))]
fn track(py: Python<'_>, equation: &str, d: usize, d_max: usize, precision: u32) -> PyResult<Vec<RootEntry>> {
    let kind = kind(equation)?;
    let seq = py
        .detach(|| hankel::track_sequence(kind, d, d_max, precision, &hankel::default_window()))
        .map_err(value_error)?;
    let sig = precision as usize;
    Ok(seq
        .entries
        .into_iter()
        .map(|e| RootEntry {
            dim: e.dim,
            s_root: e.s_root.to_sig_string(sig),
            slope: e.slope.to_sig_string(sig),
            log_diff: e.log_diff.map(|l| l.to_f64()),
            candidates: e.candidates,
        })
        .collect())
}

/// `[m/n]` Padé approximant of `√u(t²)` at a given `u'(0)`.
#[pyclass(frozen, module = "tf_hpm")]
struct Pade {
    inner: PadeApproximant,
}

#[pymethods]
impl Pade {
    #[new]
    #[pyo3(signature = (equation, slope, m = pade::DEFAULT_M, n = pade::DEFAULT_N, precision = 50))]
    fn new(equation: &str, slope: &str, m: usize, n: usize, precision: u32) -> PyResult<Self> {
        let slope = big(slope, precision)?;
        let (inner, _) = pade::tf_table(kind(equation)?, &slope, m, n, &[]).map_err(value_error)?;
        Ok(Pade { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn numerator(&self) -> Vec<String> {
        self.inner.a.iter().map(|c| c.to_string()).collect()
    }

    #[getter]
    fn denominator(&self) -> Vec<String> {
        self.inner.b.iter().map(|c| c.to_string()).collect()
    }

    /// Positive real poles in `t`.
    #[getter]
    fn poles(&self) -> Vec<String> {
        self.inner.poles.iter().map(|c| c.to_string()).collect()
    }

    /// `u(x)` as a decimal string; raises on negative `x` or at a pole.
    fn u(&self, x: &Bound<'_, PyAny>) -> PyResult<String> {
        let x = big_any(x, self.inner.digits())?;
        pade::eval_u(&self.inner, &x).map(|v| v.to_string()).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Pade(m={}, n={})", self.inner.m, self.inner.n)
    }
}

/// Bisects the bracket `(lo, hi)` on `u'(0)` until it is narrower than `tol`.
#[pyfunction]
#[pyo3(signature = (equation, lo, hi, tol = "1e-10"))]
fn shoot_slope(py: Python<'_>, equation: &str, lo: &str, hi: &str, tol: &str) -> PyResult<String> {
    let kind = kind(equation)?;
    let (lo, hi, tol) = (big(lo, 30)?, big(hi, 30)?, big(tol, 30)?);
    py.detach(|| oracle::shoot_slope(kind, (&lo, &hi), &tol))
        .map(|s| s.to_string())
        .map_err(value_error)
}

/// Samples `(x, u, u')` of the initial-value problem at `xs`. Stops early if
/// the trajectory blows up or crosses zero.
#[pyfunction]
#[pyo3(signature = (equation, slope, xs, tol = 1e-14))]
fn integrate(
    py: Python<'_>,
    equation: &str,
    slope: &str,
    xs: Vec<f64>,
    tol: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let kind = kind(equation)?;
    let slope = big(slope, 30)?;
    let x_max = xs.iter().copied().fold(1.0, f64::max);
    let (traj, _) = py
        .detach(|| oracle::integrate_ivp(kind, &slope, x_max, tol, &xs))
        .map_err(value_error)?;
    Ok(traj.samples.iter().map(|s| (s.x, s.u, s.du)).collect())
}

#[pymodule]
pub fn tf_hpm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", hpm::VERSION)?;
    m.add_class::<RootEntry>()?;
    m.add_class::<Pade>()?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_poly_py, m)?)?;
    m.add_function(wrap_pyfunction!(track, m)?)?;
    m.add_function(wrap_pyfunction!(shoot_slope, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    Ok(())
}
