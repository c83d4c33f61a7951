//! Python bindings. Rationals cross the boundary as strings; anything whose `str()` parses works as input.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde::Serialize;

use hypdeform::arrangement::{self, Arrangement, Hyperplane};
use hypdeform::deform::{self, BuildOptions, CongruenceMethod, DeformationTrace, EpsilonRule, GpMethod, Retention};
use hypdeform::exactalg::Rat;
use hypdeform::nevan::{self, Divisor, DivisorPoint, ForcingSystem, Level};
use hypdeform::Verdict;

create_exception!(pyhypdeform, HypdeformError, PyException);

fn fail(e: impl std::fmt::Display) -> PyErr {
    HypdeformError::new_err(e.to_string())
}

fn rat(x: &Bound<'_, PyAny>) -> PyResult<Rat> {
    let s = x.str()?.to_string();
    s.parse().map_err(|e| PyValueError::new_err(format!("{s:?}: {e}")))
}

fn rats(xs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rat>> {
    xs.iter().map(rat).collect()
}

fn strs(xs: &[Rat]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn hyperplane(xs: &[Bound<'_, PyAny>]) -> PyResult<Hyperplane> {
    Hyperplane::from_rats(&rats(xs)?).ok_or_else(|| PyValueError::new_err("hyperplane needs a nonzero coefficient"))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(json_to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &serde_json::to_value(v).map_err(fail)?)
}

#[pyclass(name = "Arrangement", module = "pyhypdeform", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyArrangement {
    inner: Arrangement,
}

#[pymethods]
impl PyArrangement {
    /// Family of hyperplanes in P^n given by coefficient rows.
    #[new]
    fn new(n: usize, rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let hs = rows.iter().map(|r| hyperplane(r)).collect::<PyResult<Vec<_>>>()?;
        Ok(PyArrangement { inner: Arrangement::new(n, hs).map_err(fail)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, q, bound = 9, seed = 0, max_tries = 1000))]
    fn random_generic(py: Python<'_>, n: usize, q: usize, bound: i64, seed: u64, max_tries: usize) -> PyResult<Self> {
        let g = py.detach(|| arrangement::random_generic(n, q, bound, seed, max_tries)).map_err(fail)?;
        Ok(PyArrangement { inner: g.arrangement })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyArrangement { inner: serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))? })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("serializable")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.q()
    }

    fn hyperplanes(&self) -> Vec<Vec<String>> {
        self.inner.hyperplanes().iter().map(|h| strs(&h.coeffs_rat())).collect()
    }

    /// None when every n+1 forms are independent, otherwise a dependent subset.
    fn is_general_position(&self) -> PyResult<Option<Vec<usize>>> {
        Ok(match self.inner.is_general_position().map_err(fail)? {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        })
    }

    /// None when the generic condition holds, otherwise the violating tuple as a dict.
    fn is_generic<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        let a = self.inner.clone();
        match py.detach(move || a.is_generic()).map_err(fail)? {
            Verdict::Holds => Ok(None),
            Verdict::Fails(w) => Ok(Some(to_py(py, &w)?)),
        }
    }

    fn diagonal_hyperplane(&self, j: Vec<usize>, k: Vec<usize>) -> PyResult<Vec<String>> {
        Ok(strs(&self.inner.diagonal_hyperplane(&j, &k).map_err(fail)?.coeffs_rat()))
    }

    /// The family induced on the intersection of the given hyperplanes.
    fn restrict(&self, idx: Vec<usize>) -> PyResult<Self> {
        Ok(PyArrangement { inner: self.inner.restrict(&idx).map_err(fail)? })
    }

    fn __repr__(&self) -> String {
        format!("Arrangement(n={}, q={})", self.inner.n(), self.inner.q())
    }
}

#[pyclass(name = "Trace", module = "pyhypdeform", frozen)]
pub struct PyTrace {
    inner: DeformationTrace,
}

#[pymethods]
impl PyTrace {
    /// Runs the level-by-level deformation on a family of 2n hyperplanes.
    #[staticmethod]
    #[pyo3(signature = (arrangement, epsilon = "geometric:1/1000", initial_seed = 0, retention = "all",
                        incremental = false, structural = false, max_coeff_bits = Some(65536)))]
    fn build(
        py: Python<'_>,
        arrangement: &PyArrangement,
        epsilon: &str,
        initial_seed: u64,
        retention: &str,
        incremental: bool,
        structural: bool,
        max_coeff_bits: Option<u64>,
    ) -> PyResult<Self> {
        let opts = BuildOptions {
            epsilon_rule: epsilon.parse::<EpsilonRule>().map_err(PyValueError::new_err)?,
            initial_seed,
            max_coeff_bits,
            retention: match retention {
                "all" => Retention::All,
                "digests" => Retention::DigestsOnly,
                _ => return Err(PyValueError::new_err("retention must be 'all' or 'digests'")),
            },
            gp_method: if incremental { GpMethod::Incremental } else { GpMethod::Direct },
            congruence_method: if structural { CongruenceMethod::Structural } else { CongruenceMethod::Reduce },
            ..BuildOptions::default()
        };
        let a = arrangement.inner.clone();
        let inner = py.detach(move || deform::build(&a, &opts)).map_err(fail)?;
        Ok(PyTrace { inner })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyTrace { inner: serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))? })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    /// Re-checks the trace; raises HypdeformError naming the failing step.
    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| deform::verify(&self.inner)).map_err(fail)?;
        to_py(py, &r)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn step_count(&self) -> usize {
        self.inner.steps.len()
    }

    #[getter]
    fn final_degree(&self) -> u32 {
        self.inner.final_sigma.degree()
    }

    #[getter]
    fn final_epsilon(&self) -> String {
        self.inner.final_epsilon.to_string()
    }

    #[getter]
    fn final_digest(&self) -> String {
        self.inner.final_sigma.digest()
    }

    /// Terms of the final polynomial as (exponents, coefficient) pairs.
    fn final_terms(&self) -> Vec<(Vec<u32>, String)> {
        self.inner.final_sigma.terms().map(|(e, c)| (e.to_vec(), c.to_string())).collect()
    }

    /// Each step's level, subspace indices and ε.
    fn steps(&self) -> Vec<(usize, Vec<usize>, String)> {
        self.inner.steps.iter().map(|s| (s.step.level, s.step.d_indices.clone(), s.step.epsilon.to_string())).collect()
    }
}

#[pyfunction]
fn step_count(n: usize) -> u64 {
    deform::step_count(n)
}

#[pyfunction]
fn enumerate_obligations(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &deform::enumerate_obligations(n).map_err(fail)?)
}

#[pyfunction]
fn obligations_table(n: usize) -> PyResult<String> {
    Ok(deform::enumerate_obligations(n).map_err(fail)?.to_table())
}

#[pyfunction]
#[pyo3(signature = (bound = 12))]
fn certify_inequalities(py: Python<'_>, bound: u32) -> PyResult<Bound<'_, PyAny>> {
    let r = py.detach(|| nevan::certify_inequalities(bound)).map_err(fail)?;
    to_py(py, &r)
}

#[pyfunction]
fn interpolation_search(py: Python<'_>, m: u64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &nevan::interpolation_search(m).map_err(fail)?)
}

/// Coefficients of z0², z0z1, z0z2, z1², z1z2, z2².
#[pyfunction]
fn conic_fit(points: Vec<Vec<Bound<'_, PyAny>>>, tangent: Vec<Bound<'_, PyAny>>, at: usize) -> PyResult<Vec<String>> {
    let pts = points.iter().map(|p| rats(p)).collect::<PyResult<Vec<_>>>()?;
    let c = nevan::conic_fit(&pts, &hyperplane(&tangent)?, at).map_err(fail)?;
    Ok(strs(c.coeffs()))
}

#[pyfunction]
fn line_through(p: Vec<Bound<'_, PyAny>>, q: Vec<Bound<'_, PyAny>>) -> PyResult<Vec<String>> {
    Ok(strs(&nevan::line_through(&rats(&p)?, &rats(&q)?).map_err(fail)?.coeffs_rat()))
}

fn divisor(entries: &[(Bound<'_, PyAny>, Bound<'_, PyAny>, u32)]) -> PyResult<Divisor> {
    let pts =
        entries.iter().map(|(re, im, m)| Ok(DivisorPoint::new(rat(re)?, rat(im)?, *m))).collect::<PyResult<Vec<_>>>()?;
    Divisor::new(pts).map_err(fail)
}

fn level(k: Option<u32>) -> Level {
    k.map_or(Level::Infinite, Level::Finite)
}

/// n^[k](t, E) for entries (re, im, multiplicity); k=None is the untruncated count.
#[pyfunction]
#[pyo3(signature = (entries, k, t))]
fn truncated_count(entries: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>, u32)>, k: Option<u32>, t: Bound<'_, PyAny>) -> PyResult<u64> {
    nevan::truncated_count(&divisor(&entries)?, level(k), &rat(&t)?).map_err(fail)
}

/// N^[k](r, E) as (float value, [(weight, squared log argument)]).
#[pyfunction]
#[pyo3(signature = (entries, k, r))]
fn counting_function(
    entries: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>, u32)>,
    k: Option<u32>,
    r: Bound<'_, PyAny>,
) -> PyResult<(f64, Vec<(String, String)>)> {
    let v = nevan::counting_function(&divisor(&entries)?, level(k), &rat(&r)?).map_err(fail)?;
    Ok((v.to_f64(), v.atoms().iter().map(|a| (a.weight.to_string(), a.log_arg_squared.to_string())).collect()))
}

#[pyfunction]
#[pyo3(signature = (h1, h2, lambdas, system = "two_forms"))]
fn vandermonde_forcing<'py>(
    py: Python<'py>,
    h1: Vec<Bound<'py, PyAny>>,
    h2: Vec<Bound<'py, PyAny>>,
    lambdas: Vec<Bound<'py, PyAny>>,
    system: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let sys = match system {
        "two_forms" => ForcingSystem::TwoForms,
        "eliminated" => ForcingSystem::Eliminated,
        _ => return Err(PyValueError::new_err("system must be 'two_forms' or 'eliminated'")),
    };
    let r = nevan::vandermonde_forcing(&hyperplane(&h1)?, &hyperplane(&h2)?, &rats(&lambdas)?, sys).map_err(fail)?;
    to_py(py, &r)
}

#[pymodule]
fn pyhypdeform(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HypdeformError", m.py().get_type::<HypdeformError>())?;
    m.add("__version__", hypdeform::TOOL_VERSION)?;
    m.add_class::<PyArrangement>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(step_count, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_obligations, m)?)?;
    m.add_function(wrap_pyfunction!(obligations_table, m)?)?;
    m.add_function(wrap_pyfunction!(certify_inequalities, m)?)?;
    m.add_function(wrap_pyfunction!(interpolation_search, m)?)?;
    m.add_function(wrap_pyfunction!(conic_fit, m)?)?;
    m.add_function(wrap_pyfunction!(line_through, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_count, m)?)?;
    m.add_function(wrap_pyfunction!(counting_function, m)?)?;
    m.add_function(wrap_pyfunction!(vandermonde_forcing, m)?)?;
    Ok(())
}
