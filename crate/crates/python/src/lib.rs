//! Python bindings. Rationals cross the boundary as strings and come back as `fractions.Fraction`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use corrpoly::capacity::{capacity_value, check_exactness};
use corrpoly::info::{certify_local_max_mi, mutual_information};
use corrpoly::preferences::{ceu_value, meu_value};
use corrpoly::rational::{format_rational, parse_rational};
use corrpoly::scenarios::{evaluate, rows_to_csv, sweep_document};
use corrpoly::{Act, Event, JointDistribution, Marginal, PriorSet, ProductSpace, Rational};

create_exception!(corrpoly_py, CorrpolyError, PyException);

fn err(e: corrpoly::Error) -> PyErr {
    CorrpolyError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_rational(r),))
}

fn fractions<'py>(py: Python<'py>, rs: &[Rational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    rs.iter().map(|r| fraction(py, r)).collect()
}

/// Accepts `int`, `Fraction` or strings such as `"2/3"`; floats are rejected.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Err(CorrpolyError::new_err("floats are not exact; pass Fraction, int or \"p/q\""));
    }
    parse_rational(&obj.str()?.to_cow()?).map_err(err)
}

fn rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(rational).collect()
}

/// The set of joint distributions with fixed marginals.
#[pyclass(name = "CorrelationSet", module = "corrpoly_py")]
struct PyCorrelationSet {
    inner: corrpoly::CorrelationSet,
}

impl PyCorrelationSet {
    fn dist(&self, weights: Vec<Bound<'_, PyAny>>) -> PyResult<JointDistribution> {
        JointDistribution::new(self.inner.space().clone(), rationals(&weights)?).map_err(err)
    }

    fn event(&self, states: Vec<usize>) -> PyResult<Event> {
        Event::from_flat(self.inner.space().clone(), states).map_err(err)
    }

    fn act(&self, values: Vec<Bound<'_, PyAny>>) -> PyResult<Act> {
        Act::new(self.inner.space().clone(), rationals(&values)?).map_err(err)
    }
}

#[pymethods]
impl PyCorrelationSet {
    /// `marginals[i]` lists the weights of subspace `i`; states are flattened row-major.
    #[new]
    fn new(marginals: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let space = ProductSpace::new(marginals.iter().map(Vec::len).collect()).map_err(err)?;
        let ms = marginals
            .iter()
            .enumerate()
            .map(|(i, w)| Marginal::new(i, rationals(w)?).map_err(err))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = corrpoly::CorrelationSet::new(&space, &ms).map_err(err)?;
        Ok(PyCorrelationSet { inner })
    }

    #[getter]
    fn sizes(&self) -> Vec<usize> {
        self.inner.space().sizes().to_vec()
    }

    fn dimension(&self) -> PyResult<usize> {
        Ok(self.inner.dimension().map_err(err)?.dim)
    }

    fn vertices<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let vs = self.inner.vertices().map_err(err)?;
        vs.iter().map(|v| fractions(py, v.weights())).collect()
    }

    fn independent_product<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, self.inner.independent_product().weights())
    }

    fn contains(&self, weights: Vec<Bound<'_, PyAny>>) -> PyResult<bool> {
        Ok(self.inner.contains(&self.dist(weights)?))
    }

    fn is_maximally_zero(&self, weights: Vec<Bound<'_, PyAny>>) -> PyResult<bool> {
        self.inner.is_maximally_zero(&self.dist(weights)?).map_err(err)
    }

    /// Lower probability of the event given by flat state indices.
    fn capacity<'py>(&self, py: Python<'py>, states: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &capacity_value(&self.inner, &self.event(states)?).map_err(err)?)
    }

    #[pyo3(signature = (seed = 0))]
    fn check_exactness(&self, seed: u64) -> PyResult<bool> {
        Ok(check_exactness(&self.inner, seed).map_err(err)?.holds)
    }

    fn mutual_information(&self, weights: Vec<Bound<'_, PyAny>>) -> PyResult<f64> {
        mutual_information(&self.inner, &self.dist(weights)?).map_err(err)
    }

    #[pyo3(signature = (weights, probes = 8, step = "1/64".to_string(), seed = 0))]
    fn certify_local_max(&self, weights: Vec<Bound<'_, PyAny>>, probes: usize, step: String, seed: u64) -> PyResult<bool> {
        let step = parse_rational(&step).map_err(err)?;
        let r = certify_local_max_mi(&self.inner, &self.dist(weights)?, probes, &step, seed).map_err(err)?;
        Ok(r.is_local_max)
    }

    /// Minimum expected value over the whole set and the index of a minimizing vertex.
    fn meu<'py>(&self, py: Python<'py>, values: Vec<Bound<'_, PyAny>>) -> PyResult<(Bound<'py, PyAny>, usize)> {
        let prior = PriorSet::from_correlation_set(&self.inner).map_err(err)?;
        let (v, k) = meu_value(&prior, &self.act(values)?).map_err(err)?;
        Ok((fraction(py, &v)?, k))
    }

    fn ceu<'py>(&self, py: Python<'py>, values: Vec<Bound<'_, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &ceu_value(&self.inner, &self.act(values)?).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("CorrelationSet(sizes={:?})", self.inner.space().sizes())
    }
}

/// A parsed scenario file.
#[pyclass(name = "Scenario", module = "corrpoly_py")]
struct PyScenario {
    doc: corrpoly::scenario::Document,
    inner: corrpoly::scenario::Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let doc = corrpoly::scenario::Document::read(path).map_err(err)?;
        let inner = doc.instantiate().map_err(err)?;
        Ok(PyScenario { doc, inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn acts(&self) -> Vec<String> {
        self.inner.acts.iter().map(|(n, _)| n.clone()).collect()
    }

    fn correlation_set(&self) -> PyCorrelationSet {
        PyCorrelationSet {
            inner: self.inner.correlation_set().clone(),
        }
    }

    /// Lower probability of an event expression under the full correlation set.
    fn capacity<'py>(&self, py: Python<'py>, event: &str) -> PyResult<Bound<'py, PyAny>> {
        let e = self.inner.parse_event(event).map_err(err)?;
        fraction(py, &capacity_value(self.inner.correlation_set(), &e).map_err(err)?)
    }

    /// MEU per act under the scenario prior: a list of dicts.
    fn evaluate<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        evaluate(&self.inner)
            .map_err(err)?
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("act", &r.act)?;
                match r.value.exact() {
                    Some(v) => d.set_item("value", fraction(py, v)?)?,
                    None => d.set_item("value", r.value.as_f64())?,
                }
                d.set_item("argmin_vertex", &r.argmin_vertex)?;
                Ok(d)
            })
            .collect()
    }

    /// Runs the SWEEP section and returns the CSV report.
    fn sweep_csv(&self) -> PyResult<String> {
        rows_to_csv(&sweep_document(&self.doc).map_err(err)?).map_err(err)
    }

    fn serialize(&self) -> String {
        self.doc.serialize()
    }
}

#[pyfunction]
fn dimension_formula(sizes: Vec<usize>) -> usize {
    corrpoly::polytope::dimension_formula(&sizes)
}

#[pymodule]
fn corrpoly_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorrelationSet>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(dimension_formula, m)?)?;
    m.add("CorrpolyError", m.py().get_type::<CorrpolyError>())?;
    Ok(())
}
