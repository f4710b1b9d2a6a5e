//! Python module `gradef`: sessions, elements written in the expression language, and the
//! checks and pipelines of the command-line tool.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gradef::cli;
use gradef::coderivations::theta_pi_pipeline;
use gradef::deformation::{ks_class as kernel_ks_class, PdDgla};
use gradef::dsl::eval::{Kind, Value};
use gradef::dsl::session::{example_names, Session as KSession, SessionConfig};
use gradef::grassmann::Grass;

fn err(e: gradef::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, s: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (s,))
}

/// A context with its symplectic pair and named values.
#[pyclass(name = "Session", module = "gradef", skip_from_py_object)]
#[derive(Clone)]
pub struct Session {
    inner: KSession,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (source = "", m = None, g = None, degrees = None, N = None, eps_floor = None, W = None, fixture = None))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(
        source: &str,
        m: Option<usize>,
        g: Option<usize>,
        degrees: Option<Vec<i32>>,
        N: Option<u32>,
        eps_floor: Option<i32>,
        W: Option<usize>,
        fixture: Option<String>,
    ) -> PyResult<Self> {
        let cfg = SessionConfig { m, g, degrees, n: N, eps_floor, w: W, seed: None, fixture, context: None };
        Ok(Session { inner: KSession::load(source, &cfg).map_err(err)? })
    }

    /// Load a bundled example by name.
    #[staticmethod]
    fn example(name: &str) -> PyResult<Self> {
        let src = gradef::dsl::session::example_source(name).map_err(err)?;
        Ok(Session { inner: KSession::load(src, &SessionConfig::default()).map_err(err)? })
    }

    #[staticmethod]
    fn examples() -> Vec<&'static str> {
        example_names()
    }

    fn eval(&self, expr: &str) -> PyResult<Element> {
        let v = self.inner.eval_str(expr).map_err(err)?;
        Ok(Element { value: v, session: self.inner.clone() })
    }

    fn names(&self) -> Vec<String> {
        self.inner.order.clone()
    }

    fn __getitem__(&self, name: &str) -> PyResult<Element> {
        let v = self.inner.get(name).ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        Ok(Element { value: v.clone(), session: self.inner.clone() })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.env.ctx.m
    }

    #[getter]
    #[allow(non_snake_case)]
    fn N(&self) -> u32 {
        self.inner.env.ctx.n
    }

    fn __repr__(&self) -> String {
        let c = &self.inner.env.ctx;
        format!("Session(m={}, g={}, N={}, eps_floor={}, W={})", c.m, c.g, c.n, c.eps_floor, c.w)
    }
}

/// A scalar, polyvector, form, suspended form or operator.
#[pyclass(name = "Element", module = "gradef", skip_from_py_object)]
#[derive(Clone)]
pub struct Element {
    value: Value,
    session: KSession,
}

impl Element {
    fn combine(&self, other: &Element, op: &str) -> PyResult<Element> {
        let mut s = self.session.clone();
        s.env.vars.insert("lhs__".into(), self.value.clone());
        s.env.vars.insert("rhs__".into(), other.value.clone());
        let v = s.eval_str(&format!("lhs__ {op} rhs__")).map_err(err)?;
        Ok(Element { value: v, session: self.session.clone() })
    }
}

#[pymethods]
impl Element {
    #[getter]
    fn kind(&self) -> &'static str {
        self.value.kind().name()
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn __str__(&self) -> String {
        self.value.text()
    }

    fn __repr__(&self) -> String {
        format!("Element({:?})", self.value.text())
    }

    fn __eq__(&self, other: &Element) -> bool {
        self.value == other.value
    }

    fn __add__(&self, other: &Element) -> PyResult<Element> {
        self.combine(other, "+")
    }

    fn __sub__(&self, other: &Element) -> PyResult<Element> {
        self.combine(other, "-")
    }

    fn __mul__(&self, other: &Element) -> PyResult<Element> {
        self.combine(other, "*")
    }

    fn __neg__(&self) -> PyResult<Element> {
        let mut s = self.session.clone();
        s.env.vars.insert("arg__".into(), self.value.clone());
        Ok(Element { value: s.eval_str("-arg__").map_err(err)?, session: self.session.clone() })
    }
}

/// Maurer-Cartan certificate as a dict. `context` is one of pd, pv, pv-alpha, omega, omega-zero.
#[pyfunction]
#[pyo3(signature = (element, context = None))]
fn check_mc<'py>(py: Python<'py>, element: &Element, context: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let rep = cli::mc_report(&element.session, &element.value, context).map_err(err)?;
    json_to_py(py, &rep.json())
}

/// Kodaira-Spencer class of an operator, as a polyvector element.
#[pyfunction]
fn ks_class(element: &Element) -> PyResult<Element> {
    let Some(Value::Op(t)) = element.value.clone().coerce(Kind::Op) else {
        return Err(PyValueError::new_err("ks_class expects an operator"));
    };
    let l = PdDgla::new(&element.session.env.ctx);
    let ks = kernel_ks_class(&t, &l).map_err(err)?;
    Ok(Element { value: Value::Pv(ks.g), session: element.session.clone() })
}

/// exp(Pi) pushforward and J_omega^-1 transport of a closed suspended form.
#[pyfunction]
fn theta_pi<'py>(py: Python<'py>, element: &Element) -> PyResult<Bound<'py, PyDict>> {
    let s = &element.session;
    let pair = s.env.pair.as_ref().ok_or_else(|| PyValueError::new_err("the session has no symplectic pair"))?;
    let Value::SForm(g) = &element.value else {
        return Err(PyValueError::new_err("theta_pi expects a suspended form s(...)"));
    };
    let out = theta_pi_pipeline(g, pair, &s.env.ctx).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("omega_level", Element { value: Value::SForm(out.omega_level.clone()), session: s.clone() })?;
    d.set_item("pv_level", Element { value: Value::Pv(out.pv_level.clone()), session: s.clone() })?;
    d.set_item("omega_certificate", json_to_py(py, &out.omega_certificate.json())?)?;
    d.set_item("pv_certificate", json_to_py(py, &out.pv_certificate.json())?)?;
    d.set_item("pv_in_eps_m_pv", out.pv_in_tilde)?;
    Ok(d)
}

/// Run a command-line invocation, e.g. run(["check-mc", "--example", "moyal-r2"]).
/// Returns (report text, exit status).
#[pyfunction]
fn run(args: Vec<String>) -> (String, i32) {
    cli::run_args(std::iter::once("gradef".to_string()).chain(args))
}

/// Zero element of the requested kind, handy for building sums in Python.
#[pyfunction]
fn zero(session: &Session, kind: &str) -> PyResult<Element> {
    let value = match kind {
        "polyvector" => Value::Pv(Grass::zero()),
        "suspended form" => Value::SForm(Grass::zero()),
        "form" => Value::Form(Grass::zero()),
        "operator" => Value::Op(Default::default()),
        "scalar" => Value::Scalar(Default::default()),
        _ => return Err(PyValueError::new_err(format!("unknown kind '{kind}'"))),
    };
    Ok(Element { value, session: session.inner.clone() })
}

#[pymodule]
#[pyo3(name = "gradef")]
pub fn gradef_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Session>()?;
    m.add_class::<Element>()?;
    m.add_function(wrap_pyfunction!(check_mc, m)?)?;
    m.add_function(wrap_pyfunction!(ks_class, m)?)?;
    m.add_function(wrap_pyfunction!(theta_pi, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(zero, m)?)?;
    Ok(())
}
