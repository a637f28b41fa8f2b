//! Python bindings for `dglab-core`.
//!
//! Rationals cross the boundary as `fractions.Fraction` on the way out; on the
//! way in anything whose `str()` is `"p/q"` or an integer is accepted.
//! Structured results (certificates, memberships, spectra) are returned as
//! plain dicts and lists built from their JSON rendering.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use dglab_core::group::{in_g_plus, in_g_plusplus};
use dglab_core::k_theory;
use dglab_core::param_set::{self, BetaSet};
use dglab_core::poly::IntPoly;
use dglab_core::positivity;
use dglab_core::rational::{parse_rational, Rational};
use dglab_core::report::{beta_component_json, certificate_json, membership_json};
use dglab_core::riesz;
use dglab_core::sandwich::{self, SearchCaps};
use dglab_core::serial::{self, FileFormat, ParseOptions};
use dglab_core::traces;
use dglab_core::verify::{self as core_verify, Scale};
use dglab_core::Error;

create_exception!(dglab, DglabError, PyException, "Base class for dglab errors.");
create_exception!(dglab, ParseError, DglabError, "Malformed input.");
create_exception!(dglab, DomainError, DglabError, "Argument outside its domain or limits.");
create_exception!(dglab, SpecError, DglabError, "Invalid (F, F1) specification.");
create_exception!(dglab, PreconditionError, DglabError, "A mathematical precondition does not hold.");
create_exception!(dglab, SearchExhausted, DglabError, "Search caps reached without a verified answer.");
create_exception!(dglab, InternalError, DglabError, "An internal consistency check failed.");

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } => ParseError::new_err(msg),
        Error::Domain(_) | Error::Limit(_) => DomainError::new_err(msg),
        Error::EmptyF | Error::HalfPointViolation(_) => SpecError::new_err(msg),
        Error::Precondition(_)
        | Error::Infeasible(_)
        | Error::NotOrderUnit(_)
        | Error::HalfPointInfeasible(_)
        | Error::AtomOutsideF(_) => PreconditionError::new_err(msg),
        Error::SearchExhausted(_) => SearchExhausted::new_err(msg),
        Error::Internal(_) => InternalError::new_err(msg),
    }
}

fn rational_in(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    parse_rational(&text)
        .map(|p| p.value)
        .map_err(|_| ParseError::new_err(format!("not a rational: {text:?}")))
}

fn rational_out<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((q.numer().clone(), q.denom().clone()))
}

fn json_out<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((v.to_string(),))
}

fn parse_json<T: FileFormat>(text: &str, strict: bool) -> PyResult<T> {
    serial::parse::<T>(text, ParseOptions { strict })
        .map(|p| p.value)
        .map_err(err)
}

fn caps(max_degree: Option<usize>) -> SearchCaps {
    let mut c = SearchCaps::from_env();
    if let Some(d) = max_degree {
        c.max_degree = d;
    }
    c
}

/// `num(t) / (t^t_pow (1 - t)^omt_pow)` with integer coefficients, kept in
/// canonical form.
#[pyclass(name = "RingElement", module = "dglab", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyRing(dglab_core::RingElement);

#[pymethods]
impl PyRing {
    #[new]
    #[pyo3(signature = (num, t_pow = 0, omt_pow = 0))]
    fn new(num: Vec<BigInt>, t_pow: u32, omt_pow: u32) -> PyResult<Self> {
        let x = dglab_core::RingElement::canon(IntPoly::new(num), t_pow, omt_pow);
        dglab_core::ring::Limits::default().check(&x).map_err(err)?;
        Ok(PyRing(x))
    }

    #[staticmethod]
    #[pyo3(signature = (text, strict = false))]
    fn from_json(text: &str, strict: bool) -> PyResult<Self> {
        parse_json(text, strict).map(PyRing)
    }

    #[staticmethod]
    fn riesz_weight() -> Self {
        PyRing(dglab_core::RingElement::riesz_weight())
    }

    #[staticmethod]
    fn alpha_multiplier() -> Self {
        PyRing(dglab_core::RingElement::alpha_multiplier())
    }

    fn to_json(&self) -> String {
        serial::emit(&self.0)
    }

    #[getter]
    fn num(&self) -> Vec<BigInt> {
        self.0.numerator().coeffs().to_vec()
    }

    #[getter]
    fn t_pow(&self) -> u32 {
        self.0.t_pow()
    }

    #[getter]
    fn omt_pow(&self) -> u32 {
        self.0.omt_pow()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `alpha^k`, multiplication by `(t / (1 - t))^k`.
    #[pyo3(signature = (k = 1))]
    fn alpha(&self, k: i64) -> Self {
        PyRing(self.0.alpha(k))
    }

    fn eval<'py>(&self, py: Python<'py>, t: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let v = self.0.eval(&rational_in(t)?).map_err(err)?;
        rational_out(py, &v)
    }

    fn __add__(&self, other: &Self) -> Self {
        PyRing(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyRing(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyRing(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        PyRing(-&self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RingElement({})", self.0)
    }
}

/// A finite union of points and closed intervals in `(0, 1)`.
#[pyclass(name = "ParamSet", module = "dglab", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PySet(param_set::ParamSet);

#[pymethods]
impl PySet {
    #[new]
    #[pyo3(signature = (points = Vec::new(), intervals = Vec::new()))]
    fn new(
        points: Vec<Bound<'_, PyAny>>,
        intervals: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>,
    ) -> PyResult<Self> {
        let points = points.iter().map(rational_in).collect::<PyResult<Vec<_>>>()?;
        let intervals = intervals
            .iter()
            .map(|(a, b)| Ok((rational_in(a)?, rational_in(b)?)))
            .collect::<PyResult<Vec<_>>>()?;
        param_set::ParamSet::normalize(points, intervals)
            .map(PySet)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, strict = false))]
    fn from_json(text: &str, strict: bool) -> PyResult<Self> {
        parse_json(text, strict).map(PySet)
    }

    fn to_json(&self) -> String {
        serial::emit(&self.0)
    }

    fn __contains__(&self, t: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.member(&rational_in(t)?))
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn __repr__(&self) -> String {
        format!("ParamSet({})", self.to_json())
    }
}

/// A finitely supported sequence of ring elements indexed by the integers.
#[pyclass(name = "GroupElement", module = "dglab", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyGroup(dglab_core::GroupElement);

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (entries = None))]
    fn new(entries: Option<Vec<(i64, PyRing)>>) -> PyResult<Self> {
        let entries = entries.unwrap_or_default().into_iter().map(|(n, r)| (n, r.0));
        dglab_core::GroupElement::from_entries(entries)
            .map(PyGroup)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, strict = false))]
    fn from_json(text: &str, strict: bool) -> PyResult<Self> {
        parse_json(text, strict).map(PyGroup)
    }

    fn to_json(&self) -> String {
        serial::emit(&self.0)
    }

    fn entries<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (n, v) in self.0.entries() {
            d.set_item(*n, PyRing(v.clone()))?;
        }
        Ok(d)
    }

    fn __getitem__(&self, n: i64) -> PyRing {
        PyRing(self.0.get(n))
    }

    #[pyo3(signature = (k = 1))]
    fn gamma_star(&self, k: i64) -> Self {
        PyGroup(self.0.gamma_star(k))
    }

    /// `(id - gamma_star)(x)`.
    fn coboundary(&self) -> Self {
        PyGroup(self.0.coboundary())
    }

    fn sum_alpha(&self) -> PyRing {
        PyRing(self.0.sum_alpha())
    }

    fn sum_plain(&self) -> PyRing {
        PyRing(self.0.sum_plain())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __add__(&self, other: &Self) -> Self {
        PyGroup(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyGroup(&self.0 - &other.0)
    }

    fn __neg__(&self) -> Self {
        PyGroup(-&self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("GroupElement({})", self.0)
    }
}

/// A validated pair `(F, F1)`.
#[pyclass(name = "KmsSpec", module = "dglab", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PySpec(param_set::KmsSpec);

#[pymethods]
impl PySpec {
    #[new]
    fn new(f: &PySet, f1: &PySet) -> PyResult<Self> {
        param_set::validate_spec(f.0.clone(), f1.0.clone())
            .map(PySpec)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, strict = false))]
    fn from_json(text: &str, strict: bool) -> PyResult<Self> {
        parse_json(text, strict).map(PySpec)
    }

    fn to_json(&self) -> String {
        serial::emit(&self.0)
    }

    #[getter]
    fn f(&self) -> PySet {
        PySet(self.0.f().clone())
    }

    #[getter]
    fn f1(&self) -> PySet {
        PySet(self.0.f1().clone())
    }

    fn __repr__(&self) -> String {
        format!("KmsSpec({})", self.to_json())
    }
}

/// The outcome of an exact positivity decision.
#[pyclass(name = "PositivityCertificate", module = "dglab", frozen)]
pub struct PyCertificate(positivity::PositivityCertificate);

#[pymethods]
impl PyCertificate {
    #[getter]
    fn verdict(&self) -> &'static str {
        dglab_core::report::verdict_str(self.0.verdict)
    }

    fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    fn __bool__(&self) -> bool {
        self.0.is_positive()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_out(py, &certificate_json(&self.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PositivityCertificate({})", self.verdict())
    }
}

#[pyfunction]
fn is_positive_on(f: &PyRing, s: &PySet) -> PyCertificate {
    PyCertificate(positivity::is_positive_on(&f.0, &s.0))
}

#[pyfunction]
fn embed_single(a: &PyRing) -> PyGroup {
    PyGroup(dglab_core::embed_single(&a.0))
}

/// `[[-b, a, b]]` at indices `-1, 0, 1`.
#[pyfunction]
fn embed_triple(a: &PyRing, b: &PyRing) -> PyGroup {
    PyGroup(dglab_core::embed_triple(&a.0, &b.0))
}

/// Membership of `x` in `G+` with one certificate per clause, as a dict.
#[pyfunction]
fn g_plus_membership<'py>(py: Python<'py>, x: &PyGroup, spec: &PySpec) -> PyResult<Bound<'py, PyAny>> {
    json_out(py, &membership_json(&in_g_plus(&x.0, &spec.0)))
}

#[pyfunction(name = "in_g_plusplus")]
fn g_plusplus_member(x: &PyGroup, f: &PySet) -> bool {
    in_g_plusplus(&x.0, &f.0).0
}

/// Solves a sandwich problem given in its JSON format. Returns the candidate
/// and the degree and iteration count at which it was found.
#[pyfunction]
#[pyo3(signature = (problem_json, strict = false))]
fn solve_sandwich(problem_json: &str, strict: bool) -> PyResult<(PyRing, usize, usize)> {
    let p: sandwich::SandwichProblem = parse_json(problem_json, strict)?;
    let sol = sandwich::solve_sandwich(&p).map_err(err)?;
    Ok((
        PyRing(dglab_core::RingElement::from_poly(sol.candidate)),
        sol.degree,
        sol.iterations,
    ))
}

/// Some `z = [[-b, a, b]]` with `x_i <= z <= y_j`. Returns `(z, a, b, info)`
/// where `info` holds the four membership certificates.
#[pyfunction]
#[pyo3(signature = (x1, x2, y1, y2, spec, max_degree = None))]
fn interpolate<'py>(
    py: Python<'py>,
    x1: &PyGroup,
    x2: &PyGroup,
    y1: &PyGroup,
    y2: &PyGroup,
    spec: &PySpec,
    max_degree: Option<usize>,
) -> PyResult<(PyGroup, PyRing, PyRing, Bound<'py, PyAny>)> {
    let r = py
        .detach(|| riesz::interpolate([&x1.0, &x2.0], [&y1.0, &y2.0], &spec.0, caps(max_degree)))
        .map_err(err)?;
    let info = serde_json::json!({
        "degenerate": r.degenerate,
        "lower": r.lower.iter().map(membership_json).collect::<Vec<_>>(),
        "upper": r.upper.iter().map(membership_json).collect::<Vec<_>>(),
    });
    let ring = |p: IntPoly| PyRing(dglab_core::RingElement::from_poly(p));
    Ok((PyGroup(r.z), ring(r.a), ring(r.b), json_out(py, &info)?))
}

#[pyfunction]
fn in_image(x: &PyGroup) -> bool {
    k_theory::in_image(&x.0)
}

#[pyfunction]
fn solve_coboundary(x: &PyGroup) -> PyResult<PyGroup> {
    k_theory::solve_coboundary(&x.0).map(PyGroup).map_err(err)
}

/// `S(q(x)) = sum_n alpha^n(x_n)`.
#[pyfunction]
fn s_map(x: &PyGroup) -> PyRing {
    PyRing(k_theory::s_of(&x.0))
}

/// A member `y` of `G+` in the coset of `x`, with `b` such that
/// `y = x + [[-alpha(b), 0, alpha^-1(b)]]`.
#[pyfunction]
#[pyo3(signature = (x, spec, max_degree = None))]
fn positive_representative(
    py: Python<'_>,
    x: &PyGroup,
    spec: &PySpec,
    max_degree: Option<usize>,
) -> PyResult<(PyGroup, PyRing)> {
    let r = py
        .detach(|| k_theory::positive_representative(&x.0, &spec.0, caps(max_degree)))
        .map_err(err)?;
    Ok((PyGroup(r.y), PyRing(dglab_core::RingElement::from_poly(r.b))))
}

/// `(kind, t0)` of the evaluation functional at `t0`: kind is `"plain"` or
/// `"twisted"`.
#[pyfunction]
fn trace<'py>(
    py: Python<'py>,
    kind: &str,
    t0: &Bound<'py, PyAny>,
    x: &PyGroup,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = match kind {
        "plain" => traces::TraceKind::Plain,
        "twisted" => traces::TraceKind::Twisted,
        other => return Err(DomainError::new_err(format!("unknown trace kind {other:?}"))),
    };
    let tf = traces::TraceFunctional::new(kind, rational_in(t0)?).map_err(err)?;
    rational_out(py, &tf.apply(&x.0))
}

/// `sum_i w_i * twisted_{t_i}(x)` over `atoms = [(t_i, w_i), ...]` in `f`.
#[pyfunction]
fn measure_trace<'py>(
    py: Python<'py>,
    atoms: Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>,
    f: &PySet,
    x: &PyGroup,
) -> PyResult<Bound<'py, PyAny>> {
    let atoms = atoms
        .iter()
        .map(|(t, w)| Ok((rational_in(t)?, rational_in(w)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let m = traces::AtomicMeasure::new(atoms).map_err(err)?;
    let v = traces::measure_trace(&m, &f.0, &x.0).map_err(err)?;
    rational_out(py, &v)
}

/// The point `t0` of the plain trace scaled by `s` under `gamma_star`, or
/// `None` when `s / (1 + s)` is outside `F1`.
#[pyfunction]
fn classify_eigenfunctional<'py>(
    py: Python<'py>,
    s: &Bound<'py, PyAny>,
    spec: &PySpec,
) -> PyResult<Option<Bound<'py, PyAny>>> {
    match traces::classify_eigenfunctional(&rational_in(s)?, &spec.0).map_err(err)? {
        traces::Eigenfunctional::Constructed(tf) => Ok(Some(rational_out(py, tf.t0())?)),
        traces::Eigenfunctional::Absent { .. } => Ok(None),
    }
}

/// The inverse temperature spectrum as a list of component dicts.
#[pyfunction]
fn kms_spectrum<'py>(py: Python<'py>, spec: &PySpec) -> PyResult<Bound<'py, PyList>> {
    let items = traces::kms_spectrum(&spec.0)
        .iter()
        .map(|c| json_out(py, &beta_component_json(c)))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// `F1` realizing the inverse temperatures `points ∪ intervals ∪ {0}`.
#[pyfunction]
#[pyo3(signature = (points = Vec::new(), intervals = Vec::new(), precision = 30))]
fn f1_for_k(points: Vec<f64>, intervals: Vec<(f64, f64)>, precision: u32) -> PyResult<PySet> {
    param_set::f1_for_k(&BetaSet { points, intervals }, precision)
        .map(|r| PySet(r.set))
        .map_err(err)
}

/// Runs the seeded replay suites; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (seed = 42, scale = "small", suites = Vec::new(), timing = false))]
fn run_verify(
    py: Python<'_>,
    seed: u64,
    scale: &str,
    suites: Vec<String>,
    timing: bool,
) -> PyResult<(bool, String)> {
    let scale: Scale = scale.parse().map_err(DomainError::new_err)?;
    let only: Vec<&str> = suites.iter().map(String::as_str).collect();
    let report = py.detach(|| core_verify::run_verify_suites(seed, scale, &only));
    Ok((report.passed(), report.to_text(timing)))
}

#[pymodule]
fn dglab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DglabError", py.get_type::<DglabError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("SpecError", py.get_type::<SpecError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("SearchExhausted", py.get_type::<SearchExhausted>())?;
    m.add("InternalError", py.get_type::<InternalError>())?;
    m.add_class::<PyRing>()?;
    m.add_class::<PySet>()?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PySpec>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(is_positive_on, m)?)?;
    m.add_function(wrap_pyfunction!(embed_single, m)?)?;
    m.add_function(wrap_pyfunction!(embed_triple, m)?)?;
    m.add_function(wrap_pyfunction!(g_plus_membership, m)?)?;
    m.add_function(wrap_pyfunction!(g_plusplus_member, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sandwich, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(in_image, m)?)?;
    m.add_function(wrap_pyfunction!(solve_coboundary, m)?)?;
    m.add_function(wrap_pyfunction!(s_map, m)?)?;
    m.add_function(wrap_pyfunction!(positive_representative, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(measure_trace, m)?)?;
    m.add_function(wrap_pyfunction!(classify_eigenfunctional, m)?)?;
    m.add_function(wrap_pyfunction!(kms_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(f1_for_k, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
