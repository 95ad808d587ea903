//! Python bindings. Rationals cross the boundary as `fractions.Fraction`.

use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;

use twistchar::character::{self, CaseSelector, CharacterVerdict};
use twistchar::closed_forms::closed_form_volume;
use twistchar::forms::{normal_form, CaseLabel, FormCase, QuadraticForm};
use twistchar::localfield::{self, LocalField, DEFAULT_PRECISION};
use twistchar::measure::{self, Engine, Tail};
use twistchar::zeta;

fn py_err(e: twistchar::Error) -> PyErr {
    match e {
        twistchar::Error::TailUndetected(_) | twistchar::Error::Pole(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, x: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((x.to_string(),))
}

fn field(p: u64, n_max: u32) -> PyResult<LocalField> {
    LocalField::with_precision(p, DEFAULT_PRECISION.max(n_max + 2)).map_err(py_err)
}

fn engine(name: &str) -> PyResult<Engine> {
    name.parse().map_err(py_err)
}

/// A form given by catalog label (`"I.1"`) or by expression (`"x^2 - u*y^2 + pi*z*t"`).
fn resolve_form(form: &str, field: &LocalField) -> PyResult<QuadraticForm> {
    match form.parse::<CaseLabel>() {
        Ok(label) => normal_form(&FormCase::new(label, *field).map_err(py_err)?).map_err(py_err),
        Err(_) => QuadraticForm::parse(form, field).map_err(py_err),
    }
}

/// `Q_p` with its fixed nonresidue `u` and, for p = 3 mod 4, the integer `d`.
#[pyclass(name = "LocalField", frozen)]
struct PyLocalField {
    inner: LocalField,
}

#[pymethods]
impl PyLocalField {
    #[new]
    #[pyo3(signature = (p, precision = DEFAULT_PRECISION))]
    fn new(p: u64, precision: u32) -> PyResult<Self> {
        Ok(PyLocalField {
            inner: LocalField::with_precision(p, precision).map_err(py_err)?,
        })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn u(&self) -> u64 {
        self.inner.u()
    }

    #[getter]
    fn d(&self) -> Option<u64> {
        self.inner.d()
    }

    /// Canonical name of the square class of a string such as `"-pi"`.
    fn square_class(&self, s: &str) -> PyResult<String> {
        Ok(self.inner.parse_class(s).map_err(py_err)?.to_string())
    }

    fn is_norm(&self, r: &str, d: &str) -> PyResult<bool> {
        let (r, d) = (
            self.inner.parse_class(r).map_err(py_err)?,
            self.inner.parse_class(d).map_err(py_err)?,
        );
        localfield::is_norm(r, d, &self.inner).map_err(py_err)
    }

    fn kappa(&self, r: &str, d: &str) -> PyResult<i8> {
        let (r, d) = (
            self.inner.parse_class(r).map_err(py_err)?,
            self.inner.parse_class(d).map_err(py_err)?,
        );
        localfield::kappa(r, d, &self.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("LocalField(p={}, u={})", self.inner.p(), self.inner.u())
    }
}

/// One character evaluation and its expected value.
#[pyclass(name = "Verdict", frozen, get_all)]
struct PyVerdict {
    class_type: String,
    case: String,
    label: Option<String>,
    form: String,
    computed: Option<Py<PyAny>>,
    expected: Py<PyAny>,
    expected_rule: String,
    convention: String,
    matched: bool,
    diagnostic: Option<String>,
}

impl PyVerdict {
    fn new(py: Python<'_>, v: &CharacterVerdict) -> PyResult<Self> {
        Ok(PyVerdict {
            class_type: v.class_type.to_string(),
            case: v.case.clone(),
            label: v.label.map(|l| l.to_string()),
            form: v.form.clone(),
            computed: v
                .computed
                .as_ref()
                .map(|c| fraction(py, c).map(Bound::unbind))
                .transpose()?,
            expected: fraction(py, &v.expected)?.unbind(),
            expected_rule: v.expected_rule.to_string(),
            convention: v.convention.to_string(),
            matched: v.matched,
            diagnostic: v.diagnostic.clone(),
        })
    }
}

#[pymethods]
impl PyVerdict {
    fn __repr__(&self) -> String {
        format!("Verdict({}, matched={})", self.case, self.matched)
    }
}

/// Canonical rendering of a form given by label or expression.
#[pyfunction]
fn render_form(form: &str, p: u64) -> PyResult<String> {
    let f = field(p, 0)?;
    Ok(resolve_form(form, &f)?.render(&f))
}

#[pyfunction]
fn is_isotropic(form: &str, p: u64) -> PyResult<bool> {
    let f = field(p, 0)?;
    resolve_form(form, &f)?.is_isotropic(&f).map_err(py_err)
}

/// Primitive zeros of the form mod `p^k`.
#[pyfunction]
#[pyo3(signature = (form, p, k, engine = "hensel"))]
fn count(form: &str, p: u64, k: u32, engine: &str) -> PyResult<u128> {
    let f = field(p, k)?;
    let q = resolve_form(form, &f)?;
    Ok(measure::count(&q, k, &f, self::engine(engine)?)
        .map_err(py_err)?
        .count)
}

/// `[vol(V_0^0), ..., vol(V_n_max^0)]` as fractions.
#[pyfunction]
#[pyo3(signature = (form, p, n_max = 6, engine = "hensel"))]
fn volumes<'py>(
    py: Python<'py>,
    form: &str,
    p: u64,
    n_max: u32,
    engine: &str,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let f = field(p, n_max)?;
    let q = resolve_form(form, &f)?;
    let vs = measure::volume_sequence(&q, n_max, &f, self::engine(engine)?).map_err(py_err)?;
    vs.values.iter().map(|v| fraction(py, v)).collect()
}

#[pyfunction]
fn closed_form(label: &str, n: u32, q: u64) -> PyResult<Py<PyAny>> {
    let label: CaseLabel = label.parse().map_err(py_err)?;
    Python::attach(|py| fraction(py, &closed_form_volume(label, n, q)).map(Bound::unbind))
}

/// `(rational function in X, value at s = 0, tail description)`.
#[pyfunction]
#[pyo3(signature = (form, p, n_max = 6, engine = "hensel"))]
fn zeta_sum<'py>(
    py: Python<'py>,
    form: &str,
    p: u64,
    n_max: u32,
    engine: &str,
) -> PyResult<Bound<'py, PyTuple>> {
    let f = field(p, n_max + 1)?;
    let q = resolve_form(form, &f)?;
    let vs = measure::volume_sequence(&q, n_max + 1, &f, self::engine(engine)?).map_err(py_err)?;
    let with_tail = zeta::detect_tail(&vs).map_err(py_err)?;
    let z = zeta::zeta(&vs).map_err(py_err)?;
    let tail = match with_tail.tail {
        Tail::Finite => "finite".to_string(),
        Tail::Geometric { rho, from, .. } => format!("geometric {rho} from {from}"),
        Tail::Undetected => "undetected".to_string(),
    };
    PyTuple::new(
        py,
        [
            z.rf.to_string().into_pyobject(py)?.into_any(),
            fraction(py, &z.value_at_s0)?,
            tail.into_pyobject(py)?.into_any(),
        ],
    )
}

/// Character value of one twisted class; selectors as on the command line.
#[pyfunction]
#[pyo3(signature = (p, class_type = None, case = None, d = None, a = None, r = None, br = None, n_max = 6))]
#[allow(clippy::too_many_arguments)]
fn character_value(
    py: Python<'_>,
    p: u64,
    class_type: Option<&str>,
    case: Option<&str>,
    d: Option<&str>,
    a: Option<&str>,
    r: Option<&str>,
    br: Option<&str>,
    n_max: u32,
) -> PyResult<PyVerdict> {
    let f = field(p, n_max + 1)?;
    let sel = CaseSelector {
        class_type,
        case,
        d,
        a,
        r,
        br,
    };
    let case = sel.resolve(&f).map_err(py_err)?;
    let eval = py
        .detach(|| character::character_value(&case, &f, n_max, Engine::Hensel))
        .map_err(py_err)?;
    PyVerdict::new(py, &CharacterVerdict::from_eval(&eval, &f))
}

/// Every catalog check for one prime.
#[pyfunction]
#[pyo3(signature = (p, n_max = 6))]
fn verify_all(py: Python<'_>, p: u64, n_max: u32) -> PyResult<Vec<PyVerdict>> {
    let f = field(p, n_max + 1)?;
    let verdicts = py
        .detach(|| character::verify_all(&f, n_max, Engine::Hensel))
        .map_err(py_err)?;
    verdicts.iter().map(|v| PyVerdict::new(py, v)).collect()
}

#[pymodule]
fn twistchar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLocalField>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(render_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(volumes, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_sum, m)?)?;
    m.add_function(wrap_pyfunction!(character_value, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add(
        "CASE_LABELS",
        CaseLabel::ALL
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>(),
    )?;
    Ok(())
}
