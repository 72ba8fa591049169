//! Python bindings. Exact values cross the boundary as `fractions.Fraction`.

use lfpoly::polytope::{certify_inside, certify_outside, parse_representation, Representation};
use lfpoly::{models, quantum, verify, Error, Rational};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

fn err(e: Error) -> PyErr {
    match e {
        Error::ScaleGuard(_) | Error::Unbounded | Error::Empty => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format!("{}/{}", r.numer(), r.denom()),))
}

fn fractions<'py>(py: Python<'py>, v: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = v.iter().map(|r| fraction(py, r)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// Accepts ints, `Fraction`s or strings such as `"1/2"`.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = if let Ok(n) = obj.getattr("numerator") {
        format!("{}/{}", n.str()?, obj.getattr("denominator")?.str()?)
    } else {
        obj.str()?.to_string()
    };
    lfpoly::rational::parse_rational(&text).map_err(PyValueError::new_err)
}

#[pyclass(name = "Scenario", frozen)]
struct PyScenario(lfpoly::Scenario);

#[pymethods]
impl PyScenario {
    #[new]
    fn new(alice_outcomes: Vec<usize>, bob_outcomes: Vec<usize>) -> PyResult<Self> {
        lfpoly::Scenario::new(alice_outcomes, bob_outcomes).map(Self).map_err(err)
    }

    #[staticmethod]
    fn homogeneous(ma: usize, na: usize, mb: usize, nb: usize) -> PyResult<Self> {
        lfpoly::Scenario::homogeneous(ma, na, mb, nb).map(Self).map_err(err)
    }

    #[staticmethod]
    fn chsh() -> Self {
        Self(lfpoly::Scenario::chsh())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn coord_index(&self, x: usize, y: usize, a: usize, b: usize) -> PyResult<usize> {
        self.0.coord_index(x, y, a, b).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Scenario({})", self.0.spec_line())
    }
}

#[pyclass(name = "Behaviour", frozen)]
struct PyBehaviour(lfpoly::Behaviour);

#[pymethods]
impl PyBehaviour {
    #[new]
    fn new(scenario: &PyScenario, coords: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let coords = coords.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        lfpoly::Behaviour::new(scenario.0.clone(), coords).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        lfpoly::Behaviour::from_text(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn coords<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.0.coords())
    }

    fn is_valid(&self) -> bool {
        self.0.is_valid()
    }

    fn is_no_signalling(&self) -> bool {
        self.0.is_no_signalling()
    }

    #[getter]
    fn scenario(&self) -> PyScenario {
        PyScenario(self.0.scenario().clone())
    }
}

#[pyclass(name = "VPolytope", frozen)]
struct PyVPolytope(lfpoly::VPolytope);

#[pymethods]
impl PyVPolytope {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        match parse_representation(text).map_err(err)? {
            Representation::V(v) => Ok(Self(v)),
            Representation::H(h) => lfpoly::vertex_enum(&h).map(Self).map_err(err),
        }
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn vertices<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyList>>> {
        self.0.vertices().iter().map(|v| fractions(py, v)).collect()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    /// H-representation text of the convex hull.
    fn facets_text(&self) -> PyResult<String> {
        lfpoly::facet_enum(&self.0).map(|h| h.to_text()).map_err(err)
    }

    fn num_facets(&self) -> PyResult<usize> {
        lfpoly::facet_enum(&self.0).map(|h| h.inequalities.len()).map_err(err)
    }

    /// `(True, weights)` or `(False, separator_row)`; rows are
    /// `[offset, coeffs...]` with `row · (1, p) >= 0` on the polytope.
    /// Certificates are re-checked before returning.
    fn membership<'py>(&self, py: Python<'py>, point: &PyBehaviour) -> PyResult<(bool, Bound<'py, PyList>)> {
        let p = point.0.coords();
        match lfpoly::membership(p, &self.0).map_err(err)? {
            lfpoly::MembershipResult::Inside { weights } => {
                debug_assert!(certify_inside(p, &self.0, &weights));
                Ok((true, fractions(py, &weights)?))
            }
            lfpoly::MembershipResult::Outside { separator } => {
                debug_assert!(certify_outside(p, &self.0, &separator));
                let mut row = vec![separator.offset.clone()];
                row.extend(separator.coeffs);
                Ok((false, fractions(py, &row)?))
            }
        }
    }

    fn equals(&self, other: &PyVPolytope) -> bool {
        lfpoly::polytope_equal(&self.0, &other.0)
    }
}

#[pyfunction]
fn ld_vertices(scenario: &PyScenario) -> PyVPolytope {
    PyVPolytope(models::ld_vertices(&scenario.0))
}

#[pyfunction]
fn ns_vertices(scenario: &PyScenario) -> PyResult<PyVPolytope> {
    models::ns_vertices(&scenario.0).map(PyVPolytope).map_err(err)
}

#[pyfunction]
fn lf_vertices(scenario: &PyScenario) -> PyResult<PyVPolytope> {
    models::lf_vertices(&scenario.0).map(PyVPolytope).map_err(err)
}

/// `det_alice`, `det_bob` are 0-based input lists.
#[pyfunction]
fn pd_vertices(scenario: &PyScenario, det_alice: Vec<usize>, det_bob: Vec<usize>) -> PyResult<PyVPolytope> {
    let spec = models::PdSpec::new(scenario.0.clone(), det_alice, det_bob).map_err(err)?;
    models::pd_vertices(&spec).map(PyVPolytope).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rounds, bob_outcomes, friend_alphabet = 2, final_alphabet = 2))]
fn sw_vertices(rounds: usize, bob_outcomes: Vec<usize>, friend_alphabet: usize, final_alphabet: usize) -> PyResult<(PyScenario, PyVPolytope)> {
    let sw = models::sw_vertices(&vec![friend_alphabet; rounds], final_alphabet, &bob_outcomes).map_err(err)?;
    Ok((PyScenario(sw.scenario), PyVPolytope(sw.polytope)))
}

/// `-(CH row)` at `p`: positive values violate the CH inequality.
#[pyfunction]
fn ch_value(p: &PyBehaviour) -> PyResult<Py<PyAny>> {
    let row = models::ch_row(p.0.scenario()).map_err(err)?;
    let v = -models::evaluate_inequality(&row, &p.0).map_err(err)?;
    Python::attach(|py| fraction(py, &v).map(Bound::unbind))
}

/// Born-rule behaviour of `|Φ+⟩` with polarization angles per input.
#[pyfunction]
fn phi_plus_behaviour(alice_angles: Vec<f64>, bob_angles: Vec<f64>) -> PyResult<PyBehaviour> {
    let a: Vec<_> = alice_angles.into_iter().map(quantum::polarization_projectors).collect();
    let b: Vec<_> = bob_angles.into_iter().map(quantum::polarization_projectors).collect();
    quantum::born_behaviour(&quantum::StateVector::phi_plus(), &a, &b)
        .map(|q| PyBehaviour(q.exact))
        .map_err(err)
}

/// Sequential protocol on `|Φ+⟩`: friend angles per round, a final angle
/// and Bob's angles. Returns the exact behaviour and the largest raw
/// deviation from the equivalent Born-rule behaviour.
#[pyfunction]
fn sequential_phi_plus(friend_angles: Vec<f64>, final_angle: f64, bob_angles: Vec<f64>) -> PyResult<(PyBehaviour, f64)> {
    let f: Vec<_> = friend_angles.into_iter().map(quantum::polarization_projectors).collect();
    let b: Vec<_> = bob_angles.into_iter().map(quantum::polarization_projectors).collect();
    let proto = quantum::SequentialProtocol::new(
        quantum::StateVector::phi_plus(),
        f,
        quantum::polarization_projectors(final_angle),
        b,
    )
    .map_err(err)?;
    let seq = quantum::sequential_behaviour(&proto).map_err(err)?;
    let born = quantum::born_behaviour(&proto.initial_state, &proto.alice_settings(), &proto.bob_measurements).map_err(err)?;
    let gap = seq.max_raw_distance(&born);
    Ok((PyBehaviour(seq.exact), gap))
}

/// Runs a claim and returns `(passed, report_text)`. `claim` is one of
/// `theorem5` (uses `rounds`), `woodhead` (CHSH, uses `k`), `lf-gap`
/// (uses `m`) or `quantum`.
#[pyfunction]
#[pyo3(signature = (claim, rounds = 1, k = 0, m = 2))]
fn verify_claim(py: Python<'_>, claim: &str, rounds: usize, k: usize, m: usize) -> PyResult<(bool, String)> {
    let guard = verify::ScaleGuard::from_env();
    let report = py
        .detach(|| match claim {
            "theorem5" => verify::verify_theorem5(rounds, &[2, 2], 2, 2, &guard),
            "woodhead" => verify::verify_woodhead(&lfpoly::Scenario::chsh(), k, &[], &guard),
            "lf-gap" => verify::verify_lf_gap(m, &guard),
            "quantum" => verify::verify_quantum_violation(),
            other => Err(Error::Invalid(format!("unknown claim {other:?}"))),
        })
        .map_err(err)?;
    Ok((report.passed(), report.to_text()))
}

#[pymodule]
#[pyo3(name = "lfpoly")]
fn lfpoly_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyBehaviour>()?;
    m.add_class::<PyVPolytope>()?;
    m.add_function(wrap_pyfunction!(ld_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(ns_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(lf_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(pd_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(sw_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(ch_value, m)?)?;
    m.add_function(wrap_pyfunction!(phi_plus_behaviour, m)?)?;
    m.add_function(wrap_pyfunction!(sequential_phi_plus, m)?)?;
    m.add_function(wrap_pyfunction!(verify_claim, m)?)?;
    Ok(())
}
