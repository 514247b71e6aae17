//! Python bindings: words, surfaces, base diagrams and collection counts.
//! Rationals cross the boundary as `"p/q"` strings.

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use logcy2::{atf, birmap, hmsbook, LatticeVector, Word};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn word(s: &str) -> PyResult<Word> {
    s.parse().map_err(value_error)
}

fn ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Whether two words realize the same birational map.
#[pyfunction]
fn equal(w1: &str, w2: &str) -> PyResult<bool> {
    Ok(birmap::equal(&word(w1)?, &word(w2)?))
}

/// The realized map as a pair of canonical rational-function strings.
#[pyfunction]
fn realize(w: &str) -> PyResult<(String, String)> {
    let m = word(w)?.realize();
    Ok((m.f.to_string(), m.g.to_string()))
}

#[pyfunction]
fn volume_character(w: &str) -> PyResult<i64> {
    word(w)?.volume_character().map_err(value_error)
}

#[pyfunction]
fn tropicalize(w: &str, vector: (i64, i64)) -> PyResult<(i64, i64)> {
    let t = word(w)?.tropicalize().apply(&LatticeVector::new(vector.0, vector.1));
    Ok((t.x, t.y))
}

/// Evaluates at a rational point given as `"p/q"` strings.
#[pyfunction]
fn evaluate(w: &str, x: &str, y: &str) -> PyResult<(String, String)> {
    let parse = |s: &str| s.parse::<BigRational>().map_err(|_| value_error(format!("bad rational {s:?}")));
    let (x, y) = (parse(x)?, parse(y)?);
    let m = word(w)?.realize();
    let (a, b) = m.evaluate(&x, &y).map_err(value_error)?;
    Ok((ratio(&a), ratio(&b)))
}

/// A log Calabi-Yau surface with an explicit toric model.
#[pyclass(frozen)]
struct Surface {
    inner: logcy2::Surface,
}

#[pymethods]
impl Surface {
    /// From `[(ray, m), ...]` in any order.
    #[new]
    fn new(pairs: Vec<((i64, i64), u32)>) -> PyResult<Self> {
        let inner = logcy2::Surface::from_pairs(pairs.into_iter().map(|((x, y), m)| (LatticeVector::new(x, y), m)))
            .map_err(value_error)?;
        Ok(Surface { inner })
    }

    #[staticmethod]
    fn cubic() -> Self {
        Surface { inner: logcy2::Surface::cubic() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Surface { inner: logcy2::Surface::from_json(text).map_err(value_error)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn rays(&self) -> Vec<(i64, i64)> {
        self.inner.rays().iter().map(|r| (r.x, r.y)).collect()
    }

    #[getter]
    fn m(&self) -> Vec<u32> {
        self.inner.m().to_vec()
    }

    fn pushforward(&self, w: &str) -> PyResult<Surface> {
        Ok(Surface { inner: self.inner.pushforward(&word(w)?).map_err(value_error)? })
    }

    fn resolve(&self, w: &str) -> PyResult<Surface> {
        Ok(Surface { inner: self.inner.resolve(&word(w)?) })
    }

    fn leq(&self, other: &Surface) -> bool {
        self.inner.leq(&other.inner)
    }

    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let n = self.inner.numeric_invariants();
        let d = PyDict::new(py);
        d.set_item("k", n.k)?;
        d.set_item("total_m", n.total_m)?;
        d.set_item("b2", n.b2)?;
        d.set_item("chi_y", n.chi_y)?;
        d.set_item("chi_u", n.chi_u)?;
        Ok(d)
    }

    fn self_intersections(&self) -> Vec<i64> {
        self.inner.fan().toric_self_intersections()
    }

    fn negative_definite(&self) -> PyResult<bool> {
        Ok(self.inner.boundary_intersection_matrix().map_err(value_error)?.negative_definite)
    }

    /// Canonical JSON of the almost-toric base diagram.
    fn diagram(&self) -> String {
        atf::diagram(&self.inner).to_json()
    }

    fn diagram_svg(&self) -> String {
        atf::diagram(&self.inner).render_svg()
    }

    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = hmsbook::check_counts(&self.inner);
        let d = PyDict::new(py);
        d.set_item("exceptional", r.exceptional)?;
        d.set_item("vanishing", r.vanishing)?;
        d.set_item("chi_y", r.chi_y)?;
        d.set_item("visible_spheres", r.visible_spheres)?;
        d.set_item("pass", r.pass)?;
        Ok(d)
    }

    fn __eq__(&self, other: &Surface) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Surface({})", self.inner.to_json())
    }
}

/// Applies a word to a base diagram given as JSON; returns canonical JSON.
#[pyfunction]
fn apply_to_diagram(diagram: &str, w: &str) -> PyResult<String> {
    let d = logcy2::BaseDiagram::from_json(diagram).map_err(value_error)?;
    Ok(d.apply_word(&word(w)?).map_err(value_error)?.to_json())
}

#[pymodule]
fn logcy2_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(equal, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(volume_character, m)?)?;
    m.add_function(wrap_pyfunction!(tropicalize, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(apply_to_diagram, m)?)?;
    m.add_class::<Surface>()?;
    Ok(())
}
