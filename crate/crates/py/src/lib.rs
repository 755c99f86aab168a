//! Python module `biext`.

use biext_core::biext::{self as bx, metric_of};
use biext_core::json::{elem_to_json, model_report, witt_to_json, HomJson, MetricGroupJson, OrePolyJson};
use biext_core::mgrp::witt_class;
use biext_core::ppoly::{self, solve_g, solve_r};
use biext_core::{make_field, BiextModel, Caps, Error, FieldElem, MetricGroup, OreMatrix, OrePoly};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    if e.is_cap() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("invalid JSON: {e}"))
}

fn caps(max_ext: usize, enum_cap: usize, iso_cap: usize) -> Caps {
    Caps {
        max_ext,
        enum_cap,
        iso_cap,
        ..Caps::default()
    }
}

/// An element of `F_{p^m}{tau, tau^-1}`; coefficients are little-endian
/// digit lists.
#[pyclass(name = "OrePoly", module = "biext", eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyOrePoly {
    inner: OrePoly,
}

#[pymethods]
impl PyOrePoly {
    #[new]
    fn new(p: u32, m: usize, terms: Vec<(i64, Vec<u32>)>) -> PyResult<Self> {
        let ctx = make_field(p, m).map_err(err)?;
        let terms = terms
            .into_iter()
            .map(|(e, c)| Ok((e, FieldElem::from_coeffs(&ctx, &c)?)))
            .collect::<Result<Vec<_>, Error>>()
            .map_err(err)?;
        let inner = OrePoly::from_terms(&ctx, terms).map_err(err)?;
        Ok(PyOrePoly { inner })
    }

    /// `tau - tau^-1` over `F_p`.
    #[staticmethod]
    fn worked_example(p: u32) -> PyResult<Self> {
        let k = make_field(p, 1).map_err(err)?;
        Ok(PyOrePoly {
            inner: OrePoly::from_prime_terms(&k, &[(1, 1), (-1, -1)]),
        })
    }

    /// A seeded random skew element with terms in `-n..=n`.
    #[staticmethod]
    fn random_skew(p: u32, m: usize, n: u32, seed: u64) -> PyResult<Self> {
        let k = make_field(p, m).map_err(err)?;
        Ok(PyOrePoly {
            inner: OrePoly::random_skew(&k, n, seed),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: OrePolyJson = serde_json::from_str(text).map_err(json_err)?;
        Ok(PyOrePoly {
            inner: j.to_poly().map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&OrePolyJson::from_poly(&self.inner)).expect("serializable")
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.ctx().degree()
    }

    fn terms(&self) -> Vec<(i64, Vec<u32>)> {
        self.inner.terms().map(|(e, c)| (e, elem_to_json(c))).collect()
    }

    fn adjoint(&self) -> Self {
        PyOrePoly {
            inner: self.inner.adjoint(),
        }
    }

    fn is_skew(&self) -> bool {
        self.inner.is_skew()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyOrePoly {
            inner: self.inner.try_add(&other.inner).map_err(err)?,
        })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyOrePoly {
            inner: self.inner.try_sub(&other.inner).map_err(err)?,
        })
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyOrePoly {
            inner: self.inner.try_mul(&other.inner).map_err(err)?,
        })
    }

    fn __neg__(&self) -> Self {
        PyOrePoly {
            inner: self.inner.neg(),
        }
    }

    /// Size of the kernel on `F_p`-bar.
    #[pyo3(signature = (max_ext = 64))]
    fn kernel_size(&self, max_ext: usize) -> PyResult<u64> {
        Ok(self.inner.kernel(max_ext).map_err(err)?.size())
    }

    /// Whether `r^p - r = x f(x)` and `g^p - g = f(u) v - u f*(v)` hold for
    /// the solver outputs.
    fn check_solvers(&self) -> PyResult<bool> {
        let r = solve_r(&self.inner).map_err(err)?;
        let g = solve_g(&self.inner);
        Ok(r.frob_minus_id() == ppoly::r_target(&self.inner)
            && g.frob_minus_id() == ppoly::g_target(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("OrePoly({})", self.to_json())
    }
}

/// A finite abelian p-group with a `Q_p/Z_p`-valued quadratic form.
#[pyclass(name = "MetricGroup", module = "biext", skip_from_py_object)]
#[derive(Clone)]
struct PyMetricGroup {
    inner: MetricGroup,
}

#[pymethods]
impl PyMetricGroup {
    #[staticmethod]
    fn norm_form(p: u32) -> PyResult<Self> {
        Ok(PyMetricGroup {
            inner: MetricGroup::norm_form_group(p).map_err(err)?,
        })
    }

    #[staticmethod]
    fn hyperbolic(p: u32) -> PyResult<Self> {
        Ok(PyMetricGroup {
            inner: MetricGroup::hyperbolic_plane(p).map_err(err)?,
        })
    }

    /// `(Z/p, a x^2 / p)` for odd `p`.
    #[staticmethod]
    fn rank1(p: u32, a: u32) -> PyResult<Self> {
        Ok(PyMetricGroup {
            inner: MetricGroup::rank1(p, a).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: MetricGroupJson = serde_json::from_str(text).map_err(json_err)?;
        Ok(PyMetricGroup {
            inner: j.to_group().map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&MetricGroupJson::from_group(&self.inner)).expect("serializable")
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn orders(&self) -> Vec<u64> {
        self.inner.orders().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    /// `q` on the element with index `a`, as `(numerator, denominator)`.
    fn q(&self, a: usize) -> PyResult<(u64, u64)> {
        if a >= self.inner.size() {
            return Err(PyValueError::new_err("element index out of range"));
        }
        Ok(self.inner.q_value(a).fraction())
    }

    fn is_metric(&self) -> bool {
        self.inner.is_metric()
    }

    fn direct_sum(&self, other: &Self) -> PyResult<Self> {
        Ok(PyMetricGroup {
            inner: self.inner.direct_sum(&other.inner).map_err(err)?,
        })
    }

    fn negated(&self) -> Self {
        PyMetricGroup {
            inner: self.inner.negated(),
        }
    }

    #[pyo3(signature = (max_count = 1_000_000, enum_cap = 4096))]
    fn isotropic_subgroups(&self, max_count: usize, enum_cap: usize) -> PyResult<Vec<Vec<usize>>> {
        self.inner.isotropic_subgroups(max_count, enum_cap).map_err(err)
    }

    #[pyo3(signature = (enum_cap = 4096))]
    fn anisotropic_kernel(&self, enum_cap: usize) -> PyResult<Self> {
        Ok(PyMetricGroup {
            inner: self.inner.anisotropic_kernel(enum_cap).map_err(err)?,
        })
    }

    /// The Gauss sum as `(conductor, coefficients)` over powers of
    /// `exp(2 pi i / conductor)`.
    #[pyo3(signature = (gauss_cap = 1_000_000))]
    fn gauss_sum(&self, gauss_cap: usize) -> PyResult<(u64, Vec<i64>)> {
        let s = self.inner.gauss_sum(gauss_cap).map_err(err)?;
        Ok((s.conductor(), s.coeffs().to_vec()))
    }

    /// The Gauss sum when it is a rational integer.
    #[pyo3(signature = (gauss_cap = 1_000_000))]
    fn gauss_int(&self, gauss_cap: usize) -> PyResult<Option<i64>> {
        Ok(self.inner.gauss_sum(gauss_cap).map_err(err)?.as_int())
    }

    /// `"Zero"`, `"NormForm"`, `"Rank1(a)"` or `"Other(order n)"`.
    #[pyo3(signature = (enum_cap = 4096, iso_cap = 1024))]
    fn witt_class(&self, enum_cap: usize, iso_cap: usize) -> PyResult<String> {
        let c = caps(64, enum_cap, iso_cap);
        Ok(witt_class(&self.inner, &c).map_err(err)?.name())
    }

    fn __repr__(&self) -> String {
        format!("MetricGroup(p={}, orders={:?})", self.inner.p(), self.inner.orders())
    }
}

/// The kernel of a skew isogeny with its quadratic form and pairing.
#[pyclass(name = "Model", module = "biext")]
struct PyModel {
    inner: BiextModel,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn log_size(&self) -> usize {
        self.inner.log_size()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Kernel points, one digit list per coordinate, in index order.
    fn points(&self) -> Vec<Vec<Vec<u32>>> {
        self.inner
            .points()
            .iter()
            .map(|pt| pt.iter().map(elem_to_json).collect())
            .collect()
    }

    /// `q(a)` as `(numerator, denominator)`.
    fn q(&self, a: usize) -> PyResult<(u64, u64)> {
        if a >= self.inner.size() {
            return Err(PyValueError::new_err("point index out of range"));
        }
        Ok(self.inner.q_value(a).fraction())
    }

    /// `B(a, b)` as an element of `F_p`, standing for `B / p`.
    fn pairing(&self, a: usize, b: usize) -> PyResult<u32> {
        let n = self.inner.size();
        if a >= n || b >= n {
            return Err(PyValueError::new_err("point index out of range"));
        }
        Ok(self.inner.b_fp(a, b))
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    fn is_nondegenerate(&self) -> bool {
        self.inner.is_nondegenerate()
    }

    fn polarization_holds(&self) -> bool {
        self.inner.polarization_holds()
    }

    fn metric_group(&self) -> PyMetricGroup {
        PyMetricGroup {
            inner: self.inner.metric_group(),
        }
    }

    /// The JSON report: sorted `q` table, Witt class and Gauss sum.
    #[pyo3(signature = (enum_cap = 4096, iso_cap = 1024))]
    fn report(&self, enum_cap: usize, iso_cap: usize) -> PyResult<String> {
        let c = caps(64, enum_cap, iso_cap);
        let g = self.inner.metric_group();
        let w = witt_class(&g, &c).map_err(err)?;
        let s = g.gauss_sum(c.gauss_cap).map_err(err)?;
        Ok(model_report(&self.inner, &w, &s).to_string())
    }

    /// Witt class as JSON (a string name, or an object for other classes).
    #[pyo3(signature = (enum_cap = 4096, iso_cap = 1024))]
    fn witt_class(&self, enum_cap: usize, iso_cap: usize) -> PyResult<String> {
        let c = caps(64, enum_cap, iso_cap);
        let w = witt_class(&self.inner.metric_group(), &c).map_err(err)?;
        Ok(witt_to_json(&w).to_string())
    }
}

/// The metric group of a skew `f`.
#[pyfunction]
#[pyo3(signature = (f, max_ext = 64, enum_cap = 4096))]
fn metric_from_skew(f: &PyOrePoly, max_ext: usize, enum_cap: usize) -> PyResult<PyModel> {
    let c = caps(max_ext, enum_cap, 1024);
    Ok(PyModel {
        inner: bx::metric_from_skew(&f.inner, &c).map_err(err)?,
    })
}

/// The metric group of a skew matrix given as JSON (`{"d":..,"rows":..}` or
/// a single polynomial).
#[pyfunction]
#[pyo3(signature = (text, max_ext = 64, enum_cap = 4096))]
fn metric_from_json(text: &str, max_ext: usize, enum_cap: usize) -> PyResult<PyModel> {
    let h: HomJson = serde_json::from_str(text).map_err(json_err)?;
    let m: OreMatrix = h.to_matrix().map_err(err)?;
    let c = caps(max_ext, enum_cap, 1024);
    Ok(PyModel {
        inner: metric_of(&m, &c).map_err(err)?,
    })
}

/// Quotient of `f` by the span of the given points of `model` (which must
/// be the model of `f`).
#[pyfunction]
fn descend(f: &PyOrePoly, model: &PyModel, points: Vec<usize>) -> PyResult<PyOrePoly> {
    if model.inner.dim() != 1 {
        return Err(PyValueError::new_err("descent needs a scalar model"));
    }
    let mut l = Vec::with_capacity(points.len());
    for i in points {
        let pt = model
            .inner
            .points()
            .get(i)
            .ok_or_else(|| PyValueError::new_err("point index out of range"))?;
        l.push(pt[0].clone());
    }
    Ok(PyOrePoly {
        inner: bx::descend(&f.inner, &l).map_err(err)?,
    })
}

/// `phi* f phi`.
#[pyfunction]
fn pullback(f: &PyOrePoly, phi: &PyOrePoly) -> PyResult<PyOrePoly> {
    Ok(PyOrePoly {
        inner: bx::pullback_poly(&f.inner, &phi.inner).map_err(err)?,
    })
}

#[pymodule]
fn biext(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrePoly>()?;
    m.add_class::<PyMetricGroup>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(metric_from_skew, m)?)?;
    m.add_function(wrap_pyfunction!(metric_from_json, m)?)?;
    m.add_function(wrap_pyfunction!(descend, m)?)?;
    m.add_function(wrap_pyfunction!(pullback, m)?)?;
    Ok(())
}
