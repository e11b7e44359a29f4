//! Python bindings: exact polynomials and valuations, semigroup levels,
//! Newton-Okounkov bodies, degeneration reports, the concentration model
//! and the batch commands.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use okounkov::body::{self, approximate_body, lattice_points, PointClass};
use okounkov::commands::{self, Command, Overrides};
use okounkov::degeneration::{family_coordinates, special_fiber, verify_hypotheses, DegenerationSpec};
use okounkov::exact::{int, ratio_literal, Exponent, GroupOrder};
use okounkov::problem::ProblemFile;
use okounkov::quant::{self, ConvexPotential, QuadratureGrid};
use okounkov::semigroup::{khovanskii_check, KhovanskiiBasis, SectionSpace, ValueSemigroup};
use okounkov::Error;

create_exception!(okounkov, PreconditionError, PyException, "A mathematical precondition failed.");

fn to_py(e: Error) -> PyErr {
    if e.exit_code() == 3 {
        PreconditionError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for okounkov::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Laurent polynomial with exact rational coefficients.
#[pyclass(name = "Polynomial", frozen, from_py_object)]
#[derive(Clone)]
struct PyPolynomial(okounkov::exact::Polynomial);

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(n: usize, text: &str) -> PyResult<Self> {
        okounkov::exact::Polynomial::parse(n, text).py().map(PyPolynomial)
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.0.nvars()
    }

    /// `(coefficient, exponent)` pairs in ascending exponent order.
    fn terms(&self) -> Vec<(String, Vec<i64>)> {
        self.0
            .terms()
            .map(|(e, c)| (ratio_literal(c), e.entries().to_vec()))
            .collect()
    }

    fn eval(&self, point: Vec<f64>) -> PyResult<f64> {
        if point.len() != self.0.nvars() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.0.eval_f64(&point))
    }

    fn __add__(&self, other: &PyPolynomial) -> PyResult<Self> {
        self.0.try_add(&other.0).py().map(PyPolynomial)
    }

    fn __sub__(&self, other: &PyPolynomial) -> PyResult<Self> {
        self.0.try_sub(&other.0).py().map(PyPolynomial)
    }

    fn __mul__(&self, other: &PyPolynomial) -> PyResult<Self> {
        self.0.try_mul(&other.0).py().map(PyPolynomial)
    }

    fn __eq__(&self, other: &PyPolynomial) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({}, '{}')", self.0.nvars(), self.0)
    }
}

/// Lowest-term valuation for a monomial order, normalized by `h`.
#[pyclass(name = "Valuation", frozen)]
struct PyValuation(okounkov::valuation::Valuation);

#[pymethods]
impl PyValuation {
    #[new]
    #[pyo3(signature = (n, order = "lex", h = None))]
    fn new(n: usize, order: &str, h: Option<PyPolynomial>) -> PyResult<Self> {
        let order: GroupOrder = order.parse().py()?;
        let h = h.map_or_else(|| okounkov::exact::Polynomial::one(n), |p| p.0);
        okounkov::valuation::Valuation::new(order, n, h).py().map(PyValuation)
    }

    fn value(&self, f: &PyPolynomial) -> PyResult<Vec<i64>> {
        Ok(self.0.value(&f.0).py()?.entries().to_vec())
    }

    fn graded_value(&self, f: &PyPolynomial, k: u32) -> PyResult<(u32, Vec<i64>)> {
        let g = self.0.graded_value(&f.0, k).py()?;
        Ok((g.level, g.value.entries().to_vec()))
    }

    /// Values of all nonzero elements of the span; as many as its dimension.
    fn value_image(&self, polys: Vec<PyPolynomial>) -> PyResult<Vec<Vec<i64>>> {
        let polys: Vec<_> = polys.into_iter().map(|p| p.0).collect();
        let image = self.0.value_image(&polys).py()?;
        Ok(image.into_iter().map(|e| e.entries().to_vec()).collect())
    }
}

fn space(generators: &[PyPolynomial]) -> PyResult<SectionSpace> {
    SectionSpace::new(1, generators.iter().map(|p| p.0.clone()).collect()).py()
}

fn vectors(set: impl IntoIterator<Item = Exponent>) -> Vec<Vec<i64>> {
    set.into_iter().map(|e| e.entries().to_vec()).collect()
}

/// Levels `S_1..S_{d_max}` of the value semigroup.
#[pyfunction]
fn semigroup_levels(
    valuation: &PyValuation,
    generators: Vec<PyPolynomial>,
    d_max: u32,
) -> PyResult<BTreeMap<u32, Vec<Vec<i64>>>> {
    let sg = ValueSemigroup::compute(&valuation.0, &space(&generators)?, d_max).py()?;
    Ok(sg.levels.into_iter().map(|(d, v)| (d, vectors(v))).collect())
}

/// Whether the generators' values generate every level up to `d_max`, and
/// the values missing at the first failing level.
#[pyfunction]
#[pyo3(signature = (valuation, generators, basis, d_max))]
fn khovanskii(
    valuation: &PyValuation,
    generators: Vec<PyPolynomial>,
    basis: Vec<(u32, PyPolynomial)>,
    d_max: u32,
) -> PyResult<(bool, Vec<Vec<i64>>)> {
    let basis = KhovanskiiBasis::new(&valuation.0, basis.into_iter().map(|(d, p)| (d, p.0)).collect()).py()?;
    let report = khovanskii_check(&basis, &valuation.0, &space(&generators)?, d_max).py()?;
    Ok((report.pass, vectors(report.missing)))
}

/// The Newton-Okounkov body from levels up to `d_max` and its lattice
/// points at scale `d`, as a dict of exact strings.
#[pyfunction]
#[pyo3(signature = (valuation, generators, d_max = 6, d = 1))]
fn newton_okounkov_body(
    py: Python<'_>,
    valuation: &PyValuation,
    generators: Vec<PyPolynomial>,
    d_max: u32,
    d: u32,
) -> PyResult<Py<PyAny>> {
    let sg = ValueSemigroup::compute(&valuation.0, &space(&generators)?, d_max).py()?;
    let body = approximate_body(&sg.levels).py()?.body;
    let points = lattice_points(&body, d).py()?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("summary", body.summary())?;
    dict.set_item("text", body.to_string())?;
    let verts: Vec<Vec<String>> = body.vertices().iter().map(|v| v.iter().map(ratio_literal).collect()).collect();
    dict.set_item("vertices", verts)?;
    dict.set_item("lattice_points", vectors(points.keys()))?;
    dict.set_item("interior", vectors(points.interior()))?;
    Ok(dict.into_any().unbind())
}

/// Degeneration data at degree `d`: `W0` with classes, `Delta0`, family
/// coordinates and the hypothesis table.
#[pyfunction]
#[pyo3(signature = (valuation, generators, d = 1, dim_h0 = None))]
fn degenerate(
    py: Python<'_>,
    valuation: &PyValuation,
    generators: Vec<PyPolynomial>,
    d: u32,
    dim_h0: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let e = space(&generators)?;
    let basis = KhovanskiiBasis::from_space(&valuation.0, &e).py()?;
    let spec = DegenerationSpec::build(&valuation.0, &e, basis, d, None).py()?;
    let fiber = special_fiber(&spec).py()?;
    let hyp = verify_hypotheses(&spec, dim_h0).py()?;
    let dict = pyo3::types::PyDict::new(py);
    let w0: Vec<(Vec<i64>, &str)> = fiber
        .w0
        .points
        .iter()
        .map(|(e, c)| (e.entries().to_vec(), if *c == PointClass::Interior { "interior" } else { "boundary" }))
        .collect();
    dict.set_item("w0", w0)?;
    dict.set_item("delta0", fiber.delta0.summary())?;
    dict.set_item("strict_inclusion", fiber.strict_inclusion)?;
    let coords: Vec<(Vec<i64>, i64, String)> = family_coordinates(&spec)
        .into_iter()
        .map(|c| (c.label.entries().to_vec(), c.weight, c.formula))
        .collect();
    dict.set_item("coordinates", coords)?;
    let table: BTreeMap<&str, (String, String)> = hyp
        .entries()
        .iter()
        .map(|(k, e)| (*k, (e.status.to_string(), e.witness.clone())))
        .collect();
    dict.set_item("hypotheses", table)?;
    Ok(dict.into_any().unbind())
}

/// Mass outside the `eta`-ball and pairing with `tau` of the model density
/// for label `m` at parameter `s` on the polytope spanned by `vertices`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (vertices, m, s, eta, tau = None, potential = "quadratic", resolution = 100))]
fn concentration(
    py: Python<'_>,
    vertices: Vec<Vec<i64>>,
    m: Vec<i64>,
    s: f64,
    eta: f64,
    tau: Option<PyPolynomial>,
    potential: &str,
    resolution: u32,
) -> PyResult<(f64, Option<f64>)> {
    let points: Vec<Vec<_>> = vertices.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
    let polytope = body::hull(&points).py()?;
    let potential = ConvexPotential::parse(m.len(), potential).py()?;
    let label = Exponent::new(m);
    py.detach(|| {
        let grid = Arc::new(QuadratureGrid::new(&polytope, resolution)?);
        let rho = quant::density(&grid, &potential, &label, s)?;
        let pairing = tau.map(|t| quant::weak_pairing(&rho, &t.0)).transpose()?;
        Ok((quant::mass_outside(&rho, eta), pairing))
    })
    .py()
}

/// Runs a batch command on problem-file text; returns the report and the
/// exit status the command-line tool would use.
#[pyfunction]
#[pyo3(signature = (command, problem, d = None, d_max = None, resolution = None))]
fn run(
    py: Python<'_>,
    command: &str,
    problem: &str,
    d: Option<u32>,
    d_max: Option<u32>,
    resolution: Option<u32>,
) -> PyResult<(String, i32)> {
    let cmd: Command = command.parse().py()?;
    let problem = ProblemFile::parse(problem).py()?;
    let ov = Overrides { d, d_max, resolution };
    let out = py.detach(|| commands::run(cmd, &problem, ov)).py()?;
    Ok((out.report, out.exit_code))
}

#[pymodule]
#[pyo3(name = "okounkov")]
fn okounkov_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyValuation>()?;
    m.add_function(wrap_pyfunction!(semigroup_levels, m)?)?;
    m.add_function(wrap_pyfunction!(khovanskii, m)?)?;
    m.add_function(wrap_pyfunction!(newton_okounkov_body, m)?)?;
    m.add_function(wrap_pyfunction!(degenerate, m)?)?;
    m.add_function(wrap_pyfunction!(concentration, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    Ok(())
}
