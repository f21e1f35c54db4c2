//! Python module `teig`: boundary-integral and disk-oracle transmission eigenvalues.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use teig_core::analysis::{self, Direction, Reference, Start, SweepSpec};
use teig_core::geometry::{self, BoundaryCurve, BoundaryMesh};
use teig_core::nep::{self, ContourConfig, MediumParams};
use teig_core::oracle::{self, DiskProblem, DoubleLayerDisk, LayerVariant, DEFAULT_M_MAX};
use teig_core::{specfun, Error};

create_exception!(teig, SolverError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Geometry(_) => PyValueError::new_err(e.to_string()),
        _ => SolverError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Curve", module = "teig", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyCurve {
    inner: BoundaryCurve,
}

#[pymethods]
impl PyCurve {
    #[staticmethod]
    fn circle(radius: f64) -> PyResult<Self> {
        Ok(PyCurve { inner: BoundaryCurve::circle(radius).map_err(to_py)? })
    }

    #[staticmethod]
    fn ellipse(a: f64, b: f64) -> PyResult<Self> {
        Ok(PyCurve { inner: BoundaryCurve::ellipse(a, b).map_err(to_py)? })
    }

    /// `x(t) = sum cx[j] cos(jt) + sum sx[j] sin((j+1)t)`, likewise for `y`.
    #[staticmethod]
    fn trigpoly(cx: Vec<f64>, sx: Vec<f64>, cy: Vec<f64>, sy: Vec<f64>) -> PyResult<Self> {
        Ok(PyCurve { inner: BoundaryCurve::trig_poly(cx, sx, cy, sy).map_err(to_py)? })
    }

    fn point(&self, t: f64) -> (f64, f64) {
        let p = self.inner.eval(t).x;
        (p[0], p[1])
    }

    fn diameter(&self) -> f64 {
        geometry::curve_diameter(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Curve({:?})", self.inner)
    }
}

#[pyclass(name = "Mesh", module = "teig", frozen)]
pub struct PyMesh {
    inner: BoundaryMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(curve: &PyCurve, nodes: usize) -> PyResult<Self> {
        Ok(PyMesh { inner: geometry::build_mesh(&curve.inner, nodes).map_err(to_py)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.nodes.iter().map(|n| (n.point[0], n.point[1])).collect()
    }

    fn normals(&self) -> Vec<(f64, f64)> {
        self.inner.nodes.iter().map(|n| (n.normal[0], n.normal[1])).collect()
    }
}

#[pyclass(name = "MediumParams", module = "teig", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyMediumParams {
    inner: MediumParams,
}

#[pymethods]
impl PyMediumParams {
    #[new]
    fn new(n: f64, n_tilde: f64, eta: f64) -> PyResult<Self> {
        Ok(PyMediumParams { inner: MediumParams::new(n, n_tilde, eta).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n
    }

    #[getter]
    fn n_tilde(&self) -> f64 {
        self.inner.n_tilde
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    fn __repr__(&self) -> String {
        format!("MediumParams(n={}, n_tilde={}, eta={})", self.inner.n, self.inner.n_tilde, self.inner.eta)
    }
}

#[pyclass(name = "ContourConfig", module = "teig", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyContour {
    inner: ContourConfig,
}

#[pymethods]
impl PyContour {
    #[new]
    #[pyo3(signature = (center_mu=3.1, radius=0.5, quad_nodes=24, probe_cols=None, rank_rel_tol=1e-4, residual_tol=1e-4, rng_seed=42, moments=1))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        center_mu: f64,
        radius: f64,
        quad_nodes: usize,
        probe_cols: Option<usize>,
        rank_rel_tol: f64,
        residual_tol: f64,
        rng_seed: u64,
        moments: usize,
    ) -> Self {
        PyContour {
            inner: ContourConfig {
                center_mu,
                radius,
                quad_nodes,
                probe_cols,
                rank_rel_tol,
                residual_tol,
                rng_seed,
                moments,
            },
        }
    }

    #[getter]
    fn center_mu(&self) -> f64 {
        self.inner.center_mu
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn rng_seed(&self) -> u64 {
        self.inner.rng_seed
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "Eigenpair", module = "teig", frozen, get_all)]
pub struct PyEigenpair {
    k: Complex64,
    residual: f64,
    cluster_size: usize,
    nullvector: Vec<Complex64>,
}

#[pymethods]
impl PyEigenpair {
    fn __repr__(&self) -> String {
        format!("Eigenpair(k={}, residual={:.3e}, cluster_size={})", self.k, self.residual, self.cluster_size)
    }
}

fn pairs(res: nep::EigenResult) -> Vec<PyEigenpair> {
    res.eigenvalues
        .into_iter()
        .map(|e| PyEigenpair {
            k: e.k,
            residual: e.residual,
            cluster_size: e.cluster_size,
            nullvector: e.nullvector.iter().copied().collect(),
        })
        .collect()
}

/// Eigenvalues of `M(k)` inside one contour.
#[pyfunction]
#[pyo3(signature = (mesh, params, contour=None))]
fn beyn_solve(py: Python<'_>, mesh: &PyMesh, params: &PyMediumParams, contour: Option<PyContour>) -> PyResult<Vec<PyEigenpair>> {
    let c = contour.map_or_else(ContourConfig::default, |c| c.inner);
    let p = params.inner;
    let res = py.detach(|| nep::beyn_solve(&mesh.inner, p, &c)).map_err(to_py)?;
    Ok(pairs(res))
}

/// Eigenvalues in `[k_min, k_max]` from overlapping contours.
#[pyfunction]
#[pyo3(signature = (mesh, params, k_min, k_max, contour=None))]
fn scan_eigenvalues(
    py: Python<'_>,
    mesh: &PyMesh,
    params: &PyMediumParams,
    k_min: f64,
    k_max: f64,
    contour: Option<PyContour>,
) -> PyResult<Vec<PyEigenpair>> {
    let c = contour.map_or_else(ContourConfig::default, |c| c.inner);
    let p = params.inner;
    let res = py
        .detach(|| nep::scan_eigenvalues_with(&mesh.inner, p, k_min, k_max, &c))
        .map_err(to_py)?;
    Ok(pairs(res))
}

/// Dense `M(k)` as nested lists.
#[pyfunction]
fn build_m(mesh: &PyMesh, params: &PyMediumParams, k: Complex64) -> PyResult<Vec<Vec<Complex64>>> {
    let m = nep::build_m(&mesh.inner, params.inner, k).map_err(to_py)?;
    Ok((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
}

#[pyclass(name = "Root", module = "teig", frozen, get_all)]
pub struct PyRoot {
    k: f64,
    m: u32,
    defect: f64,
    multiplicity: usize,
}

#[pymethods]
impl PyRoot {
    fn __repr__(&self) -> String {
        format!("Root(k={}, m={}, multiplicity={})", self.k, self.m, self.multiplicity)
    }
}

fn roots(list: oracle::RootList) -> Vec<PyRoot> {
    list.roots
        .into_iter()
        .map(|r| PyRoot {
            k: r.k,
            m: r.m,
            defect: r.defect,
            multiplicity: r.multiplicity,
        })
        .collect()
}

fn disk(variant: &str, n: f64, eta: f64, radius: f64) -> PyResult<DiskProblem> {
    let p = match variant {
        "classical" => DiskProblem::classical(n),
        "conductive" => DiskProblem::conductive(n, eta),
        "zero-index" | "zero_index" => DiskProblem::zero_index(n, eta),
        other => return Err(PyValueError::new_err(format!("unknown variant `{other}`"))),
    }
    .with_radius(radius);
    p.validate().map_err(to_py)?;
    Ok(p)
}

/// Real eigenvalues of the disk from the Bessel determinants.
#[pyfunction]
#[pyo3(signature = (variant, n, k_min, k_max, eta=0.0, radius=1.0, m_max=DEFAULT_M_MAX))]
#[allow(clippy::too_many_arguments)]
fn disk_roots(py: Python<'_>, variant: &str, n: f64, k_min: f64, k_max: f64, eta: f64, radius: f64, m_max: u32) -> PyResult<Vec<PyRoot>> {
    let p = disk(variant, n, eta, radius)?;
    Ok(roots(py.detach(|| oracle::disk_roots(&p, k_min, k_max, m_max)).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (variant, k_min, k_max, big_r=1.0, r=0.5, n1=0.5, n2=4.0, eta=80.0, m_max=DEFAULT_M_MAX))]
#[allow(clippy::too_many_arguments)]
fn double_layer_roots(
    py: Python<'_>,
    variant: &str,
    k_min: f64,
    k_max: f64,
    big_r: f64,
    r: f64,
    n1: f64,
    n2: f64,
    eta: f64,
    m_max: u32,
) -> PyResult<Vec<PyRoot>> {
    let variant = match variant {
        "conductive" => LayerVariant::Conductive,
        "zero-index" | "zero_index" => LayerVariant::ZeroIndex,
        other => return Err(PyValueError::new_err(format!("unknown variant `{other}`"))),
    };
    let p = DoubleLayerDisk { big_r, r, n1, n2, eta, variant };
    p.validate().map_err(to_py)?;
    Ok(roots(py.detach(|| oracle::double_layer_roots(&p, k_min, k_max, m_max)).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (variant, n, eta=0.0, radius=1.0))]
fn first_eigenvalue(variant: &str, n: f64, eta: f64, radius: f64) -> PyResult<f64> {
    analysis::first_eigenvalue(&disk(variant, n, eta, radius)?).map_err(to_py)
}

#[pyfunction]
fn bessel_zero(m: u32, s: u32) -> PyResult<f64> {
    specfun::bessel_zero(m, s).map_err(to_py)
}

#[pyfunction]
fn bessel_j(m: u32, z: Complex64) -> PyResult<Complex64> {
    specfun::bessel_j(m, z).map_err(to_py)
}

#[pyfunction]
fn bessel_y(m: u32, z: Complex64) -> PyResult<Complex64> {
    specfun::bessel_y(m, z).map_err(to_py)
}

/// Limit label and value, e.g. `("j_{1,1}/(R sqrt n)", 1.9159)`.
#[pyfunction]
#[pyo3(signature = (k, radius=1.0, n=4.0))]
fn classify_limit(k: f64, radius: f64, n: f64) -> (String, Option<f64>) {
    let c = analysis::classify_limit(k, radius, n);
    (c.label(), c.value())
}

#[pyfunction]
#[pyo3(signature = (k1_measured, radius=1.0, model_eta=0.0))]
fn estimate_n_small_eta(py: Python<'_>, k1_measured: f64, radius: f64, model_eta: f64) -> PyResult<f64> {
    py.detach(|| analysis::estimate_n_small_eta(k1_measured, radius, model_eta)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k1_measured, radius=1.0))]
fn estimate_n_large_eta(k1_measured: f64, radius: f64) -> PyResult<f64> {
    analysis::estimate_n_large_eta(k1_measured, radius).map_err(to_py)
}

#[pyclass(name = "ConvergenceRow", module = "teig", frozen, get_all)]
pub struct PyRow {
    eta: f64,
    k_values: Vec<f64>,
    eps: Vec<Option<f64>>,
    ref_error: Vec<Option<f64>>,
    eoc: Vec<Option<f64>>,
}

#[pymethods]
impl PyRow {
    fn __repr__(&self) -> String {
        format!("ConvergenceRow(eta={}, k_values={:?}, eoc={:?})", self.eta, self.k_values, self.eoc)
    }
}

/// Geometric sweep of a disk problem. `reference` is `None`, `"eta-zero"`,
/// `"dirichlet"` or a list of limit values.
#[pyfunction]
#[pyo3(signature = (variant, n, eta0, seeds, direction="to-zero", steps=10, reference=None, radius=1.0))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    variant: &str,
    n: f64,
    eta0: f64,
    seeds: Vec<f64>,
    direction: &str,
    steps: usize,
    reference: Option<&Bound<'_, PyAny>>,
    radius: f64,
) -> PyResult<Vec<PyRow>> {
    let problem = disk(variant, n, eta0, radius)?;
    let direction = match direction {
        "to-zero" | "to_zero" => Direction::ToZero,
        "to-infinity" | "to_infinity" => Direction::ToInfinity,
        other => return Err(PyValueError::new_err(format!("unknown direction `{other}`"))),
    };
    let reference = match reference {
        None => Reference::None,
        Some(r) => match r.extract::<String>() {
            Ok(s) if s == "eta-zero" || s == "eta_zero" => Reference::EtaZero,
            Ok(s) if s == "dirichlet" => Reference::DirichletFamily { radius, n },
            Ok(s) => return Err(PyValueError::new_err(format!("unknown reference `{s}`"))),
            Err(_) => Reference::Explicit(r.extract::<Vec<f64>>()?),
        },
    };
    let spec = SweepSpec::new(direction, eta0, steps, Start::Seeds(seeds)).with_reference(reference);
    let rows = py.detach(|| analysis::run_sweep(&problem, &spec)).map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| PyRow {
            eta: r.eta,
            k_values: r.k_values,
            eps: r.eps,
            ref_error: r.ref_error,
            eoc: r.eoc,
        })
        .collect())
}

#[pymodule]
fn teig(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyMediumParams>()?;
    m.add_class::<PyContour>()?;
    m.add_class::<PyEigenpair>()?;
    m.add_class::<PyRoot>()?;
    m.add_class::<PyRow>()?;
    m.add_function(wrap_pyfunction!(beyn_solve, m)?)?;
    m.add_function(wrap_pyfunction!(scan_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(build_m, m)?)?;
    m.add_function(wrap_pyfunction!(disk_roots, m)?)?;
    m.add_function(wrap_pyfunction!(double_layer_roots, m)?)?;
    m.add_function(wrap_pyfunction!(first_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zero, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_y, m)?)?;
    m.add_function(wrap_pyfunction!(classify_limit, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_n_small_eta, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_n_large_eta, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
