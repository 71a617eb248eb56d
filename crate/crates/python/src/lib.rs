//! Python bindings: parameters, bases, matrices, reconstruction and fits.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use specpot::basis::{BasisCase, BasisSpec};
use specpot::cdh::PolyParams;
use specpot::fit::{fit_curve, FitModel, FitReport, ModelKind};
use specpot::hamiltonian::{build_sigma, energy_ladder, lowest_eigenvalues};
use specpot::kinetic::kinetic_matrix;
use specpot::presets::Preset;
use specpot::reconstruct::{add_orbital, potential_matrix, reconstruct_potential, PotentialCurve};

create_exception!(specpot_py, NumericError, PyException);

fn to_py(e: specpot::Error) -> PyErr {
    use specpot::Error as E;
    match e {
        E::Parameter(_) | E::Index { .. } | E::Domain { .. } | E::FlagMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => NumericError::new_err(other.to_string()),
    }
}

#[pyclass(name = "PolyParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyPolyParams(PolyParams);

#[pymethods]
impl PyPolyParams {
    /// `a` and `b` default to `1 - mu`.
    #[new]
    #[pyo3(signature = (mu, lambda_=1.0, a=None, b=None))]
    fn new(mu: f64, lambda_: f64, a: Option<f64>, b: Option<f64>) -> PyResult<Self> {
        let a = a.unwrap_or(1.0 - mu);
        let b = b.unwrap_or(1.0 - mu);
        PolyParams::new(mu, a, b, lambda_).map(Self).map_err(to_py)
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }

    fn bound_state_count(&self) -> usize {
        self.0.bound_state_count()
    }

    /// Bound-state energies `E_k`, ascending.
    fn energies(&self) -> PyResult<Vec<f64>> {
        energy_ladder(&self.0).map(|l| l.energies).map_err(to_py)
    }

    /// Lowest `count` eigenvalues of the Hamiltonian truncated to `order`.
    fn eigenvalues(&self, order: usize, count: usize) -> PyResult<Vec<f64>> {
        lowest_eigenvalues(&self.0, order, count).map_err(to_py)
    }

    fn sigma(&self, order: usize) -> PyResult<Vec<Vec<f64>>> {
        build_sigma(&self.0, order).map(|m| m.rows()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "PolyParams(mu={}, lambda_={}, a={}, b={})",
            self.0.mu, self.0.lambda, self.0.a, self.0.b
        )
    }
}

#[pyclass(name = "BasisSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyBasisSpec(BasisSpec);

#[pymethods]
impl PyBasisSpec {
    #[new]
    #[pyo3(signature = (case, lambda_, nu, gamma=None, ell=None))]
    fn new(
        case: &str,
        lambda_: f64,
        nu: f64,
        gamma: Option<f64>,
        ell: Option<u32>,
    ) -> PyResult<Self> {
        let case: BasisCase = case.parse().map_err(to_py)?;
        BasisSpec::new(case, lambda_, nu, gamma, ell)
            .map(Self)
            .map_err(to_py)
    }

    /// Basis with ν linked to `params` by the case rules.
    #[staticmethod]
    #[pyo3(signature = (case, params, ell=None, gamma=None))]
    fn for_params(
        case: &str,
        params: &PyPolyParams,
        ell: Option<u32>,
        gamma: Option<f64>,
    ) -> PyResult<Self> {
        let case: BasisCase = case.parse().map_err(to_py)?;
        BasisSpec::for_params(case, &params.0, ell, gamma)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn case(&self) -> &'static str {
        self.0.case.name()
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.0.nu
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn ell(&self) -> Option<u32> {
        self.0.ell
    }

    #[getter]
    fn gamma(&self) -> Option<f64> {
        self.0.gamma
    }

    /// `φ_n(x)`.
    fn eval(&self, n: usize, x: f64) -> PyResult<f64> {
        self.0.eval_basis(n, x).map_err(to_py)
    }

    fn kinetic(&self, order: usize) -> PyResult<Vec<Vec<f64>>> {
        kinetic_matrix(&self.0, order)
            .map(|m| m.rows())
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "BasisSpec(case={}, lambda_={}, nu={})",
            self.0.case, self.0.lambda, self.0.nu
        )
    }
}

#[pyclass(name = "PotentialCurve", frozen, from_py_object)]
#[derive(Clone)]
struct PyPotentialCurve(PotentialCurve);

#[pymethods]
impl PyPotentialCurve {
    #[getter]
    fn xs(&self) -> Vec<f64> {
        self.0.xs.clone()
    }

    #[getter]
    fn vs(&self) -> Vec<f64> {
        self.0.vs.clone()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order
    }

    #[getter]
    fn column(&self) -> usize {
        self.0.column
    }

    #[getter]
    fn includes_orbital(&self) -> bool {
        self.0.includes_orbital
    }

    /// Copy with `ℓ(ℓ+1)/2x²` added.
    fn with_orbital(&self, ell: u32) -> PyResult<Self> {
        add_orbital(&self.0, ell).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(Self)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.0.xs.len()
    }
}

#[pyclass(name = "FitReport", frozen)]
struct PyFitReport(FitReport);

#[pymethods]
impl PyFitReport {
    #[getter]
    fn model(&self) -> &'static str {
        self.0.model.kind.name()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.0.coefficients.clone()
    }

    #[getter]
    fn rms_residual(&self) -> f64 {
        self.0.rms_residual
    }

    #[getter]
    fn relative_rms(&self) -> f64 {
        self.0.relative_rms
    }

    #[getter]
    fn max_residual(&self) -> f64 {
        self.0.max_residual
    }

    #[getter]
    fn points(&self) -> usize {
        self.0.points
    }

    fn __repr__(&self) -> String {
        format!(
            "FitReport(model={}, coefficients={:?}, relative_rms={:e})",
            self.0.model.kind, self.0.coefficients, self.0.relative_rms
        )
    }
}

/// `(params, basis, grid_xs, ell)` for `fig1`..`fig4`.
#[pyfunction]
fn preset(name: &str) -> PyResult<(PyPolyParams, PyBasisSpec, Vec<f64>, Option<u32>)> {
    let p = Preset::by_name(name).map_err(to_py)?;
    Ok((
        PyPolyParams(p.poly_params().map_err(to_py)?),
        PyBasisSpec(p.basis_spec().map_err(to_py)?),
        p.grid().xs(),
        p.ell,
    ))
}

/// `V = H - T` as nested lists.
#[pyfunction]
fn potential(params: &PyPolyParams, basis: &PyBasisSpec, order: usize) -> PyResult<Vec<Vec<f64>>> {
    potential_matrix(&params.0, &basis.0, order)
        .map(|m| m.rows())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, basis, order, xs, column=0))]
fn reconstruct(
    params: &PyPolyParams,
    basis: &PyBasisSpec,
    order: usize,
    xs: Vec<f64>,
    column: usize,
) -> PyResult<PyPotentialCurve> {
    reconstruct_potential(&params.0, &basis.0, order, column, &xs)
        .map(PyPotentialCurve)
        .map_err(to_py)
}

/// Least-squares fit; `orbital` must be given exactly when the curve carries
/// the orbital term.
#[pyfunction]
#[pyo3(signature = (curve, model, lambda_, orbital=None))]
fn fit(
    curve: &PyPotentialCurve,
    model: &str,
    lambda_: f64,
    orbital: Option<u32>,
) -> PyResult<PyFitReport> {
    let kind: ModelKind = model.parse().map_err(to_py)?;
    fit_curve(&curve.0, &FitModel::new(kind, lambda_, orbital))
        .map(PyFitReport)
        .map_err(to_py)
}

#[pymodule]
fn specpot_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolyParams>()?;
    m.add_class::<PyBasisSpec>()?;
    m.add_class::<PyPotentialCurve>()?;
    m.add_class::<PyFitReport>()?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(potential, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add("NumericError", m.py().get_type::<NumericError>())?;
    Ok(())
}
