//! Python bindings for `rdlyap`.
//!
//! Structured results (records, gate reports, certificates) cross the
//! boundary as plain dicts built from the crate's JSON form.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use rdlyap::app::{execute, write_artifacts};
use rdlyap::config::{parse_config, preset as preset_config, PRESETS};
use rdlyap::{
    BoundarySpec, DtPolicy, FaceLambdas, FieldState, Monitor, PairTerm, ReactionSpec,
    ReversibleParams, RunOptions, RunStatus, Tolerances, TripledParams, Variant,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(runtime_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Grid", module = "rdlyap", frozen)]
struct PyGrid {
    inner: Arc<rdlyap::Grid>,
}

#[pymethods]
impl PyGrid {
    /// `extents` holds one `(lo, hi)` pair per axis.
    #[new]
    fn new(extents: Vec<(f64, f64)>, cells: Vec<usize>) -> PyResult<Self> {
        let ext: Vec<[f64; 2]> = extents.iter().map(|&(lo, hi)| [lo, hi]).collect();
        let g = rdlyap::Grid::new(ext.len(), &ext, &cells).map_err(value_err)?;
        Ok(Self { inner: Arc::new(g) })
    }

    #[staticmethod]
    fn unit_interval(n: usize) -> PyResult<Self> {
        let g = rdlyap::Grid::unit_interval(n).map_err(value_err)?;
        Ok(Self { inner: Arc::new(g) })
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn cells(&self) -> Vec<usize> {
        self.inner.cells_per_axis().to_vec()
    }

    #[getter]
    fn spacing(&self) -> Vec<f64> {
        self.inner.spacing().to_vec()
    }

    #[getter]
    fn cell_volume(&self) -> f64 {
        self.inner.cell_volume()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Cell centres as `(x, y)`; `y` is 0 in one dimension.
    fn cell_centers(&self) -> Vec<(f64, f64)> {
        self.inner
            .cell_centers()
            .into_iter()
            .map(|c| (c[0], c[1]))
            .collect()
    }

    fn integrate(&self, values: Vec<f64>) -> PyResult<f64> {
        self.inner.integrate(&values).map_err(value_err)
    }

    /// Laplacian of `values` with one Robin lambda per face (1, 2 or 4 values).
    #[pyo3(signature = (values, lambdas = vec![0.0]))]
    fn laplacian(&self, values: Vec<f64>, lambdas: Vec<f64>) -> PyResult<Vec<f64>> {
        let faces = FaceLambdas::from_slice(&lambdas).map_err(value_err)?;
        let field = rdlyap::ScalarField::new(self.inner.clone(), values).map_err(value_err)?;
        Ok(field.laplacian(&faces).map_err(value_err)?.into_values())
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(dimension={}, cells={:?})",
            self.inner.dimension(),
            self.inner.cells_per_axis()
        )
    }
}

#[pyclass(name = "ReactionSpec", module = "rdlyap", frozen)]
struct PyReactionSpec {
    inner: ReactionSpec,
}

#[pymethods]
impl PyReactionSpec {
    /// `f(u, v) = Σ c u^a v^b` from `(c, a, b)` triples, with `g = -f`.
    #[staticmethod]
    fn generic_pair(terms: Vec<(f64, f64, f64)>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, a, b)| PairTerm::new(c, a, b))
            .collect();
        let inner = ReactionSpec::generic_pair(terms).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn reversible_pair(h1: f64, h2: f64, l: f64, q: f64, r: f64, s: f64) -> PyResult<Self> {
        let inner = ReactionSpec::reversible_pair(ReversibleParams { h1, h2, l, q, r, s })
            .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn tripled_unit() -> PyResult<Self> {
        let inner = ReactionSpec::tripled(TripledParams::unit()).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn species_count(&self) -> usize {
        self.inner.species_count()
    }

    #[getter]
    fn balance_pairs(&self) -> Vec<(usize, usize)> {
        self.inner.balance_pairs().to_vec()
    }

    /// Reaction vector at one point.
    #[pyo3(signature = (conc, t = 0.0, x = (0.0, 0.0)))]
    fn eval_rhs(&self, conc: Vec<f64>, t: f64, x: (f64, f64)) -> PyResult<Vec<f64>> {
        let mut out = vec![0.0; conc.len()];
        self.inner
            .eval_rhs(t, 0, &[x.0, x.1], &conc, &mut out)
            .map_err(value_err)?;
        Ok(out)
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.validate())
    }

    fn __repr__(&self) -> String {
        format!(
            "ReactionSpec({}, species={})",
            self.inner.name(),
            self.inner.species_count()
        )
    }
}

#[pyclass(name = "LyapCoefficients", module = "rdlyap", frozen)]
struct PyLyapCoefficients {
    inner: rdlyap::LyapCoefficients,
}

fn parse_variant(s: &str) -> PyResult<Variant> {
    match s {
        "decreasing" => Ok(Variant::Decreasing),
        "increasing" => Ok(Variant::Increasing),
        _ => Err(PyValueError::new_err(format!(
            "variant must be 'decreasing' or 'increasing', got {s:?}"
        ))),
    }
}

#[pymethods]
impl PyLyapCoefficients {
    #[new]
    fn new(p: u32, k: f64, variant: &str, scale: f64) -> PyResult<Self> {
        let inner = rdlyap::LyapCoefficients::new(p, k, parse_variant(variant)?, scale)
            .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.inner.degree()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale()
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant().label()
    }

    #[getter]
    fn thetas(&self) -> Vec<f64> {
        self.inner.thetas().to_vec()
    }

    fn hp(&self, u: f64, v: f64) -> f64 {
        rdlyap::eval_hp(u, v, &self.inner)
    }

    fn certificate<'py>(&self, py: Python<'py>, a: f64, b: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &rdlyap::quadratic_form_certificate(a, b, &self.inner))
    }

    fn __repr__(&self) -> String {
        self.inner.summary()
    }
}

#[pyfunction]
fn binom(p: u32, i: u32) -> PyResult<u64> {
    rdlyap::binom(p, i).map_err(value_err)
}

/// Returns `(decreasing, increasing)` coefficients for diffusions `a`, `b`.
#[pyfunction]
#[pyo3(signature = (a, b, p, margin = 2.0))]
fn choose_coefficients(
    a: f64,
    b: f64,
    p: u32,
    margin: f64,
) -> PyResult<(PyLyapCoefficients, PyLyapCoefficients)> {
    let (dec, inc) = rdlyap::choose_coefficients(a, b, p, margin).map_err(value_err)?;
    Ok((
        PyLyapCoefficients { inner: dec },
        PyLyapCoefficients { inner: inc },
    ))
}

/// Runs the monitored integrator.
///
/// `monitors` is a list of `(label, (i, j), coefficients)`. `lambdas` sets
/// one Robin lambda on every face of every species (0 is Neumann). Returns
/// a dict with `status`, `final_time`, `blow_up_time`, `steps`, `record`,
/// `gates` and `final_state`.
#[pyfunction]
#[pyo3(signature = (
    grid, spec, species, diffusion, horizon,
    monitors = Vec::new(), lambdas = 0.0, dt = None, safety = 0.5, cadence = 10,
    lp_orders = Vec::new(), blowup_threshold = 1e12,
))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    grid: PyRef<'py, PyGrid>,
    spec: PyRef<'py, PyReactionSpec>,
    species: Vec<Vec<f64>>,
    diffusion: Vec<f64>,
    horizon: f64,
    monitors: Vec<(String, (usize, usize), PyRef<'py, PyLyapCoefficients>)>,
    lambdas: f64,
    dt: Option<f64>,
    safety: f64,
    cadence: usize,
    lp_orders: Vec<f64>,
    blowup_threshold: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let m = species.len();
    let state = FieldState::new(grid.inner.clone(), species, diffusion, 0.0).map_err(value_err)?;
    let bc = BoundarySpec::uniform(m, lambdas).map_err(value_err)?;
    let opts = RunOptions {
        horizon,
        dt: match dt {
            Some(dt) => DtPolicy::Fixed { dt },
            None => DtPolicy::Cfl { safety },
        },
        cadence,
        blowup_threshold,
        monitors: monitors
            .into_iter()
            .map(|(label, pair, c)| Monitor {
                label,
                pair,
                coeffs: c.inner.clone(),
            })
            .collect(),
        lp_orders,
        seed: 0,
    };
    let spec = spec.inner.clone();
    let res = py
        .detach(|| rdlyap::run(&state, &spec, &bc, &opts))
        .map_err(runtime_err)?;
    let gates = rdlyap::evaluate_gates(&res.record, &Tolerances::default());
    let out = pyo3::types::PyDict::new(py);
    let status = match res.status {
        RunStatus::Completed => "completed",
        RunStatus::BlowUp => "blow_up",
    };
    out.set_item("status", status)?;
    out.set_item("final_time", res.final_time)?;
    out.set_item("blow_up_time", res.blow_up_time)?;
    out.set_item("steps", res.step_count)?;
    out.set_item("record", to_py(py, &res.record)?)?;
    out.set_item("gates", to_py(py, &gates)?)?;
    out.set_item("final_state", res.final_state.species.clone())?;
    Ok(out.into_any())
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    PRESETS.to_vec()
}

/// Configuration text for a named preset.
#[pyfunction]
fn preset(name: &str) -> PyResult<String> {
    Ok(preset_config(name).map_err(value_err)?.serialize())
}

/// Parses and normalises configuration text, raising on any issue.
#[pyfunction]
fn normalize_config(text: &str) -> PyResult<String> {
    Ok(parse_config(text).map_err(value_err)?.serialize())
}

/// Runs a configuration the way `rdlyap run` does. Artifacts are written
/// only when `out` is given. Returns a dict with `exit_code`, `gates`,
/// `certificates` and `record`.
#[pyfunction]
#[pyo3(signature = (text, out = None))]
fn run_config<'py>(
    py: Python<'py>,
    text: &str,
    out: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = parse_config(text).map_err(value_err)?;
    let outcome = py.detach(|| execute(&cfg)).map_err(runtime_err)?;
    if let Some(dir) = out {
        write_artifacts(&dir, &cfg, &outcome).map_err(runtime_err)?;
    }
    let d = pyo3::types::PyDict::new(py);
    d.set_item("exit_code", outcome.exit_code())?;
    d.set_item("gates", to_py(py, &outcome.gates)?)?;
    d.set_item("certificates", to_py(py, &outcome.certificates)?)?;
    d.set_item("record", to_py(py, &outcome.result.record)?)?;
    Ok(d.into_any())
}

#[pymodule]
#[pyo3(name = "rdlyap")]
fn rdlyap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyReactionSpec>()?;
    m.add_class::<PyLyapCoefficients>()?;
    m.add_function(wrap_pyfunction!(binom, m)?)?;
    m.add_function(wrap_pyfunction!(choose_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
