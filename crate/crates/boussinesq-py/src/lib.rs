//! Python bindings for the inverse-scattering toolkit. Built as the
//! extension module `_boussinesq`; see python/smoke_test.py for usage.

use boussinesq_ist::asymptotics::{u_asymptotic, AsymptoticConfig, CircleInterp};
use boussinesq_ist::painleve;
use boussinesq_ist::scattering::{
    self, estimate_blowup_t, reflection_coefficients, verify_identities, InitialData,
    SamplingPlan, VolterraConfig,
};
use boussinesq_ist::sim::{init_simulation, SimConfig};
use boussinesq_ist::{spectral, wmodel, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::path::{Path, PathBuf};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_)
        | Error::Inconsistent(_)
        | Error::InsufficientData(_)
        | Error::Input { .. }
        | Error::NearSingularity { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Reflection coefficients r1, r2 on the unit circle and r1 on the ray
/// k = i tau, computed from decaying initial data or loaded from CSV.
#[pyclass]
struct ReflectionTable {
    inner: scattering::ReflectionTable,
}

#[pymethods]
impl ReflectionTable {
    /// Solve the Volterra scattering problem on a symmetric theta grid.
    #[staticmethod]
    #[pyo3(signature = (x, u0, v0, n_theta=504, exclusion=0.05, tol=1e-10))]
    fn from_initial_data(
        x: Vec<f64>,
        u0: Vec<f64>,
        v0: Vec<f64>,
        n_theta: usize,
        exclusion: f64,
        tol: f64,
    ) -> PyResult<Self> {
        let data = InitialData::new(x, u0, v0, 1e-13).map_err(to_py)?;
        let plan = SamplingPlan { n_theta, exclusion, ..SamplingPlan::default() };
        let cfg = VolterraConfig { tol, ..VolterraConfig::default() };
        let inner = reflection_coefficients(&data, &plan, &cfg).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (circle_path, ray_path=None))]
    fn from_csv(circle_path: PathBuf, ray_path: Option<PathBuf>) -> PyResult<Self> {
        let inner = scattering::ReflectionTable::read_csv(&circle_path, ray_path.as_deref())
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Circle samples as parallel lists (theta, r1, r2, abs_s11, converged).
    fn circle(&self) -> (Vec<f64>, Vec<Complex64>, Vec<Complex64>, Vec<f64>, Vec<bool>) {
        let c = &self.inner.circle;
        (
            c.iter().map(|s| s.theta).collect(),
            c.iter().map(|s| s.r1).collect(),
            c.iter().map(|s| s.r2).collect(),
            c.iter().map(|s| s.abs_s11).collect(),
            c.iter().map(|s| s.converged && !s.excluded).collect(),
        )
    }

    /// Ray samples as parallel lists (tau, r1, converged).
    fn ray(&self) -> (Vec<f64>, Vec<Complex64>, Vec<bool>) {
        let r = &self.inner.ray;
        (
            r.iter().map(|s| s.tau).collect(),
            r.iter().map(|s| s.r1).collect(),
            r.iter().map(|s| s.converged).collect(),
        )
    }

    /// Run the identity/inequality suite; returns one dict per check.
    #[pyo3(signature = (tol_identity=1e-6, tol_inequality=1e-8))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        tol_identity: f64,
        tol_inequality: f64,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        verify_identities(&self.inner, tol_identity, tol_inequality)
            .into_iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("name", c.name)?;
                d.set_item("max_residual", c.max_residual)?;
                d.set_item("tolerance", c.tolerance)?;
                d.set_item("pass", c.pass)?;
                Ok(d)
            })
            .collect()
    }

    /// Fit the blow-up horizon from the decay of |r1(i tau)| as tau -> 0.
    /// t_est is math.inf when the ray is negligible (no blow-up).
    #[pyo3(signature = (tau_min=0.05, tau_max=0.3))]
    fn blowup<'py>(
        &self,
        py: Python<'py>,
        tau_min: f64,
        tau_max: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let est = estimate_blowup_t(&self.inner.ray, (tau_min, tau_max)).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("t_est", est.t_est)?;
        d.set_item("model", est.model)?;
        d.set_item("residual", est.residual)?;
        d.set_item("fit_window", est.fit_window)?;
        Ok(d)
    }

    #[pyo3(signature = (circle_path, ray_path=None))]
    fn write_csv(&self, circle_path: PathBuf, ray_path: Option<PathBuf>) -> PyResult<()> {
        self.inner.write_circle_csv(&circle_path, &[]).map_err(to_py)?;
        if let Some(p) = ray_path {
            self.inner.write_ray_csv(&p, &[]).map_err(to_py)?;
        }
        Ok(())
    }
}

/// Hastings-McLeod Painlevé II solution with the derived front profile
/// u_P = 2^{2/3} 3^{1/3} (u' - u^2).
#[pyclass]
#[derive(Clone)]
struct HastingsMcLeod {
    inner: painleve::HastingsMcLeod,
}

#[pymethods]
impl HastingsMcLeod {
    #[staticmethod]
    #[pyo3(signature = (y_max=10.0, n=16001))]
    fn solve(y_max: f64, n: usize) -> PyResult<Self> {
        let inner = painleve::solve_hastings_mcleod(y_max, n).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// (u(y), u'(y)) by cubic interpolation of the solved grid.
    fn u(&self, y: f64) -> (f64, f64) {
        self.inner.eval_u(y)
    }

    /// The front profile u_P(y).
    fn u_p(&self, y: f64) -> f64 {
        self.inner.eval_up(y)
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        self.inner.to_csv(Path::new(&path), &[]).map_err(to_py)
    }
}

/// Long-time asymptotic evaluator: five-sector dispatch over the quarter
/// plane, built from a reflection table and a Hastings-McLeod solution.
#[pyclass]
struct AsymptoticProfile {
    interp: CircleInterp,
    hm: painleve::HastingsMcLeod,
    cfg: AsymptoticConfig,
}

#[pymethods]
impl AsymptoticProfile {
    #[new]
    #[pyo3(signature = (table, hm, t_min=2.0, shock_halfwidth=2.0))]
    fn new(
        table: &ReflectionTable,
        hm: &HastingsMcLeod,
        t_min: f64,
        shock_halfwidth: f64,
    ) -> PyResult<Self> {
        let interp = CircleInterp::new(&table.inner).map_err(to_py)?;
        Ok(Self {
            interp,
            hm: hm.inner.clone(),
            cfg: AsymptoticConfig { t_min, shock_halfwidth },
        })
    }

    /// Asymptotic u(x, t) with sector metadata.
    fn eval<'py>(&self, py: Python<'py>, x: f64, t: f64) -> PyResult<Bound<'py, PyDict>> {
        let term = u_asymptotic(&self.interp, &self.hm, x, t, &self.cfg).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("value", term.value)?;
        d.set_item("sector", term.sector.numeral())?;
        d.set_item("extrapolated", term.extrapolated)?;
        d.set_item("amplitudes", term.amplitudes)?;
        d.set_item("phases", term.phases)?;
        d.set_item("decay_exponent", term.decay_exponent)?;
        d.set_item("error_order", term.error_order)?;
        Ok(d)
    }
}

/// The four saddle points of the oscillatory phase at ray slope zeta = x/t.
#[pyfunction]
fn saddle_points<'py>(py: Python<'py>, zeta: f64) -> PyResult<Bound<'py, PyDict>> {
    let sc = spectral::saddle_points(zeta).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("zeta", sc.zeta)?;
    d.set_item("k1", sc.k1)?;
    d.set_item("k2", sc.k2)?;
    d.set_item("k3", sc.k3)?;
    d.set_item("k4", sc.k4)?;
    d.set_item("regime", format!("{:?}", sc.regime).to_lowercase())?;
    Ok(d)
}

/// Explicit error-function model matrix m^W(y_tilde; s) at w, as a nested
/// 3x3 list of complex entries.
#[pyfunction]
fn mw_matrix(y_tilde: f64, s: Complex64, w: Complex64) -> PyResult<Vec<Vec<Complex64>>> {
    let m = wmodel::eval_mw(y_tilde, s, w).map_err(to_py)?;
    Ok((0..3)
        .map(|i| (0..3).map(|j| m.value[(i, j)]).collect())
        .collect())
}

/// Damped Fourier pseudo-spectral run from (u0, u1) on the periodic grid
/// x in [-L, L) with N points. Returns one dict per requested snapshot.
#[pyfunction]
#[pyo3(signature = (u0, u1, l, n, dt, t_end, snapshot_times, edge_guard=1e-6))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    l: f64,
    n: usize,
    dt: f64,
    t_end: f64,
    snapshot_times: Vec<f64>,
    edge_guard: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SimConfig { l, n, dt, t_end, snapshot_times, edge_guard, ..SimConfig::default() };
    let mut sim = init_simulation(&u0, &u1, cfg).map_err(to_py)?;
    let snaps = sim.run().map_err(to_py)?;
    snaps
        .into_iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("t", s.t)?;
            d.set_item("x", s.x)?;
            d.set_item("u", s.u)?;
            d.set_item("v", s.v)?;
            Ok(d)
        })
        .collect()
}

/// Uniform grid for `simulate`: N points on [-L, L).
#[pyfunction]
fn sim_grid(l: f64, n: usize) -> Vec<f64> {
    boussinesq_ist::sim::sim_grid(l, n)
}

/// Compactly supported reference initial data on a uniform grid, handy for
/// quick experiments: returns (x, u0, v0).
#[pyfunction]
fn reference_initial_data(n: usize, xmax: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = scattering::reference_initial_data(n, xmax);
    (d.x.clone(), d.u0.clone(), d.v0.clone())
}

#[pymodule]
fn _boussinesq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ReflectionTable>()?;
    m.add_class::<HastingsMcLeod>()?;
    m.add_class::<AsymptoticProfile>()?;
    m.add_function(wrap_pyfunction!(saddle_points, m)?)?;
    m.add_function(wrap_pyfunction!(mw_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sim_grid, m)?)?;
    m.add_function(wrap_pyfunction!(reference_initial_data, m)?)?;
    Ok(())
}
