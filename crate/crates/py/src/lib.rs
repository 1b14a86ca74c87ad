//! Python bindings for `contact_thermo`.

use contact_thermo::chords::default_scan;
use contact_thermo::models::{self, cw_magnetization_roots, ModelKind, Stability};
use contact_thermo::phase_space::PhasePoint;
use contact_thermo::processes::{Admissibility, FormSign};
use contact_thermo::{self as ct, ThermoError};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: ThermoError) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn model_kind(name: &str) -> PyResult<ModelKind> {
    name.parse().map_err(py_err)
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "contact_thermo_py")]
#[derive(Clone)]
struct Chord {
    q: f64,
    p: f64,
    z_start: f64,
    z_end: f64,
    length: f64,
    direction: i8,
    tangential: bool,
}

#[pymethods]
impl Chord {
    fn __repr__(&self) -> String {
        format!(
            "Chord(q={}, p={}, z_start={}, z_end={}, length={}, direction={})",
            self.q, self.p, self.z_start, self.z_end, self.length, self.direction
        )
    }
}

impl From<ct::Chord> for Chord {
    fn from(c: ct::Chord) -> Self {
        Chord {
            q: c.q,
            p: c.p,
            z_start: c.z_start,
            z_end: c.z_end,
            length: c.length,
            direction: c.direction,
            tangential: c.tangential,
        }
    }
}

/// Closed-form chord between the gas Legendrians Λ(t0, 0) and Λ(t1, c).
#[pyfunction]
fn gas_chord(t0: f64, t1: f64, c: f64) -> PyResult<Chord> {
    ct::gas_chord(t0, t1, c).map(Chord::from).map_err(py_err)
}

/// Closed-form chord between the Curie-Weiss Legendrians Λ(t0, 0) and Λ(t1, c).
#[pyfunction]
fn cw_chord(t0: f64, t1: f64, c: f64, b: f64) -> PyResult<Chord> {
    ct::cw_chord(t0, t1, c, b).map(Chord::from).map_err(py_err)
}

/// Chords found by the generic critical-point scan, mapped back to (z, p, q).
#[pyfunction]
#[pyo3(signature = (model, t0, t1, c, b = None, grid = 4000, tol = 1e-13))]
fn find_chords(model: &str, t0: f64, t1: f64, c: f64, b: Option<f64>, grid: usize, tol: f64) -> PyResult<Vec<Chord>> {
    let kind = model_kind(model)?;
    let scan = default_scan(kind, t0, t1, c);
    let found = ct::find_model_chords(kind, t0, t1, c, b, scan, grid, tol).map_err(py_err)?;
    Ok(found.into_iter().map(Chord::from).collect())
}

#[pyfunction]
fn phi_gas(temperature: f64, x: f64) -> f64 {
    models::phi_gas(temperature, x)
}

#[pyfunction]
fn phi_cw(temperature: f64, x: f64) -> f64 {
    models::phi_cw(temperature, x)
}

/// Self-consistent magnetisations at field q as (p, z, stability) tuples.
#[pyfunction]
#[pyo3(signature = (q, temperature, b, h_back = 0.0))]
fn cw_roots(q: f64, temperature: f64, b: f64, h_back: f64) -> PyResult<Vec<(f64, f64, String)>> {
    let par = ct::CurieWeissParams::new(temperature, h_back, b).map_err(py_err)?;
    Ok(cw_magnetization_roots(q, par)
        .into_iter()
        .map(|r| {
            let stability = match r.stability {
                Stability::GlobalMin => "global_min",
                Stability::LocalMin => "local_min",
                Stability::Unstable => "unstable",
            };
            (r.p, r.z, stability.to_string())
        })
        .collect())
}

/// dz - Σ p dq at a reduced point.
#[pyfunction]
fn eval_reduced_form(z: f64, p: Vec<f64>, q: Vec<f64>, dz: f64, dp: Vec<f64>, dq: Vec<f64>) -> PyResult<f64> {
    let pt = ct::ReducedPoint::new(z, p, q).map_err(py_err)?;
    ct::eval_reduced_form(&pt, &ct::ReducedVelocity { dz, dp, dq }).map_err(py_err)
}

/// dz - S dT - Σ p dq at an extended point `(z, S, T, p, q)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn eval_extended_form(
    z: f64,
    entropy: f64,
    temperature: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    dz: f64,
    d_entropy: f64,
    d_temperature: f64,
    dp: Vec<f64>,
    dq: Vec<f64>,
) -> PyResult<f64> {
    let pt = ct::ExtendedPoint::new(z, entropy, temperature, p, q).map_err(py_err)?;
    let v = ct::ExtendedVelocity {
        dz,
        d_entropy,
        d_temperature,
        dp,
        dq,
    };
    ct::eval_extended_form(&pt, &v).map_err(py_err)
}

/// Finite microstate system with an affine Hamiltonian
/// `H_i(q) = v_int[i] + Σ_j q_j v_bar[j][i]`.
#[pyclass(module = "contact_thermo_py")]
struct System {
    space: ct::MicrostateSpace,
    h: ct::AffineHamiltonian,
}

impl System {
    fn density(&self, rho: Vec<f64>) -> PyResult<ct::Density> {
        ct::Density::new(&self.space, rho).map_err(py_err)
    }
}

#[pymethods]
impl System {
    #[new]
    #[pyo3(signature = (v_int, v_bar, weights = None))]
    fn new(v_int: Vec<f64>, v_bar: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let m = v_int.len();
        let space = match weights {
            Some(w) => ct::MicrostateSpace::with_weights(w),
            None => ct::MicrostateSpace::counting(m),
        }
        .map_err(py_err)?;
        let h = ct::AffineHamiltonian::new(v_int, v_bar).map_err(py_err)?;
        ct::microstate::SystemSpec::from_parts(&space, &h).build().map_err(py_err)?;
        Ok(System { space, h })
    }

    /// Builds a system from the JSON system-description format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (space, h) = ct::microstate::SystemSpec::from_json(text)
            .and_then(|s| s.build())
            .map_err(py_err)?;
        Ok(System { space, h })
    }

    #[getter]
    fn n_states(&self) -> usize {
        self.space.len()
    }

    #[getter]
    fn n_intensive(&self) -> usize {
        self.h.n_intensive()
    }

    /// Gibbs state at (T, q): returns (rho, G*).
    fn gibbs(&self, temperature: f64, q: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
        let g = ct::gibbs(&self.space, &self.h, temperature, &q).map_err(py_err)?;
        Ok((g.rho_g.values().to_vec(), g.free_energy(temperature)))
    }

    fn free_energy(&self, temperature: f64, q: Vec<f64>, rho: Vec<f64>) -> PyResult<f64> {
        let d = self.density(rho)?;
        ct::free_energy(&self.space, &self.h, temperature, &q, &d).map_err(py_err)
    }

    fn entropy(&self, rho: Vec<f64>) -> PyResult<f64> {
        Ok(ct::entropy(&self.space, &self.density(rho)?))
    }

    fn pressures(&self, rho: Vec<f64>) -> PyResult<Vec<f64>> {
        let d = self.density(rho)?;
        ct::pressures(&self.space, &self.h, &d).map_err(py_err)
    }

    /// Fokker-Planck relaxation at constant temperature from `rho0`.
    ///
    /// Returns a dict with `t`, `G`, `rho` (per step), `form` (λ on each
    /// reduced-path sample) and `terminal_tv` to the Gibbs state.
    #[pyo3(signature = (q, temperature, rho0, dt = 0.05, t_end = 50.0))]
    fn relax<'py>(
        &self,
        py: Python<'py>,
        q: Vec<f64>,
        temperature: f64,
        rho0: Vec<f64>,
        dt: f64,
        t_end: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let rho0 = self.density(rho0)?;
        let profile = ct::TemperatureProfile::constant(temperature);
        let trace = ct::fokker_planck_relax(&self.space, &self.h, &q, profile, &rho0, dt, t_end).map_err(py_err)?;
        let target = ct::gibbs(&self.space, &self.h, temperature, &q).map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("t", &trace.t_grid)?;
        out.set_item("G", &trace.g_values)?;
        out.set_item("rho", trace.densities.iter().map(|d| d.values().to_vec()).collect::<Vec<_>>())?;
        out.set_item("form", &trace.form_values)?;
        out.set_item("terminal_tv", trace.terminal_density().total_variation(&self.space, &target.rho_g))?;
        Ok(out)
    }
}

fn sign_name(s: FormSign) -> &'static str {
    match s {
        FormSign::Positive => "positive",
        FormSign::Zero => "zero",
        FormSign::Negative => "negative",
    }
}

/// Ideal-gas Stirling cycle as a list of segment dicts.
#[pyfunction]
#[pyo3(signature = (cold, hot, v_min, v_max, samples = 65))]
fn stirling_cycle<'py>(
    py: Python<'py>,
    cold: f64,
    hot: f64,
    v_min: f64,
    v_max: f64,
    samples: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let trace = ct::stirling_cycle(cold, hot, v_min, v_max, samples).map_err(py_err)?;
    trace
        .segments
        .iter()
        .map(|seg| {
            let d = PyDict::new(py);
            d.set_item("name", seg.name)?;
            d.set_item("form_sign", sign_name(seg.form_sign))?;
            d.set_item("admissible", seg.admissibility == Admissibility::Admissible)?;
            d.set_item("delta_g", seg.delta_g)?;
            d.set_item("temperature_start", seg.temperature_start)?;
            d.set_item("temperature_end", seg.temperature_end)?;
            let pts = seg.path.points();
            d.set_item("z", pts.iter().map(|p| p.z).collect::<Vec<_>>())?;
            d.set_item("p", pts.iter().map(|p| p.p[0]).collect::<Vec<_>>())?;
            d.set_item("q", pts.iter().map(|p| p.q[0]).collect::<Vec<_>>())?;
            d.set_item("chord", seg.chord.map(Chord::from))?;
            Ok(d)
        })
        .collect()
}

/// Slow isotopy along a linear schedule; one dict per initial point.
#[pyfunction]
#[pyo3(signature = (model, x_grid, t0 = 1.0, t1 = 5.0, back0 = 0.0, back1 = 2.0, tau = 1.0, nodes = 101, b = None, slack = 1e-9))]
#[allow(clippy::too_many_arguments)]
fn slow_isotopy<'py>(
    py: Python<'py>,
    model: &str,
    x_grid: Vec<f64>,
    t0: f64,
    t1: f64,
    back0: f64,
    back1: f64,
    tau: f64,
    nodes: usize,
    b: Option<f64>,
    slack: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let slow = match (model_kind(model)?, b) {
        (ModelKind::Gas, None) => ct::SlowModel::Gas,
        (ModelKind::Cw, Some(b)) => ct::SlowModel::Cw { b },
        (ModelKind::Gas, Some(_)) => return Err(PyValueError::new_err("b applies to the cw model only")),
        (ModelKind::Cw, None) => return Err(PyValueError::new_err("the cw model needs b")),
    };
    let sched = ct::Schedule::linear(tau, (t0, t1), (back0, back1), nodes).map_err(py_err)?;
    let trace = ct::run_slow_isotopy(slow, &sched, &x_grid, slack).map_err(py_err)?;
    trace
        .x_grid
        .iter()
        .zip(&trace.paths)
        .zip(&trace.reports)
        .map(|((x, path), report)| {
            let d = PyDict::new(py);
            d.set_item("x", *x)?;
            d.set_item("t", path.times())?;
            d.set_item("coords", path.points().iter().map(PhasePoint::coords).collect::<Vec<_>>())?;
            d.set_item("min_form", report.min_form_value)?;
            d.set_item("nonnegative", report.is_nonnegative())?;
            Ok(d)
        })
        .collect()
}

/// Runs the invariant suite: list of (id, name, passed, detail).
#[pyfunction]
#[pyo3(signature = (seed = None))]
fn verify(seed: Option<u64>) -> Vec<(u32, String, bool, String)> {
    ct::verify::run_all(seed.unwrap_or(ct::verify::DEFAULT_SEED))
        .into_iter()
        .map(|o| (o.id, o.name.to_string(), o.passed, o.detail))
        .collect()
}

#[pymodule]
fn contact_thermo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Chord>()?;
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(gas_chord, m)?)?;
    m.add_function(wrap_pyfunction!(cw_chord, m)?)?;
    m.add_function(wrap_pyfunction!(find_chords, m)?)?;
    m.add_function(wrap_pyfunction!(phi_gas, m)?)?;
    m.add_function(wrap_pyfunction!(phi_cw, m)?)?;
    m.add_function(wrap_pyfunction!(cw_roots, m)?)?;
    m.add_function(wrap_pyfunction!(eval_reduced_form, m)?)?;
    m.add_function(wrap_pyfunction!(eval_extended_form, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(slow_isotopy, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
