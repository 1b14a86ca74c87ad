//! Slow, fast and ultrafast thermodynamic processes.
//!
//! * Slow: non-negative Legendrian isotopies driven by a [`Schedule`] of
//!   temperature and background field.
//! * Fast: relaxation of a density under the free-energy gradient flow
//!   (the Fokker-Planck stage), at a prescribed non-decreasing temperature.
//! * Ultrafast: instantaneous jumps that keep the density (hence the
//!   extensive variables) and only re-evaluate the free energy.

use serde::{Deserialize, Serialize};

use crate::chords::{gas_chord, Chord};
use crate::error::{check_len, Result, ThermoError};
use crate::microstate::{
    entropy, free_energy, gibbs, lift_to_extended, pressures, AffineHamiltonian, Density, GibbsResult,
    MicrostateSpace,
};
use crate::models::{
    cw_magnetization_roots, cw_q_of_p, cw_z, phi_cw_prime, phi_gas, phi_gas_prime, CurieWeissParams,
    IdealGasParams,
};
use crate::phase_space::{
    check_path_nonnegative, eval_reduced_form, reduce_point, ExtendedPath, NonnegReport, ReducedPath,
    ReducedPoint, ReducedVelocity, ReductionSpec, SampledPath,
};

/// Time grid with the temperature and background field (`P_back` or
/// `H_back`) at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    t_grid: Vec<f64>,
    temperature: Vec<f64>,
    background: Vec<f64>,
}

impl Schedule {
    pub fn new(t_grid: Vec<f64>, temperature: Vec<f64>, background: Vec<f64>) -> Result<Self> {
        check_len("schedule temperature", t_grid.len(), temperature.len())?;
        check_len("schedule background", t_grid.len(), background.len())?;
        if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ThermoError::invalid("schedule grid must be non-empty and increasing"));
        }
        if temperature.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(ThermoError::invalid("schedule temperatures must be positive"));
        }
        if background.iter().any(|b| !b.is_finite()) {
            return Err(ThermoError::invalid("schedule background must be finite"));
        }
        Ok(Schedule {
            t_grid,
            temperature,
            background,
        })
    }

    /// Linear interpolation of `(T, background)` over `[0, tau]` on `nodes`
    /// equally spaced times.
    pub fn linear(tau: f64, temperature: (f64, f64), background: (f64, f64), nodes: usize) -> Result<Self> {
        if nodes < 2 || !(tau > 0.0) {
            return Err(ThermoError::invalid("linear schedule needs tau > 0 and at least 2 nodes"));
        }
        let s: Vec<f64> = (0..nodes).map(|i| i as f64 / (nodes - 1) as f64).collect();
        let lerp = |(a, b): (f64, f64), s: f64| a + (b - a) * s;
        Schedule::new(
            s.iter().map(|s| tau * s).collect(),
            s.iter().map(|&s| lerp(temperature, s)).collect(),
            s.iter().map(|&s| lerp(background, s)).collect(),
        )
    }

    pub fn times(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperature
    }

    pub fn backgrounds(&self) -> &[f64] {
        &self.background
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    pub fn is_temperature_nondecreasing(&self) -> bool {
        self.temperature.windows(2).all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum SlowModel {
    Gas,
    Cw { b: f64 },
}

#[derive(Debug, Clone)]
pub struct IsotopyTrace {
    pub model: SlowModel,
    pub schedule: Schedule,
    pub x_grid: Vec<f64>,
    pub paths: Vec<ReducedPath>,
    pub reports: Vec<NonnegReport>,
}

impl IsotopyTrace {
    /// Distance of a reduced point from the slice Legendrian at `node`.
    pub fn slice_residual(&self, node: usize, pt: &ReducedPoint) -> f64 {
        legendrian_residual(
            self.model,
            self.schedule.temperature[node],
            self.schedule.background[node],
            pt.z,
            pt.p[0],
            pt.q[0],
        )
    }

    /// Residual of the Lagrangian projection `(p, q)` against the slice at
    /// `node`, ignoring `z`.
    pub fn slice_projection_residual(&self, node: usize, p: f64, q: f64) -> f64 {
        let (t, bg) = (self.schedule.temperature[node], self.schedule.background[node]);
        match self.model {
            SlowModel::Gas if q < bg => (p - phi_gas_prime(t, q - bg)).abs(),
            SlowModel::Gas => f64::INFINITY,
            SlowModel::Cw { b } => (p - phi_cw_prime(t, q + bg + b * p)).abs(),
        }
    }

    /// Largest slice residual over every path and node.
    pub fn max_slice_residual(&self) -> f64 {
        self.paths
            .iter()
            .flat_map(|path| path.points().iter().enumerate().map(|(i, pt)| self.slice_residual(i, pt)))
            .fold(0.0, f64::max)
    }
}

fn legendrian_residual(model: SlowModel, t: f64, bg: f64, z: f64, p: f64, q: f64) -> f64 {
    match model {
        SlowModel::Gas => {
            if !(q < bg) {
                return f64::INFINITY;
            }
            (z - phi_gas(t, q - bg)).abs().max((p - phi_gas_prime(t, q - bg)).abs())
        }
        SlowModel::Cw { b } => {
            let par = CurieWeissParams {
                temperature: t,
                h_back: bg,
                b,
            };
            (p - phi_cw_prime(t, q + bg + b * p)).abs().max((z - cw_z(p, q, par)).abs())
        }
    }
}

/// Maximum jump in `p` allowed between consecutive nodes when continuing a
/// Curie-Weiss branch.
pub const BRANCH_JUMP_THRESHOLD: f64 = 0.1;

/// Follows each initial equilibrium through the scheduled family of
/// Legendrians `Λ(T(t), background(t))` at fixed intensive variable `q`.
///
/// For the gas `x` is the initial `q`; for Curie-Weiss `x` is the initial
/// magnetisation, whose field `q` is then held while the branch is continued
/// by nearest-root matching.
pub fn run_slow_isotopy(model: SlowModel, sched: &Schedule, x_grid: &[f64], slack: f64) -> Result<IsotopyTrace> {
    if x_grid.is_empty() {
        return Err(ThermoError::invalid("isotopy needs at least one initial point"));
    }
    if sched.len() < 2 {
        return Err(ThermoError::invalid("isotopy schedule needs at least 2 nodes"));
    }
    if let SlowModel::Cw { b } = model {
        CurieWeissParams::new(sched.temperature[0], sched.background[0], b)?;
    }
    let mut paths = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let points = match model {
            SlowModel::Gas => gas_isotopy_path(sched, x)?,
            SlowModel::Cw { b } => cw_isotopy_path(sched, b, x)?,
        };
        paths.push(SampledPath::new(sched.t_grid.clone(), points)?);
    }
    let reports = paths
        .iter()
        .map(|p| check_path_nonnegative(p, slack))
        .collect::<Result<Vec<_>>>()?;
    Ok(IsotopyTrace {
        model,
        schedule: sched.clone(),
        x_grid: x_grid.to_vec(),
        paths,
        reports,
    })
}

fn gas_isotopy_path(sched: &Schedule, q: f64) -> Result<Vec<ReducedPoint>> {
    sched
        .temperature
        .iter()
        .zip(&sched.background)
        .map(|(&t, &p_back)| {
            IdealGasParams::new(t, p_back)?;
            if !(q < p_back) {
                return Err(ThermoError::Domain {
                    what: "gas isotopy (q < P_back)",
                    x: q,
                    lo: f64::NEG_INFINITY,
                    hi: p_back,
                });
            }
            Ok(ReducedPoint::scalar(phi_gas(t, q - p_back), phi_gas_prime(t, q - p_back), q))
        })
        .collect()
}

fn cw_isotopy_path(sched: &Schedule, b: f64, p0: f64) -> Result<Vec<ReducedPoint>> {
    let par0 = CurieWeissParams::new(sched.temperature[0], sched.background[0], b)?;
    let q = cw_q_of_p(p0, par0)?;
    let mut points = vec![ReducedPoint::scalar(cw_z(p0, q, par0), p0, q)];
    let mut p_prev = p0;
    for node in 1..sched.len() {
        let par = CurieWeissParams::new(sched.temperature[node], sched.background[node], b)?;
        let nearest = cw_magnetization_roots(q, par)
            .into_iter()
            .min_by(|a, b| (a.p - p_prev).abs().total_cmp(&(b.p - p_prev).abs()));
        let root = match nearest {
            Some(r) if (r.p - p_prev).abs() <= BRANCH_JUMP_THRESHOLD => r,
            Some(r) => {
                return Err(ThermoError::BranchLost {
                    node,
                    t: sched.t_grid[node],
                    jump: (r.p - p_prev).abs(),
                })
            }
            None => {
                return Err(ThermoError::BranchLost {
                    node,
                    t: sched.t_grid[node],
                    jump: f64::INFINITY,
                })
            }
        };
        p_prev = root.p;
        points.push(ReducedPoint::scalar(root.z, root.p, q));
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub before: ReducedPoint,
    pub after_stage1: ReducedPoint,
    pub is_ultrafast: bool,
    /// The frozen density carried through the jump.
    pub density: Density,
    /// Equilibrium of the post-jump system, the target of the relaxation stage.
    pub terminal: GibbsResult,
    /// Post-jump Hamiltonian (background folded into the internal energy).
    pub terminal_hamiltonian: AffineHamiltonian,
}

/// Gibbs states closer than this in total variation count as coincident.
pub const ULTRAFAST_TOL: f64 = 1e-8;

/// Stage one of the two-stage scenario: jump `T0 → T1` and background
/// `0 → background_jump` with the density held at the initial Gibbs state.
pub fn ultrafast_jump(
    space: &MicrostateSpace,
    h: &AffineHamiltonian,
    t0: f64,
    t1: f64,
    q: &[f64],
    background_jump: &[f64],
) -> Result<JumpRecord> {
    check_len("background jump", h.n_intensive(), background_jump.len())?;
    let initial = gibbs(space, h, t0, q)?;
    let rho = initial.rho_g;
    let p = pressures(space, h, &rho)?;
    let z0 = -free_energy(space, h, t0, q, &rho)?;
    let shifted = h.shifted(background_jump)?;
    let z1 = -free_energy(space, &shifted, t1, q, &rho)?;
    let terminal = gibbs(space, &shifted, t1, q)?;
    let is_ultrafast = rho.total_variation(space, &terminal.rho_g) <= ULTRAFAST_TOL;
    Ok(JumpRecord {
        before: ReducedPoint::new(z0, p.clone(), q.to_vec())?,
        after_stage1: ReducedPoint::new(z1, p, q.to_vec())?,
        is_ultrafast,
        density: rho,
        terminal,
        terminal_hamiltonian: shifted,
    })
}

/// Prescribed non-decreasing reservoir temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemperatureProfile {
    Constant { temperature: f64 },
    /// Linear ramp from `t0` to `t1` over `[0, duration]`, then constant.
    Ramp { t0: f64, t1: f64, duration: f64 },
    /// `T(t) = t_inf - (t_inf - t0) exp(-t / tau)`.
    Relaxing { t0: f64, t_inf: f64, tau: f64 },
}

impl TemperatureProfile {
    pub fn constant(temperature: f64) -> Self {
        TemperatureProfile::Constant { temperature }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            TemperatureProfile::Constant { temperature } => temperature > 0.0,
            TemperatureProfile::Ramp { t0, t1, duration } => t0 > 0.0 && t1 >= t0 && duration > 0.0,
            TemperatureProfile::Relaxing { t0, t_inf, tau } => t0 > 0.0 && t_inf >= t0 && tau > 0.0,
        };
        if !ok {
            return Err(ThermoError::invalid(format!(
                "temperature profile must be positive and non-decreasing: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> f64 {
        match *self {
            TemperatureProfile::Constant { temperature } => temperature,
            TemperatureProfile::Ramp { t0, t1, duration } => t0 + (t1 - t0) * (t / duration).clamp(0.0, 1.0),
            TemperatureProfile::Relaxing { t0, t_inf, tau } => t_inf - (t_inf - t0) * (-t / tau).exp(),
        }
    }
}

/// Integrator settings for [`fokker_planck_relax_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    pub dt0: f64,
    pub t_end: f64,
    /// Steps that would push any density entry below this are halved.
    pub min_density: f64,
    pub min_dt: f64,
    /// Allowed growth of `G` at frozen temperature per accepted step; only
    /// needs to cover rounding in the evaluation of `G`.
    pub monotone_tol: f64,
}

impl RelaxOptions {
    pub fn new(dt0: f64, t_end: f64) -> Self {
        RelaxOptions {
            dt0,
            t_end,
            min_density: 1e-14,
            min_dt: 1e-15,
            monotone_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxTrace {
    pub t_grid: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub densities: Vec<Density>,
    pub extended_path: ExtendedPath,
    pub reduced_path: ReducedPath,
    /// `λ(γ̇)` on forward differences, one per accepted step.
    pub form_values: Vec<f64>,
    /// `G(T(t), q, ρ(t))` per node.
    pub g_values: Vec<f64>,
    /// `G(T_k, ρ_{k+1}) - G(T_k, ρ_k)` per accepted step.
    pub g_frozen_increments: Vec<f64>,
}

impl RelaxTrace {
    pub fn terminal_density(&self) -> &Density {
        self.densities.last().expect("trace has at least one node")
    }

    pub fn max_mass_error(&self, space: &MicrostateSpace) -> f64 {
        self.densities
            .iter()
            .map(|d| (space.integrate(d.values()) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_density(&self) -> f64 {
        self.densities
            .iter()
            .flat_map(|d| d.values().iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Exponential decay rate of `G - G_final` fitted over the middle of the
    /// trace (`G - G* ~ exp(-2 λ t)` gives `λ`). `None` when the trace is
    /// already stationary.
    pub fn empirical_decay_rate(&self) -> Option<f64> {
        let g_end = *self.g_values.last()?;
        let excess: Vec<(f64, f64)> = self
            .t_grid
            .iter()
            .zip(&self.g_values)
            .map(|(t, g)| (*t, g - g_end))
            .filter(|(_, e)| *e > 1e-10)
            .collect();
        if excess.len() < 4 {
            return None;
        }
        let (a, b) = (excess[excess.len() / 4], excess[excess.len() / 2]);
        if b.0 <= a.0 {
            return None;
        }
        Some((a.1.ln() - b.1.ln()) / (b.0 - a.0) / 2.0)
    }
}

/// Lower bound on the relaxation rate of the linearised flow at the Gibbs
/// state: `T / max_i rho_G,i`.
pub fn relaxation_rate_bound(space: &MicrostateSpace, h: &AffineHamiltonian, temperature: f64, q: &[f64]) -> Result<f64> {
    let g = gibbs(space, h, temperature, q)?;
    let max = g.rho_g.values().iter().copied().fold(0.0, f64::max);
    Ok(temperature / max)
}

pub fn fokker_planck_relax(
    space: &MicrostateSpace,
    h: &AffineHamiltonian,
    q: &[f64],
    profile: TemperatureProfile,
    rho0: &Density,
    dt0: f64,
    t_end: f64,
) -> Result<RelaxTrace> {
    fokker_planck_relax_with(space, h, q, profile, rho0, RelaxOptions::new(dt0, t_end))
}

/// Integrates `ρ̇_i = -(g_i - ḡ)` with `g_i = T(1 + ln ρ_i) + H(q, m_i)` and
/// `ḡ = Σ w g / Σ w`, by explicit Euler with step halving.
///
/// Steps are capped at `1.5 min ρ / T`, below the explicit stability limit,
/// and halved when they would drop any `ρ_i` below `min_density` or raise `G`
/// at the frozen step-start temperature by more than `monotone_tol`.
/// Accepted steps let the step grow back towards `dt0`.
pub fn fokker_planck_relax_with(
    space: &MicrostateSpace,
    h: &AffineHamiltonian,
    q: &[f64],
    profile: TemperatureProfile,
    rho0: &Density,
    opts: RelaxOptions,
) -> Result<RelaxTrace> {
    profile.validate()?;
    check_len("initial density", space.len(), rho0.len())?;
    if !rho0.is_strictly_positive() {
        return Err(ThermoError::invalid("Fokker-Planck relaxation needs a strictly positive initial density"));
    }
    if !(opts.dt0 > 0.0) || !(opts.t_end > 0.0) || !opts.t_end.is_finite() {
        return Err(ThermoError::invalid("relaxation needs dt0 > 0 and finite t_end > 0"));
    }
    let energies = h.energies(q)?;
    let weights = space.weights();
    let total_weight = space.total_weight();

    let mut t = 0.0;
    let mut rho = rho0.values().to_vec();
    let mut temperature = profile.at(0.0);
    let g_at = |temp: f64, r: &[f64]| free_energy(space, h, temp, q, &Density::from_raw(r.to_vec()));

    let mut t_grid = vec![t];
    let mut temperatures = vec![temperature];
    let mut densities = vec![rho0.clone()];
    let mut g_values = vec![g_at(temperature, &rho)?];
    let mut g_frozen_increments = Vec::new();

    let mut dt = opts.dt0;
    let mut proposal = vec![0.0; rho.len()];
    while t < opts.t_end {
        let g: Vec<f64> = rho
            .iter()
            .zip(&energies)
            .map(|(r, e)| temperature * (1.0 + r.ln()) + e)
            .collect();
        let g_bar = space.integrate(&g) / total_weight;
        let g_old = *g_values.last().unwrap();
        let g_old_frozen = g_at(temperature, &rho)?;
        // λ_max of the linearised flow is at most T / min ρ; staying at 1.5 / λ_max
        // keeps every mode contracting by at least half per step
        let rho_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let mut step = dt.min(opts.t_end - t).min(1.5 * rho_min / temperature);
        let g_new_frozen = loop {
            if step < opts.min_dt {
                return Err(ThermoError::StepUnderflow { t, dt: step });
            }
            for ((out, r), gi) in proposal.iter_mut().zip(&rho).zip(&g) {
                *out = r - step * (gi - g_bar);
            }
            if proposal.iter().all(|r| *r >= opts.min_density) {
                let g_new = g_at(temperature, &proposal)?;
                if g_new <= g_old_frozen + opts.monotone_tol {
                    break g_new;
                }
            }
            step *= 0.5;
        };
        debug_assert!((g_old - g_old_frozen).abs() < 1e-9);
        g_frozen_increments.push(g_new_frozen - g_old_frozen);
        std::mem::swap(&mut rho, &mut proposal);
        // land exactly on t_end to keep the final node well defined
        t = if opts.t_end - (t + step) < opts.min_dt { opts.t_end } else { t + step };
        temperature = profile.at(t);
        t_grid.push(t);
        temperatures.push(temperature);
        densities.push(Density::from_raw(rho.clone()));
        g_values.push(g_at(temperature, &rho)?);
        dt = (step * 1.5).min(opts.dt0);
    }
    let _ = weights;

    let spec = ReductionSpec::temperature_only(h.n_intensive(), None);
    let extended = t_grid
        .iter()
        .zip(&temperatures)
        .zip(&densities)
        .map(|((_, temp), d)| lift_to_extended(space, h, *temp, q, d))
        .collect::<Result<Vec<_>>>()?;
    let reduced = extended
        .iter()
        .map(|pt| reduce_point(pt, &spec))
        .collect::<Result<Vec<_>>>()?;
    let form_values = reduced
        .windows(2)
        .zip(t_grid.windows(2))
        .map(|(pts, ts)| {
            let dt = ts[1] - ts[0];
            let v = ReducedVelocity {
                dz: (pts[1].z - pts[0].z) / dt,
                dp: pts[1].p.iter().zip(&pts[0].p).map(|(a, b)| (a - b) / dt).collect(),
                dq: pts[1].q.iter().zip(&pts[0].q).map(|(a, b)| (a - b) / dt).collect(),
            };
            eval_reduced_form(&pts[0], &v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelaxTrace {
        extended_path: SampledPath::new(t_grid.clone(), extended)?,
        reduced_path: SampledPath::new(t_grid.clone(), reduced)?,
        t_grid,
        temperatures,
        densities,
        form_values,
        g_values,
        g_frozen_increments,
    })
}

/// Convenience for the frozen-temperature entropy production of a relaxation
/// step: `(G_k - G_{k+1}) / (Δt T)` at constant temperature.
pub fn entropy_production_rates(trace: &RelaxTrace) -> Vec<f64> {
    trace
        .g_values
        .windows(2)
        .zip(trace.t_grid.windows(2))
        .zip(&trace.temperatures)
        .map(|((g, t), temp)| (g[0] - g[1]) / (t[1] - t[0]) / temp)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Isotherm,
    IsochoricChord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormSign {
    Positive,
    Zero,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    /// Temperature constant or rising; reduced non-negativity applies.
    Admissible,
    /// Temperature falls, so the free-energy decrement assumption fails and
    /// the segment is labelled rather than certified.
    TemperatureDecreasing,
}

#[derive(Debug, Clone)]
pub struct StirlingSegment {
    pub name: &'static str,
    pub kind: SegmentKind,
    /// Samples in the cycle chart `(z, p = v, q = -P_total)`.
    pub path: ReducedPath,
    pub temperature_start: f64,
    pub temperature_end: f64,
    pub form_sign: FormSign,
    pub admissibility: Admissibility,
    pub delta_g: f64,
    /// The chord from `Λ(T_C, 0)` to `Λ(T_H, c)` realising an isochoric
    /// corner; `None` at the degenerate volume `v = 1`.
    pub chord: Option<Chord>,
}

#[derive(Debug, Clone)]
pub struct StirlingCycleTrace {
    pub cold: f64,
    pub hot: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub segments: Vec<StirlingSegment>,
}

impl StirlingCycleTrace {
    /// Distance between the end of the last segment and the start of the
    /// first in `(z, p, q)`.
    pub fn closure_residual(&self) -> f64 {
        let last = self.segments.last().unwrap().path.points().last().unwrap();
        let first = &self.segments[0].path.points()[0];
        (last.z - first.z)
            .abs()
            .max((last.p[0] - first.p[0]).abs())
            .max((last.q[0] - first.q[0]).abs())
    }

    pub fn total_delta_g(&self) -> f64 {
        self.segments.iter().map(|s| s.delta_g).sum()
    }
}

/// Values of `|Δz|` below this label a chord segment as `Zero`.
const SIGN_THRESHOLD: f64 = 1e-12;

/// Four-stroke gas cycle: hot isotherm (compression `v_max → v_min`),
/// isochoric cooling at `v_min`, cold isotherm (expansion), isochoric heating
/// at `v_max`.
///
/// Isotherms lie on `Λ(T, 0)` in the chart `q = -P_total`, so the form
/// vanishes on them. Each isochoric corner is realised as the chord from
/// `Λ(T_C, 0)` to `Λ(T_H, c)` with `c = (T_H - T_C) / v`; in the cycle chart
/// it appears as the straight segment joining the two isotherms.
pub fn stirling_cycle(cold: f64, hot: f64, v_min: f64, v_max: f64, n_samples: usize) -> Result<StirlingCycleTrace> {
    if !(cold > 0.0) || !(hot > cold) || !(v_min > 0.0) || !(v_max > v_min) || !v_max.is_finite() || !hot.is_finite() {
        return Err(ThermoError::invalid(format!(
            "Stirling cycle needs T_H > T_C > 0 and v_max > v_min > 0, got T_C = {cold}, T_H = {hot}, v = [{v_min}, {v_max}]"
        )));
    }
    if n_samples < 3 {
        return Err(ThermoError::invalid("Stirling segments need at least 3 samples"));
    }
    let s: Vec<f64> = (0..n_samples).map(|i| i as f64 / (n_samples - 1) as f64).collect();
    let on_isotherm = |t: f64, v: f64| ReducedPoint::scalar(t * v.ln(), v, -t / v);

    let isotherm = |name, t: f64, v_from: f64, v_to: f64| -> Result<StirlingSegment> {
        // geometric spacing in v keeps samples even along the hyperbola
        let ratio = v_to / v_from;
        let points: Vec<ReducedPoint> = s.iter().map(|&si| on_isotherm(t, v_from * ratio.powf(si))).collect();
        let delta_z = points.last().unwrap().z - points[0].z;
        Ok(StirlingSegment {
            name,
            kind: SegmentKind::Isotherm,
            path: SampledPath::new(s.clone(), points)?,
            temperature_start: t,
            temperature_end: t,
            form_sign: FormSign::Zero,
            admissibility: Admissibility::Admissible,
            delta_g: -delta_z,
            chord: None,
        })
    };
    let isochore = |name, v: f64, t_from: f64, t_to: f64| -> Result<StirlingSegment> {
        let a = on_isotherm(t_from, v);
        let b = on_isotherm(t_to, v);
        let points: Vec<ReducedPoint> = s
            .iter()
            .map(|&si| ReducedPoint::scalar(a.z + (b.z - a.z) * si, v, a.q[0] + (b.q[0] - a.q[0]) * si))
            .collect();
        let chord = match gas_chord(cold, hot, (hot - cold) / v) {
            Ok(ch) => Some(ch),
            Err(ThermoError::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
        let delta_z = b.z - a.z;
        let form_sign = if delta_z > SIGN_THRESHOLD {
            FormSign::Positive
        } else if delta_z < -SIGN_THRESHOLD {
            FormSign::Negative
        } else {
            FormSign::Zero
        };
        Ok(StirlingSegment {
            name,
            kind: SegmentKind::IsochoricChord,
            path: SampledPath::new(s.clone(), points)?,
            temperature_start: t_from,
            temperature_end: t_to,
            form_sign,
            admissibility: if t_to >= t_from {
                Admissibility::Admissible
            } else {
                Admissibility::TemperatureDecreasing
            },
            delta_g: -delta_z,
            chord,
        })
    };
    let segments = vec![
        isotherm("hot_isotherm", hot, v_max, v_min)?,
        isochore("cooling_chord", v_min, hot, cold)?,
        isotherm("cold_isotherm", cold, v_min, v_max)?,
        isochore("heating_chord", v_max, cold, hot)?,
    ];
    Ok(StirlingCycleTrace {
        cold,
        hot,
        v_min,
        v_max,
        segments,
    })
}

/// Entropy of the density at each node of a relaxation trace.
pub fn trace_entropies(space: &MicrostateSpace, trace: &RelaxTrace) -> Vec<f64> {
    trace.densities.iter().map(|d| entropy(space, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::DEFAULT_SLACK;
    use approx::assert_abs_diff_eq;

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Schedule::new(vec![0.0, 1.0], vec![1.0, -1.0], vec![0.0, 0.0]).is_err());
        assert!(Schedule::new(vec![0.0, 1.0], vec![1.0], vec![0.0, 0.0]).is_err());
        let s = Schedule::linear(1.0, (1.0, 5.0), (0.0, 2.0), 5).unwrap();
        assert_eq!(s.temperatures(), [1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(s.backgrounds(), [0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(s.is_temperature_nondecreasing());
    }

    #[test]
    fn chord_point_path_is_a_reeb_chord() {
        let sched = Schedule::linear(1.0, (1.0, 5.0), (0.0, 2.0), 41).unwrap();
        let trace = run_slow_isotopy(SlowModel::Gas, &sched, &[-0.5], DEFAULT_SLACK).unwrap();
        for (t, pt) in sched.times().iter().zip(trace.paths[0].points()) {
            assert_abs_diff_eq!(pt.p[0], 2.0, epsilon = 1e-12);
            assert_eq!(pt.q[0], -0.5);
            assert_abs_diff_eq!(pt.z, (1.0 + 4.0 * t) * 2f64.ln(), epsilon = 1e-12);
        }
        assert!(trace.reports[0].is_nonnegative());
        assert!(trace.max_slice_residual() < 1e-12);
    }

    #[test]
    fn constant_schedule_is_static() {
        let sched = Schedule::linear(1.0, (2.0, 2.0), (0.3, 0.3), 11).unwrap();
        let xs = [-3.0, -1.0, -0.2];
        let trace = run_slow_isotopy(SlowModel::Gas, &sched, &xs, DEFAULT_SLACK).unwrap();
        for (path, report) in trace.paths.iter().zip(&trace.reports) {
            assert!(path.points().windows(2).all(|w| w[0] == w[1]));
            assert!(report.per_step_values.iter().all(|v| *v == 0.0));
        }
        let cw = run_slow_isotopy(SlowModel::Cw { b: 1.0 }, &sched, &[-0.5, 0.0, 0.7], DEFAULT_SLACK).unwrap();
        for report in &cw.reports {
            assert!(report.per_step_values.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn gas_isotopy_leaving_domain_fails() {
        let sched = Schedule::linear(1.0, (1.0, 2.0), (0.0, -1.0), 5).unwrap();
        assert!(matches!(
            run_slow_isotopy(SlowModel::Gas, &sched, &[-0.5], DEFAULT_SLACK),
            Err(ThermoError::Domain { .. })
        ));
    }

    #[test]
    fn cw_heating_isotopy_is_nonnegative() {
        let sched = Schedule::linear(1.0, (1.2, 2.0), (0.0, 0.0), 200).unwrap();
        let xs: Vec<f64> = (-8..=8).map(|i| 0.1 * i as f64 + 0.05).collect();
        let trace = run_slow_isotopy(SlowModel::Cw { b: 1.0 }, &sched, &xs, 1e-8).unwrap();
        assert!(trace.max_slice_residual() < 1e-8);
        for r in &trace.reports {
            assert!(r.is_nonnegative(), "{r:?}");
        }
        // ordered phase: global minima at non-zero field stay on their branch
        let sched = Schedule::linear(1.0, (0.6, 1.5), (0.0, 0.0), 400).unwrap();
        let par = CurieWeissParams::new(0.6, 0.0, 1.0).unwrap();
        let xs: Vec<f64> = [-0.8, -0.3, 0.2, 0.5]
            .iter()
            .map(|q| crate::models::cw_equilibrium(*q, par).unwrap().p)
            .collect();
        let trace = run_slow_isotopy(SlowModel::Cw { b: 1.0 }, &sched, &xs, 1e-8).unwrap();
        assert!(trace.reports.iter().all(NonnegReport::is_nonnegative));
    }

    #[test]
    fn cw_spinodal_crossing_reports_branch_loss() {
        // metastable branch p < 0 under a positive field vanishes when the
        // field grows past the spinodal
        let sched = Schedule::linear(1.0, (0.5, 0.5), (0.0, 0.6), 50).unwrap();
        let err = run_slow_isotopy(SlowModel::Cw { b: 1.0 }, &sched, &[-0.95], DEFAULT_SLACK).unwrap_err();
        assert!(matches!(err, ThermoError::BranchLost { .. }), "{err:?}");
        assert!(err.is_numerical());
    }

    fn two_state(v_int: [f64; 2], v_bar: [f64; 2]) -> (MicrostateSpace, AffineHamiltonian) {
        (
            MicrostateSpace::counting(2).unwrap(),
            AffineHamiltonian::new(v_int.to_vec(), vec![v_bar.to_vec()]).unwrap(),
        )
    }

    #[test]
    fn zero_jump_is_identity() {
        let (sp, h) = two_state([0.0, 1.0], [1.0, -1.0]);
        let rec = ultrafast_jump(&sp, &h, 0.7, 0.7, &[0.2], &[0.0]).unwrap();
        assert_eq!(rec.before, rec.after_stage1);
        assert!(rec.is_ultrafast);
    }

    #[test]
    fn proportional_jump_is_ultrafast() {
        // H/T unchanged: (0, 1)/1 → (0, 2)/2
        let (sp, h) = two_state([0.0, 1.0], [0.0, 1.0]);
        let rec = ultrafast_jump(&sp, &h, 1.0, 2.0, &[0.0], &[1.0]).unwrap();
        assert!(rec.is_ultrafast);
        assert_eq!(rec.before.p, rec.after_stage1.p);
        assert_eq!(rec.before.q, rec.after_stage1.q);
        // constant shift of H at fixed T
        let (sp, h) = two_state([0.0, 1.0], [1.0, 1.0]);
        let rec = ultrafast_jump(&sp, &h, 1.0, 1.0, &[0.0], &[0.4]).unwrap();
        assert!(rec.is_ultrafast);
        assert_abs_diff_eq!(rec.after_stage1.z - rec.before.z, -0.4, epsilon = 1e-14);
    }

    #[test]
    fn generic_jump_hands_off_to_relaxation() {
        let (sp, h) = two_state([0.0, 1.0], [1.0, -1.0]);
        let rec = ultrafast_jump(&sp, &h, 1.0, 1.5, &[0.0], &[0.5]).unwrap();
        assert!(!rec.is_ultrafast);
        assert_eq!(rec.before.p, rec.after_stage1.p);
        let trace = fokker_planck_relax(
            &sp,
            &rec.terminal_hamiltonian,
            &[0.0],
            TemperatureProfile::constant(1.5),
            &rec.density,
            0.05,
            60.0,
        )
        .unwrap();
        assert!(trace.terminal_density().total_variation(&sp, &rec.terminal.rho_g) < 1e-8);
        assert_abs_diff_eq!(trace.reduced_path.points()[0].z, rec.after_stage1.z, epsilon = 1e-14);
    }

    #[test]
    fn gibbs_start_is_stationary() {
        let sp = MicrostateSpace::counting(3).unwrap();
        let h = AffineHamiltonian::new(vec![0.0, 0.5, 1.0], vec![vec![1.0, 0.0, -1.0]]).unwrap();
        let g = gibbs(&sp, &h, 0.8, &[0.3]).unwrap();
        let trace = fokker_planck_relax(&sp, &h, &[0.3], TemperatureProfile::constant(0.8), &g.rho_g, 0.1, 5.0).unwrap();
        let g0 = trace.g_values[0];
        assert!(trace.g_values.iter().all(|g| (g - g0).abs() < 1e-13));
    }

    #[test]
    fn flat_hamiltonian_relaxes_to_uniform() {
        let sp = MicrostateSpace::counting(4).unwrap();
        let h = AffineHamiltonian::new(vec![0.0; 4], vec![vec![0.0; 4]]).unwrap();
        let rho0 = Density::new(&sp, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let trace = fokker_planck_relax(&sp, &h, &[0.0], TemperatureProfile::constant(1.0), &rho0, 0.05, 40.0).unwrap();
        assert!(trace.terminal_density().total_variation(&sp, &Density::uniform(&sp)) < 1e-10);
        let early: Vec<f64> = trace.g_values.iter().take(20).copied().collect();
        assert!(early.windows(2).all(|w| w[1] < w[0]));
        assert!(trace.max_mass_error(&sp) < 1e-12);
        assert!(trace.form_values.iter().all(|v| *v >= -1e-8));
    }

    #[test]
    fn relaxation_rejects_bad_inputs() {
        let sp = MicrostateSpace::counting(2).unwrap();
        let h = AffineHamiltonian::new(vec![0.0; 2], vec![vec![0.0; 2]]).unwrap();
        let boundary = Density::new(&sp, vec![1.0, 0.0]).unwrap();
        let profile = TemperatureProfile::constant(1.0);
        assert!(fokker_planck_relax(&sp, &h, &[0.0], profile, &boundary, 0.1, 1.0).is_err());
        let falling = TemperatureProfile::Ramp {
            t0: 2.0,
            t1: 1.0,
            duration: 1.0,
        };
        assert!(fokker_planck_relax(&sp, &h, &[0.0], falling, &Density::uniform(&sp), 0.1, 1.0).is_err());
    }

    #[test]
    fn underflow_is_reported() {
        let sp = MicrostateSpace::counting(2).unwrap();
        let h = AffineHamiltonian::new(vec![0.0, 1.0], vec![vec![0.0; 2]]).unwrap();
        let rho0 = Density::new(&sp, vec![0.5, 0.5]).unwrap();
        let opts = RelaxOptions {
            min_dt: 1.0,
            ..RelaxOptions::new(0.9, 10.0)
        };
        let err = fokker_planck_relax_with(&sp, &h, &[0.0], TemperatureProfile::constant(0.01), &rho0, opts).unwrap_err();
        assert!(matches!(err, ThermoError::StepUnderflow { .. }));
    }

    #[test]
    fn stirling_fig1_corner() {
        let cycle = stirling_cycle(1.0, 5.0, 1.5, 2.0, 21).unwrap();
        let heating = &cycle.segments[3];
        let chord = heating.chord.unwrap();
        assert_eq!(chord.p, 2.0);
        assert_abs_diff_eq!(chord.length, 4.0 * 2f64.ln(), epsilon = 1e-12);
        assert_eq!(heating.form_sign, FormSign::Positive);
        let cooling = &cycle.segments[1];
        assert_abs_diff_eq!(cooling.chord.unwrap().length, 4.0 * 1.5f64.ln(), epsilon = 1e-12);
        assert_eq!(cooling.form_sign, FormSign::Negative);
        assert_eq!(cooling.admissibility, Admissibility::TemperatureDecreasing);
        assert!(cycle.closure_residual() < 1e-9);
        assert!(cycle.total_delta_g().abs() < 1e-9);
        for seg in [&cycle.segments[0], &cycle.segments[2]] {
            let values = seg.path.form_values().unwrap();
            assert!(values.iter().all(|v| v.abs() < 1e-3), "{values:?}");
        }
    }

    #[test]
    fn stirling_degenerate_corner() {
        let cycle = stirling_cycle(1.0, 5.0, 1.0, 2.0, 5).unwrap();
        assert!(cycle.segments[1].chord.is_none());
        assert_eq!(cycle.segments[1].form_sign, FormSign::Zero);
        assert!(stirling_cycle(1.0, 5.0, 2.0, 1.0, 5).is_err());
    }
}
