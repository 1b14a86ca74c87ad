//! Executable invariant suite backing the `verify` command.
//!
//! Each check returns a [`CheckOutcome`]; random draws come from a seeded
//! generator so a run is reproducible.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::chords::{cw_chord, default_scan, find_chords, find_model_chords, gas_chord};
use crate::error::Result;
use crate::microstate::{
    entropy, free_energy, gibbs, pressures, variational_derivative, AffineHamiltonian, Density, MicrostateSpace,
};
use crate::models::{
    cw_coupling_derivatives, cw_dz_dt, cw_magnetization_roots, cw_point_from_p, cw_to_barred, cw_z,
    difference_front, gas_to_barred, phi_gas, phi_gas_prime, CurieWeissParams, FrontFunction, ModelKind,
};
use crate::phase_space::{
    admissibility_decrement, check_path_nonnegative, eval_extended_form, reduce_path, ExtendedPoint,
    ExtendedVelocity, ReducedPoint, ReductionSpec, SampledPath,
};
use crate::processes::{
    fokker_planck_relax, relaxation_rate_bound, run_slow_isotopy, Schedule, SlowModel, TemperatureProfile,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&mut StdRng) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 10] = [
    ("ideal-gas chord", gas_chord_check),
    ("Curie-Weiss chord", cw_chord_check),
    ("thermodynamic identities", identities_check),
    ("Gibbs minimality and stationarity", gibbs_check),
    ("contact-form preservation of barred charts", barred_check),
    ("Fokker-Planck contract", fokker_planck_check),
    ("reduction soundness", reduction_check),
    ("slow-process fixed point", slow_fixed_point_check),
    ("monotonicity of z in T and b", monotonicity_check),
    ("chord orientation under heating", chord_direction_check),
];

pub const DEFAULT_SEED: u64 = 20_240_611;

pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = StdRng::seed_from_u64(seed.wrapping_add(i as u64));
            let (passed, detail) = match check(&mut rng) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome {
                id: i as u32 + 1,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn gas_chord_check(_: &mut StdRng) -> Result<(bool, String)> {
    let chord = gas_chord(1.0, 5.0, 2.0)?;
    let closed = -chord.q == 0.5 && chord.p == 2.0;
    let psi = difference_front(ModelKind::Gas, 1.0, 5.0, 2.0, None)?;
    let scan = default_scan(ModelKind::Gas, 1.0, 5.0, 2.0);
    let found = find_chords(&FrontFunction::zero(), &psi, scan.0, scan.1, 4000, 1e-13)?;
    let q_err = found.first().map_or(f64::INFINITY, |c| (c.q + 0.5).abs());
    let len_err = (chord.length - 4.0 * 2f64.ln()).abs();
    Ok((
        closed && found.len() == 1 && q_err < 1e-8 && len_err < 1e-12,
        format!("P0={}, v={}, |qbar+0.5|={q_err:.2e}, |L-4ln2|={len_err:.2e}", -chord.q, chord.p),
    ))
}

fn cw_chord_check(_: &mut StdRng) -> Result<(bool, String)> {
    let (t0, t1, c, b) = (2.0, 10.0 / 3.0, 1.0, 1.0);
    let chord = cw_chord(t0, t1, c, b)?;
    let p_err = (chord.p - 0.75f64.tanh()).abs();
    let big_q = chord.q + b * chord.p;
    let psi = difference_front(ModelKind::Cw, t0, t1, c, Some(b))?;
    let found = find_chords(&FrontFunction::zero(), &psi, -50.0, 50.0, 4000, 1e-13)?;
    let finder_err = found.first().map_or(f64::INFINITY, |ch| (ch.q - 1.5).abs());
    let asym = (psi.value(50.0)? - 1.0).abs().max((psi.value(-50.0)? + 1.0).abs());
    Ok((
        p_err < 1e-14 && (big_q - 1.5).abs() < 1e-12 && found.len() == 1 && finder_err < 1e-8 && asym < 1e-6,
        format!("|p-tanh(0.75)|={p_err:.2e}, Q*={big_q}, |Qfound-1.5|={finder_err:.2e}, asymptote err={asym:.2e}"),
    ))
}

/// Random affine system with weights in `[1, 3)`, so densities stay `<= 1`.
pub fn random_system(rng: &mut StdRng, max_states: usize, max_intensive: usize) -> Result<(MicrostateSpace, AffineHamiltonian)> {
    let m = rng.random_range(2..=max_states);
    let n = rng.random_range(1..=max_intensive);
    let weights = (0..m).map(|_| rng.random_range(1.0..3.0)).collect();
    let v_int = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let v_bar = (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    Ok((MicrostateSpace::with_weights(weights)?, AffineHamiltonian::new(v_int, v_bar)?))
}

fn identities_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let h_fd = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (sp, h) = random_system(rng, 64, 3)?;
        let t = rng.random_range(0.5..2.0);
        let q: Vec<f64> = (0..h.n_intensive()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g_star = |t: f64, q: &[f64]| gibbs(&sp, &h, t, q).map(|g| g.free_energy(t));
        let eq = gibbs(&sp, &h, t, &q)?;
        let s = entropy(&sp, &eq.rho_g);
        let dg_dt = (g_star(t + h_fd, &q)? - g_star(t - h_fd, &q)?) / (2.0 * h_fd);
        worst = worst.max((s + dg_dt).abs());
        let p = pressures(&sp, &h, &eq.rho_g)?;
        for j in 0..q.len() {
            let (mut up, mut dn) = (q.clone(), q.clone());
            up[j] += h_fd;
            dn[j] -= h_fd;
            let dg_dq = (g_star(t, &up)? - g_star(t, &dn)?) / (2.0 * h_fd);
            worst = worst.max((p[j] + dg_dq).abs());
        }
    }
    Ok((worst < 1e-6, format!("max identity residual {worst:.2e} over 100 systems")))
}

fn random_density(rng: &mut StdRng, sp: &MicrostateSpace) -> Result<Density> {
    let sparse = rng.random_bool(0.2);
    let raw: Vec<f64> = (0..sp.len())
        .map(|_| {
            if sparse && rng.random_bool(0.5) {
                0.0
            } else {
                -rng.random_range(1e-12f64..1.0).ln()
            }
        })
        .collect();
    if raw.iter().all(|r| *r == 0.0) {
        return Ok(Density::uniform(sp));
    }
    Density::normalized(sp, raw)
}

fn gibbs_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let mut worst_gap = f64::INFINITY;
    let mut worst_spread: f64 = 0.0;
    for _ in 0..100 {
        let (sp, h) = random_system(rng, 64, 3)?;
        let t = rng.random_range(0.5..2.0);
        let q: Vec<f64> = (0..h.n_intensive()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let eq = gibbs(&sp, &h, t, &q)?;
        let g_min = free_energy(&sp, &h, t, &q, &eq.rho_g)?;
        for _ in 0..1000 {
            let rho = random_density(rng, &sp)?;
            worst_gap = worst_gap.min(free_energy(&sp, &h, t, &q, &rho)? - g_min);
        }
        let g = variational_derivative(&sp, &h, t, &q, &eq.rho_g)?;
        let spread = g.iter().copied().fold(f64::NEG_INFINITY, f64::max) - g.iter().copied().fold(f64::INFINITY, f64::min);
        worst_spread = worst_spread.max(spread);
    }
    Ok((
        worst_gap >= -1e-12 && worst_spread < 1e-9,
        format!("min G(rho)-G(rho_G) = {worst_gap:.2e}, max spread {worst_spread:.2e}"),
    ))
}

/// Smooth random curve `t ↦ (z, p, q)` built from a few sines.
struct Curve {
    coeffs: [[f64; 4]; 3],
    offset: [f64; 3],
}

impl Curve {
    fn random(rng: &mut StdRng, offset: [f64; 3]) -> Self {
        let mut coeffs = [[0.0; 4]; 3];
        for row in &mut coeffs {
            for c in row.iter_mut() {
                *c = rng.random_range(-0.5..0.5);
            }
        }
        Curve { coeffs, offset }
    }

    fn at(&self, t: f64) -> [f64; 3] {
        let mut out = self.offset;
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o += c[0] * (1.3 * t).sin() + c[1] * (2.7 * t + c[2]).cos() * 0.5 + c[3] * t;
        }
        out
    }

    fn velocity(&self, t: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o = c[0] * 1.3 * (1.3 * t).cos() - c[1] * 2.7 * (2.7 * t + c[2]).sin() * 0.5 + c[3];
        }
        out
    }
}

fn barred_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let h = 1e-5;
    let mut worst_form: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for i in 0..100 {
        let t0 = rng.random_range(0.5..3.0);
        let b = rng.random_range(0.2..2.0);
        let gas = i % 2 == 0;
        let curve = if gas {
            Curve::random(rng, [0.0, 1.0, -2.0])
        } else {
            Curve::random(rng, [0.0, 0.0, 0.0])
        };
        let map = |t: f64| -> Result<ReducedPoint> {
            let [z, p, q] = curve.at(t);
            let pt = ReducedPoint::scalar(z, p, q);
            if gas {
                gas_to_barred(&pt, t0)
            } else {
                cw_to_barred(&pt, t0, b)
            }
        };
        for k in 0..20 {
            let t = k as f64 / 19.0;
            let [_, p, _] = curve.at(t);
            let [dz, _, dq] = curve.velocity(t);
            let original = dz - p * dq;
            let (a, c) = (map(t + h)?, map(t - h)?);
            let mid = map(t)?;
            let big_dz = (a.z - c.z) / (2.0 * h);
            let big_dq = (a.q[0] - c.q[0]) / (2.0 * h);
            worst_form = worst_form.max((big_dz - mid.p[0] * big_dq - original).abs());
        }
        for k in 0..20 {
            let x = -3.0 + 6.0 * k as f64 / 19.0;
            let barred = if gas {
                let q = -(x.abs() + 0.05);
                gas_to_barred(&ReducedPoint::scalar(phi_gas(t0, q), phi_gas_prime(t0, q), q), t0)?
            } else {
                let p = (x / 3.1).clamp(-0.99, 0.99);
                let pt = cw_point_from_p(p, CurieWeissParams::new(t0, 0.0, b)?)?;
                cw_to_barred(&ReducedPoint::scalar(pt.z, pt.p, pt.q), t0, b)?
            };
            worst_zero = worst_zero.max(barred.z.abs()).max(barred.p[0].abs());
        }
    }
    Ok((
        worst_form < 1e-8 && worst_zero < 1e-10,
        format!("max form mismatch {worst_form:.2e}, max zero-section residual {worst_zero:.2e}"),
    ))
}

fn fokker_planck_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let mut worst_mass: f64 = 0.0;
    let mut worst_increment = f64::NEG_INFINITY;
    let mut worst_form = f64::INFINITY;
    let mut worst_tv: f64 = 0.0;
    for _ in 0..50 {
        let (sp, h) = random_system(rng, 8, 1)?;
        let q = [rng.random_range(-1.0..1.0)];
        let t0 = rng.random_range(0.5..1.5);
        let t1 = t0 + rng.random_range(0.0..1.0);
        let (profile, settle) = if rng.random_bool(0.5) {
            let duration = rng.random_range(0.5..3.0);
            (TemperatureProfile::Ramp { t0, t1, duration }, duration)
        } else {
            let tau = rng.random_range(0.2..1.0);
            // by 40 tau the remaining drift is below e^-40
            (TemperatureProfile::Relaxing { t0, t_inf: t1, tau }, 40.0 * tau)
        };
        let raw: Vec<f64> = (0..sp.len()).map(|_| rng.random_range(0.05..1.0)).collect();
        let rho0 = Density::normalized(&sp, raw)?;
        let rate = relaxation_rate_bound(&sp, &h, t1, &q)?;
        let t_end = settle + 50.0 / rate;
        let trace = fokker_planck_relax(&sp, &h, &q, profile, &rho0, 0.1, t_end)?;
        worst_mass = worst_mass.max(trace.max_mass_error(&sp));
        worst_increment = worst_increment.max(trace.g_frozen_increments.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        worst_form = worst_form.min(trace.form_values.iter().copied().fold(f64::INFINITY, f64::min));
        let target = gibbs(&sp, &h, profile.at(t_end), &q)?;
        worst_tv = worst_tv.max(trace.terminal_density().total_variation(&sp, &target.rho_g));
    }
    Ok((
        worst_mass < 1e-10 && worst_increment <= 1e-12 && worst_form >= -1e-8 && worst_tv < 1e-6,
        format!(
            "mass err {worst_mass:.2e}, max frozen dG {worst_increment:.2e}, min form {worst_form:.2e}, terminal TV {worst_tv:.2e}"
        ),
    ))
}

/// Flat finite-difference velocity converted to an extended velocity.
fn extended_velocity(flat: &[f64], n: usize) -> ExtendedVelocity {
    ExtendedVelocity {
        dz: flat[0],
        d_entropy: flat[1],
        d_temperature: flat[2],
        dp: flat[3..3 + n].to_vec(),
        dq: flat[3 + n..].to_vec(),
    }
}

/// Random extended path satisfying the reduction hypotheses, together with
/// its reduction spec. `None` when the discrete hypotheses fail.
fn random_admissible_path(rng: &mut StdRng) -> Result<Option<(SampledPath<ExtendedPoint>, ReductionSpec)>> {
    let n = rng.random_range(1..=3usize);
    let k = rng.random_range(1..=n);
    let mut frozen = Vec::new();
    let mut zeroed = Vec::new();
    for i in k..n {
        if rng.random_bool(0.5) {
            frozen.push((i, rng.random_range(-1.0..1.0)));
        } else {
            zeroed.push(i);
        }
    }
    let spec = ReductionSpec {
        k,
        frozen: frozen.clone(),
        zeroed: zeroed.clone(),
        temperature: None,
        tol: 1e-9,
    };
    let quad = |rng: &mut StdRng| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let p_coef: Vec<[f64; 3]> = (0..n).map(|_| quad(rng)).collect();
    let q_coef: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let c = quad(rng);
            match frozen.iter().find(|(j, _)| *j == i) {
                Some((_, v)) => [*v, 0.0, 0.0],
                None => c,
            }
        })
        .collect();
    let (t_a, t_b) = (rng.random_range(0.5..2.0), rng.random_range(0.0..1.0));
    let (s_a, s_b) = (rng.random_range(0.0..2.0), rng.random_range(0.0..1.0));
    let margin = rng.random_range(0.01..1.0);
    let poly = |c: &[f64; 3], t: f64| c[0] + c[1] * t + c[2] * t * t;
    let dpoly = |c: &[f64; 3], t: f64| c[1] + 2.0 * c[2] * t;
    let p_at = |i: usize, t: f64| if zeroed.contains(&i) { 0.0 } else { poly(&p_coef[i], t) };
    // ż = S Ṫ + Σ p q̇ + margin, integrated with Simpson's rule (exact for
    // the polynomial integrand degree)
    let rate = |t: f64| {
        (s_a + s_b * t * t) * t_b + (0..n).map(|i| p_at(i, t) * dpoly(&q_coef[i], t)).sum::<f64>() + margin
    };
    let samples = 201;
    let times: Vec<f64> = (0..samples).map(|i| i as f64 / (samples - 1) as f64).collect();
    let mut z = 0.0;
    let mut points = Vec::with_capacity(samples);
    for (idx, &t) in times.iter().enumerate() {
        if idx > 0 {
            let a = times[idx - 1];
            z += (t - a) / 6.0 * (rate(a) + 4.0 * rate(0.5 * (a + t)) + rate(t));
        }
        points.push(ExtendedPoint::new(
            z,
            s_a + s_b * t * t,
            t_a + t_b * t,
            (0..n).map(|i| p_at(i, t)).collect(),
            (0..n).map(|i| poly(&q_coef[i], t)).collect(),
        )?);
    }
    let path = SampledPath::new(times, points)?;
    let velocities = path.velocities();
    for (pt, v) in path.points().iter().zip(&velocities) {
        let v = extended_velocity(v, n);
        if eval_extended_form(pt, &v)? < 0.0 || admissibility_decrement(pt, &v, &spec)? < 0.0 {
            return Ok(None);
        }
    }
    Ok(Some((path, spec)))
}

fn reduction_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 1000 && attempts < 10_000 {
        attempts += 1;
        let Some((path, spec)) = random_admissible_path(rng)? else {
            continue;
        };
        accepted += 1;
        let reduced = reduce_path(&path, &spec)?;
        worst = worst.min(check_path_nonnegative(&reduced, 1e-9)?.min_form_value);
    }
    Ok((
        accepted == 1000 && worst >= -1e-9,
        format!("{accepted} admissible paths ({attempts} drawn), min reduced form {worst:.2e}"),
    ))
}

fn slow_fixed_point_check(_: &mut StdRng) -> Result<(bool, String)> {
    let sched = Schedule::linear(1.0, (1.0, 5.0), (0.0, 2.0), 101)?;
    let xs: Vec<f64> = (1..=40).map(|i| -0.1 * i as f64).collect();
    let trace = run_slow_isotopy(SlowModel::Gas, &sched, &xs, 1e-8)?;
    let slice_err = (0..sched.len())
        .map(|i| trace.slice_projection_residual(i, 2.0, -0.5))
        .fold(0.0, f64::max);
    let idx = xs.iter().position(|x| (*x + 0.5).abs() < 1e-12).unwrap_or(4);
    let path = &trace.paths[idx];
    let mut z_err: f64 = 0.0;
    let mut pq_err: f64 = 0.0;
    for (t, pt) in path.times().iter().zip(path.points()) {
        z_err = z_err.max((pt.z - (1.0 + 4.0 * t) * 2f64.ln()).abs());
        pq_err = pq_err.max((pt.p[0] - 2.0).abs()).max((pt.q[0] + 0.5).abs());
    }
    let slice = trace.max_slice_residual();
    Ok((
        slice_err < 1e-9 && pq_err < 1e-9 && z_err < 1e-10 && slice < 1e-8,
        format!("(2,-0.5) slice residual {slice_err:.2e}, chord path (p,q) err {pq_err:.2e}, z err {z_err:.2e}"),
    ))
}

fn monotonicity_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let b = 1.0;
    let mut min_dz_dt = f64::INFINITY;
    let mut fd_err: f64 = 0.0;
    for i in 0..100 {
        let a = -10.0 + 20.0 * i as f64 / 99.0;
        for j in 0..100 {
            let t = 0.2 + 4.8 * j as f64 / 99.0;
            let d = cw_dz_dt(0.0, a, t, b)?;
            min_dz_dt = min_dz_dt.min(d);
            let par = |t| CurieWeissParams::new(t, 0.0, b);
            let h = 1e-5;
            let fd = (cw_z(0.0, a, par(t + h)?) - cw_z(0.0, a, par(t - h)?)) / (2.0 * h);
            fd_err = fd_err.max((d - fd).abs());
        }
    }
    let mut db_err: f64 = 0.0;
    let mut min_deriv = f64::INFINITY;
    let mut draws = 0;
    while draws < 100 {
        let p: f64 = rng.random_range(0.05..0.95);
        let t = rng.random_range(0.3..3.0);
        let b = rng.random_range(0.1..2.0);
        let q = t * p.atanh() - b * p;
        if q < 0.0 {
            continue;
        }
        draws += 1;
        let d = cw_coupling_derivatives(p, t, q)?;
        min_deriv = min_deriv.min(d.dz_db).min(d.db_dp);
        let z_of_b = |bb: f64| -> Result<f64> {
            let roots = cw_magnetization_roots(q, CurieWeissParams::new(t, 0.0, bb)?);
            let near = roots
                .iter()
                .min_by(|x, y| (x.p - p).abs().total_cmp(&(y.p - p).abs()))
                .map(|r| r.z)
                .unwrap_or(f64::NAN);
            Ok(near)
        };
        let h = 1e-5;
        let fd = (z_of_b(b + h)? - z_of_b(b - h)?) / (2.0 * h);
        db_err = db_err.max((fd - d.dz_db).abs());
    }
    Ok((
        min_dz_dt > 0.0 && fd_err < 1e-6 && db_err < 1e-5 && min_deriv > 0.0,
        format!(
            "min dz/dT {min_dz_dt:.2e}, dz/dT FD err {fd_err:.2e}, dz/db FD err {db_err:.2e}, min coupling derivative {min_deriv:.2e}"
        ),
    ))
}

fn chord_direction_check(rng: &mut StdRng) -> Result<(bool, String)> {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t0 = rng.random_range(0.5..3.0);
        let t1 = t0 + rng.random_range(0.2..3.0);
        // gas pair: v >= 1 keeps the heating isotopy non-negative
        let v = rng.random_range(1.05..5.0);
        let c = (t1 - t0) / v;
        let closed = gas_chord(t0, t1, c)?;
        let found = find_model_chords(ModelKind::Gas, t0, t1, c, None, default_scan(ModelKind::Gas, t0, t1, c), 4000, 1e-13)?;
        match found.as_slice() {
            [ch] if ch.direction == 1 => worst = worst.max((ch.p - closed.p).abs() / closed.p),
            _ => failures += 1,
        }
        // |c| / (T1 - T0) <= 6 keeps the chord's p resolvable from ±1
        let c = rng.random_range(-6.0..6.0) * (t1 - t0);
        let b = rng.random_range(0.2..2.0);
        let closed = cw_chord(t0, t1, c, b)?;
        let found = find_model_chords(ModelKind::Cw, t0, t1, c, Some(b), default_scan(ModelKind::Cw, t0, t1, c), 4000, 1e-13)?;
        match found.as_slice() {
            [ch] if ch.direction == 1 => worst = worst.max((ch.p - closed.p).abs()),
            _ => failures += 1,
        }
    }
    Ok((
        failures == 0 && worst < 1e-8,
        format!("{failures} draws without a single positive chord, max deviation from closed form {worst:.2e}"),
    ))
}
