//! Reeb chords between equilibrium Legendrians.
//!
//! A chord is a vertical segment `{(p, q)} × [z_start, z_end]` joining two
//! Legendrians. For graphical Legendrians `{z = f_i, p = f_i'}` chords sit at
//! the critical points of the difference `ψ = f_1 - f_0`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoError};
use crate::models::{
    cw_from_barred, difference_front, gas_from_barred, phi_cw, phi_gas, FrontFunction, ModelKind,
};
use crate::phase_space::ReducedPoint;
use crate::roots::{bisect, golden_min, linspace};

/// Chords shorter than this are intersections of the Legendrians, not chords.
pub const TRIVIALITY_THRESHOLD: f64 = 1e-10;

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub q: f64,
    pub p: f64,
    pub z_start: f64,
    pub z_end: f64,
    pub length: f64,
    pub direction: i8,
    /// Double root of `ψ'`: the chord sits at a bifurcation of the chord count.
    #[serde(default, skip_serializing_if = "is_false")]
    pub tangential: bool,
}

impl Chord {
    fn between(q: f64, p: f64, z_start: f64, z_end: f64) -> Self {
        Chord {
            q,
            p,
            z_start,
            z_end,
            length: (z_end - z_start).abs(),
            direction: if z_end >= z_start { 1 } else { -1 },
            tangential: false,
        }
    }

    pub fn start(&self) -> ReducedPoint {
        ReducedPoint::scalar(self.z_start, self.p, self.q)
    }

    pub fn end(&self) -> ReducedPoint {
        ReducedPoint::scalar(self.z_end, self.p, self.q)
    }

    /// Maps a chord found in the barred gas chart back to `(z, p, q)`.
    pub fn unbar_gas(&self, t0: f64) -> Result<Chord> {
        let a = gas_from_barred(&self.start(), t0)?;
        let b = gas_from_barred(&self.end(), t0)?;
        Ok(Chord {
            tangential: self.tangential,
            ..Chord::between(a.q[0], a.p[0], a.z, b.z)
        })
    }

    /// Maps a chord found in the barred Curie-Weiss chart back to `(z, p, q)`.
    pub fn unbar_cw(&self, t0: f64, b: f64) -> Result<Chord> {
        let s = cw_from_barred(&self.start(), t0, b)?;
        let e = cw_from_barred(&self.end(), t0, b)?;
        Ok(Chord {
            tangential: self.tangential,
            ..Chord::between(s.q[0], s.p[0], s.z, e.z)
        })
    }
}

/// Chord from `Λ(T0, 0)` to `Λ(T1, c)` for the gas, in closed form.
///
/// Sits at volume `v = (T1 - T0) / c` and pressure `P0 = c T0 / (T1 - T0)`;
/// `z` runs from `T0 ln v` to `T1 ln v`.
pub fn gas_chord(t0: f64, t1: f64, c: f64) -> Result<Chord> {
    if !(t0 > 0.0) || !(t1 > t0) || !(c > 0.0) || !t1.is_finite() || !c.is_finite() {
        return Err(ThermoError::invalid(format!(
            "gas chord needs T1 > T0 > 0 and c > 0, got T0 = {t0}, T1 = {t1}, c = {c}"
        )));
    }
    let v = (t1 - t0) / c;
    let p0 = c * t0 / (t1 - t0);
    let chord = Chord::between(-p0, v, t0 * v.ln(), t1 * v.ln());
    if chord.length <= TRIVIALITY_THRESHOLD {
        return Err(ThermoError::Degenerate(format!(
            "c = T1 - T0 gives v = 1 and a zero-length chord (length {})",
            chord.length
        )));
    }
    Ok(chord)
}

/// Chord from `Λ(T0, 0)` to `Λ(T1, c)` for the Curie-Weiss magnet.
///
/// Projects to `p = tanh(c / (T1 - T0))`, `q = c T0 / (T1 - T0) - b p`.
pub fn cw_chord(t0: f64, t1: f64, c: f64, b: f64) -> Result<Chord> {
    if !(t0 > 0.0) || !(t1 >= t0) || !(b > 0.0) || !t1.is_finite() || !c.is_finite() {
        return Err(ThermoError::invalid(format!(
            "Curie-Weiss chord needs T1 >= T0 > 0 and b > 0, got T0 = {t0}, T1 = {t1}, b = {b}"
        )));
    }
    if t1 == t0 {
        return Err(ThermoError::Degenerate(if c == 0.0 {
            "identical temperatures and no field jump: no chord data".to_string()
        } else {
            "identical temperatures: the Legendrians are parallel translates with no chord".to_string()
        }));
    }
    let ratio = c / (t1 - t0);
    let p = ratio.tanh();
    let big_q = c * t0 / (t1 - t0);
    let q = big_q - b * p;
    let z_start = phi_cw(t0, big_q) - 0.5 * b * p * p;
    let z_end = phi_cw(t1, big_q + c) - 0.5 * b * p * p;
    Ok(Chord::between(q, p, z_start, z_end))
}

/// Critical points of `ψ = f1 - f0` on `[scan_lo, scan_hi]`, as chords from
/// the graph of `f0` to the graph of `f1`.
///
/// Sign changes of `ψ'` on a uniform grid of `grid_n` nodes are refined by
/// bisection until the bracket collapses. Grid nodes where `ψ'` has a local extremum of
/// `|ψ'|` without a sign change are refined by golden-section search and
/// reported with `tangential = true` when `|ψ'|` reaches `tol`. Roots with
/// `|ψ|` below [`TRIVIALITY_THRESHOLD`] are intersections and are dropped.
/// Features whose neighbouring `|ψ'|` values are within rounding of the
/// fronts' slope scales (see [`FrontFunction::slope_scale`]) are treated as
/// noise (saturated tails) and ignored, as are `|ψ'|` dips shallower than
/// that floor. `tol`
/// also decides when the whole family is degenerate (`|ψ'| < tol`
/// everywhere).
pub fn find_chords(
    f0: &FrontFunction,
    f1: &FrontFunction,
    scan_lo: f64,
    scan_hi: f64,
    grid_n: usize,
    tol: f64,
) -> Result<Vec<Chord>> {
    if grid_n < 3 {
        return Err(ThermoError::invalid("chord scan needs at least 3 grid nodes"));
    }
    if !(scan_lo < scan_hi) || !(tol > 0.0) {
        return Err(ThermoError::invalid("chord scan needs scan_lo < scan_hi and tol > 0"));
    }
    for f in [f0, f1] {
        let (lo, hi) = f.domain();
        if !(lo < scan_lo && scan_hi < hi) {
            return Err(ThermoError::Domain {
                what: "chord scan interval",
                x: if lo >= scan_lo { scan_lo } else { scan_hi },
                lo,
                hi,
            });
        }
    }
    let dpsi = |x: f64| f1.derivative(x).unwrap_or(f64::NAN) - f0.derivative(x).unwrap_or(f64::NAN);
    let grid = linspace(scan_lo, scan_hi, grid_n);
    let d: Vec<f64> = grid.iter().map(|&x| dpsi(x)).collect();
    let floor = grid
        .iter()
        .map(|&x| Ok(16.0 * f64::EPSILON * (f0.slope_scale(x)? + f1.slope_scale(x)?)))
        .collect::<Result<Vec<f64>>>()?;
    if d.iter().any(|v| !v.is_finite()) {
        return Err(ThermoError::invalid("difference front derivative is not finite on the scan grid"));
    }
    if d.iter().all(|v| v.abs() < tol) {
        return Err(ThermoError::DegenerateFamily);
    }

    // |ψ'| within a few ulps of the slopes it is made of is rounding noise,
    // e.g. where both fronts have saturated to the same slope
    let significant = |i: usize| d[i].abs() > floor[i];
    let mut roots: Vec<(f64, bool)> = Vec::new();
    for i in 0..grid_n {
        let interior = i > 0 && i + 1 < grid_n;
        if d[i] == 0.0 {
            if interior && d[i - 1] != 0.0 && d[i + 1] != 0.0 && (significant(i - 1) || significant(i + 1)) {
                roots.push((grid[i], (d[i - 1] > 0.0) == (d[i + 1] > 0.0)));
            }
            continue;
        }
        if i + 1 < grid_n && d[i + 1] != 0.0 && (d[i] > 0.0) != (d[i + 1] > 0.0) {
            if significant(i) || significant(i + 1) {
                roots.push((bisect(dpsi, grid[i], grid[i + 1], 0.0, 0.0), false));
            }
            continue;
        }
        let local_min = interior
            && significant(i - 1)
            && significant(i + 1)
            && (d[i] > 0.0) == (d[i - 1] > 0.0)
            && (d[i] > 0.0) == (d[i + 1] > 0.0)
            && d[i].abs() <= d[i - 1].abs()
            && d[i].abs() <= d[i + 1].abs()
            // a flat step of a rounded, monotone tail is not a dip
            && d[i - 1].abs().max(d[i + 1].abs()) - d[i].abs() > floor[i];
        if local_min {
            let x = golden_min(|x| dpsi(x).abs(), grid[i - 1], grid[i + 1], 1e-14 * grid[i].abs().max(1.0));
            if dpsi(x).abs() < tol {
                roots.push((x, true));
            }
        }
    }

    let mut chords = Vec::with_capacity(roots.len());
    for (x, tangential) in roots {
        let (z0, p0) = f0.eval(x)?;
        let z1 = f1.value(x)?;
        let chord = Chord {
            tangential,
            ..Chord::between(x, p0, z0, z1)
        };
        if chord.length > TRIVIALITY_THRESHOLD {
            chords.push(chord);
        }
    }
    Ok(chords)
}

/// Generic-finder cross-check for a model pair: scans the barred difference
/// front and maps the chords back to `(z, p, q)`.
#[allow(clippy::too_many_arguments)]
pub fn find_model_chords(
    model: ModelKind,
    t0: f64,
    t1: f64,
    c: f64,
    b: Option<f64>,
    scan: (f64, f64),
    grid_n: usize,
    tol: f64,
) -> Result<Vec<Chord>> {
    let psi = difference_front(model, t0, t1, c, b)?;
    let barred = find_chords(&FrontFunction::zero(), &psi, scan.0, scan.1, grid_n, tol)?;
    barred
        .iter()
        .map(|ch| match model {
            ModelKind::Gas => ch.unbar_gas(t0),
            ModelKind::Cw => ch.unbar_cw(t0, b.unwrap_or(1.0)),
        })
        .collect()
}

/// Default scan window for the barred difference fronts of a model pair.
pub fn default_scan(model: ModelKind, t0: f64, t1: f64, c: f64) -> (f64, f64) {
    match model {
        ModelKind::Gas => {
            let hi = c.min(0.0);
            let q_star = -c.abs() * t0 / (t1 - t0);
            let span = 20.0 * q_star.abs().max(1.0);
            (hi - span, hi - 1e-6 * q_star.abs().max(1e-3))
        }
        ModelKind::Cw => {
            let q_star = c * t0 / (t1 - t0);
            let span = 20.0 * (q_star.abs() + t1 + c.abs());
            (-span, span)
        }
    }
}

/// `z` at which the graph of the gas front `φ_T(q - P_back)` sits; used by
/// chord endpoint checks.
pub fn gas_front_value(temperature: f64, p_back: f64, q: f64) -> f64 {
    phi_gas(temperature, q - p_back)
}
